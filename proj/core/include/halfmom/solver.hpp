#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "halfmom/errors.hpp"
#include "halfmom/exp_poly.hpp"
#include "halfmom/grid_func.hpp"
#include "halfmom/moment_system.hpp"
#include "halfmom/subspace.hpp"
#include "halfmom/wellposedness.hpp"

namespace halfmom {

/// Adapters making the two function representations interchangeable in
/// the generic solve: exp-poly (exact) and sampled-grid (fallback).
template <class F>
struct FuncTraits;

template <>
struct FuncTraits<ExpPolyVec> {
  static ExpPolyVec zero(const ExpPolyVec&, int dim) {
    return ExpPolyVec::zero(dim);
  }
  static ExpPolyVec exponential(const ExpPolyVec&, const Eigen::VectorXd& c,
                                double rate) {
    return ExpPolyVec::exponential(c, rate);
  }
  static double max_abscissa(const ExpPolyVec&) {
    return std::numeric_limits<double>::infinity();
  }
};

template <>
struct FuncTraits<GridVec> {
  static GridVec zero(const GridVec& like, int dim) {
    return GridVec::zero(like.grid(), dim);
  }
  static GridVec exponential(const GridVec& like, const Eigen::VectorXd& c,
                             double rate) {
    return GridVec::exponential(like.grid(), c, rate);
  }
  static double max_abscissa(const GridVec& like) {
    return like.max_abscissa();
  }
};

template <class F>
struct HalfspaceSolution {
  F W, V1W, V2W, V3W;
  Eigen::VectorXd z_plus0, z_zero0, z_minus0;
  double weight = 0.0;
  double norm_W_a = 0.0;
  double norm_h_a = 0.0;
  double norm_g = 0.0;
  double residual_sup = 0.0;
  double h_sup = 0.0;  // max ||h(y)||_inf over the residual grid
};

/// ratio ||W||_a / (||h||_a + ||g||); 0 for the all-zero instance.
template <class F>
double verify_estimate(const HalfspaceSolution<F>& sol) {
  const double denom = sol.norm_h_a + sol.norm_g;
  if (denom == 0.0) {
    if (sol.norm_W_a > 0.0)
      throw StructureError("verify_estimate: nonzero W from zero data");
    return 0.0;
  }
  return sol.norm_W_a / denom;
}

/// A21 V1W(0) + A23 V3W(0); bounded by the h-norm independently of g.
template <class F>
Eigen::VectorXd bounded_trace_combination(const SubspaceDecomposition& dec,
                                          const HalfspaceSolution<F>& sol) {
  return dec.A21 * sol.V1W.eval(0.0) + dec.A23 * sol.V3W.eval(0.0);
}

/// Closed-form solve of A W' = -Q W + h, W(inf) = 0, with the square
/// boundary condition B V3^T W(0) = g (B has n_plus rows).
template <class F>
HalfspaceSolution<F> solve(const MomentSystem& sys,
                           const SubspaceDecomposition& dec,
                           const SpectralFactorization& spec,
                           const Eigen::MatrixXd& B, const Eigen::VectorXd& g,
                           const F& h, double a) {
  using Traits = FuncTraits<F>;
  const int N = dec.N;
  if (h.dim() != N) throw InvalidArgument("solve: h has wrong dimension");
  if (a <= 0.0) throw InvalidArgument("solve: weight a must be > 0");
  if (spec.lambda_max > 0.0 && a >= 1.0 / spec.lambda_max)
    throw WeightError("solve: weight a must be < 1/lambda_max");
  if (B.rows() != spec.n_plus || g.size() != spec.n_plus)
    throw InvalidArgument("solve: boundary condition must have n_plus rows");
  if (B.cols() != dec.dim3())
    throw InvalidArgument("solve: B column count must be N - p - r");

  HalfspaceSolution<F> sol;
  sol.weight = a;
  sol.norm_h_a = weighted_norm(h, a);
  sol.norm_g = g.norm();

  // (1) first p rows: G^T A W(y) = -int_y^inf G^T h, inverted through K.
  const Eigen::MatrixXd KinvT =
      Eigen::PartialPivLU<Eigen::MatrixXd>(dec.K.transpose())
          .solve(Eigen::MatrixXd::Identity(dec.p, dec.p));
  const F Gh = apply(dec.G.transpose(), h);
  sol.V2W = apply(KinvT, integrate_tail(Gh));
  const F V2Wp = apply(KinvT, Gh);

  // (2) reduced source h3 = Q33^{-1}(V3^T h - Q32 V2W - A32 V2W').
  const int d3 = dec.dim3();
  const Eigen::MatrixXd Q33inv =
      spec.L.transpose().template triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd(spec.L.template triangularView<Eigen::Lower>().solve(
              Eigen::MatrixXd::Identity(d3, d3))));
  const F h3 = apply(Q33inv, apply(dec.V3.transpose(), h) -
                                 apply(dec.Q32, sol.V2W) -
                                 apply(dec.A32, V2Wp));
  // T^{-1} = R^T L^T.
  const F ht = apply(spec.R.transpose() * spec.L.transpose(), h3);

  // (3) characteristic equations lambda_i z_i' = -z_i + ht_i.
  F z = Traits::zero(h, d3);
  sol.z_zero0 = Eigen::VectorXd::Zero(spec.n_zero);
  sol.z_minus0 = Eigen::VectorXd::Zero(spec.n_minus);
  for (int i = 0; i < spec.n_zero; ++i) {
    const int k = spec.n_plus + i;
    z += ht.component(k).promote(d3, k);
    sol.z_zero0(i) = ht.eval(0.0)(k);
  }
  std::vector<F> z_minus;
  for (int i = 0; i < spec.n_minus; ++i) {
    const int k = spec.n_plus + spec.n_zero + i;
    F zi = convolve_growth_tail(spec.lambda(k), ht.component(k));
    sol.z_minus0(i) = zi.eval(0.0)(0);
    z += zi.promote(d3, k);
  }

  Eigen::VectorXd z_plus0 = Eigen::VectorXd::Zero(spec.n_plus);
  if (spec.n_plus > 0) {
    const Eigen::MatrixXd BTp = B * spec.Tplus();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(BTp);
    const Eigen::VectorXd rhs = g -
                                (spec.n_zero ? Eigen::VectorXd(B * spec.Tzero() * sol.z_zero0)
                                             : Eigen::VectorXd::Zero(spec.n_plus)) -
                                (spec.n_minus ? Eigen::VectorXd(B * spec.Tminus() * sol.z_minus0)
                                              : Eigen::VectorXd::Zero(spec.n_plus));
    z_plus0 = lu.solve(rhs);
    const double recon = (BTp * z_plus0 - rhs).norm();
    if (!z_plus0.allFinite() || recon > 1e-8 * std::max(1.0, rhs.norm()))
      throw StructureError("solve: boundary system B T+ is singular");
    for (int i = 0; i < spec.n_plus; ++i) {
      const double lam = spec.lambda(i);
      Eigen::VectorXd e = Eigen::VectorXd::Zero(d3);
      e(i) = z_plus0(i);
      z += Traits::exponential(h, e, 1.0 / lam);
      z += convolve_decay(lam, ht.component(i)).promote(d3, i);
    }
  }
  sol.z_plus0 = z_plus0;
  sol.V3W = apply(spec.T, z);

  // (4) the r rows through A21 (invertible by the decomposition).
  const Eigen::MatrixXd A21inv =
      Eigen::PartialPivLU<Eigen::MatrixXd>(dec.A21).solve(
          Eigen::MatrixXd::Identity(dec.r, dec.r));
  if (dec.r > 0) {
    const F forcing = apply(dec.Q22, sol.V2W) + apply(dec.Q23, sol.V3W) -
                      apply(dec.U2.transpose(), h);
    sol.V1W = -1.0 * apply(A21inv * dec.A22, sol.V2W) -
              apply(A21inv * dec.A23, sol.V3W) -
              integrate_tail(apply(A21inv, forcing));
  } else {
    sol.V1W = Traits::zero(h, 0);
  }

  // (5) assemble and verify the residual on a layer-resolving grid.
  sol.W = apply(dec.V1, sol.V1W) + apply(dec.V2, sol.V2W) +
          apply(dec.V3, sol.V3W);
  sol.norm_W_a = weighted_norm(sol.W, a);

  double min_rate = sol.W.min_rate();
  if (!std::isfinite(min_rate) || min_rate <= 0.0) min_rate = 1.0;
  const double y_hi =
      std::min(20.0 / min_rate, Traits::max_abscissa(h));
  const F Wp = sol.W.derivative();
  sol.residual_sup = 0.0;
  sol.h_sup = 0.0;
  for (int i = 0; i <= 512; ++i) {
    const double y = y_hi * double(i) / 512.0;
    const Eigen::VectorXd res =
        sys.A * Wp.eval(y) + sys.Q * sol.W.eval(y) - h.eval(y);
    sol.residual_sup = std::max(sol.residual_sup,
                                res.cwiseAbs().maxCoeff());
    sol.h_sup = std::max(sol.h_sup, h.eval(y).cwiseAbs().maxCoeff());
  }
  return sol;
}

/// Result of the instability probe: a unit-a-norm source whose outgoing
/// trace z+(0) exceeds the target, with the growth along the profile
/// family phi_s(y) = sqrt(2(s-a)) exp(-s y).
struct WitnessResult {
  ExpPolyVec h;
  double s = 0.0;
  double z_plus0_norm = 0.0;
  std::vector<std::pair<double, double>> growth;  // (s, ||z+(0)||) samples
};

/// Source direction exciting only the zero-eigenvalue block: delta_h with
/// G^T delta_h = 0, U2^T delta_h = 0 and V3^T delta_h = Q33 T0 c0, so that
/// adding delta_h(y) = dir * exp(-rate y) to h perturbs h-tilde purely in
/// its n0 components.
ExpPolyVec pure_t0_source(const SubspaceDecomposition& dec,
                          const SpectralFactorization& spec,
                          const Eigen::VectorXd& c0, double rate);

std::optional<WitnessResult> instability_witness(
    const MomentSystem& sys, const SubspaceDecomposition& dec,
    const SpectralFactorization& spec, const Eigen::MatrixXd& B, double a,
    double target);

}  // namespace halfmom
