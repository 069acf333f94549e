#include "halfmom/solver.hpp"

namespace halfmom {

namespace {

// z+(0) forced by the (possibly rectangular) boundary operator B3 acting
// on the trace of the probe source, in the least-squares sense.
Eigen::VectorXd probe_zplus0(const SubspaceDecomposition& dec,
                             const SpectralFactorization& spec,
                             const Eigen::MatrixXd& B3, const ExpPolyVec& h) {
  const int d3 = dec.dim3();
  const Eigen::MatrixXd KinvT =
      Eigen::PartialPivLU<Eigen::MatrixXd>(dec.K.transpose())
          .solve(Eigen::MatrixXd::Identity(dec.p, dec.p));
  const ExpPolyVec Gh = apply(dec.G.transpose(), h);
  const ExpPolyVec V2W = apply(KinvT, integrate_tail(Gh));
  const ExpPolyVec V2Wp = apply(KinvT, Gh);
  const Eigen::MatrixXd Q33inv =
      spec.L.transpose().triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd(spec.L.triangularView<Eigen::Lower>().solve(
              Eigen::MatrixXd::Identity(d3, d3))));
  const ExpPolyVec h3 =
      apply(Q33inv, apply(dec.V3.transpose(), h) - apply(dec.Q32, V2W) -
                        apply(dec.A32, V2Wp));
  const ExpPolyVec ht = apply(spec.R.transpose() * spec.L.transpose(), h3);

  const Eigen::VectorXd ht0 = ht.eval(0.0);
  Eigen::VectorXd z00 = ht0.segment(spec.n_plus, spec.n_zero);
  Eigen::VectorXd zm0(spec.n_minus);
  for (int i = 0; i < spec.n_minus; ++i) {
    const int k = spec.n_plus + spec.n_zero + i;
    zm0(i) = convolve_growth_tail(spec.lambda(k), ht.component(k)).eval(0.0)(0);
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(B3.rows());
  if (spec.n_zero) rhs -= B3 * spec.Tzero() * z00;
  if (spec.n_minus) rhs -= B3 * spec.Tminus() * zm0;
  if (spec.n_plus == 0) return Eigen::VectorXd::Zero(0);
  return (B3 * spec.Tplus()).colPivHouseholderQr().solve(rhs);
}

}  // namespace

ExpPolyVec pure_t0_source(const SubspaceDecomposition& dec,
                          const SpectralFactorization& spec,
                          const Eigen::VectorXd& c0, double rate) {
  if (c0.size() != spec.n_zero)
    throw InvalidArgument("pure_t0_source: c0 must have n_zero entries");
  const Eigen::VectorXd w = dec.Q33 * (spec.Tzero() * c0);
  const int p = dec.p, r = dec.r;
  // [G, U2]^T [V1, V2] is invertible (it is a principal block of U^T V up
  // to the identity V3 row), so the even/degenerate content of V3 w can be
  // cancelled exactly.
  Eigen::MatrixXd lhs(p + r, r + p);
  lhs << dec.G.transpose() * dec.V1, dec.G.transpose() * dec.V2,
      dec.U2.transpose() * dec.V1, dec.U2.transpose() * dec.V2;
  Eigen::VectorXd rhs(p + r);
  rhs << -dec.G.transpose() * (dec.V3 * w),
      -dec.U2.transpose() * (dec.V3 * w);
  const Eigen::VectorXd beta =
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(lhs).solve(rhs);
  const Eigen::VectorXd dir =
      dec.V3 * w + dec.V1 * beta.head(r) + dec.V2 * beta.tail(p);
  return ExpPolyVec::exponential(dir, rate);
}

std::optional<WitnessResult> instability_witness(
    const MomentSystem& sys, const SubspaceDecomposition& dec,
    const SpectralFactorization& spec, const Eigen::MatrixXd& B, double a,
    double target) {
  (void)sys;
  if (spec.n_zero == 0 || spec.n_plus == 0) return std::nullopt;
  BoundaryOperator bc;
  bc.B3 = B;
  bc.g = Eigen::VectorXd::Zero(B.rows());
  const WellposednessVerdict verdict = check_general_bc(bc, spec);
  if (verdict.stable) return std::nullopt;

  // Candidate directions: h = V3 Q33 T0 c0 phi_s(y) per Lemma-type
  // construction, one probe per basis direction, best kept.
  std::vector<Eigen::VectorXd> dirs;
  for (int j = 0; j < spec.n_zero; ++j) {
    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(spec.n_zero);
    c0(j) = 1.0;
    Eigen::VectorXd v = dec.V3 * (dec.Q33 * (spec.Tzero() * c0));
    if (v.norm() > 1e-14) dirs.push_back(v / v.norm());
  }
  if (dirs.empty()) return std::nullopt;

  auto probe = [&](const Eigen::VectorXd& v, double s) {
    const double amp = std::sqrt(2.0 * (s - a));
    const ExpPolyVec h = ExpPolyVec::exponential(amp * v, s);
    return probe_zplus0(dec, spec, B, h).norm();
  };

  double s = a + 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    double best = -1.0;
    const Eigen::VectorXd* best_dir = nullptr;
    for (const auto& v : dirs) {
      const double n = probe(v, s);
      if (n > best) {
        best = n;
        best_dir = &v;
      }
    }
    if (best >= target && best_dir) {
      WitnessResult res;
      res.s = s;
      res.z_plus0_norm = best;
      res.h = ExpPolyVec::exponential(std::sqrt(2.0 * (s - a)) * (*best_dir),
                                      s);
      for (double sk : {s, 2.0 * s, 4.0 * s})
        res.growth.emplace_back(sk, probe(*best_dir, sk));
      return res;
    }
    s *= 2.0;
  }
  return std::nullopt;
}

}  // namespace halfmom
