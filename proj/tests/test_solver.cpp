#include <doctest.h>

#include <cmath>
#include <random>

#include "halfmom/moment_system.hpp"
#include "halfmom/solver.hpp"
#include "halfmom/subspace.hpp"

using namespace halfmom;

namespace {

struct Pipeline {
  MomentSystem sys;
  SubspaceDecomposition dec;
  SpectralFactorization spec;
};

Pipeline make_full(int M, double nu = 1.0,
                   SignConvention sign = SignConvention::positive_diagonal) {
  Pipeline p{build_full3d(M, nu), {}, {}};
  p.dec = build_decomposition(p.sys, sign);
  p.spec = spectral_factorization(p.dec);
  return p;
}

ExpPolyVec kramers_source() {
  ExpPolyVec h(3);
  h.add_component_term(1, 1.0, {1.0});  // h = (0, e^{-y}, 0)
  return h;
}

ExpPolyVec random_source(std::mt19937& rng, int dim, double rate_lo,
                         double rate_hi, int n_terms = 3) {
  std::uniform_real_distribution<double> rate(rate_lo, rate_hi);
  std::normal_distribution<double> coef;
  ExpPolyVec h(dim);
  for (int t = 0; t < n_terms; ++t) {
    Eigen::VectorXd c(dim);
    for (int i = 0; i < dim; ++i) c(i) = coef(rng);
    h += ExpPolyVec::exponential(c, rate(rng));
  }
  return h;
}

}  // namespace

TEST_CASE("kramers closed-form solution") {
  const MomentSystem sys = build_kramers3(1.0);
  const SubspaceDecomposition dec = build_decomposition(sys);
  const SpectralFactorization spec = spectral_factorization(dec);
  const auto sol = solve(sys, dec, spec, Eigen::MatrixXd::Zero(0, 1),
                         Eigen::VectorXd::Zero(0), kramers_source(), 0.5);
  for (double y : {0.0, 0.3, 1.0, 4.0}) {
    const Eigen::VectorXd W = sol.W.eval(y);
    CHECK(W(0) == doctest::Approx(-std::sqrt(2.0) * std::exp(-y)).epsilon(1e-13));
    CHECK(W(1) == doctest::Approx(std::exp(-y)).epsilon(1e-13));
    CHECK(std::abs(W(2)) < 1e-14);
  }
  CHECK(sol.residual_sup < 1e-12);
  CHECK(verify_estimate(sol) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  // A21 V1W(0) + A23 V3W(0) = u1(0) + sqrt(2) f3(0) = 0.
  CHECK(bounded_trace_combination(dec, sol).norm() < 1e-13);
}

TEST_CASE("zero data yields the zero solution") {
  const Pipeline p = make_full(3);
  const Eigen::MatrixXd B = p.spec.Tplus().transpose() * p.dec.Q33;
  const auto sol =
      solve(p.sys, p.dec, p.spec, B, Eigen::VectorXd::Zero(p.spec.n_plus),
            ExpPolyVec::zero(p.sys.size()), 0.25);
  CHECK(sol.norm_W_a == 0.0);
  CHECK(sol.residual_sup == 0.0);
  CHECK(verify_estimate(sol) == 0.0);
}

TEST_CASE("pure boundary-layer modes from g alone") {
  const Pipeline p = make_full(3);
  const Eigen::MatrixXd B = p.spec.Tplus().transpose() * p.dec.Q33;
  std::mt19937 rng(31);
  std::normal_distribution<double> dist;
  Eigen::VectorXd g(p.spec.n_plus);
  for (int i = 0; i < g.size(); ++i) g(i) = dist(rng);
  const auto sol = solve(p.sys, p.dec, p.spec, B,
                         g, ExpPolyVec::zero(p.sys.size()), 0.25);
  CHECK(sol.residual_sup < 1e-10);
  // boundary condition holds at y = 0
  const Eigen::VectorXd v3w0 = p.dec.V3.transpose() * sol.W.eval(0.0);
  CHECK((B * v3w0 - g).norm() < 1e-10);
  // only decaying layer modes are present
  CHECK(sol.z_zero0.norm() < 1e-13);
  CHECK(sol.z_minus0.norm() < 1e-13);
  CHECK(sol.W.eval(80.0).norm() < 1e-10);
}

TEST_CASE("linearity of the solve") {
  const Pipeline p = make_full(3);
  const Eigen::MatrixXd B = p.spec.Tplus().transpose() * p.dec.Q33;
  std::mt19937 rng(37);
  std::normal_distribution<double> dist;
  const double a = 0.2;
  const ExpPolyVec h1 = random_source(rng, p.sys.size(), 0.5, 4.0);
  const ExpPolyVec h2 = random_source(rng, p.sys.size(), 0.5, 4.0);
  Eigen::VectorXd g1(p.spec.n_plus), g2(p.spec.n_plus);
  for (int i = 0; i < g1.size(); ++i) {
    g1(i) = dist(rng);
    g2(i) = dist(rng);
  }
  const auto s1 = solve(p.sys, p.dec, p.spec, B, g1, h1, a);
  const auto s2 = solve(p.sys, p.dec, p.spec, B, g2, h2, a);
  const auto s12 = solve(p.sys, p.dec, p.spec, B,
                         Eigen::VectorXd(g1 + g2), h1 + h2, a);
  for (double y : {0.0, 0.5, 2.0, 8.0})
    CHECK((s12.W.eval(y) - s1.W.eval(y) - s2.W.eval(y)).norm() < 1e-10);
}

TEST_CASE("solution is independent of the V2/V3 basis choice") {
  const Pipeline pa = make_full(3, 1.0, SignConvention::positive_diagonal);
  const Pipeline pb = make_full(3, 1.0, SignConvention::negative_diagonal);
  std::mt19937 rng(41);
  const ExpPolyVec h = random_source(rng, pa.sys.size(), 0.5, 4.0);
  // Express the same physical boundary condition in both bases: a fixed
  // operator on W(0) restricted to the layer modes.
  Eigen::MatrixXd Bphys(pa.spec.n_plus, pa.sys.size());
  std::normal_distribution<double> dist;
  for (int i = 0; i < Bphys.rows(); ++i)
    for (int j = 0; j < Bphys.cols(); ++j) Bphys(i, j) = dist(rng);
  Eigen::VectorXd g(pa.spec.n_plus);
  for (int i = 0; i < g.size(); ++i) g(i) = dist(rng);

  const Eigen::MatrixXd Ba = Bphys * pa.dec.V3;
  const Eigen::MatrixXd Bb = Bphys * pb.dec.V3;
  const auto va = check_square_bc(Ba, pa.spec);
  const auto vb = check_square_bc(Bb, pb.spec);
  REQUIRE(va.solvable == vb.solvable);
  if (!va.solvable) return;

  const auto sa = solve(pa.sys, pa.dec, pa.spec, Ba, g, h, 0.2);
  const auto sb = solve(pb.sys, pb.dec, pb.spec, Bb, g, h, 0.2);
  for (double y : {0.0, 0.4, 1.5, 6.0})
    CHECK((sa.W.eval(y) - sb.W.eval(y)).norm() <
          1e-9 * (1.0 + sa.W.eval(y).norm()));
}

TEST_CASE("decay: every rate in W is positive") {
  const Pipeline p = make_full(4);
  const Eigen::MatrixXd B = p.spec.Tplus().transpose() * p.dec.Q33;
  std::mt19937 rng(43);
  const ExpPolyVec h = random_source(rng, p.sys.size(), 0.4, 3.0);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p.spec.n_plus);
  const auto sol = solve(p.sys, p.dec, p.spec, B, g, h, 0.2);
  CHECK(sol.W.min_rate() > 0.0);
  CHECK(sol.W.eval(200.0).norm() < 1e-12);
  CHECK(sol.residual_sup < 1e-8 * (1.0 + sol.h_sup));
}

TEST_CASE("grid-mode solve approximates the exp-poly solve") {
  const MomentSystem sys = build_kramers3(1.0);
  const SubspaceDecomposition dec = build_decomposition(sys);
  const SpectralFactorization spec = spectral_factorization(dec);
  Eigen::VectorXd y(4001);
  for (int i = 0; i < y.size(); ++i) y(i) = 40.0 * i / (y.size() - 1.0);
  Eigen::VectorXd c(3);
  c << 0.0, 1.0, 0.0;
  const GridVec h = GridVec::exponential(y, c, 1.0);
  const auto sol = solve(sys, dec, spec, Eigen::MatrixXd::Zero(0, 1),
                         Eigen::VectorXd::Zero(0), h, 0.5);
  CHECK(sol.W.eval(0.0)(0) ==
        doctest::Approx(-std::sqrt(2.0)).epsilon(1e-4));
  CHECK(sol.W.eval(1.0)(1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-4));
}

TEST_CASE("weight validation in solve") {
  const Pipeline p = make_full(3);
  const Eigen::MatrixXd B = p.spec.Tplus().transpose() * p.dec.Q33;
  std::mt19937 rng(47);
  const ExpPolyVec h = random_source(rng, p.sys.size(), 0.5, 3.0);
  const Eigen::VectorXd g = Eigen::VectorXd::Zero(p.spec.n_plus);
  CHECK_THROWS_AS(
      solve(p.sys, p.dec, p.spec, B, g, h, 2.0 / p.spec.lambda_max),
      WeightError);
  CHECK_THROWS_AS(solve(p.sys, p.dec, p.spec, B, g, h, -1.0),
                  InvalidArgument);
}

TEST_CASE("pure_t0_source excites only the zero block") {
  const Pipeline p = make_full(3);
  REQUIRE(p.spec.n_zero >= 1);
  Eigen::VectorXd c0 = Eigen::VectorXd::Zero(p.spec.n_zero);
  c0(0) = 1.0;
  const ExpPolyVec dh = pure_t0_source(p.dec, p.spec, c0, 1.5);
  const Eigen::VectorXd d0 = dh.eval(0.0);
  CHECK((p.dec.G.transpose() * d0).norm() < 1e-11 * d0.norm());
  CHECK((p.dec.U2.transpose() * d0).norm() < 1e-11 * d0.norm());
  const Eigen::VectorXd w = p.dec.V3.transpose() * d0;
  const Eigen::VectorXd expected = p.dec.Q33 * (p.spec.Tzero() * c0);
  CHECK((w - expected).norm() < 1e-11 * expected.norm());
}

TEST_CASE("witness: stable modified BC yields none") {
  // assembled through maxwell_bc in its own test; here use a synthetic
  // stable square operator.
  const Pipeline p = make_full(3);
  const Eigen::MatrixXd B = p.spec.Tplus().transpose() * p.dec.Q33;
  CHECK_FALSE(instability_witness(p.sys, p.dec, p.spec, B, 0.25, 10.0)
                  .has_value());
}

TEST_CASE("witness: T0-contaminated square BC is flagged with growth") {
  const Pipeline p = make_full(3);
  REQUIRE(p.spec.n_zero >= 1);
  Eigen::MatrixXd B = p.spec.Tplus().transpose() * p.dec.Q33;
  B.row(0) += (p.dec.Q33 * p.spec.Tzero().col(0)).transpose();
  const auto w = instability_witness(p.sys, p.dec, p.spec, B, 0.25, 100.0);
  REQUIRE(w.has_value());
  CHECK(weighted_norm(w->h, 0.25) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w->z_plus0_norm >= 100.0);
  REQUIRE(w->growth.size() == 3);
  CHECK(w->growth[0].second < w->growth[1].second);
  CHECK(w->growth[1].second < w->growth[2].second);
}
