#include <doctest.h>

#include <cmath>
#include <random>

#include "halfmom/errors.hpp"
#include "halfmom/exp_poly.hpp"
#include "halfmom/quadrature.hpp"

using namespace halfmom;

namespace {

ExpPolyVec scalar_exp(double c, double rate) {
  Eigen::VectorXd v(1);
  v(0) = c;
  return ExpPolyVec::exponential(v, rate);
}

ExpPolyVec random_exp_poly(std::mt19937& rng, int dim, int n_terms,
                           double rate_lo, double rate_hi, int max_deg) {
  std::uniform_real_distribution<double> rate(rate_lo, rate_hi);
  std::normal_distribution<double> coef;
  std::uniform_int_distribution<int> deg(0, max_deg);
  ExpPolyVec f(dim);
  for (int t = 0; t < n_terms; ++t) {
    const double b = rate(rng);
    for (int c = 0; c < dim; ++c) {
      std::vector<double> poly(deg(rng) + 1);
      for (auto& x : poly) x = coef(rng);
      f.add_component_term(c, b, poly);
    }
  }
  return f;
}

double quad_norm(const ExpPolyVec& f, double a) {
  const double y_max = 60.0 / std::max(1e-2, f.min_rate() - a);
  const double v = integrate_adaptive(
      [&](double y) {
        return std::exp(2.0 * a * y) * f.eval(y).squaredNorm();
      },
      0.0, std::min(y_max, 400.0), 1e-13);
  return std::sqrt(v);
}

}  // namespace

TEST_CASE("integrate_tail closed forms") {
  const ExpPolyVec f = scalar_exp(1.0, 1.0);
  const ExpPolyVec r = integrate_tail(f);
  CHECK(r.eval(0.0)(0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(r.eval(2.0)(0) == doctest::Approx(-std::exp(-2.0)).epsilon(1e-15));

  // f = y e^{-y} -> r = -(y+1) e^{-y}
  ExpPolyVec g(1);
  g.add_component_term(0, 1.0, {0.0, 1.0});
  const ExpPolyVec rg = integrate_tail(g);
  for (double y : {0.0, 0.3, 1.7, 5.0})
    CHECK(rg.eval(y)(0) ==
          doctest::Approx(-(y + 1.0) * std::exp(-y)).epsilon(1e-14));

  CHECK(integrate_tail(ExpPolyVec::zero(3)).is_zero());
}

TEST_CASE("integrate_tail rejects divergent tails") {
  ExpPolyVec f(1);
  f.add_component_term(0, 0.0, {1.0});
  CHECK_THROWS_AS(integrate_tail(f), DivergenceError);
}

TEST_CASE("derivative inverts integrate_tail") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ExpPolyVec f = random_exp_poly(rng, 3, 3, 0.2, 4.0, 3);
    const ExpPolyVec back = integrate_tail(f).derivative();
    for (double y : {0.0, 0.5, 1.0, 3.0})
      CHECK((back.eval(y) - f.eval(y)).norm() <
            1e-12 * (1.0 + f.eval(y).norm()));
  }
}

TEST_CASE("convolve_decay closed forms and ODE identity") {
  // f = e^{-2y}, lambda = 1 -> g = e^{-y} - e^{-2y}
  const ExpPolyVec g = convolve_decay(1.0, scalar_exp(1.0, 2.0));
  for (double y : {0.0, 0.4, 2.0})
    CHECK(g.eval(y)(0) ==
          doctest::Approx(std::exp(-y) - std::exp(-2.0 * y)).epsilon(1e-14));

  // resonant: f = e^{-y}, lambda = 1 -> g = y e^{-y}
  const ExpPolyVec gr = convolve_decay(1.0, scalar_exp(1.0, 1.0));
  for (double y : {0.0, 0.7, 3.0})
    CHECK(gr.eval(y)(0) == doctest::Approx(y * std::exp(-y)).epsilon(1e-14));

  CHECK(convolve_decay(2.0, ExpPolyVec::zero(2)).is_zero());

  // lambda g' = -g + f at sampled points for random f.
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ExpPolyVec f = random_exp_poly(rng, 2, 3, 0.2, 4.0, 2);
    const double lam = 0.1 + 0.5 * trial / 19.0;
    const ExpPolyVec gg = convolve_decay(lam, f);
    const ExpPolyVec gp = gg.derivative();
    CHECK(gg.eval(0.0).norm() < 1e-10);  // g(0) = 0 up to cancellation
    for (double y : {0.1, 1.0, 4.0}) {
      const Eigen::VectorXd res =
          lam * gp.eval(y) + gg.eval(y) - f.eval(y);
      CHECK(res.norm() < 1e-11 * (1.0 + f.eval(y).norm()));
    }
  }
}

TEST_CASE("convolve_growth_tail closed form, linearity, decay") {
  const ExpPolyVec z = convolve_growth_tail(-1.0, scalar_exp(1.0, 1.0));
  for (double y : {0.0, 1.0, 3.0})
    CHECK(z.eval(y)(0) == doctest::Approx(0.5 * std::exp(-y)).epsilon(1e-14));

  CHECK(convolve_growth_tail(-2.0, ExpPolyVec::zero(2)).is_zero());

  std::mt19937 rng(9);
  const ExpPolyVec f1 = random_exp_poly(rng, 2, 2, 0.3, 3.0, 2);
  const ExpPolyVec f2 = random_exp_poly(rng, 2, 2, 0.3, 3.0, 2);
  const ExpPolyVec sum = convolve_growth_tail(-0.7, f1 + f2);
  const ExpPolyVec parts =
      convolve_growth_tail(-0.7, f1) + convolve_growth_tail(-0.7, f2);
  for (double y : {0.0, 0.5, 2.0})
    CHECK((sum.eval(y) - parts.eval(y)).norm() < 1e-12);

  // lambda z' = -z + f and z(inf) = 0.
  for (int trial = 0; trial < 20; ++trial) {
    const ExpPolyVec f = random_exp_poly(rng, 2, 3, 0.2, 4.0, 2);
    const double lam = -(0.1 + 0.4 * trial / 19.0);
    const ExpPolyVec zz = convolve_growth_tail(lam, f);
    const ExpPolyVec zp = zz.derivative();
    for (double y : {0.0, 1.0, 4.0}) {
      const Eigen::VectorXd res = lam * zp.eval(y) + zz.eval(y) - f.eval(y);
      CHECK(res.norm() < 1e-11 * (1.0 + f.eval(y).norm()));
    }
    CHECK(zz.eval(200.0).norm() < 1e-10);
  }
}

TEST_CASE("weighted_norm closed form, homogeneity, quadrature agreement") {
  CHECK(weighted_norm(scalar_exp(1.0, 1.0), 0.5) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(weighted_norm(ExpPolyVec::zero(4), 0.3) == 0.0);

  std::mt19937 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const ExpPolyVec f = random_exp_poly(rng, 2, 2, 0.6, 4.0, 3);
    const double a = 0.25;
    CHECK(weighted_norm(3.5 * f, a) ==
          doctest::Approx(3.5 * weighted_norm(f, a)).epsilon(1e-13));
    CHECK(weighted_norm(f, a) ==
          doctest::Approx(quad_norm(f, a)).epsilon(1e-9));
  }
}

TEST_CASE("weighted_norm divergence guard") {
  CHECK_THROWS_AS(weighted_norm(scalar_exp(1.0, 1.0), 1.0), DivergenceError);
  CHECK(finite_a_norm(scalar_exp(1.0, 1.0), 0.9));
  CHECK_FALSE(finite_a_norm(scalar_exp(1.0, 1.0), 1.0));
}

TEST_CASE("poincare and trace inequalities") {
  const PoincareReport rep = check_poincare(scalar_exp(1.0, 1.0), 0.5);
  CHECK(rep.r_norm == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.bound == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(rep.r_norm <= rep.bound);
  CHECK(rep.trace_norm <= rep.trace_bound);

  std::mt19937 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const ExpPolyVec f = random_exp_poly(rng, 3, 3, 0.6, 5.0, 3);
    const PoincareReport r = check_poincare(f, 0.25);
    CHECK(r.r_norm <= r.bound * (1.0 + 1e-12));
    CHECK(r.trace_norm <= r.trace_bound * (1.0 + 1e-12));
  }
}

TEST_CASE("term merging and cancellation") {
  std::mt19937 rng(21);
  const ExpPolyVec f = random_exp_poly(rng, 2, 3, 0.3, 3.0, 4);
  CHECK((f - f).is_zero());

  ExpPolyVec g(1);
  g.add_component_term(0, 1.0, {1.0, 2.0});
  g.add_component_term(0, 1.0, {0.5});
  CHECK(g.terms().size() == 1);
  CHECK(g.eval(0.0)(0) == 1.5);
}

TEST_CASE("degree cap is enforced") {
  ExpPolyVec f(1);
  std::vector<double> poly(34, 1.0);
  CHECK_THROWS_AS(f.add_component_term(0, 1.0, poly), InvalidArgument);
}

TEST_CASE("apply is exact at the coefficient level") {
  std::mt19937 rng(23);
  const ExpPolyVec f = random_exp_poly(rng, 3, 2, 0.5, 2.0, 2);
  Eigen::MatrixXd M(2, 3);
  M << 1, 2, 3, -1, 0, 4;
  const ExpPolyVec g = apply(M, f);
  for (double y : {0.0, 1.0, 2.5})
    CHECK((g.eval(y) - M * f.eval(y)).norm() < 1e-14);
}
