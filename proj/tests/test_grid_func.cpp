#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "halfmom/errors.hpp"
#include "halfmom/exp_poly.hpp"
#include "halfmom/grid_func.hpp"

using namespace halfmom;

namespace {

Eigen::VectorXd fine_grid(double y_max, int n) {
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = y_max * double(i) / (n - 1);
  return y;
}

}  // namespace

TEST_CASE("grid sampling and evaluation") {
  const Eigen::VectorXd y = fine_grid(30.0, 2001);
  Eigen::VectorXd c(2);
  c << 1.0, -2.0;
  const GridVec f = GridVec::exponential(y, c, 1.0);
  CHECK(f.dim() == 2);
  CHECK((f.eval(0.0) - c).norm() < 1e-14);
  // piecewise-linear interpolation error ~ h^2/8 |f''| with h = 0.015
  CHECK((f.eval(1.0) - c * std::exp(-1.0)).norm() < 1e-4);
  CHECK(f.eval(100.0).norm() == 0.0);  // beyond the grid
  CHECK(f.min_rate() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("grid transforms agree with the exp-poly closed forms") {
  const Eigen::VectorXd y = fine_grid(40.0, 4001);
  Eigen::VectorXd c(1);
  c << 1.0;
  const GridVec f = GridVec::exponential(y, c, 1.0);

  const GridVec r = integrate_tail(f);
  CHECK(r.eval(0.0)(0) == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(r.eval(2.0)(0) == doctest::Approx(-std::exp(-2.0)).epsilon(1e-4));

  const GridVec g = convolve_decay(0.5, f);
  const ExpPolyVec ge = convolve_decay(0.5, ExpPolyVec::exponential(c, 1.0));
  for (double yy : {0.0, 0.5, 2.0, 6.0})
    CHECK(g.eval(yy)(0) == doctest::Approx(ge.eval(yy)(0)).epsilon(1e-5));

  const GridVec z = convolve_growth_tail(-1.0, f);
  for (double yy : {0.0, 1.0, 3.0})
    CHECK(z.eval(yy)(0) ==
          doctest::Approx(0.5 * std::exp(-yy)).epsilon(1e-4));

  CHECK(weighted_norm(f, 0.25) ==
        doctest::Approx(weighted_norm(ExpPolyVec::exponential(c, 1.0), 0.25))
            .epsilon(1e-5));
}

TEST_CASE("grid arithmetic and derivative") {
  const Eigen::VectorXd y = fine_grid(10.0, 1001);
  Eigen::VectorXd c(1);
  c << 2.0;
  const GridVec f = GridVec::exponential(y, c, 1.0);
  const GridVec sum = f + f - f;
  CHECK((sum.values() - f.values()).norm() < 1e-14);
  const GridVec d = f.derivative();
  CHECK(d.eval(3.0)(0) == doctest::Approx(-2.0 * std::exp(-3.0)).epsilon(1e-3));

  Eigen::MatrixXd M(2, 1);
  M << 3.0, -1.0;
  CHECK(apply(M, f).dim() == 2);
  CHECK(apply(M, f).eval(1.0)(1) ==
        doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("csv round trip") {
  const char* path = "grid_test_tmp.csv";
  {
    std::ofstream out(path);
    out << "# comment\n";
    out << "y,w0,w1\n";
    for (int i = 0; i <= 100; ++i) {
      const double y = 0.1 * i;
      out << y << "," << std::exp(-y) << "," << 2.0 * std::exp(-2.0 * y)
          << "\n";
    }
  }
  const GridVec f = GridVec::from_csv(path);
  CHECK(f.dim() == 2);
  CHECK(f.points() == 101);
  CHECK(f.eval(0.0)(0) == doctest::Approx(1.0));
  CHECK(f.eval(1.0)(1) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-3));
  std::remove(path);

  CHECK_THROWS_AS(GridVec::from_csv("does_not_exist.csv"), InvalidArgument);
}

TEST_CASE("grid validation") {
  Eigen::VectorXd y(2);
  y << 1.0, 0.0;  // decreasing
  CHECK_THROWS_AS(GridVec(y, Eigen::MatrixXd::Zero(1, 2)), InvalidArgument);
  Eigen::VectorXd y2(2);
  y2 << 0.0, 1.0;
  CHECK_THROWS_AS(GridVec(y2, Eigen::MatrixXd::Zero(1, 3)), InvalidArgument);
}
