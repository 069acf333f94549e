#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace halfmom {

/// Sampled-grid fallback for source terms supplied as data files: a
/// vector-valued function given by piecewise-linear interpolation of
/// samples on an increasing abscissa grid, zero beyond the last node.
/// All transforms are exact for the interpolant; traces at y=0 are data.
class GridVec {
 public:
  GridVec() = default;
  GridVec(Eigen::VectorXd y, Eigen::MatrixXd values);

  static GridVec zero(const Eigen::VectorXd& y, int dim);
  /// c * exp(-rate y) sampled on the given grid.
  static GridVec exponential(const Eigen::VectorXd& y,
                             const Eigen::VectorXd& c, double rate);
  /// CSV rows "y, w_0, w_1, ..."; '#' comment lines and a header allowed.
  static GridVec from_csv(const std::string& path);

  int dim() const { return static_cast<int>(values_.rows()); }
  int points() const { return static_cast<int>(y_.size()); }
  const Eigen::VectorXd& grid() const { return y_; }
  const Eigen::MatrixXd& values() const { return values_; }
  double max_abscissa() const { return y_.size() ? y_(y_.size() - 1) : 0.0; }

  Eigen::VectorXd eval(double y) const;
  /// Finite-difference derivative on the same grid (central interior).
  GridVec derivative() const;
  GridVec component(int i) const;
  GridVec promote(int dim, int component) const;
  /// Estimated slowest decay rate from the tail of the data.
  double min_rate() const;

  GridVec& operator+=(const GridVec& other);
  GridVec& operator*=(double s);
  friend GridVec operator+(GridVec a, const GridVec& b) {
    a += b;
    return a;
  }
  friend GridVec operator-(const GridVec& a, const GridVec& b);
  friend GridVec operator*(double s, GridVec f) {
    f *= s;
    return f;
  }

 private:
  Eigen::VectorXd y_;       // increasing, y_(0) == 0 expected
  Eigen::MatrixXd values_;  // dim x points
};

GridVec apply(const Eigen::MatrixXd& M, const GridVec& f);

/// r(y) = -int_y^inf f(s) ds (the interpolant is zero past the last node).
GridVec integrate_tail(const GridVec& f);

/// g(y) = (1/lambda) int_0^y exp((s-y)/lambda) f(s) ds, lambda > 0.
GridVec convolve_decay(double lambda, const GridVec& f);

/// z(y) = -(1/lambda) int_y^inf exp((s-y)/lambda) f(s) ds, lambda < 0.
GridVec convolve_growth_tail(double lambda, const GridVec& f);

/// (int_0^inf e^{2ay} f^T f dy)^{1/2} by per-panel Gauss quadrature.
double weighted_norm(const GridVec& f, double a);

}  // namespace halfmom
