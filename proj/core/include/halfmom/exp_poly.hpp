#pragma once

#include <Eigen/Dense>
#include <vector>

namespace halfmom {

/// One term P(y) * exp(-rate * y) of a vector-valued function; coeffs[c][d]
/// is the degree-d coefficient of component c.
struct ExpPolyTerm {
  double rate = 0.0;
  std::vector<std::vector<double>> coeffs;

  int degree() const;
};

/// Vector-valued exponential-polynomial y -> sum_k P_k(y) exp(-b_k y).
/// Closed under the solver's integral transforms. Terms with equal rate
/// are merged and trailing zero coefficients trimmed on construction.
class ExpPolyVec {
 public:
  ExpPolyVec() = default;
  explicit ExpPolyVec(int dim) : dim_(dim) {}

  static ExpPolyVec zero(int dim) { return ExpPolyVec(dim); }
  /// Single decaying exponential c * exp(-rate y).
  static ExpPolyVec exponential(const Eigen::VectorXd& c, double rate);

  int dim() const { return dim_; }
  const std::vector<ExpPolyTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int max_degree() const;
  /// Smallest rate among nonzero terms (+inf when zero).
  double min_rate() const;

  /// Adds P(y) exp(-rate y); merges into an existing equal-rate term.
  void add_term(double rate, std::vector<std::vector<double>> coeffs);
  void add_component_term(int component, double rate,
                          const std::vector<double>& poly);

  Eigen::VectorXd eval(double y) const;
  ExpPolyVec derivative() const;
  ExpPolyVec component(int i) const;
  /// Places this (1-dimensional) function at `component` of a dim-d vector.
  ExpPolyVec promote(int dim, int component) const;

  ExpPolyVec& operator+=(const ExpPolyVec& other);
  ExpPolyVec& operator*=(double s);
  friend ExpPolyVec operator+(ExpPolyVec a, const ExpPolyVec& b) {
    a += b;
    return a;
  }
  friend ExpPolyVec operator-(const ExpPolyVec& a, const ExpPolyVec& b);
  friend ExpPolyVec operator*(double s, ExpPolyVec f) {
    f *= s;
    return f;
  }

 private:
  int dim_ = 0;
  std::vector<ExpPolyTerm> terms_;
};

/// Matrix application: (M f)(y) = M * f(y), exact at coefficient level.
ExpPolyVec apply(const Eigen::MatrixXd& M, const ExpPolyVec& f);

/// r(y) = -int_y^inf f(s) ds. All nonzero terms must have rate > 0.
ExpPolyVec integrate_tail(const ExpPolyVec& f);

/// g(y) = (1/lambda) int_0^y exp((s-y)/lambda) f(s) ds, lambda > 0.
/// Resonant terms (rate == 1/lambda) raise the polynomial degree by one.
ExpPolyVec convolve_decay(double lambda, const ExpPolyVec& f);

/// z(y) = -(1/lambda) int_y^inf exp((s-y)/lambda) f(s) ds, lambda < 0.
ExpPolyVec convolve_growth_tail(double lambda, const ExpPolyVec& f);

/// ||f||_a = (int_0^inf exp(2ay) f^T f dy)^{1/2}, exact via moment formulas.
double weighted_norm(const ExpPolyVec& f, double a);

/// <f, g>_a = int_0^inf exp(2ay) f^T g dy.
double weighted_inner_product(const ExpPolyVec& f, const ExpPolyVec& g,
                              double a);

/// True when every nonzero term has rate > a.
bool finite_a_norm(const ExpPolyVec& f, double a);

struct PoincareReport {
  double r_norm = 0.0;        // ||r||_a
  double bound = 0.0;         // (1/a) ||f||_a
  double trace_norm = 0.0;    // ||r(0)||
  double trace_bound = 0.0;   // sqrt(2/a) ||f||_a
};

PoincareReport check_poincare(const ExpPolyVec& f, double a);

}  // namespace halfmom
