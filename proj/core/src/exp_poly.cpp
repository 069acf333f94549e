#include "halfmom/exp_poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "halfmom/errors.hpp"

namespace halfmom {

namespace {

constexpr int kMaxDegree = 32;

double factorial(int n) {
  static const auto table = [] {
    std::array<double, 2 * kMaxDegree + 2> t{};
    t[0] = 1.0;
    for (size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * double(i);
    return t;
  }();
  return table[n];
}

bool rates_equal(double a, double b) {
  return std::abs(a - b) <= 1e-13 * std::max(1.0, std::max(a, b));
}

void trim(std::vector<double>& poly) {
  while (!poly.empty() && poly.back() == 0.0) poly.pop_back();
}

bool all_empty(const std::vector<std::vector<double>>& coeffs) {
  for (const auto& p : coeffs)
    if (!p.empty()) return true == false;
  return true;
}

}  // namespace

int ExpPolyTerm::degree() const {
  int d = -1;
  for (const auto& p : coeffs) d = std::max(d, int(p.size()) - 1);
  return d;
}

ExpPolyVec ExpPolyVec::exponential(const Eigen::VectorXd& c, double rate) {
  ExpPolyVec f(static_cast<int>(c.size()));
  std::vector<std::vector<double>> coeffs(c.size());
  for (int i = 0; i < c.size(); ++i)
    if (c(i) != 0.0) coeffs[i] = {c(i)};
  f.add_term(rate, std::move(coeffs));
  return f;
}

int ExpPolyVec::max_degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.degree());
  return d;
}

double ExpPolyVec::min_rate() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) r = std::min(r, t.rate);
  return r;
}

void ExpPolyVec::add_term(double rate, std::vector<std::vector<double>> coeffs) {
  if (static_cast<int>(coeffs.size()) != dim_)
    throw InvalidArgument("ExpPolyVec::add_term: component count mismatch");
  if (rate < 0.0)
    throw InvalidArgument("ExpPolyVec::add_term: rate must be >= 0");
  for (auto& p : coeffs) {
    trim(p);
    if (static_cast<int>(p.size()) - 1 > kMaxDegree)
      throw InvalidArgument("ExpPolyVec: polynomial degree exceeds 32");
  }
  if (all_empty(coeffs)) return;

  for (auto& t : terms_) {
    if (rates_equal(t.rate, rate)) {
      for (int c = 0; c < dim_; ++c) {
        auto& dst = t.coeffs[c];
        const auto& src = coeffs[c];
        if (src.size() > dst.size()) dst.resize(src.size(), 0.0);
        for (size_t d = 0; d < src.size(); ++d) dst[d] += src[d];
        trim(dst);
      }
      if (all_empty(t.coeffs))
        terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                    [&](const ExpPolyTerm& x) {
                                      return all_empty(x.coeffs);
                                    }),
                     terms_.end());
      return;
    }
  }
  ExpPolyTerm term;
  term.rate = rate;
  term.coeffs = std::move(coeffs);
  terms_.push_back(std::move(term));
  std::sort(terms_.begin(), terms_.end(),
            [](const ExpPolyTerm& a, const ExpPolyTerm& b) {
              return a.rate < b.rate;
            });
}

void ExpPolyVec::add_component_term(int component, double rate,
                                    const std::vector<double>& poly) {
  std::vector<std::vector<double>> coeffs(dim_);
  coeffs.at(component) = poly;
  add_term(rate, std::move(coeffs));
}

Eigen::VectorXd ExpPolyVec::eval(double y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (const auto& t : terms_) {
    const double e = std::exp(-t.rate * y);
    for (int c = 0; c < dim_; ++c) {
      const auto& p = t.coeffs[c];
      double v = 0.0;
      for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * y + *it;
      out(c) += v * e;
    }
  }
  return out;
}

ExpPolyVec ExpPolyVec::derivative() const {
  ExpPolyVec out(dim_);
  for (const auto& t : terms_) {
    std::vector<std::vector<double>> coeffs(dim_);
    for (int c = 0; c < dim_; ++c) {
      const auto& p = t.coeffs[c];
      if (p.empty()) continue;
      std::vector<double> q(p.size(), 0.0);
      for (size_t d = 0; d + 1 < p.size(); ++d) q[d] = (d + 1) * p[d + 1];
      for (size_t d = 0; d < p.size(); ++d) q[d] -= t.rate * p[d];
      coeffs[c] = std::move(q);
    }
    out.add_term(t.rate, std::move(coeffs));
  }
  return out;
}

ExpPolyVec ExpPolyVec::component(int i) const {
  ExpPolyVec out(1);
  for (const auto& t : terms_)
    out.add_term(t.rate, {t.coeffs.at(i)});
  return out;
}

ExpPolyVec ExpPolyVec::promote(int dim, int component) const {
  if (dim_ != 1)
    throw InvalidArgument("ExpPolyVec::promote: source must be 1-dimensional");
  ExpPolyVec out(dim);
  for (const auto& t : terms_) {
    std::vector<std::vector<double>> coeffs(dim);
    coeffs.at(component) = t.coeffs[0];
    out.add_term(t.rate, std::move(coeffs));
  }
  return out;
}

ExpPolyVec& ExpPolyVec::operator+=(const ExpPolyVec& other) {
  if (dim_ != other.dim_)
    throw InvalidArgument("ExpPolyVec: dimension mismatch in addition");
  for (const auto& t : other.terms_) add_term(t.rate, t.coeffs);
  return *this;
}

ExpPolyVec& ExpPolyVec::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_)
    for (auto& p : t.coeffs)
      for (auto& c : p) c *= s;
  return *this;
}

ExpPolyVec operator-(const ExpPolyVec& a, const ExpPolyVec& b) {
  ExpPolyVec nb = b;
  nb *= -1.0;
  nb += a;
  return nb;
}

ExpPolyVec apply(const Eigen::MatrixXd& M, const ExpPolyVec& f) {
  if (M.cols() != f.dim())
    throw InvalidArgument("apply: matrix/function dimension mismatch");
  ExpPolyVec out(static_cast<int>(M.rows()));
  for (const auto& t : f.terms()) {
    const int deg = t.degree();
    std::vector<std::vector<double>> coeffs(M.rows(),
                                            std::vector<double>(deg + 1, 0.0));
    for (int r = 0; r < M.rows(); ++r)
      for (int c = 0; c < M.cols(); ++c) {
        const double m = M(r, c);
        if (m == 0.0) continue;
        const auto& p = t.coeffs[c];
        for (size_t d = 0; d < p.size(); ++d) coeffs[r][d] += m * p[d];
      }
    out.add_term(t.rate, std::move(coeffs));
  }
  return out;
}

ExpPolyVec integrate_tail(const ExpPolyVec& f) {
  ExpPolyVec out(f.dim());
  for (const auto& t : f.terms()) {
    if (t.rate <= 0.0)
      throw DivergenceError(
          "integrate_tail: tail integral diverges for rate <= 0");
    const double b = t.rate;
    std::vector<std::vector<double>> coeffs(f.dim());
    for (int c = 0; c < f.dim(); ++c) {
      const auto& p = t.coeffs[c];
      if (p.empty()) continue;
      // int_y^inf s^j e^{-bs} ds = e^{-by} sum_i (j!/i!) y^i / b^{j-i+1}
      std::vector<double> q(p.size(), 0.0);
      for (size_t j = 0; j < p.size(); ++j)
        for (size_t i = 0; i <= j; ++i)
          q[i] -= p[j] * (factorial(int(j)) / factorial(int(i))) /
                  std::pow(b, double(j - i + 1));
      coeffs[c] = std::move(q);
    }
    out.add_term(b, std::move(coeffs));
  }
  return out;
}

ExpPolyVec convolve_decay(double lambda, const ExpPolyVec& f) {
  if (lambda <= 0.0)
    throw InvalidArgument("convolve_decay: lambda must be > 0");
  const double mu = 1.0 / lambda;
  ExpPolyVec out(f.dim());
  for (const auto& t : f.terms()) {
    const double b = t.rate;
    // Near resonance the two-exponential closed form cancels catastrophically
    // (coefficients ~ 1/cf^{j+1}), so switch to the series in cf = mu - b:
    // int_0^y s^j e^{cf s} ds = sum_k cf^k y^{j+k+1} / (k! (j+k+1)),
    // truncated where |cf| <= 0.02 max(b, mu) keeps |cf| y <~ 1 over the
    // decay range y ~ 60/mu. Exact resonance (cf = 0) is the k = 0 term.
    const int series_len =
        std::min(14, kMaxDegree - std::max(0, t.degree()));
    const bool near_resonant =
        std::abs(b - mu) <= 0.02 * std::max(b, mu) && series_len >= 1;
    if (near_resonant) {
      const double cf = mu - b;
      std::vector<std::vector<double>> coeffs(f.dim());
      for (int c = 0; c < f.dim(); ++c) {
        const auto& p = t.coeffs[c];
        if (p.empty()) continue;
        std::vector<double> q(p.size() + series_len, 0.0);
        for (size_t j = 0; j < p.size(); ++j) {
          double ck = 1.0;  // cf^k / k!
          for (int k = 0; k < series_len; ++k) {
            q[j + k + 1] += mu * p[j] * ck / double(j + k + 1);
            ck *= cf / double(k + 1);
          }
        }
        coeffs[c] = std::move(q);
      }
      out.add_term(mu, std::move(coeffs));
    } else {
      const double cf = mu - b;
      std::vector<std::vector<double>> same_rate(f.dim());
      std::vector<std::vector<double>> mu_rate(f.dim());
      for (int c = 0; c < f.dim(); ++c) {
        const auto& p = t.coeffs[c];
        if (p.empty()) continue;
        // int_0^y e^{cf s} s^j ds = e^{cf y} q_j(y) - q_j(0) with
        // q_j(y) = sum_i (-1)^{j-i} (j!/i!) y^i / cf^{j-i+1}
        std::vector<double> q(p.size(), 0.0);
        double q0 = 0.0;
        for (size_t j = 0; j < p.size(); ++j) {
          for (size_t i = 0; i <= j; ++i) {
            const double sgn = ((j - i) % 2 == 0) ? 1.0 : -1.0;
            q[i] += mu * p[j] * sgn *
                    (factorial(int(j)) / factorial(int(i))) /
                    std::pow(cf, double(j - i + 1));
          }
          const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
          q0 += mu * p[j] * sgn * factorial(int(j)) /
                std::pow(cf, double(j + 1));
        }
        same_rate[c] = std::move(q);
        mu_rate[c] = {-q0};
      }
      out.add_term(b, std::move(same_rate));
      out.add_term(mu, std::move(mu_rate));
    }
  }
  return out;
}

ExpPolyVec convolve_growth_tail(double lambda, const ExpPolyVec& f) {
  if (lambda >= 0.0)
    throw InvalidArgument("convolve_growth_tail: lambda must be < 0");
  const double mu = -1.0 / lambda;
  ExpPolyVec out(f.dim());
  for (const auto& t : f.terms()) {
    if (t.rate <= 0.0)
      throw DivergenceError(
          "convolve_growth_tail: divergent tail for rate <= 0");
    const double b = t.rate;
    const double cf = b + mu;
    std::vector<std::vector<double>> coeffs(f.dim());
    for (int c = 0; c < f.dim(); ++c) {
      const auto& p = t.coeffs[c];
      if (p.empty()) continue;
      std::vector<double> q(p.size(), 0.0);
      for (size_t j = 0; j < p.size(); ++j)
        for (size_t i = 0; i <= j; ++i)
          q[i] += mu * p[j] * (factorial(int(j)) / factorial(int(i))) /
                  std::pow(cf, double(j - i + 1));
      coeffs[c] = std::move(q);
    }
    out.add_term(b, std::move(coeffs));
  }
  return out;
}

double weighted_inner_product(const ExpPolyVec& f, const ExpPolyVec& g,
                              double a) {
  if (f.dim() != g.dim())
    throw InvalidArgument("weighted_inner_product: dimension mismatch");
  double sum = 0.0;
  for (const auto& tf : f.terms())
    for (const auto& tg : g.terms()) {
      const double c = tf.rate + tg.rate - 2.0 * a;
      if (c <= 0.0)
        throw DivergenceError(
            "weighted norm diverges: combined rate does not exceed 2a");
      for (int comp = 0; comp < f.dim(); ++comp) {
        const auto& p = tf.coeffs[comp];
        const auto& q = tg.coeffs[comp];
        for (size_t k = 0; k < p.size(); ++k)
          for (size_t l = 0; l < q.size(); ++l)
            sum += p[k] * q[l] * factorial(int(k + l)) /
                   std::pow(c, double(k + l + 1));
      }
    }
  return sum;
}

double weighted_norm(const ExpPolyVec& f, double a) {
  return std::sqrt(std::max(0.0, weighted_inner_product(f, f, a)));
}

bool finite_a_norm(const ExpPolyVec& f, double a) {
  for (const auto& t : f.terms())
    if (t.rate <= a) return false;
  return true;
}

PoincareReport check_poincare(const ExpPolyVec& f, double a) {
  PoincareReport rep;
  const double fa = weighted_norm(f, a);
  const ExpPolyVec r = integrate_tail(f);
  rep.r_norm = weighted_norm(r, a);
  rep.bound = fa / a;
  rep.trace_norm = r.eval(0.0).norm();
  rep.trace_bound = std::sqrt(2.0 / a) * fa;
  return rep;
}

}  // namespace halfmom
