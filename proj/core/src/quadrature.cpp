#include "halfmom/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "halfmom/errors.hpp"

namespace halfmom {

static GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess for the i-th root.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence P_k and derivative at x.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: order must be >= 1");
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

double integrate_gauss(const std::function<double(double)>& f, double lo,
                       double hi, int n) {
  const GaussRule& rule = gauss_legendre(n);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, double abs_tol, int n, int max_panels) {
  auto composite = [&](int panels) {
    double sum = 0.0;
    const double step = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p)
      sum += integrate_gauss(f, lo + p * step, lo + (p + 1) * step, n);
    return sum;
  };
  double prev = composite(1);
  for (int panels = 2; panels <= max_panels; panels *= 2) {
    double cur = composite(panels);
    if (std::abs(cur - prev) <= abs_tol) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace halfmom
