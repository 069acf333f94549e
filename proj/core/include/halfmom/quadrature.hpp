#pragma once

#include <functional>
#include <vector>

namespace halfmom {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computes the n-point Gauss-Legendre rule by Newton iteration on the
/// Legendre roots. Rules are cached per order.
const GaussRule& gauss_legendre(int n);

/// Integrates f on [lo, hi] with a single n-point Gauss-Legendre rule.
double integrate_gauss(const std::function<double(double)>& f, double lo,
                       double hi, int n);

/// Integrates f on [lo, hi] with an n-point rule per panel, doubling the
/// panel count until two refinements agree to abs_tol (or panels exceed
/// max_panels). Used as an independent oracle and for grid-mode data.
double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, double abs_tol, int n = 20,
                          int max_panels = 1 << 14);

}  // namespace halfmom
