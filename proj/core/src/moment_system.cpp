#include "halfmom/moment_system.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "halfmom/errors.hpp"
#include "halfmom/quadrature.hpp"

namespace halfmom {

namespace {

// Graded lexicographic comparison within a parity class.
bool graded_lex_less(const MultiIndex& x, const MultiIndex& y) {
  if (x.order() != y.order()) return x.order() < y.order();
  return x.a < y.a;
}

}  // namespace

int IndexSet::find(const MultiIndex& alpha) const {
  for (int i = 0; i < size(); ++i)
    if (indices[i] == alpha) return i;
  return -1;
}

IndexSet enumerate_indices(int M) {
  if (M < 0) throw InvalidArgument("enumerate_indices: M must be >= 0");
  std::vector<MultiIndex> evens, odds;
  for (int a1 = 0; a1 <= M; ++a1)
    for (int a2 = 0; a2 + a1 <= M; ++a2)
      for (int a3 = 0; a3 + a2 + a1 <= M; ++a3) {
        MultiIndex idx{{a1, a2, a3}};
        (idx.even() ? evens : odds).push_back(idx);
      }
  std::sort(evens.begin(), evens.end(), graded_lex_less);
  std::sort(odds.begin(), odds.end(), graded_lex_less);

  IndexSet set;
  set.order = M;
  set.even_count = static_cast<int>(evens.size());
  set.odd_count = static_cast<int>(odds.size());
  set.indices = std::move(evens);
  set.indices.insert(set.indices.end(), odds.begin(), odds.end());
  return set;
}

double chi_hat_from_chi(double chi) {
  if (chi < 0.0 || chi > 1.0)
    throw InvalidArgument("accommodation coefficient chi must be in [0, 1]");
  return (2.0 * chi / (2.0 - chi)) / std::sqrt(2.0 * 3.14159265358979323846);
}

double BoundaryData::chi_hat() const { return chi_hat_from_chi(chi); }

Eigen::MatrixXd MomentSystem::flux_coupling() const {
  if (!has_parity())
    throw StructureError("flux_coupling: system has no parity structure");
  return A.topRightCorner(even_count, odd_count);
}

Eigen::MatrixXd build_flux_matrix(const IndexSet& set) {
  const int N = set.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    const MultiIndex& alpha = set.indices[i];
    if (alpha.order() + 1 <= set.order) {
      MultiIndex up = alpha;
      up.a[1] += 1;
      const int j = set.find(up);
      const double v = std::sqrt(static_cast<double>(alpha.a[1] + 1));
      A(i, j) = v;
      A(j, i) = v;  // same literal value, A stays bit-exactly symmetric
    }
  }
  return A;
}

Eigen::MatrixXd build_bgk_collision(const IndexSet& set, double nu) {
  if (nu <= 0.0) throw InvalidArgument("build_bgk_collision: nu must be > 0");
  const int N = set.size();

  // Coefficient vectors of the collision invariants: phi_0, phi_{e_i},
  // and (phi_{2e1} + phi_{2e2} + phi_{2e3})/sqrt(3).
  std::vector<Eigen::VectorXd> invariants;
  auto unit = [&](const MultiIndex& alpha) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
    const int i = set.find(alpha);
    if (i >= 0) v(i) = 1.0;
    return v;
  };
  invariants.push_back(unit(MultiIndex{{0, 0, 0}}));
  invariants.push_back(unit(MultiIndex{{1, 0, 0}}));
  invariants.push_back(unit(MultiIndex{{0, 1, 0}}));
  invariants.push_back(unit(MultiIndex{{0, 0, 1}}));
  if (set.order >= 2) {
    Eigen::VectorXd v = (unit(MultiIndex{{2, 0, 0}}) +
                         unit(MultiIndex{{0, 2, 0}}) +
                         unit(MultiIndex{{0, 0, 2}})) /
                        std::sqrt(3.0);
    invariants.push_back(v);
  }

  // Gram-Schmidt with re-orthogonalization; the vectors are already
  // orthonormal for a consistent enumeration, this guards rounding.
  std::vector<Eigen::VectorXd> basis;
  for (Eigen::VectorXd v : invariants) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= b.dot(v) * b;
    const double norm = v.norm();
    if (norm > 1e-12) basis.push_back(v / norm);
  }

  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(N, N);
  for (const auto& b : basis) proj += b * b.transpose();
  Eigen::MatrixXd Q = nu * (Eigen::MatrixXd::Identity(N, N) - proj);
  return 0.5 * (Q + Q.transpose());
}

double half_flux_integral(int p, int q) {
  if (p < 0 || q < 0)
    throw InvalidArgument("half_flux_integral: degrees must be >= 0");
  if ((p + q) % 2 != 0) return 0.0;  // odd integrand

  static std::map<std::pair<int, int>, double> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::minmax(p, q);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * 3.14159265358979323846);
  auto integrand = [&](double t) {
    // Orthonormal probabilists' Hermite recursion.
    double he0 = 1.0, he1 = t;
    auto he = [&](int k) {
      if (k == 0) return he0;
      double a = he0, b = he1;
      for (int j = 1; j < k; ++j) {
        double c = (t * b - std::sqrt(static_cast<double>(j)) * a) /
                   std::sqrt(static_cast<double>(j + 1));
        a = b;
        b = c;
      }
      return b;
    };
    return 2.0 * t * inv_sqrt2pi * std::exp(-0.5 * t * t) * he(p) * he(q);
  };

  // Gauss-Legendre on [0, 40], node count doubled until two successive
  // refinements agree to 1e-13.
  double prev = integrate_gauss(integrand, 0.0, 40.0, 200);
  double value = prev;
  for (int n = 400; n <= 6400; n *= 2) {
    value = integrate_gauss(integrand, 0.0, 40.0, n);
    if (std::abs(value - prev) <= 1e-13) break;
    prev = value;
  }
  cache[key] = value;
  return value;
}

Eigen::MatrixXd build_half_flux_matrix(const IndexSet& set) {
  const int m = set.even_count;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const MultiIndex& a = set.indices[i];
      const MultiIndex& b = set.indices[j];
      if (a.a[0] != b.a[0] || a.a[2] != b.a[2]) continue;
      const double v = half_flux_integral(a.a[1], b.a[1]);
      S(i, j) = v;
      S(j, i) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S,
                                                    Eigen::EigenvaluesOnly);
  const double tol_spd = 1e-12;
  if (es.eigenvalues().minCoeff() <= tol_spd)
    throw StructureError("build_half_flux_matrix: S is not SPD, min eig = " +
                         std::to_string(es.eigenvalues().minCoeff()));
  return S;
}

Eigen::MatrixXd build_selection_matrix(const IndexSet& set) {
  const int m = set.even_count;
  const int n = set.odd_count;
  std::vector<int> rows;
  for (int i = 0; i < m; ++i)
    if (set.indices[i].order() <= set.order - 1) rows.push_back(i);
  if (static_cast<int>(rows.size()) != n)
    throw StructureError(
        "build_selection_matrix: #{even, |alpha| <= M-1} = " +
        std::to_string(rows.size()) + " != n = " + std::to_string(n));
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, m);
  for (int k = 0; k < n; ++k) E(k, rows[k]) = 1.0;
  return E;
}

Eigen::VectorXd build_wall_vector(const IndexSet& set,
                                  const BoundaryData& bd) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(set.size());
  auto assign = [&](const MultiIndex& alpha, double v) {
    const int i = set.find(alpha);
    if (i >= 0) b(i) = v;
  };
  assign(MultiIndex{{0, 0, 0}}, bd.rho_w);
  assign(MultiIndex{{1, 0, 0}}, bd.u_w(0));
  assign(MultiIndex{{0, 1, 0}}, bd.u_w(1));
  assign(MultiIndex{{0, 0, 1}}, bd.u_w(2));
  const double th = bd.theta_w / std::sqrt(2.0);
  assign(MultiIndex{{2, 0, 0}}, th);
  assign(MultiIndex{{0, 2, 0}}, th);
  assign(MultiIndex{{0, 0, 2}}, th);
  return b;
}

MomentSystem build_full3d(int M, double nu) {
  if (M < 2) throw InvalidArgument("build_full3d: M must be >= 2");
  if (nu <= 0.0) throw InvalidArgument("build_full3d: nu must be > 0");
  MomentSystem sys;
  sys.order = M;
  sys.variant = "full3d";
  sys.nu = nu;
  sys.indices = enumerate_indices(M);
  sys.even_count = sys.indices.even_count;
  sys.odd_count = sys.indices.odd_count;
  sys.A = build_flux_matrix(sys.indices);
  sys.Q = build_bgk_collision(sys.indices, nu);
  return sys;
}

MomentSystem build_kramers3(double nu) {
  if (nu <= 0.0) throw InvalidArgument("build_kramers3: nu must be > 0");
  MomentSystem sys;
  sys.order = 3;
  sys.variant = "kramers3";
  sys.nu = nu;
  sys.even_count = 2;  // (u1, f3)
  sys.odd_count = 1;   // (sigma12)
  sys.A = Eigen::MatrixXd::Zero(3, 3);
  sys.A(0, 2) = 1.0;
  sys.A(2, 0) = 1.0;
  sys.A(1, 2) = std::sqrt(2.0);
  sys.A(2, 1) = std::sqrt(2.0);
  sys.Q = Eigen::MatrixXd::Zero(3, 3);
  sys.Q(1, 1) = nu;
  sys.Q(2, 2) = nu;
  return sys;
}

MomentSystem build_reduced_couette(int M, double nu) {
  if (M < 3 || M % 2 == 0)
    throw InvalidArgument("build_reduced_couette: M must be odd and >= 3");
  if (nu <= 0.0) throw InvalidArgument("build_reduced_couette: nu must be > 0");
  const int m = (M + 1) / 2;  // f1, f3, ..., f_M
  const int n = (M - 1) / 2;  // f2, f4, ..., f_{M-1}
  Eigen::MatrixXd Mb = Eigen::MatrixXd::Zero(m, n);
  for (int i = 0; i < m; ++i) {
    // f_{2i+1} couples to f_{2i} and f_{2i+2} with sqrt(k) weights.
    if (i < n) Mb(i, i) = std::sqrt(static_cast<double>(2 * i + 1));
    if (i >= 1) Mb(i, i - 1) = std::sqrt(static_cast<double>(2 * i));
  }
  MomentSystem sys;
  sys.order = M;
  sys.variant = "reduced1d";
  sys.nu = nu;
  sys.even_count = m;
  sys.odd_count = n;
  sys.A = Eigen::MatrixXd::Zero(M, M);
  sys.A.topRightCorner(m, n) = Mb;
  sys.A.bottomLeftCorner(n, m) = Mb.transpose();
  sys.Q = nu * Eigen::MatrixXd::Identity(M, M);
  sys.Q(0, 0) = 0.0;  // f1 is the conserved reduced moment
  return sys;
}

MomentSystem make_explicit_system(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& Q, double nu,
                                  int even_count, int odd_count) {
  if (A.rows() != A.cols() || Q.rows() != Q.cols() || A.rows() != Q.rows())
    throw InvalidArgument("make_explicit_system: A and Q must be square, same size");
  MomentSystem sys;
  sys.order = static_cast<int>(A.rows());
  sys.variant = "explicit";
  sys.nu = nu;
  sys.A = A;
  sys.Q = Q;
  sys.even_count = even_count;
  sys.odd_count = odd_count;
  return sys;
}

}  // namespace halfmom
