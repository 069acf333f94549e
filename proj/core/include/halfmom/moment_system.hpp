#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace halfmom {

/// Hermite multi-index alpha = (a1, a2, a3), |alpha| <= M.
struct MultiIndex {
  std::array<int, 3> a{0, 0, 0};

  int order() const { return a[0] + a[1] + a[2]; }
  bool even() const { return a[1] % 2 == 0; }

  bool operator==(const MultiIndex& o) const { return a == o.a; }
};

/// Full index enumeration for a 3D system of order M: even-a2 indices
/// first, then odd-a2, graded lexicographic within each parity class.
struct IndexSet {
  int order = 0;
  std::vector<MultiIndex> indices;
  int even_count = 0;  // m
  int odd_count = 0;   // n

  int size() const { return static_cast<int>(indices.size()); }
  /// Position of alpha in the enumeration, or -1 if absent.
  int find(const MultiIndex& alpha) const;
};

IndexSet enumerate_indices(int M);

/// The constant-coefficient half-space system A W' = -Q W + h.
struct MomentSystem {
  int order = 0;
  std::string variant;  // "full3d" | "kramers3" | "reduced1d" | "explicit"
  double nu = 1.0;
  Eigen::MatrixXd A;
  Eigen::MatrixXd Q;
  int even_count = 0;  // m (0 when no parity structure is known)
  int odd_count = 0;   // n
  IndexSet indices;    // populated for full3d only

  int size() const { return static_cast<int>(A.rows()); }
  bool has_parity() const { return even_count + odd_count == size() && size() > 0; }
  /// The m x n coupling block of A (parity systems only).
  Eigen::MatrixXd flux_coupling() const;
};

/// Wall data entering the Maxwell boundary condition.
struct BoundaryData {
  double rho_w = 0.0;
  Eigen::Vector3d u_w = Eigen::Vector3d::Zero();  // u_w . n = 0 assumed
  double theta_w = 0.0;
  double chi = 1.0;

  double chi_hat() const;
};

double chi_hat_from_chi(double chi);

/// Flux matrix A from the Hermite recursion:
/// A[alpha, beta] = sqrt(a2) if beta = alpha - e2, sqrt(a2+1) if
/// beta = alpha + e2 (and |beta| <= M), else 0.
Eigen::MatrixXd build_flux_matrix(const IndexSet& set);

/// BGK collision matrix Q = nu (I - Pi) with Pi the projector onto the
/// five collision-invariant coefficient vectors.
Eigen::MatrixXd build_bgk_collision(const IndexSet& set, double nu);

/// Half-range flux integral J(p, q) = int |t| g(t) he_p(t) he_q(t) dt
/// against the standard Gaussian density, orthonormal Hermite basis.
double half_flux_integral(int p, int q);

/// The m x m matrix S over the even-parity indices,
/// S[alpha, beta] = delta_{a1 b1} delta_{a3 b3} J(a2, b2). SPD.
Eigen::MatrixXd build_half_flux_matrix(const IndexSet& set);

/// Selection matrix E (n x m) picking the even indices with |alpha| <= M-1.
Eigen::MatrixXd build_selection_matrix(const IndexSet& set);

/// Wall vector b: b_0 = rho_w, b_{e_i} = u_i^w, b_{2 e_i} = theta_w/sqrt(2).
Eigen::VectorXd build_wall_vector(const IndexSet& set, const BoundaryData& bd);

/// Full 3D BGK system of order M >= 2.
MomentSystem build_full3d(int M, double nu);

/// Reduced M=3 Kramers system in variables (u1, f3, sigma12).
MomentSystem build_kramers3(double nu);

/// Reduced 1D system of odd order M >= 3 in variables
/// W_e = (f1, f3, ..., f_M), W_o = (f2, ..., f_{M-1}).
MomentSystem build_reduced_couette(int M, double nu);

/// System with user-supplied matrices. Parity sizes optional (0 = unknown).
MomentSystem make_explicit_system(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& Q, double nu,
                                  int even_count = 0, int odd_count = 0);

}  // namespace halfmom
