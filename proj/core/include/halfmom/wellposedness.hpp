#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

#include "halfmom/subspace.hpp"

namespace halfmom {

/// A candidate boundary operator acting on V3^T W(0).
struct BoundaryOperator {
  Eigen::MatrixXd B3;  // k x (n+ + n0 + n-)
  Eigen::VectorXd g;   // k
  std::string description;  // "grad" | "modified" | "custom"
};

struct WellposednessVerdict {
  bool solvable = false;  // rank(B T+) = n+ (via certificate when rectangular)
  bool stable = false;    // ||C^T B T0|| below tolerance
  int n_plus = 0;
  double sigma_min_BTplus = 0.0;  // smallest singular value of (C^T) B T+
  double norm_BTzero = 0.0;       // ||B T0|| (raw operator)
  std::optional<Eigen::MatrixXd> certificate_C;
};

/// Theorem-style check for a square operator B (n+ rows).
WellposednessVerdict check_square_bc(const Eigen::MatrixXd& B,
                                     const SpectralFactorization& spec);

/// Rectangular operator check; searches for a certificate matrix C with
/// C^T B3 T+ invertible and C^T B3 T0 = 0.
WellposednessVerdict check_general_bc(const BoundaryOperator& bc,
                                      const SpectralFactorization& spec);

/// Certificate search: project the row space of B3 onto the orthogonal
/// complement of range(B3 T0), then test rank against n+.
std::optional<Eigen::MatrixXd> find_certificate_C(
    const Eigen::MatrixXd& B3, const SpectralFactorization& spec);

/// Parity-based counting of Lemma type: n+ = n - r2 - p1, r1 + p2 = r2 + p1.
struct ParityCounts {
  int n_plus_predicted = 0;
  int even_identity = 0;  // r1 + p2
  int odd_identity = 0;   // r2 + p1
  int p1 = 0, p2 = 0, r1 = 0, r2 = 0;
};

ParityCounts predicted_counts(const MomentSystem& sys,
                              const SubspaceDecomposition& dec);

/// Inertia (n_pos, n_neg, n_zero) of [[0, D], [D^T, 0]] from the rank of D.
std::array<int, 3> offdiag_signature(const Eigen::MatrixXd& D,
                                     double tol = 1e-10);

}  // namespace halfmom
