#pragma once

#include <Eigen/Dense>
#include <string>

#include "halfmom/moment_system.hpp"
#include "halfmom/solver.hpp"
#include "halfmom/subspace.hpp"
#include "halfmom/wellposedness.hpp"

namespace halfmom {

enum class HOption { identity, flux, custom };

/// Maxwell-type boundary operator over the (W_e, W_o) ordering:
/// grad kind     [chi_hat E S, E M],
/// modified kind [chi_hat M^T, H] with SPD H.
struct MaxwellBC {
  std::string kind;  // "grad" | "modified"
  double chi = 1.0;
  double chi_hat = 0.0;
  Eigen::MatrixXd rows_even;  // k x m
  Eigen::MatrixXd rows_odd;   // k x n
  Eigen::MatrixXd H;          // n x n (modified kind only)

  int rows() const { return static_cast<int>(rows_odd.rows()); }
  /// The full k x N operator [rows_even, rows_odd].
  Eigen::MatrixXd full() const;
  /// B3 = full() * V3, the operator seen by the wellposedness checker.
  BoundaryOperator b3(const SubspaceDecomposition& dec) const;
};

MaxwellBC assemble_grad_bc(const MomentSystem& sys, double chi);

/// H options: identity = c*I (c > 0), flux = M^T S^{-1} M (full3d only),
/// custom = user-supplied SPD matrix.
MaxwellBC assemble_modified_bc(const MomentSystem& sys, HOption h_option,
                               double chi, double c = 1.0,
                               const Eigen::MatrixXd* H_custom = nullptr);

struct MaxwellSolveResult {
  HalfspaceSolution<ExpPolyVec> layer;
  Eigen::VectorXd compat;  // G_e^T (Wbar_e - b_e)
  double boundary_identity_norm = 0.0;
  double ratio = 0.0;  // (||W||_a + ||compat||) / (||h||_a + ||g1|| + ||g2||)
};

/// Staged solve of the layer problem under the modified Maxwell BC:
/// reduced condition Z3^T B, then the compatibility system for the
/// outside-flow values. Requires chi_hat > 0 and r2 = 0.
MaxwellSolveResult solve_layer_with_maxwell(
    const MomentSystem& sys, const SubspaceDecomposition& dec,
    const SpectralFactorization& spec, const MaxwellBC& bc,
    const Eigen::VectorXd& g1, const Eigen::VectorXd& g2, const ExpPolyVec& h,
    double a);

}  // namespace halfmom
