#pragma once

#include <Eigen/Dense>
#include <optional>

#include "halfmom/moment_system.hpp"

namespace halfmom {

/// Verdict of the Null(A) cap Null(Q) = {0} check, with the individual
/// structural validations reported separately.
struct CompatibilityReport {
  bool compatible = false;
  int joint_nullspace_dim = 0;
  double asymmetry = 0.0;   // ||A - A^T||
  double q_min_eig = 0.0;   // smallest eigenvalue of (Q + Q^T)/2
  bool a_symmetric = false;
  bool q_psd = false;
};

CompatibilityReport check_compatibility(const Eigen::MatrixXd& A,
                                        const Eigen::MatrixXd& Q,
                                        double nu = 1.0);

/// Orthonormal basis of the (numerical) nullspace of M. Singular values
/// <= tol * sigma_max are treated as zero. May be empty (N x 0).
Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& M,
                                double tol = 1e-10);

/// Parity-resolved blocks of the decomposition, available when the system
/// carries the even/odd block structure.
struct ParityBlocks {
  int p1 = 0, p2 = 0, r1 = 0, r2 = 0;
  Eigen::MatrixXd Ge, Go;  // nullspace bases of Q_e, Q_o
  Eigen::MatrixXd Xe, Xo;
  Eigen::MatrixXd Y1, Y2, Y3;  // even-row factors of V1, V2, V3
  Eigen::MatrixXd Z1, Z2, Z3;  // odd-row factors
};

/// QR sign convention for the non-unique bases V2 and V3. The flipped
/// convention exists to test basis independence of the solver.
enum class SignConvention { positive_diagonal, negative_diagonal };

/// Simultaneous transformation (G, X, V, U) separating collision
/// invariants, degenerate flux directions and the reduced block.
struct SubspaceDecomposition {
  int N = 0, p = 0, r = 0;
  Eigen::MatrixXd G;   // N x p, orthonormal basis of Null(Q)
  Eigen::MatrixXd X;   // p x r, orthonormal basis of Null(G^T A G)
  Eigen::MatrixXd V1;  // N x r = G X
  Eigen::MatrixXd V2;  // N x p, span = span(A G)
  Eigen::MatrixXd V3;  // N x (N - p - r)
  Eigen::MatrixXd U2;  // N x r = A G X  (U1 = G, U3 = V3)
  Eigen::MatrixXd K;   // p x p, A G = V2 K

  // Transformed blocks used by the solver.
  Eigen::MatrixXd A21, A22, A23, A32, A33;
  Eigen::MatrixXd Q22, Q23, Q32, Q33;

  std::optional<ParityBlocks> parity;

  int dim3() const { return N - p - r; }
  Eigen::MatrixXd V() const;
  Eigen::MatrixXd U() const;
};

SubspaceDecomposition build_decomposition(
    const MomentSystem& sys,
    SignConvention sign = SignConvention::positive_diagonal);

/// Spectral factorization of the reduced pencil (A33, Q33):
/// Q33 = L L^T, L^{-1} A33 L^{-T} R = R Lambda, T = L^{-T} R.
struct SpectralFactorization {
  Eigen::MatrixXd L;       // lower Cholesky factor of Q33
  Eigen::MatrixXd R;       // orthogonal eigenvectors
  Eigen::VectorXd lambda;  // positive block desc, zeros, negatives by |.| asc
  Eigen::MatrixXd T;       // [T+, T0, T-]
  int n_plus = 0, n_zero = 0, n_minus = 0;
  double lambda_max = 0.0;  // largest eigenvalue of Q33^{-1} A33
  double tol_eig = 0.0;
  double zero_margin = 0.0;  // distance of the closest eigenvalue to tol_eig

  Eigen::MatrixXd Tplus() const { return T.leftCols(n_plus); }
  Eigen::MatrixXd Tzero() const { return T.middleCols(n_plus, n_zero); }
  Eigen::MatrixXd Tminus() const { return T.rightCols(n_minus); }
  Eigen::VectorXd lambda_plus() const { return lambda.head(n_plus); }
  Eigen::VectorXd lambda_minus() const { return lambda.tail(n_minus); }
};

/// Factorizes (A33, Q33). When weight >= 0 is supplied, validates
/// weight < 1/lambda_max (throws WeightError on violation).
SpectralFactorization spectral_factorization(const SubspaceDecomposition& dec,
                                             double weight = -1.0,
                                             double tol_eig_override = -1.0);

/// Residual norms of every Lemma-type block assertion, for reports/tests.
struct DecompositionResiduals {
  double v_orth;     // ||V^T V - I||
  double q_first;    // max ||Q_1j||, ||Q_i1|| relative to ||Q||
  double a31;        // ||A31|| / ||A||
  double a33_asym;   // ||A33 - A33^T|| / ||A||
  double ag_span;    // ||A G - V2 K|| / ||A||
  double q33_min_eig;
  int rank_a21;
};

DecompositionResiduals decomposition_residuals(const MomentSystem& sys,
                                               const SubspaceDecomposition& dec);

}  // namespace halfmom
