#include "halfmom/wellposedness.hpp"

#include <cmath>

#include "halfmom/errors.hpp"

namespace halfmom {

namespace {

double sigma_min(const Eigen::MatrixXd& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues().minCoeff();
}

int numerical_rank(const Eigen::MatrixXd& M, double tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = tol * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

}  // namespace

WellposednessVerdict check_square_bc(const Eigen::MatrixXd& B,
                                     const SpectralFactorization& spec) {
  if (B.rows() != spec.n_plus)
    throw InvalidArgument("check_square_bc: B must have n+ = " +
                          std::to_string(spec.n_plus) + " rows, got " +
                          std::to_string(B.rows()));
  if (B.cols() != spec.T.cols())
    throw InvalidArgument("check_square_bc: B has wrong column count");

  WellposednessVerdict v;
  v.n_plus = spec.n_plus;
  if (spec.n_plus == 0) {
    // No boundary condition is needed; vacuously solvable and stable.
    v.solvable = true;
    v.stable = true;
    return v;
  }
  const Eigen::MatrixXd BTp = B * spec.Tplus();
  const Eigen::MatrixXd BT0 = B * spec.Tzero();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(BTp);
  v.sigma_min_BTplus = svd.singularValues().minCoeff();
  const double tol_rank =
      BTp.rows() * 1e-14 * svd.singularValues().maxCoeff();
  v.solvable = v.sigma_min_BTplus > tol_rank && v.sigma_min_BTplus > 0.0;
  v.norm_BTzero = BT0.size() == 0 ? 0.0 : BT0.norm();
  const double t0_norm = spec.n_zero == 0 ? 0.0 : spec.Tzero().norm();
  v.stable = v.norm_BTzero <= 1e-10 * std::max(1e-300, B.norm() * t0_norm) ||
             spec.n_zero == 0;
  return v;
}

std::optional<Eigen::MatrixXd> find_certificate_C(
    const Eigen::MatrixXd& B3, const SpectralFactorization& spec) {
  const int k = static_cast<int>(B3.rows());
  const int np = spec.n_plus;
  if (np == 0) return Eigen::MatrixXd::Zero(k, 0);

  // Orthogonal complement of range(B3 T0) inside R^k. The rank cutoff is
  // tied to the scale of B3 T0's factors, not to B3 T0 itself: when the
  // product is numerically zero its own sigma_max is meaningless.
  Eigen::MatrixXd Nc;
  if (spec.n_zero == 0) {
    Nc = Eigen::MatrixXd::Identity(k, k);
  } else {
    const Eigen::MatrixXd BT0 = B3 * spec.Tzero();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(BT0.transpose(),
                                          Eigen::ComputeFullV);
    const double scale =
        std::max(B3.norm() * spec.Tzero().norm(),
                 svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
    const double cutoff = 1e-10 * std::max(1e-300, scale);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > cutoff) ++rank;
    Nc = svd.matrixV().rightCols(k - rank);
  }
  if (Nc.cols() < np) return std::nullopt;

  const Eigen::MatrixXd F = Nc.transpose() * (B3 * spec.Tplus());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(F, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double tol = F.rows() * 1e-12 * (sv.size() > 0 ? sv(0) : 0.0);
  if (sv.size() < np || sv(np - 1) <= tol) return std::nullopt;
  // C = Nc * U(:, 1:n+) gives C^T B3 T+ = Sigma V^T, invertible.
  return Nc * svd.matrixU().leftCols(np);
}

WellposednessVerdict check_general_bc(const BoundaryOperator& bc,
                                      const SpectralFactorization& spec) {
  const Eigen::MatrixXd& B3 = bc.B3;
  if (B3.cols() != spec.T.cols())
    throw InvalidArgument("check_general_bc: B3 has wrong column count");
  if (B3.rows() == spec.n_plus) return check_square_bc(B3, spec);

  WellposednessVerdict v;
  v.n_plus = spec.n_plus;
  v.norm_BTzero =
      spec.n_zero == 0 ? 0.0 : (B3 * spec.Tzero()).norm();
  auto C = find_certificate_C(B3, spec);
  if (!C) {
    v.solvable = false;
    v.stable = false;
    return v;
  }
  v.certificate_C = *C;
  const Eigen::MatrixXd CtBTp = C->transpose() * B3 * spec.Tplus();
  v.sigma_min_BTplus = spec.n_plus == 0 ? 0.0 : sigma_min(CtBTp);
  v.solvable = true;
  const double ct_bt0 =
      spec.n_zero == 0 ? 0.0
                       : (C->transpose() * B3 * spec.Tzero()).norm();
  v.stable = ct_bt0 <= 1e-10 * std::max(1.0, B3.norm());
  return v;
}

ParityCounts predicted_counts(const MomentSystem& sys,
                              const SubspaceDecomposition& dec) {
  if (!dec.parity)
    throw StructureError("predicted_counts: decomposition has no parity blocks");
  const ParityBlocks& pb = *dec.parity;
  ParityCounts c;
  c.p1 = pb.p1;
  c.p2 = pb.p2;
  c.r1 = pb.r1;
  c.r2 = pb.r2;
  c.n_plus_predicted = sys.odd_count - pb.r2 - pb.p1;
  c.even_identity = pb.r1 + pb.p2;
  c.odd_identity = pb.r2 + pb.p1;
  return c;
}

std::array<int, 3> offdiag_signature(const Eigen::MatrixXd& D, double tol) {
  const int alpha = static_cast<int>(D.rows());
  const int beta = static_cast<int>(D.cols());
  const int gamma = numerical_rank(D, tol);
  return {gamma, gamma, alpha + beta - 2 * gamma};
}

}  // namespace halfmom
