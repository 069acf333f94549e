#include "halfmom/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "halfmom/errors.hpp"

namespace halfmom {

namespace {

// Flips each column so its largest-magnitude entry is positive.
void canonicalize_signs(Eigen::MatrixXd& B) {
  for (int j = 0; j < B.cols(); ++j) {
    int imax = 0;
    B.col(j).cwiseAbs().maxCoeff(&imax);
    if (B(imax, j) < 0.0) B.col(j) = -B.col(j);
  }
}

// Thin QR with the diagonal-of-R sign fixed by the convention.
// B must have full column rank.
void thin_qr(const Eigen::MatrixXd& B, SignConvention sign,
             Eigen::MatrixXd& Qthin, Eigen::MatrixXd& R) {
  const auto k = B.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  Qthin = qr.householderQ() * Eigen::MatrixXd::Identity(B.rows(), k);
  R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (int j = 0; j < k; ++j) {
    const bool flip = (sign == SignConvention::positive_diagonal)
                          ? (R(j, j) < 0.0)
                          : (R(j, j) > 0.0);
    if (flip) {
      Qthin.col(j) = -Qthin.col(j);
      R.row(j) = -R.row(j);
    }
  }
}

// Orthonormal complement of the column span of P (P has orthonormal
// columns) inside R^n, via column-pivoted QR of the projector complement.
Eigen::MatrixXd orth_complement(const Eigen::MatrixXd& P, int n,
                                SignConvention sign) {
  const int k = static_cast<int>(P.cols());
  const int want = n - k;
  if (want <= 0) return Eigen::MatrixXd::Zero(n, 0);
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n, n);
  if (k > 0) C -= P * P.transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C);
  Eigen::MatrixXd Qfull =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd B = Qfull.leftCols(want);
  // Re-orthogonalize against P to scrub rounding.
  if (k > 0) B -= P * (P.transpose() * B);
  Eigen::HouseholderQR<Eigen::MatrixXd> reorth(B);
  B = reorth.householderQ() * Eigen::MatrixXd::Identity(n, want);
  canonicalize_signs(B);
  if (sign == SignConvention::negative_diagonal) B = -B;
  return B;
}

double safe_norm(const Eigen::MatrixXd& M) {
  return M.size() == 0 ? 0.0 : M.norm();
}

}  // namespace

Eigen::MatrixXd SubspaceDecomposition::V() const {
  Eigen::MatrixXd out(N, N);
  out << V1, V2, V3;
  return out;
}

Eigen::MatrixXd SubspaceDecomposition::U() const {
  Eigen::MatrixXd out(N, N);
  out << G, U2, V3;
  return out;
}

CompatibilityReport check_compatibility(const Eigen::MatrixXd& A,
                                        const Eigen::MatrixXd& Q, double nu) {
  const int N = static_cast<int>(A.rows());
  CompatibilityReport rep;
  rep.asymmetry = (A - A.transpose()).norm();
  rep.a_symmetric = rep.asymmetry <= 1e-12 * std::max(1.0, A.norm());
  Eigen::MatrixXd Qs = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Qs, Eigen::EigenvaluesOnly);
  rep.q_min_eig = es.eigenvalues().minCoeff();
  rep.q_psd = rep.q_min_eig >= -1e-12 * std::max(1.0, nu) &&
              (Q - Q.transpose()).norm() <= 1e-12 * std::max(1.0, Q.norm());

  Eigen::MatrixXd stacked(2 * N, N);
  stacked << A, Q;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double tol = N * 1e-14 * (sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  rep.joint_nullspace_dim = N - rank;
  rep.compatible = rep.a_symmetric && rep.q_psd && rep.joint_nullspace_dim == 0;
  return rep;
}

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& M, double tol) {
  const int cols = static_cast<int>(M.cols());
  if (M.size() == 0 || M.rows() == 0)
    return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = tol * (sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  Eigen::MatrixXd basis = svd.matrixV().rightCols(cols - rank);
  canonicalize_signs(basis);
  return basis;
}

namespace {

// Embeds an m x k even-row block into an N = m + n row matrix.
Eigen::MatrixXd embed_even(const Eigen::MatrixXd& B, int m, int n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m + n, B.cols());
  out.topRows(m) = B;
  return out;
}
Eigen::MatrixXd embed_odd(const Eigen::MatrixXd& B, int m, int n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m + n, B.cols());
  out.bottomRows(n) = B;
  return out;
}

Eigen::MatrixXd hcat(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd out(std::max(A.rows(), B.rows()), A.cols() + B.cols());
  out << A, B;
  return out;
}

}  // namespace

SubspaceDecomposition build_decomposition(const MomentSystem& sys,
                                          SignConvention sign) {
  const Eigen::MatrixXd& A = sys.A;
  const Eigen::MatrixXd& Q = sys.Q;
  const int N = sys.size();

  CompatibilityReport rep = check_compatibility(A, Q, sys.nu);
  if (!rep.compatible) {
    if (!rep.a_symmetric)
      throw StructureError("build_decomposition: A is not symmetric");
    if (!rep.q_psd)
      throw StructureError("build_decomposition: Q is not symmetric PSD");
    throw StructureError(
        "build_decomposition: Null(A) and Null(Q) intersect, dim = " +
        std::to_string(rep.joint_nullspace_dim));
  }

  SubspaceDecomposition dec;
  dec.N = N;

  if (sys.has_parity()) {
    const int m = sys.even_count;
    const int n = sys.odd_count;
    const Eigen::MatrixXd Mb = sys.flux_coupling();
    const Eigen::MatrixXd Qe = Q.topLeftCorner(m, m);
    const Eigen::MatrixXd Qo = Q.bottomRightCorner(n, n);

    ParityBlocks pb;
    pb.Ge = nullspace_basis(Qe);
    pb.Go = nullspace_basis(Qo);
    pb.p1 = static_cast<int>(pb.Ge.cols());
    pb.p2 = static_cast<int>(pb.Go.cols());

    // G^T A G = [[0, D], [D^T, 0]] with D = Ge^T Mb Go; its nullspace
    // splits into Null(D^T) (even side) and Null(D) (odd side).
    const Eigen::MatrixXd D = pb.Ge.transpose() * Mb * pb.Go;
    pb.Xe = nullspace_basis(D.transpose());
    pb.Xo = nullspace_basis(D);
    pb.r1 = static_cast<int>(pb.Xe.cols());
    pb.r2 = static_cast<int>(pb.Xo.cols());

    pb.Y1 = pb.Ge * pb.Xe;
    pb.Z1 = pb.Go * pb.Xo;

    Eigen::MatrixXd Kz, Ky;
    if (pb.p1 > 0)
      thin_qr(Mb.transpose() * pb.Ge, sign, pb.Z2, Kz);
    else {
      pb.Z2 = Eigen::MatrixXd::Zero(n, 0);
      Kz = Eigen::MatrixXd::Zero(0, 0);
    }
    if (pb.p2 > 0)
      thin_qr(Mb * pb.Go, sign, pb.Y2, Ky);
    else {
      pb.Y2 = Eigen::MatrixXd::Zero(m, 0);
      Ky = Eigen::MatrixXd::Zero(0, 0);
    }

    pb.Y3 = orth_complement(hcat(pb.Y1, pb.Y2), m, sign);
    pb.Z3 = orth_complement(hcat(pb.Z1, pb.Z2), n, sign);

    dec.p = pb.p1 + pb.p2;
    dec.r = pb.r1 + pb.r2;
    dec.G = hcat(embed_even(pb.Ge, m, n), embed_odd(pb.Go, m, n));
    dec.X = Eigen::MatrixXd::Zero(dec.p, dec.r);
    dec.X.topLeftCorner(pb.p1, pb.r1) = pb.Xe;
    dec.X.bottomRightCorner(pb.p2, pb.r2) = pb.Xo;
    dec.V1 = hcat(embed_even(pb.Y1, m, n), embed_odd(pb.Z1, m, n));
    // V2 columns follow the column order of A G: the Ge block maps to odd
    // rows (Mb^T Ge), the Go block to even rows (Mb Go).
    dec.V2 = hcat(embed_odd(pb.Z2, m, n), embed_even(pb.Y2, m, n));
    dec.K = Eigen::MatrixXd::Zero(dec.p, dec.p);
    dec.K.topLeftCorner(pb.p1, pb.p1) = Kz;
    dec.K.bottomRightCorner(pb.p2, pb.p2) = Ky;
    dec.V3 = hcat(embed_even(pb.Y3, m, n), embed_odd(pb.Z3, m, n));
    dec.parity = std::move(pb);
  } else {
    dec.G = nullspace_basis(Q);
    dec.p = static_cast<int>(dec.G.cols());
    const Eigen::MatrixXd GAG = dec.G.transpose() * A * dec.G;
    dec.X = nullspace_basis(0.5 * (GAG + GAG.transpose()));
    dec.r = static_cast<int>(dec.X.cols());
    dec.V1 = dec.G * dec.X;
    if (dec.p > 0) {
      thin_qr(A * dec.G, sign, dec.V2, dec.K);
    } else {
      dec.V2 = Eigen::MatrixXd::Zero(N, 0);
      dec.K = Eigen::MatrixXd::Zero(0, 0);
    }
    dec.V3 = orth_complement(hcat(dec.V1, dec.V2), N, sign);
  }

  dec.U2 = A * dec.G * dec.X;

  const Eigen::MatrixXd& V1 = dec.V1;
  const Eigen::MatrixXd& V2 = dec.V2;
  const Eigen::MatrixXd& V3 = dec.V3;
  dec.A21 = dec.U2.transpose() * A * V1;
  dec.A22 = dec.U2.transpose() * A * V2;
  dec.A23 = dec.U2.transpose() * A * V3;
  dec.A32 = V3.transpose() * A * V2;
  dec.A33 = V3.transpose() * A * V3;
  dec.A33 = 0.5 * (dec.A33 + dec.A33.transpose());
  dec.Q22 = dec.U2.transpose() * Q * V2;
  dec.Q23 = dec.U2.transpose() * Q * V3;
  dec.Q32 = V3.transpose() * Q * V2;
  dec.Q33 = V3.transpose() * Q * V3;
  dec.Q33 = 0.5 * (dec.Q33 + dec.Q33.transpose());

  DecompositionResiduals res = decomposition_residuals(sys, dec);
  if (res.v_orth > 1e-11 || res.q_first > 1e-12 || res.a31 > 1e-12 ||
      res.ag_span > 1e-12 || res.rank_a21 != dec.r)
    throw StructureError(
        "build_decomposition: block-structure invariants violated "
        "(rank misdetection?)");
  if (dec.dim3() > 0 && res.q33_min_eig <= 0.0)
    throw StructureError("build_decomposition: Q33 is not SPD");
  return dec;
}

DecompositionResiduals decomposition_residuals(
    const MomentSystem& sys, const SubspaceDecomposition& dec) {
  const Eigen::MatrixXd& A = sys.A;
  const Eigen::MatrixXd& Q = sys.Q;
  const double normA = std::max(1e-300, A.norm());
  const double normQ = std::max(1e-300, Q.norm());
  DecompositionResiduals res;
  Eigen::MatrixXd V = dec.V();
  res.v_orth =
      (V.transpose() * V - Eigen::MatrixXd::Identity(dec.N, dec.N)).norm();
  double qf = safe_norm(dec.G.transpose() * Q * V) / normQ;
  qf = std::max(qf, safe_norm(Q * dec.G) / normQ);
  res.q_first = qf;
  res.a31 = safe_norm(dec.V3.transpose() * A * dec.V1) / normA;
  res.a33_asym =
      safe_norm(dec.V3.transpose() * A * dec.V3 -
                (dec.V3.transpose() * A * dec.V3).transpose()) /
      normA;
  res.ag_span = safe_norm(A * dec.G - dec.V2 * dec.K) / normA;
  if (dec.dim3() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dec.Q33,
                                                      Eigen::EigenvaluesOnly);
    res.q33_min_eig = es.eigenvalues().minCoeff();
  } else {
    res.q33_min_eig = 0.0;
  }
  if (dec.r > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dec.A21);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = dec.r * 1e-13 * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > tol) ++rank;
    res.rank_a21 = rank;
  } else {
    res.rank_a21 = 0;
  }
  return res;
}

SpectralFactorization spectral_factorization(const SubspaceDecomposition& dec,
                                             double weight,
                                             double tol_eig_override) {
  const int d = dec.dim3();
  SpectralFactorization sf;
  if (d == 0) {
    sf.L = sf.R = sf.T = Eigen::MatrixXd::Zero(0, 0);
    sf.lambda = Eigen::VectorXd::Zero(0);
    sf.tol_eig = tol_eig_override > 0 ? tol_eig_override : 1e-10;
    return sf;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(dec.Q33);
  if (llt.info() != Eigen::Success)
    throw StructureError(
        "spectral_factorization: Cholesky of Q33 failed (not SPD)");
  sf.L = llt.matrixL();

  // L^{-1} A33 L^{-T}, symmetrized against rounding.
  Eigen::MatrixXd B = sf.L.triangularView<Eigen::Lower>().solve(dec.A33);
  B = sf.L.triangularView<Eigen::Lower>()
          .solve(B.transpose())
          .transpose();
  B = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  Eigen::VectorXd lam = es.eigenvalues();
  Eigen::MatrixXd R = es.eigenvectors();

  const double lam_abs_max = lam.cwiseAbs().maxCoeff();
  sf.tol_eig = tol_eig_override > 0
                   ? tol_eig_override
                   : 1e-10 * std::max(1.0, lam_abs_max);

  std::vector<int> pos, zer, neg;
  for (int i = 0; i < d; ++i) {
    if (lam(i) > sf.tol_eig)
      pos.push_back(i);
    else if (lam(i) < -sf.tol_eig)
      neg.push_back(i);
    else
      zer.push_back(i);
  }
  // Positive block descending, negative block ascending in magnitude.
  std::sort(pos.begin(), pos.end(),
            [&](int a, int b) { return lam(a) > lam(b); });
  std::sort(neg.begin(), neg.end(),
            [&](int a, int b) { return std::abs(lam(a)) < std::abs(lam(b)); });
  std::sort(zer.begin(), zer.end(),
            [&](int a, int b) { return lam(a) < lam(b); });

  sf.n_plus = static_cast<int>(pos.size());
  sf.n_zero = static_cast<int>(zer.size());
  sf.n_minus = static_cast<int>(neg.size());

  std::vector<int> perm;
  perm.insert(perm.end(), pos.begin(), pos.end());
  perm.insert(perm.end(), zer.begin(), zer.end());
  perm.insert(perm.end(), neg.begin(), neg.end());

  sf.lambda.resize(d);
  sf.R.resize(d, d);
  for (int i = 0; i < d; ++i) {
    sf.lambda(i) = lam(perm[i]);
    sf.R.col(i) = R.col(perm[i]);
  }
  // The zero block is treated as exactly zero downstream.
  sf.lambda.segment(sf.n_plus, sf.n_zero).setZero();

  sf.T = sf.L.transpose().triangularView<Eigen::Upper>().solve(sf.R);
  sf.lambda_max = lam.maxCoeff();
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i)
    margin = std::min(margin, std::abs(std::abs(lam(i)) - sf.tol_eig));
  sf.zero_margin = margin;

  if (weight >= 0.0 && sf.lambda_max > 0.0 && weight >= 1.0 / sf.lambda_max)
    throw WeightError("spectral_factorization: weight a = " +
                      std::to_string(weight) +
                      " violates a < 1/lambda_max = " +
                      std::to_string(1.0 / sf.lambda_max));
  return sf;
}

}  // namespace halfmom
