#include <doctest.h>

#include <cmath>

#include "halfmom/errors.hpp"
#include "halfmom/moment_system.hpp"
#include "halfmom/subspace.hpp"

using namespace halfmom;

TEST_CASE("check_compatibility") {
  const MomentSystem k3 = build_kramers3(1.0);
  CHECK(check_compatibility(k3.A, k3.Q).compatible);

  CHECK(check_compatibility(Eigen::MatrixXd::Identity(4, 4),
                            Eigen::MatrixXd::Zero(4, 4))
            .compatible);

  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(2, 2);
  Q(0, 0) = 1.0;
  const CompatibilityReport rep =
      check_compatibility(Eigen::MatrixXd::Zero(2, 2), Q);
  CHECK_FALSE(rep.compatible);
  CHECK(rep.joint_nullspace_dim == 1);
}

TEST_CASE("check_compatibility flags structural defects") {
  Eigen::MatrixXd A(2, 2);
  A << 0, 1, 0, 0;  // not symmetric
  const auto rep = check_compatibility(A, Eigen::MatrixXd::Identity(2, 2));
  CHECK_FALSE(rep.a_symmetric);
  CHECK(rep.asymmetry > 0.5);

  const auto rep2 = check_compatibility(Eigen::MatrixXd::Identity(2, 2),
                                        -Eigen::MatrixXd::Identity(2, 2));
  CHECK_FALSE(rep2.q_psd);
}

TEST_CASE("nullspace_basis") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1.0;
  const Eigen::MatrixXd B = nullspace_basis(D);
  CHECK(B.cols() == 1);
  CHECK(std::abs(B(1, 0)) == doctest::Approx(1.0));

  const MomentSystem k3 = build_kramers3(1.0);
  const Eigen::MatrixXd G = nullspace_basis(k3.Q);
  CHECK(G.cols() == 1);
  CHECK(std::abs(G(0, 0)) == doctest::Approx(1.0));  // u1 direction

  CHECK(nullspace_basis(Eigen::MatrixXd::Identity(3, 3)).cols() == 0);
}

TEST_CASE("kramers3 decomposition matches the worked example") {
  const MomentSystem sys = build_kramers3(1.0);
  const SubspaceDecomposition dec = build_decomposition(sys);
  CHECK(dec.p == 1);
  CHECK(dec.r == 1);
  CHECK(dec.dim3() == 1);
  CHECK(std::abs(dec.V1(0, 0)) == doctest::Approx(1.0));  // V1 = e1
  CHECK(std::abs(dec.V2(2, 0)) == doctest::Approx(1.0));  // V2 = e3
  CHECK(std::abs(dec.V3(1, 0)) == doctest::Approx(1.0));  // V3 = e2
  CHECK(std::abs(dec.A21(0, 0)) == doctest::Approx(1.0));
  REQUIRE(dec.parity.has_value());
  CHECK(dec.parity->p1 == 1);
  CHECK(dec.parity->p2 == 0);
  CHECK(dec.parity->r1 == 1);
  CHECK(dec.parity->r2 == 0);
}

TEST_CASE("decomposition with Q = nu I (no collision invariants)") {
  Eigen::MatrixXd A(3, 3);
  A << 0, 1, 0, 1, 0, 2, 0, 2, 0;
  const MomentSystem sys =
      make_explicit_system(A, Eigen::MatrixXd::Identity(3, 3), 1.0);
  const SubspaceDecomposition dec = build_decomposition(sys);
  CHECK(dec.p == 0);
  CHECK(dec.r == 0);
  CHECK(dec.dim3() == 3);
  // A33 orthogonally similar to A: same eigenvalues.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A), e33(dec.A33);
  CHECK((ea.eigenvalues() - e33.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("full3d M=2 violates the compatibility assumption") {
  // At order 2 the heat flux is truncated away, so the energy-mass
  // combination psi - sqrt(2/3) phi_0 lies in Null(A) and Null(Q).
  const MomentSystem sys = build_full3d(2, 1.0);
  const CompatibilityReport rep = check_compatibility(sys.A, sys.Q);
  CHECK_FALSE(rep.compatible);
  CHECK(rep.joint_nullspace_dim == 1);
  CHECK_THROWS_AS(build_decomposition(sys), StructureError);
}

TEST_CASE("lemma block structure holds for full3d M=3..7") {
  for (int M = 3; M <= 7; ++M) {
    const MomentSystem sys = build_full3d(M, 1.0);
    const SubspaceDecomposition dec = build_decomposition(sys);
    const DecompositionResiduals res = decomposition_residuals(sys, dec);
    CHECK(res.v_orth < 1e-12);
    CHECK(res.q_first < 1e-12);
    CHECK(res.a31 < 1e-12);
    CHECK(res.a33_asym < 1e-12);
    CHECK(res.ag_span < 1e-12);
    CHECK(res.q33_min_eig > 0.0);
    CHECK(res.rank_a21 == dec.r);

    // U = [G, U2, V3] invertible.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dec.U());
    CHECK(svd.singularValues().minCoeff() >
          dec.N * 1e-16 * svd.singularValues().maxCoeff());

    // Sylvester consistency: inertia of A33 equals the spectral counts.
    const SpectralFactorization spec = spectral_factorization(dec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dec.A33);
    int np = 0, nz = 0, nm = 0;
    const double tol = 1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()(i) > tol)
        ++np;
      else if (es.eigenvalues()(i) < -tol)
        ++nm;
      else
        ++nz;
    }
    CHECK(np == spec.n_plus);
    CHECK(nz == spec.n_zero);
    CHECK(nm == spec.n_minus);
  }
}

TEST_CASE("kramers3 spectral factorization") {
  const MomentSystem sys = build_kramers3(1.0);
  const SubspaceDecomposition dec = build_decomposition(sys);
  const SpectralFactorization spec = spectral_factorization(dec);
  CHECK(spec.n_plus == 0);
  CHECK(spec.n_zero == 1);
  CHECK(spec.n_minus == 0);
  CHECK(spec.lambda(0) == 0.0);
}

TEST_CASE("2x2 off-diagonal pencil") {
  const double d = 0.7;
  Eigen::MatrixXd A(2, 2);
  A << 0, d, d, 0;
  const MomentSystem sys =
      make_explicit_system(A, Eigen::MatrixXd::Identity(2, 2), 1.0);
  const SubspaceDecomposition dec = build_decomposition(sys);
  const SpectralFactorization spec = spectral_factorization(dec);
  CHECK(spec.n_plus == 1);
  CHECK(spec.n_zero == 0);
  CHECK(spec.n_minus == 1);
  CHECK(spec.lambda(0) == doctest::Approx(d).epsilon(1e-13));
  CHECK(spec.lambda(1) == doctest::Approx(-d).epsilon(1e-13));
  // Q33 = I: T = R is orthogonal.
  CHECK((spec.T.transpose() * spec.T -
         Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("pencil identity Q33^{-1} A33 T = T Lambda") {
  const MomentSystem sys = build_full3d(4, 1.3);
  const SubspaceDecomposition dec = build_decomposition(sys);
  const SpectralFactorization spec = spectral_factorization(dec);
  const Eigen::MatrixXd lhs = dec.A33 * spec.T;
  const Eigen::MatrixXd rhs = dec.Q33 * spec.T * spec.lambda.asDiagonal();
  CHECK((lhs - rhs).norm() < 1e-10 * dec.A33.norm());
  // T^T Q33 T = I.
  CHECK((spec.T.transpose() * dec.Q33 * spec.T -
         Eigen::MatrixXd::Identity(dec.dim3(), dec.dim3()))
            .norm() < 1e-10);
}

TEST_CASE("weight constraint validation") {
  const MomentSystem sys = build_full3d(3, 1.0);
  const SubspaceDecomposition dec = build_decomposition(sys);
  const SpectralFactorization spec = spectral_factorization(dec);
  REQUIRE(spec.lambda_max > 0.0);
  CHECK_THROWS_AS(spectral_factorization(dec, 1.0 / spec.lambda_max),
                  WeightError);
  CHECK_NOTHROW(spectral_factorization(dec, 0.5 / spec.lambda_max));
}

TEST_CASE("determinism and sign conventions") {
  const MomentSystem sys = build_full3d(3, 1.0);
  const SubspaceDecomposition a = build_decomposition(sys);
  const SubspaceDecomposition b = build_decomposition(sys);
  CHECK((a.V() - b.V()).norm() == 0.0);

  const SubspaceDecomposition c =
      build_decomposition(sys, SignConvention::negative_diagonal);
  // Different basis, same subspaces: projectors agree.
  CHECK((a.V2 * a.V2.transpose() - c.V2 * c.V2.transpose()).norm() < 1e-12);
  CHECK((a.V3 * a.V3.transpose() - c.V3 * c.V3.transpose()).norm() < 1e-12);
  CHECK((sys.A * a.G - c.V2 * c.K).norm() < 1e-12 * sys.A.norm());
}
