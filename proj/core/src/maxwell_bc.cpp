#include "halfmom/maxwell_bc.hpp"

#include <cmath>

#include "halfmom/errors.hpp"

namespace halfmom {

Eigen::MatrixXd MaxwellBC::full() const {
  Eigen::MatrixXd B(rows_odd.rows(), rows_even.cols() + rows_odd.cols());
  B << rows_even, rows_odd;
  return B;
}

BoundaryOperator MaxwellBC::b3(const SubspaceDecomposition& dec) const {
  BoundaryOperator op;
  op.B3 = full() * dec.V3;
  op.g = Eigen::VectorXd::Zero(rows());
  op.description = kind;
  return op;
}

namespace {

void validate_chi(double chi) {
  if (chi < 0.0 || chi > 1.0)
    throw InvalidArgument("accommodation coefficient chi must be in [0,1]");
}

void require_parity(const MomentSystem& sys, const char* what) {
  if (!sys.has_parity())
    throw InvalidArgument(std::string(what) +
                          ": system lacks parity block structure");
}

}  // namespace

MaxwellBC assemble_grad_bc(const MomentSystem& sys, double chi) {
  validate_chi(chi);
  require_parity(sys, "assemble_grad_bc");
  MaxwellBC bc;
  bc.kind = "grad";
  bc.chi = chi;
  bc.chi_hat = chi_hat_from_chi(chi);
  if (sys.variant == "full3d") {
    const Eigen::MatrixXd E = build_selection_matrix(sys.indices);
    const Eigen::MatrixXd S = build_half_flux_matrix(sys.indices);
    bc.rows_even = bc.chi_hat * E * S;
    bc.rows_odd = E * sys.flux_coupling();
  } else if (sys.variant == "kramers3") {
    // sigma12 + chi_hat (u1 + (sqrt2/2) f3) tested against xi1.
    bc.rows_even = bc.chi_hat *
                   (Eigen::MatrixXd(1, 2) << 1.0, std::sqrt(2.0) / 2.0)
                       .finished();
    bc.rows_odd = Eigen::MatrixXd::Ones(1, 1);
  } else {
    throw InvalidArgument(
        "assemble_grad_bc: supported for full3d and kramers3 systems");
  }
  return bc;
}

MaxwellBC assemble_modified_bc(const MomentSystem& sys, HOption h_option,
                               double chi, double c,
                               const Eigen::MatrixXd* H_custom) {
  validate_chi(chi);
  require_parity(sys, "assemble_modified_bc");
  const int n = sys.odd_count;
  const Eigen::MatrixXd Mflux = sys.flux_coupling();

  MaxwellBC bc;
  bc.kind = "modified";
  bc.chi = chi;
  bc.chi_hat = chi_hat_from_chi(chi);
  switch (h_option) {
    case HOption::identity:
      if (c <= 0.0)
        throw InvalidArgument("assemble_modified_bc: scale c must be > 0");
      bc.H = c * Eigen::MatrixXd::Identity(n, n);
      break;
    case HOption::flux: {
      if (sys.variant != "full3d")
        throw InvalidArgument(
            "assemble_modified_bc: flux H requires a full3d system");
      const Eigen::MatrixXd S = build_half_flux_matrix(sys.indices);
      bc.H = Mflux.transpose() * S.llt().solve(Mflux);
      bc.H = 0.5 * (bc.H + bc.H.transpose().eval());
      break;
    }
    case HOption::custom:
      if (!H_custom || H_custom->rows() != n || H_custom->cols() != n)
        throw InvalidArgument("assemble_modified_bc: custom H has wrong size");
      bc.H = *H_custom;
      break;
  }
  if ((bc.H - bc.H.transpose()).norm() > 1e-12 * std::max(1.0, bc.H.norm()))
    throw InvalidArgument("assemble_modified_bc: H must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bc.H);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw InvalidArgument("assemble_modified_bc: H must be positive definite");

  bc.rows_even = bc.chi_hat * Mflux.transpose();
  bc.rows_odd = bc.H;
  return bc;
}

MaxwellSolveResult solve_layer_with_maxwell(
    const MomentSystem& sys, const SubspaceDecomposition& dec,
    const SpectralFactorization& spec, const MaxwellBC& bc,
    const Eigen::VectorXd& g1, const Eigen::VectorXd& g2, const ExpPolyVec& h,
    double a) {
  if (bc.kind != "modified")
    throw InvalidArgument("solve_layer_with_maxwell: needs a modified BC");
  if (bc.chi_hat <= 0.0)
    throw InvalidArgument("solve_layer_with_maxwell: requires chi_hat > 0");
  if (!dec.parity)
    throw StructureError("solve_layer_with_maxwell: no parity decomposition");
  const ParityBlocks& pb = *dec.parity;
  if (pb.r2 != 0)
    throw StructureError(
        "solve_layer_with_maxwell: r2 != 0 is outside the theorem's "
        "hypothesis");
  const int m = sys.even_count, n = sys.odd_count;
  if (g1.size() != n || g2.size() != m)
    throw InvalidArgument("solve_layer_with_maxwell: g1/g2 size mismatch");

  const Eigen::MatrixXd Mflux = sys.flux_coupling();
  const Eigen::MatrixXd Bfull = bc.full();

  // Stage 1: V2^T W(0) is determined by the data alone.
  const Eigen::MatrixXd KinvT =
      Eigen::PartialPivLU<Eigen::MatrixXd>(dec.K.transpose())
          .solve(Eigen::MatrixXd::Identity(dec.p, dec.p));
  const Eigen::VectorXd v20 =
      KinvT * integrate_tail(apply(dec.G.transpose(), h)).eval(0.0);

  // Stage 2: reduced boundary condition Z3^T B on V3^T W(0).
  const Eigen::MatrixXd B_red = pb.Z3.transpose() * (Bfull * dec.V3);
  const Eigen::VectorXd rhs =
      -pb.Z3.transpose() *
      (bc.H * g1 + bc.chi_hat * (Mflux.transpose() * g2) +
       Bfull * (dec.V2 * v20));
  MaxwellSolveResult out;
  out.layer = solve(sys, dec, spec, B_red, rhs, h, a);

  // Stage 3: compatibility system for the outside-flow values.
  const Eigen::VectorXd W0 = out.layer.W.eval(0.0);
  const Eigen::VectorXd rho0 = bc.H * (W0.tail(n) + g1) +
                               bc.chi_hat *
                                   (Mflux.transpose() * (W0.head(m) + g2));
  Eigen::MatrixXd U0(n, pb.p2 + pb.r1);
  U0 << pb.Go, Mflux.transpose() * (pb.Ge * pb.Xe);
  const Eigen::MatrixXd lhs =
      bc.chi_hat * (U0.transpose() * (Mflux.transpose() * pb.Ge));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(lhs);
  if (qr.rank() < pb.p1)
    throw StructureError(
        "solve_layer_with_maxwell: singular compatibility system (rank "
        "misdetection upstream)");
  out.compat = qr.solve(-U0.transpose() * rho0);

  out.boundary_identity_norm =
      (rho0 + bc.chi_hat * (Mflux.transpose() * (pb.Ge * out.compat))).norm();
  const double denom = out.layer.norm_h_a + g1.norm() + g2.norm();
  out.ratio = denom > 0.0
                  ? (out.layer.norm_W_a + out.compat.norm()) / denom
                  : 0.0;
  return out;
}

}  // namespace halfmom
