#pragma once

#include <Eigen/Dense>
#include <string>

#include "halfmom/exp_poly.hpp"
#include "halfmom/maxwell_bc.hpp"
#include "halfmom/moment_system.hpp"
#include "halfmom/solver.hpp"
#include "halfmom/subspace.hpp"
#include "halfmom/wellposedness.hpp"

namespace halfmom {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// {"order", "variant", "nu", "A" (explicit only), "Q", "parity": {"m","n"}}
std::string system_to_json(const MomentSystem& sys);
MomentSystem system_from_json(const std::string& text);

// {"dim", "terms": [{"rate", "coeffs": [[...], ...]}]}
std::string exp_poly_to_json(const ExpPolyVec& f);
ExpPolyVec exp_poly_from_json(const std::string& text);

std::string decomposition_report_json(const MomentSystem& sys,
                                      const SubspaceDecomposition& dec,
                                      const SpectralFactorization& spec);

std::string verdict_to_json(const WellposednessVerdict& v,
                            const ParityCounts* counts = nullptr);

std::string solution_to_json(const HalfspaceSolution<ExpPolyVec>& sol);

/// CSV sampling "y, W_0, ..., W_{N-1}" on a uniform grid.
std::string solution_samples_csv(const ExpPolyVec& W, int points,
                                 double y_max);

/// Parsed form of {"kind", "chi", "H": "identity"|"flux"|matrix,
/// "c", "g1": [...], "g2": [...]}.
struct BCConfig {
  std::string kind = "modified";
  double chi = 1.0;
  HOption h_option = HOption::flux;
  double c = 1.0;
  Eigen::MatrixXd H_custom;
  Eigen::VectorXd g1, g2;
};

BCConfig bc_config_from_json(const std::string& text);
std::string bc_to_json(const MaxwellBC& bc, const Eigen::VectorXd& g1,
                       const Eigen::VectorXd& g2);

std::string witness_to_json(const WitnessResult& w, double a);

}  // namespace halfmom
