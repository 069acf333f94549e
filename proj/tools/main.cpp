#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <optional>
#include <string>

#include "halfmom/errors.hpp"
#include "halfmom/json_io.hpp"
#include "halfmom/maxwell_bc.hpp"
#include "halfmom/moment_system.hpp"
#include "halfmom/solver.hpp"
#include "halfmom/subspace.hpp"
#include "halfmom/wellposedness.hpp"

namespace {

using namespace halfmom;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;       // usage / IO / validation errors
constexpr int kExitIllPosed = 2;    // well-posedness failure

struct SpecString {
  std::string name;
  std::map<std::string, std::string> params;
};

SpecString parse_spec(const std::string& text) {
  SpecString out;
  const auto colon = text.find(':');
  out.name = text.substr(0, colon);
  if (colon == std::string::npos) return out;
  std::string rest = text.substr(colon + 1);
  size_t pos = 0;
  while (pos < rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string kv = rest.substr(pos, comma - pos);
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("expected key=value in '" + text + "'");
    out.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

double param_d(const SpecString& s, const std::string& key, double dflt) {
  const auto it = s.params.find(key);
  return it == s.params.end() ? dflt : std::stod(it->second);
}

int param_i(const SpecString& s, const std::string& key, int dflt) {
  const auto it = s.params.find(key);
  return it == s.params.end() ? dflt : std::stoi(it->second);
}

MomentSystem load_system_arg(const std::string& arg) {
  if (std::filesystem::exists(arg))
    return system_from_json(read_text_file(arg));
  const SpecString s = parse_spec(arg);
  const double nu = param_d(s, "nu", 1.0);
  if (s.name == "full3d") return build_full3d(param_i(s, "M", 3), nu);
  if (s.name == "kramers3") return build_kramers3(nu);
  if (s.name == "reduced1d")
    return build_reduced_couette(param_i(s, "M", 3), nu);
  throw InvalidArgument("unknown system '" + arg +
                        "' (not a file or builtin spec)");
}

BCConfig load_bc_arg(const std::string& arg) {
  if (std::filesystem::exists(arg))
    return bc_config_from_json(read_text_file(arg));
  const SpecString s = parse_spec(arg);
  BCConfig cfg;
  cfg.kind = s.name;
  if (s.name != "grad" && s.name != "modified")
    throw InvalidArgument("unknown bc '" + arg + "'");
  cfg.chi = param_d(s, "chi", 1.0);
  cfg.c = param_d(s, "c", 1.0);
  const auto h = s.params.find("H");
  if (h != s.params.end()) {
    if (h->second == "identity")
      cfg.h_option = HOption::identity;
    else if (h->second == "flux")
      cfg.h_option = HOption::flux;
    else
      throw InvalidArgument("unknown H option '" + h->second + "'");
  }
  return cfg;
}

MaxwellBC assemble_bc(const MomentSystem& sys, const BCConfig& cfg) {
  if (cfg.kind == "grad") return assemble_grad_bc(sys, cfg.chi);
  const Eigen::MatrixXd* Hc =
      cfg.h_option == HOption::custom ? &cfg.H_custom : nullptr;
  return assemble_modified_bc(sys, cfg.h_option, cfg.chi, cfg.c, Hc);
}

ExpPolyVec load_source_arg(const std::string& arg, int dim) {
  if (!std::filesystem::exists(arg))
    throw InvalidArgument("source file not found: " + arg);
  ExpPolyVec h = exp_poly_from_json(read_text_file(arg));
  if (h.dim() != dim)
    throw InvalidArgument("source dimension does not match the system");
  return h;
}

double default_weight(const SpectralFactorization& spec, const ExpPolyVec& h) {
  double cap = std::numeric_limits<double>::infinity();
  if (spec.lambda_max > 0.0) cap = 1.0 / spec.lambda_max;
  cap = std::min(cap, h.min_rate());
  return std::isfinite(cap) ? 0.9 * cap : 1.0;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text << std::endl;
  else
    write_text_file(out_path, text);
}

int cmd_analyze(const std::string& system_arg, double tol_eig,
                const std::string& out) {
  const MomentSystem sys = load_system_arg(system_arg);
  const SubspaceDecomposition dec = build_decomposition(sys);
  const SpectralFactorization spec =
      spectral_factorization(dec, -1.0, tol_eig);
  emit(out, decomposition_report_json(sys, dec, spec));
  return kExitOk;
}

int cmd_check_bc(const std::string& system_arg, const std::string& bc_arg,
                 const std::string& out) {
  const MomentSystem sys = load_system_arg(system_arg);
  const SubspaceDecomposition dec = build_decomposition(sys);
  const SpectralFactorization spec = spectral_factorization(dec);
  const BCConfig cfg = load_bc_arg(bc_arg);
  const MaxwellBC bc = assemble_bc(sys, cfg);
  const WellposednessVerdict v = check_general_bc(bc.b3(dec), spec);
  std::optional<ParityCounts> counts;
  if (dec.parity) counts = predicted_counts(sys, dec);
  emit(out, verdict_to_json(v, counts ? &*counts : nullptr));
  return (v.solvable && v.stable) ? kExitOk : kExitIllPosed;
}

int cmd_solve(const std::string& system_arg, const std::string& bc_arg,
              const std::string& source_arg, double weight,
              const std::string& out, const std::string& format,
              int grid_points) {
  const MomentSystem sys = load_system_arg(system_arg);
  const SubspaceDecomposition dec = build_decomposition(sys);
  const SpectralFactorization spec = spectral_factorization(dec);
  const ExpPolyVec h = source_arg.empty()
                           ? ExpPolyVec::zero(sys.size())
                           : load_source_arg(source_arg, sys.size());
  const double a = weight > 0.0 ? weight : default_weight(spec, h);

  HalfspaceSolution<ExpPolyVec> sol;
  std::string extra;
  if (bc_arg.empty()) {
    if (spec.n_plus != 0) {
      std::cerr << "{\"error\":\"system needs " << spec.n_plus
                << " boundary conditions; pass --bc\"}\n";
      return kExitIllPosed;
    }
    sol = solve(sys, dec, spec, Eigen::MatrixXd::Zero(0, dec.dim3()),
                Eigen::VectorXd::Zero(0), h, a);
  } else {
    const BCConfig cfg = load_bc_arg(bc_arg);
    const MaxwellBC bc = assemble_bc(sys, cfg);
    const WellposednessVerdict v = check_general_bc(bc.b3(dec), spec);
    if (!v.solvable || !v.stable) {
      std::cerr << verdict_to_json(v) << "\n";
      return kExitIllPosed;
    }
    Eigen::VectorXd g1 = cfg.g1.size() ? cfg.g1
                                       : Eigen::VectorXd::Zero(sys.odd_count);
    Eigen::VectorXd g2 = cfg.g2.size() ? cfg.g2
                                       : Eigen::VectorXd::Zero(sys.even_count);
    const MaxwellSolveResult res =
        solve_layer_with_maxwell(sys, dec, spec, bc, g1, g2, h, a);
    sol = res.layer;
  }
  if (format == "csv") {
    const double rate = std::min(sol.W.min_rate(), h.min_rate());
    const double y_max =
        20.0 / (std::isfinite(rate) && rate > 0.0 ? rate : 1.0);
    emit(out, solution_samples_csv(sol.W, grid_points, y_max));
  } else {
    emit(out, solution_to_json(sol));
  }
  return kExitOk;
}

int cmd_probe(const std::string& system_arg, const std::string& bc_arg,
              double weight, double target, const std::string& out) {
  const MomentSystem sys = load_system_arg(system_arg);
  const SubspaceDecomposition dec = build_decomposition(sys);
  const SpectralFactorization spec = spectral_factorization(dec);
  const BCConfig cfg = load_bc_arg(bc_arg);
  const MaxwellBC bc = assemble_bc(sys, cfg);
  const double a = weight > 0.0 ? weight : 0.25;
  const auto w = instability_witness(sys, dec, spec, bc.b3(dec).B3, a, target);
  if (!w) {
    emit(out, "{\n  \"witness\": null\n}");
    return kExitOk;
  }
  emit(out, witness_to_json(*w, a));
  return kExitOk;
}

int cmd_demo(const std::string& out) {
  const MomentSystem sys = build_kramers3(1.0);
  const SubspaceDecomposition dec = build_decomposition(sys);
  const SpectralFactorization spec = spectral_factorization(dec);
  ExpPolyVec h(3);
  h.add_component_term(1, 1.0, {1.0});  // h = (0, e^{-y}, 0)
  const auto sol = solve(sys, dec, spec, Eigen::MatrixXd::Zero(0, 1),
                         Eigen::VectorXd::Zero(0), h, 0.5);
  std::ostringstream msg;
  msg.precision(17);
  const Eigen::VectorXd W0 = sol.W.eval(0.0);
  msg << "Kramers layer (M=3, nu=1, h3 = e^{-y}), no boundary condition "
         "needed (n+ = 0):\n"
      << "  u1(0)      = " << W0(0) << "   (expected -sqrt(2) = "
      << -std::sqrt(2.0) << ")\n"
      << "  f3(0)      = " << W0(1) << "   (expected 1)\n"
      << "  sigma12(0) = " << W0(2) << "   (expected 0)\n"
      << "  residual_sup = " << sol.residual_sup << "\n\n"
      << solution_to_json(sol);
  emit(out, msg.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "halfmom: half-space moment-system construction, well-posedness "
      "verdicts, and closed-form layer solutions"};
  app.require_subcommand(1);

  std::string system_arg, bc_arg, source_arg, out, format = "json";
  double weight = -1.0, tol_eig = -1.0, target = 1e3;
  int grid_points = 256;

  auto add_common = [&](CLI::App* cmd, bool needs_system) {
    auto* opt = cmd->add_option("--system", system_arg,
                                "builtin spec (e.g. full3d:M=5,nu=1, "
                                "kramers3:nu=1, reduced1d:M=5) or JSON path");
    if (needs_system) opt->required();
    cmd->add_option("--out", out, "output file (stdout when omitted)");
  };

  auto* analyze = app.add_subcommand(
      "analyze", "decomposition and spectral report for a system");
  add_common(analyze, true);
  analyze->add_option("--tol-eig", tol_eig, "zero-eigenvalue threshold")
      ->check(CLI::Range(1e-14, 1e-6));

  auto* check = app.add_subcommand(
      "check-bc", "well-posedness verdict for a boundary condition");
  add_common(check, true);
  check->add_option("--bc", bc_arg,
                    "grad:chi=..., modified:chi=...,H=identity|flux[,c=...], "
                    "or JSON path")
      ->required();

  auto* solve_cmd =
      app.add_subcommand("solve", "closed-form solve of the layer problem");
  add_common(solve_cmd, true);
  solve_cmd->add_option("--bc", bc_arg, "boundary condition (see check-bc)");
  solve_cmd->add_option("--source", source_arg, "exp-poly JSON source h");
  solve_cmd->add_option("--weight", weight, "weight a (default 0.9 * "
                                            "min(1/lambda_max, min h-rate))");
  solve_cmd->add_option("--format", format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  solve_cmd->add_option("--grid-points", grid_points, "CSV sample count")
      ->check(CLI::PositiveNumber);

  auto* probe =
      app.add_subcommand("probe", "instability witness search for a BC");
  add_common(probe, true);
  probe->add_option("--bc", bc_arg, "boundary condition")->required();
  probe->add_option("--weight", weight, "weight a (default 0.25)");
  probe->add_option("--target", target, "target ||z+(0)||");

  auto* demo = app.add_subcommand("demo", "Kramers walkthrough");
  add_common(demo, false);
  std::string demo_name = "kramers3";
  demo->add_option("name", demo_name, "demo name (kramers3)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(system_arg, tol_eig, out);
    if (check->parsed()) return cmd_check_bc(system_arg, bc_arg, out);
    if (solve_cmd->parsed())
      return cmd_solve(system_arg, bc_arg, source_arg, weight, out, format,
                       grid_points);
    if (probe->parsed())
      return cmd_probe(system_arg, bc_arg, weight, target, out);
    if (demo->parsed()) {
      if (demo_name != "kramers3") {
        std::cerr << "{\"error\":\"unknown demo '" << demo_name << "'\"}\n";
        return kExitUsage;
      }
      return cmd_demo(out);
    }
  } catch (const WeightError& e) {
    std::cerr << "{\"error\":\"" << e.what() << "\"}\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "{\"error\":\"" << e.what() << "\"}\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":\"" << e.what() << "\"}\n";
    return kExitUsage;
  }
  return kExitUsage;
}
