#include "halfmom/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "halfmom/errors.hpp"

namespace halfmom {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw InvalidArgument("expected a non-empty array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols)
      throw InvalidArgument("ragged matrix rows in JSON");
    for (int c = 0; c < cols; ++c) M(i, c) = j[i][c].get<double>();
  }
  return M;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (int i = 0; i < static_cast<int>(j.size()); ++i)
    v(i) = j[i].get<double>();
  return v;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("JSON parse error: ") + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write file: " + path);
  out << text;
}

std::string system_to_json(const MomentSystem& sys) {
  json j;
  j["order"] = sys.order;
  j["variant"] = sys.variant;
  j["nu"] = sys.nu;
  j["parity"] = {{"m", sys.even_count}, {"n", sys.odd_count}};
  if (sys.variant == "explicit") {
    j["A"] = matrix_to_json(sys.A);
    j["Q"] = matrix_to_json(sys.Q);
  }
  return j.dump(2);
}

MomentSystem system_from_json(const std::string& text) {
  const json j = parse(text);
  const std::string variant = j.value("variant", "full3d");
  const double nu = j.value("nu", 1.0);
  if (variant == "full3d") return build_full3d(j.at("order").get<int>(), nu);
  if (variant == "kramers3") return build_kramers3(nu);
  if (variant == "reduced1d")
    return build_reduced_couette(j.at("order").get<int>(), nu);
  if (variant == "explicit") {
    int m = 0, n = 0;
    if (j.contains("parity")) {
      m = j["parity"].value("m", 0);
      n = j["parity"].value("n", 0);
    }
    return make_explicit_system(matrix_from_json(j.at("A")),
                                matrix_from_json(j.at("Q")), nu, m, n);
  }
  throw InvalidArgument("unknown system variant: " + variant);
}

std::string exp_poly_to_json(const ExpPolyVec& f) {
  json j;
  j["dim"] = f.dim();
  json terms = json::array();
  for (const auto& t : f.terms()) {
    json jt;
    jt["rate"] = t.rate;
    json coeffs = json::array();
    for (const auto& p : t.coeffs) coeffs.push_back(p);
    jt["coeffs"] = std::move(coeffs);
    terms.push_back(std::move(jt));
  }
  j["terms"] = std::move(terms);
  return j.dump(2);
}

ExpPolyVec exp_poly_from_json(const std::string& text) {
  const json j = parse(text);
  const int dim = j.at("dim").get<int>();
  if (dim <= 0)
    throw InvalidArgument("exp_poly_from_json: dim must be positive");
  ExpPolyVec f(dim);
  for (const auto& jt : j.at("terms")) {
    std::vector<std::vector<double>> coeffs;
    for (const auto& p : jt.at("coeffs"))
      coeffs.push_back(p.get<std::vector<double>>());
    f.add_term(jt.at("rate").get<double>(), std::move(coeffs));
  }
  return f;
}

std::string decomposition_report_json(const MomentSystem& sys,
                                      const SubspaceDecomposition& dec,
                                      const SpectralFactorization& spec) {
  const DecompositionResiduals res = decomposition_residuals(sys, dec);
  json j;
  j["N"] = dec.N;
  j["p"] = dec.p;
  j["r"] = dec.r;
  j["dim3"] = dec.dim3();
  j["n_plus"] = spec.n_plus;
  j["n_zero"] = spec.n_zero;
  j["n_minus"] = spec.n_minus;
  j["lambda"] = vector_to_json(spec.lambda);
  j["lambda_max"] = spec.lambda_max;
  j["tol_eig"] = spec.tol_eig;
  j["zero_margin"] = spec.zero_margin;
  j["residuals"] = {{"v_orth", res.v_orth},
                    {"q_first", res.q_first},
                    {"a31", res.a31},
                    {"a33_asym", res.a33_asym},
                    {"ag_span", res.ag_span},
                    {"q33_min_eig", res.q33_min_eig},
                    {"rank_a21", res.rank_a21}};
  if (dec.parity) {
    j["parity"] = {{"p1", dec.parity->p1},
                   {"p2", dec.parity->p2},
                   {"r1", dec.parity->r1},
                   {"r2", dec.parity->r2}};
  }
  return j.dump(2);
}

std::string verdict_to_json(const WellposednessVerdict& v,
                            const ParityCounts* counts) {
  json j;
  j["solvable"] = v.solvable;
  j["stable"] = v.stable;
  j["n_plus"] = v.n_plus;
  j["sigma_min_BTplus"] = v.sigma_min_BTplus;
  j["norm_BTzero"] = v.norm_BTzero;
  if (v.certificate_C) j["certificate_C"] = matrix_to_json(*v.certificate_C);
  if (counts) {
    j["counts"] = {{"n_plus_predicted", counts->n_plus_predicted},
                   {"p1", counts->p1},
                   {"p2", counts->p2},
                   {"r1", counts->r1},
                   {"r2", counts->r2}};
  }
  return j.dump(2);
}

std::string solution_to_json(const HalfspaceSolution<ExpPolyVec>& sol) {
  json j;
  j["W"] = parse(exp_poly_to_json(sol.W));
  j["traces"] = {{"z_plus0", vector_to_json(sol.z_plus0)},
                 {"z_zero0", vector_to_json(sol.z_zero0)},
                 {"z_minus0", vector_to_json(sol.z_minus0)}};
  j["weight"] = sol.weight;
  j["norms"] = {{"W_a", sol.norm_W_a},
                {"h_a", sol.norm_h_a},
                {"g", sol.norm_g},
                {"ratio", verify_estimate(sol)}};
  j["residual_sup"] = sol.residual_sup;
  return j.dump(2);
}

std::string solution_samples_csv(const ExpPolyVec& W, int points,
                                 double y_max) {
  std::ostringstream out;
  out.precision(17);
  out << "y";
  for (int c = 0; c < W.dim(); ++c) out << ",W" << c;
  out << "\n";
  for (int i = 0; i < points; ++i) {
    const double y = y_max * double(i) / double(points - 1);
    const Eigen::VectorXd w = W.eval(y);
    out << y;
    for (int c = 0; c < W.dim(); ++c) out << "," << w(c);
    out << "\n";
  }
  return out.str();
}

BCConfig bc_config_from_json(const std::string& text) {
  const json j = parse(text);
  BCConfig cfg;
  cfg.kind = j.value("kind", "modified");
  cfg.chi = j.value("chi", 1.0);
  cfg.c = j.value("c", 1.0);
  if (j.contains("H")) {
    const json& h = j["H"];
    if (h.is_string()) {
      const std::string name = h.get<std::string>();
      if (name == "identity")
        cfg.h_option = HOption::identity;
      else if (name == "flux")
        cfg.h_option = HOption::flux;
      else
        throw InvalidArgument("unknown H option: " + name);
    } else {
      cfg.h_option = HOption::custom;
      cfg.H_custom = matrix_from_json(h);
    }
  }
  if (j.contains("g1")) cfg.g1 = vector_from_json(j["g1"]);
  if (j.contains("g2")) cfg.g2 = vector_from_json(j["g2"]);
  return cfg;
}

std::string bc_to_json(const MaxwellBC& bc, const Eigen::VectorXd& g1,
                       const Eigen::VectorXd& g2) {
  json j;
  j["kind"] = bc.kind;
  j["chi"] = bc.chi;
  j["chi_hat"] = bc.chi_hat;
  if (bc.kind == "modified") j["H"] = matrix_to_json(bc.H);
  j["g1"] = vector_to_json(g1);
  j["g2"] = vector_to_json(g2);
  return j.dump(2);
}

std::string witness_to_json(const WitnessResult& w, double a) {
  json j;
  j["weight"] = a;
  j["s"] = w.s;
  j["z_plus0_norm"] = w.z_plus0_norm;
  j["h"] = parse(exp_poly_to_json(w.h));
  j["h_norm_a"] = weighted_norm(w.h, a);
  json growth = json::array();
  for (const auto& [s, norm] : w.growth)
    growth.push_back({{"s", s}, {"z_plus0_norm", norm}});
  j["growth"] = std::move(growth);
  return j.dump(2);
}

}  // namespace halfmom
