#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "config_json.hpp"
#include "rsl/cli.hpp"

namespace rsl::cli {

using nlohmann::json;

TheoryConfig parse_theory_config(std::string_view json_text, const std::filesystem::path& data_dir) {
  const json root_json = parse_json(json_text, "config");
  Fields root(root_json, "");
  TheoryConfig cfg;
  ProblemConstants& p = cfg.inputs.problem;

  if (const json* problem = root.find("problem")) {
    Fields f(*problem, "problem");
    p.m = as_number(f.require("m"), "problem.m");
    p.big_m = as_number(f.require("M"), "problem.M");
    p.d = as_count(f.require("d"), "problem.d");
    p.w0 = as_number(f.require("w0"), "problem.w0");
    f.finish();
    if (root.has("target")) config_error("target", "give either problem or target, not both");
  } else if (const json* target = root.find("target")) {
    const TargetConfig tc = parse_target(*target);
    std::uint64_t seed = 1;
    if (const json* s = root.find("seed")) seed = as_count(*s, "seed");
    const BuiltTarget built = build_target(tc, seed, data_dir.empty() ? resolve_data_dir(std::nullopt) : data_dir);
    const CurvatureBounds b = built.potential->constants();
    p.m = b.m;
    p.big_m = b.big_m;
    p.d = built.potential->dimension();
    p.w0 = as_number(root.require("w0"), "w0");
  } else {
    config_error("problem", "is required (or a target to derive m and M from)");
  }
  if (!(p.m > 0.0)) config_error("problem.m", "must be positive");
  if (!(p.big_m >= p.m)) config_error("problem.M", "must be at least m");
  if (p.d == 0) config_error("problem.d", "must be at least 1");
  if (!(p.w0 >= 0.0)) config_error("problem.w0", "must be non-negative");

  std::map<std::string, MatrixXd> generators;
  if (const json* g = root.find("generators")) {
    if (!g->is_object()) config_error("generators", "expected an object of named matrices");
    for (const auto& [name, m] : g->items()) generators.emplace(name, as_matrix(m, "generators." + name));
  }
  if (const json* r = root.find("stepsize_regime")) {
    cfg.inputs.stepsize_regime = parse_regime(*r, "stepsize_regime", generators).spec;
  }
  if (const json* g = root.find("gamma")) cfg.inputs.gamma = as_number(*g, "gamma");
  if (!(cfg.inputs.gamma > 0.0)) config_error("gamma", "must be positive");
  if (const json* r = root.find("friction_regime")) {
    cfg.inputs.friction_regime = parse_regime(*r, "friction_regime", generators).spec;
  }
  if (!cfg.inputs.stepsize_regime && !cfg.inputs.friction_regime) {
    config_error("stepsize_regime", "give a stepsize_regime, a friction_regime or both");
  }
  cfg.eps_grid = as_numbers(root.require("eps"), "eps");
  if (cfg.eps_grid.empty()) config_error("eps", "must not be empty");
  for (double e : cfg.eps_grid) {
    if (!(e > 0.0)) config_error("eps", "entries must be positive");
  }
  root.finish();
  return cfg;
}

void write_theory_csv(std::ostream& out, const std::vector<ComplexityRow>& rows) {
  out << "algorithm,eps,eta,K,alpha,C,C_M,C_B\n";
  auto constant = [](const ComplexityRow& r, const char* key) {
    const auto it = r.constants.find(key);
    return it == r.constants.end() ? std::string() : format_double(it->second);
  };
  for (const ComplexityRow& r : rows) {
    out << r.algorithm << ',' << format_double(r.eps) << ',' << format_double(r.eta) << ',' << r.iterations << ','
        << format_double(r.alpha) << ',' << constant(r, "C") << ',' << constant(r, "C_M") << ','
        << constant(r, "C_B") << '\n';
  }
}

std::vector<ComplexityRow> cmd_theory(const std::filesystem::path& config_path, std::ostream& out) {
  const TheoryConfig cfg = parse_theory_config(read_text(config_path));
  const std::vector<ComplexityRow> rows = complexity_table(cfg.inputs, cfg.eps_grid);
  write_theory_csv(out, rows);
  return rows;
}

CtmcReport ctmc_check(std::string_view json_text) {
  const json root_json = parse_json(json_text, "config");
  Fields root(root_json, "");
  const MatrixXd q = as_matrix(root.require("generator"), "generator");
  double horizon = 1e5;
  if (const json* h = root.find("horizon")) horizon = as_number(*h, "horizon");
  if (!(horizon > 0.0)) config_error("horizon", "must be positive");
  std::uint64_t seed = 1;
  if (const json* s = root.find("seed")) seed = as_count(*s, "seed");
  double threshold = 1e-2;
  if (const json* t = root.find("tv_threshold")) threshold = as_number(*t, "tv_threshold");
  std::size_t start = 0;
  if (const json* s = root.find("initial_state")) start = as_count(*s, "initial_state");
  root.finish();

  // generator errors keep their own codes (RowSumNonzero, ...)
  const GeneratorMatrix g = validate_generator(q);
  if (start >= g.size()) config_error("initial_state", "out of range");

  CtmcReport r;
  r.stationary = stationary_distribution(g);
  r.spectrum = eigenvalues(q);
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& lambda : r.spectrum.eigenvalues) {
    if (std::abs(lambda) > 1e-9 * scale) top = std::max(top, lambda.real());
  }
  r.gap = std::isfinite(top) ? -top : 0.0;
  VectorXd law = VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  law[static_cast<Eigen::Index>(start)] = 1.0;
  RngStream rng(seed);
  r.horizon = horizon;
  r.occupation = simulate_exact_path(g, law, horizon, rng).occupation(g.size());
  r.tv = total_variation(r.occupation, r.stationary);
  r.threshold = threshold;
  r.passed = r.tv <= threshold;
  return r;
}

CtmcReport cmd_ctmc_check(const std::filesystem::path& config_path, std::ostream& out) {
  const CtmcReport r = ctmc_check(read_text(config_path));
  json report;
  report["stationary"] = vector_json(r.stationary);
  json spectrum = json::array();
  for (const auto& lambda : r.spectrum.eigenvalues) spectrum.push_back({lambda.real(), lambda.imag()});
  report["spectrum"] = spectrum;
  report["gap"] = r.gap;
  report["horizon"] = r.horizon;
  report["occupation"] = vector_json(r.occupation);
  report["tv"] = r.tv;
  report["tv_threshold"] = r.threshold;
  report["passed"] = r.passed;
  out << report.dump(2) << '\n';
  return r;
}

}  // namespace rsl::cli
