#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "config_json.hpp"
#include "rsl/cli.hpp"
#include "rsl/data.hpp"

namespace rsl::cli {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ConfigError, field + ": " + what);
}

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::NegativeOffDiagonal:
    case ErrorCode::RowSumNonzero:
    case ErrorCode::NotIrreducible:
    case ErrorCode::StepsizeTooLarge:
    case ErrorCode::InvalidLambdaSplit:
    case ErrorCode::FrictionTooSmall:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::BatchLargerThanDataset:
    case ErrorCode::DimensionMismatch:
      return kExitConfig;
    case ErrorCode::NonFiniteState:
    case ErrorCode::DivergenceDetected:
      return kExitDivergence;
    case ErrorCode::MissingDataset:
    case ErrorCode::FileNotFound:
      return kExitMissingData;
    default:
      return kExitFailure;
  }
}

// ---- Fields ------------------------------------------------------------------

Fields::Fields(const json& object, std::string path) : object_(object), path_(std::move(path)) {
  if (!object.is_object()) config_error(path_.empty() ? "<root>" : path_, "expected an object");
}

std::string Fields::field(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

const json* Fields::find(std::string_view key) {
  used_.insert(std::string(key));
  const auto it = object_.find(std::string(key));
  return it == object_.end() ? nullptr : &*it;
}

const json& Fields::require(std::string_view key) {
  const json* j = find(key);
  if (!j) config_error(field(key), "is required");
  return *j;
}

bool Fields::has(std::string_view key) const { return object_.contains(std::string(key)); }

void Fields::finish() const {
  for (const auto& [key, value] : object_.items()) {
    if (!used_.count(key)) config_error(field(key), "unknown field");
  }
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) config_error(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_error(field, "must be finite");
  return v;
}

std::size_t as_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) config_error(field, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::string as_string(const json& j, const std::string& field) {
  if (!j.is_string()) config_error(field, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) config_error(field, "expected true or false");
  return j.get<bool>();
}

std::vector<double> as_numbers(const json& j, const std::string& field) {
  if (!j.is_array()) config_error(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

VectorXd as_vector(const json& j, const std::string& field) {
  const std::vector<double> v = as_numbers(j, field);
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

MatrixXd as_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) config_error(field, "expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  MatrixXd out;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    const std::vector<double> row = as_numbers(j[static_cast<std::size_t>(r)], row_field);
    if (r == 0) out.resize(rows, static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != out.cols()) config_error(row_field, "rows differ in length");
    for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = row[static_cast<std::size_t>(c)];
  }
  return out;
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    config_error(what, std::string("invalid JSON (") + e.what() + ")");
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error(path.string(), "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RegimeConfig parse_regime(const json& j, const std::string& field, const std::map<std::string, MatrixXd>& generators) {
  RegimeConfig out;
  Fields f(j, field);
  const std::vector<double> values = as_numbers(f.require("values"), field + ".values");
  if (values.empty()) config_error(field + ".values", "must not be empty");
  for (double v : values) {
    if (!(v > 0.0)) config_error(field + ".values", "entries must be positive");
  }
  std::optional<std::size_t> start;
  if (const json* s = f.find("start")) start = as_count(*s, field + ".start");
  if (const json* k = f.find("kernel")) {
    const std::string kernel = as_string(*k, field + ".kernel");
    if (kernel == "exact") {
      out.kernel = RegimeKernel::Exact;
    } else if (kernel != "first_order") {
      config_error(field + ".kernel", "expected \"first_order\" or \"exact\", got \"" + kernel + "\"");
    }
  }
  const json* g = f.find("generator");
  f.finish();
  if (!g) {
    if (values.size() != 1) config_error(field + ".generator", "is required for more than one regime");
    out.spec = RegimeSpec::constant(values[0]);
    return out;
  }
  MatrixXd q;
  if (g->is_string()) {
    const std::string name = g->get<std::string>();
    const auto it = generators.find(name);
    if (it == generators.end()) config_error(field + ".generator", "unknown generator \"" + name + "\"");
    q = it->second;
  } else {
    q = as_matrix(*g, field + ".generator");
  }
  try {
    const GeneratorMatrix gm = validate_generator(q);
    if (start) {
      out.spec = RegimeSpec::fixed_start(values, gm, *start);
    } else {
      out.spec = RegimeSpec::stationary(values, gm);
    }
  } catch (const Error& e) {
    config_error(field, e.what());
  }
  return out;
}

TargetConfig parse_target(const json& j) {
  Fields f(j, "target");
  TargetConfig t;
  const std::string kind = as_string(f.require("kind"), "target.kind");
  if (kind == "quadratic") {
    t.kind = TargetKind::Quadratic;
    t.precision = as_matrix(f.require("precision"), "target.precision");
    if (t.precision.rows() != t.precision.cols()) config_error("target.precision", "must be square");
    if (const json* m = f.find("mean")) {
      t.mean = as_vector(*m, "target.mean");
      if (t.mean.size() != t.precision.rows()) config_error("target.mean", "length differs from the precision");
    } else {
      t.mean = VectorXd::Zero(t.precision.rows());
    }
    t.d = static_cast<std::size_t>(t.precision.rows());
  } else if (kind == "linreg") {
    t.kind = TargetKind::LinReg;
    if (const json* n = f.find("n")) t.n = as_count(*n, "target.n");
    if (const json* l = f.find("prior_variance")) t.prior_variance = as_number(*l, "target.prior_variance");
    t.d = 3;
  } else if (kind == "logreg") {
    t.kind = TargetKind::LogReg;
    if (const json* ds = f.find("dataset")) t.dataset = as_string(*ds, "target.dataset");
    if (t.dataset != "synthetic" && t.dataset != "iris" && t.dataset != "magic") {
      config_error("target.dataset", "expected synthetic, iris or magic, got \"" + t.dataset + "\"");
    }
    if (const json* l = f.find("prior_variance")) t.prior_variance = as_number(*l, "target.prior_variance");
    if (t.dataset == "synthetic") {
      if (const json* n = f.find("n")) t.n = as_count(*n, "target.n");
      if (const json* d = f.find("d")) t.d = as_count(*d, "target.d");
      t.standardize = false;
    } else {
      t.positive_class = t.dataset == "iris" ? "Iris-setosa" : "g";
      if (const json* p = f.find("positive_class")) t.positive_class = as_string(*p, "target.positive_class");
      if (const json* s = f.find("standardize")) t.standardize = as_bool(*s, "target.standardize");
      t.d = t.dataset == "iris" ? 4 : 10;
    }
    if (const json* i = f.find("intercept")) t.intercept = as_bool(*i, "target.intercept");
    if (t.intercept) ++t.d;
    if (const json* loss = f.find("loss")) {
      const std::string name = as_string(*loss, "target.loss");
      if (name == "label_free") {
        t.loss = LogisticLoss::LabelFree;
      } else if (name != "label_signed") {
        config_error("target.loss", "expected \"label_signed\" or \"label_free\"");
      }
    }
  } else {
    config_error("target.kind", "expected quadratic, linreg or logreg, got \"" + kind + "\"");
  }
  if (!(t.prior_variance > 0.0)) config_error("target.prior_variance", "must be positive");
  if (t.n == 0) config_error("target.n", "must be at least 1");
  if (t.d == 0) config_error("target.d", "must be at least 1");
  f.finish();
  return t;
}

namespace {

std::map<std::string, MatrixXd> parse_generators(Fields& root) {
  std::map<std::string, MatrixXd> out;
  if (const json* g = root.find("generators")) {
    if (!g->is_object()) config_error("generators", "expected an object of named matrices");
    for (const auto& [name, m] : g->items()) out.emplace(name, as_matrix(m, "generators." + name));
  }
  return out;
}

std::map<std::string, RegimeConfig> parse_named_regimes(Fields& root, const std::map<std::string, MatrixXd>& gens) {
  std::map<std::string, RegimeConfig> out;
  if (const json* r = root.find("regimes")) {
    if (!r->is_object()) config_error("regimes", "expected an object of named regimes");
    for (const auto& [name, spec] : r->items()) {
      RegimeConfig rc = parse_regime(spec, "regimes." + name, gens);
      rc.name = name;
      out.emplace(name, std::move(rc));
    }
  }
  return out;
}

RegimeConfig regime_reference(const json& j, const std::string& field, const std::map<std::string, RegimeConfig>& named,
                              const std::map<std::string, MatrixXd>& gens) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    const auto it = named.find(name);
    if (it == named.end()) config_error(field, "unknown regime \"" + name + "\"");
    return it->second;
  }
  return parse_regime(j, field, gens);
}

std::size_t dataset_size(const TargetConfig& t) {
  if (t.kind == TargetKind::Quadratic) return 0;
  if (t.kind == TargetKind::LogReg && t.dataset == "iris") return 150;
  if (t.kind == TargetKind::LogReg && t.dataset == "magic") return 19020;
  return t.n;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  const json root_json = parse_json(json_text, "config");
  Fields root(root_json, "");
  ExperimentConfig cfg;
  cfg.id = as_string(root.require("id"), "id");
  if (cfg.id.empty() || cfg.id.find_first_of("/\\") != std::string::npos) {
    config_error("id", "must be a nonempty name without path separators");
  }
  if (const json* d = root.find("description")) as_string(*d, "description");
  cfg.target = parse_target(root.require("target"));
  const auto generators = parse_generators(root);
  const auto regimes = parse_named_regimes(root, generators);

  const double stepsize = root.has("stepsize") ? as_number(root.require("stepsize"), "stepsize") : 0.0;
  const double friction = root.has("friction") ? as_number(root.require("friction"), "friction") : 1.0;
  const std::size_t batch = root.has("batch_size") ? as_count(root.require("batch_size"), "batch_size") : 0;
  const std::size_t iterations = root.has("iterations") ? as_count(root.require("iterations"), "iterations") : 0;
  if (const json* b = root.find("burn_in")) cfg.burn_in = as_count(*b, "burn_in");
  if (const json* t = root.find("thinning")) cfg.thinning = as_count(*t, "thinning");
  if (cfg.thinning == 0) config_error("thinning", "must be at least 1");
  if (const json* o = root.find("output_dir")) cfg.output_dir = as_string(*o, "output_dir");
  if (const json* x = root.find("x0")) {
    cfg.x0 = as_vector(*x, "x0");
    if (static_cast<std::size_t>(cfg.x0->size()) != cfg.target.d) {
      config_error("x0", "length " + std::to_string(cfg.x0->size()) + " differs from the target dimension " +
                             std::to_string(cfg.target.d));
    }
  }

  const json& seeds = root.require("seeds");
  if (!seeds.is_array() || seeds.empty()) config_error("seeds", "expected a nonempty array of integers");
  for (std::size_t i = 0; i < seeds.size(); ++i) cfg.seeds.push_back(as_count(seeds[i], "seeds[" + std::to_string(i) + "]"));

  const json& runs = root.require("runs");
  if (!runs.is_array() || runs.empty()) config_error("runs", "expected a nonempty array");
  const std::size_t n_data = dataset_size(cfg.target);
  std::set<std::string> labels;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string field = "runs[" + std::to_string(i) + "]";
    Fields f(runs[i], field);
    RunConfig run;
    const std::string name = as_string(f.require("algorithm"), field + ".algorithm");
    const auto algorithm = parse_algorithm(name);
    if (!algorithm) {
      config_error(field + ".algorithm",
                   "unknown algorithm \"" + name + "\" (LMC, RS-LMC, KLMC, RS-KLMC, FRS-KLMC or their SG names)");
    }
    run.algorithm = *algorithm;
    run.stepsize = f.has("stepsize") ? as_number(f.require("stepsize"), field + ".stepsize") : stepsize;
    run.friction = f.has("friction") ? as_number(f.require("friction"), field + ".friction") : friction;
    run.batch_size = f.has("batch_size") ? as_count(f.require("batch_size"), field + ".batch_size") : batch;
    run.iterations = f.has("iterations") ? as_count(f.require("iterations"), field + ".iterations") : iterations;
    if (const json* r = f.find("regime")) run.regime = regime_reference(*r, field + ".regime", regimes, generators);
    if (const json* r = f.find("friction_regime")) {
      run.friction_regime = regime_reference(*r, field + ".friction_regime", regimes, generators);
    }
    const bool sg = run.batch_size > 0 && run.batch_size < n_data;
    run.label = f.has("label") ? as_string(f.require("label"), field + ".label") : algorithm_name(run.algorithm, sg);
    f.finish();

    if (!(run.stepsize > 0.0)) config_error(field + ".stepsize", "must be positive");
    if (!(run.friction > 0.0)) config_error(field + ".friction", "must be positive");
    if (run.iterations == 0) config_error(field + ".iterations", "K must be at least 1");
    if (cfg.burn_in >= run.iterations) config_error("burn_in", "must be smaller than the iteration count");
    if (n_data > 0 && run.batch_size > n_data) {
      config_error(field + ".batch_size",
                   std::to_string(run.batch_size) + " exceeds the dataset size " + std::to_string(n_data));
    }
    if (cfg.target.kind == TargetKind::Quadratic && run.batch_size > 0) {
      config_error(field + ".batch_size", "quadratic targets have no components to subsample");
    }
    const bool wants_regime = run.algorithm == Algorithm::RSLMC || run.algorithm == Algorithm::RSKLMC;
    if (wants_regime != run.regime.has_value()) {
      config_error(field + ".regime", wants_regime ? "is required for " + name : "is not used by " + name);
    }
    const bool wants_friction = run.algorithm == Algorithm::FRSKLMC;
    if (wants_friction != run.friction_regime.has_value()) {
      config_error(field + ".friction_regime", wants_friction ? "is required for " + name : "is not used by " + name);
    }
    const std::optional<RegimeConfig>& chain = wants_regime ? run.regime : run.friction_regime;
    if (chain && chain->kernel == RegimeKernel::FirstOrder) {
      const double rate = chain->spec.generator().max_exit_rate() * run.stepsize;
      if (rate > 1.0) {
        config_error(field + (wants_regime ? ".regime" : ".friction_regime"),
                     "max exit rate times stepsize is " + format_double(rate) +
                         " > 1, so I + stepsize Q is not a transition matrix; lower the stepsize or use "
                         "\"kernel\": \"exact\"");
      }
    }
    if (!labels.insert(run.label).second) config_error(field + ".label", "duplicate label \"" + run.label + "\"");
    cfg.runs.push_back(std::move(run));
  }
  root.finish();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_text(path));
}

namespace {

json regime_json(const RegimeConfig& r) {
  json out;
  out["values"] = r.spec.values();
  out["generator"] = matrix_json(r.spec.generator().matrix());
  out["initial_law"] = vector_json(r.spec.initial_law());
  out["kernel"] = r.kernel == RegimeKernel::Exact ? "exact" : "first_order";
  return out;
}

}  // namespace

std::string canonical_config(const ExperimentConfig& c) {
  json out;
  out["id"] = c.id;
  json t;
  const TargetConfig& tc = c.target;
  switch (tc.kind) {
    case TargetKind::Quadratic:
      t["kind"] = "quadratic";
      t["precision"] = matrix_json(tc.precision);
      t["mean"] = vector_json(tc.mean);
      break;
    case TargetKind::LinReg:
      t["kind"] = "linreg";
      t["n"] = tc.n;
      t["prior_variance"] = tc.prior_variance;
      break;
    case TargetKind::LogReg:
      t["kind"] = "logreg";
      t["dataset"] = tc.dataset;
      t["prior_variance"] = tc.prior_variance;
      t["d"] = tc.d;
      t["intercept"] = tc.intercept;
      t["loss"] = tc.loss == LogisticLoss::LabelFree ? "label_free" : "label_signed";
      if (tc.dataset == "synthetic") {
        t["n"] = tc.n;
      } else {
        t["positive_class"] = tc.positive_class;
        t["standardize"] = tc.standardize;
      }
      break;
  }
  out["target"] = t;
  out["seeds"] = c.seeds;
  out["burn_in"] = c.burn_in;
  out["thinning"] = c.thinning;
  if (c.x0) out["x0"] = vector_json(*c.x0);
  json runs = json::array();
  for (const RunConfig& r : c.runs) {
    json j;
    j["label"] = r.label;
    j["algorithm"] = algorithm_name(r.algorithm);
    j["stepsize"] = r.stepsize;
    j["friction"] = r.friction;
    j["batch_size"] = r.batch_size;
    j["iterations"] = r.iterations;
    if (r.regime) j["regime"] = regime_json(*r.regime);
    if (r.friction_regime) j["friction_regime"] = regime_json(*r.friction_regime);
    runs.push_back(j);
  }
  out["runs"] = runs;
  return out.dump();
}

std::string config_hash(const ExperimentConfig& config) { return hex64(fnv1a64(canonical_config(config))); }

}  // namespace rsl::cli
