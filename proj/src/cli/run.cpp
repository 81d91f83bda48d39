#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "config_json.hpp"
#include "rsl/cli.hpp"
#include "rsl/data.hpp"
#include "rsl/metrics.hpp"

#ifndef RSL_DEFAULT_DATA_DIR
#define RSL_DEFAULT_DATA_DIR "data"
#endif

namespace rsl::cli {

using nlohmann::json;

namespace {

std::string slug(const std::string& label) {
  std::string out;
  for (char c : label) {
    const auto u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_');
  }
  return out;
}

LogRegProblem load_real_dataset(const TargetConfig& t, const std::filesystem::path& data_dir) {
  const bool iris = t.dataset == "iris";
  const std::filesystem::path path = data_dir / (iris ? "iris.csv" : "magic04.data");
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::MissingDataset, path.string() + " not found; place the " + t.dataset +
                                               " file there or point --data-dir / RSL_DATA_DIR at its directory");
  }
  Dataset ds = binarize_labels(load_csv(path, iris ? iris_schema() : magic_schema()), t.positive_class);
  if (t.standardize) ds = standardize(ds).data;
  if (t.intercept) ds = append_intercept(ds);
  return to_logreg_problem(ds, t.prior_variance);
}

double majority_share(const VectorXd& labels) {
  const double ones = labels.mean();
  return std::max(ones, 1.0 - ones);
}

}  // namespace

BuiltTarget build_target(const TargetConfig& t, std::uint64_t seed, const std::filesystem::path& data_dir) {
  BuiltTarget out;
  RngStream data_rng(seed, 1);
  switch (t.kind) {
    case TargetKind::Quadratic: {
      out.potential = quadratic_potential(t.precision, t.precision * t.mean);
      for (Eigen::Index i = 0; i < t.precision.rows(); ++i) {
        out.metrics.push_back({"x" + std::to_string(i + 1), [i](const VectorXd& x) { return x[i]; }});
      }
      break;
    }
    case TargetKind::LinReg: {
      out.linreg = gen_linreg(t.n, data_rng, t.prior_variance);
      out.potential = linreg_potential(*out.linreg);
      auto problem = std::make_shared<const LinRegProblem>(*out.linreg);
      out.metrics.push_back({"mse", [problem](const VectorXd& x) { return mse(x, *problem); }});
      break;
    }
    case TargetKind::LogReg: {
      if (t.dataset == "synthetic") {
        out.logreg = gen_logreg(t.n, t.d, t.prior_variance, data_rng);
        out.references["bayes_accuracy"] = accuracy(*out.logreg->generating_coefficients, *out.logreg);
      } else {
        out.logreg = load_real_dataset(t, data_dir);
      }
      out.references["majority_baseline"] = majority_share(out.logreg->labels);
      out.potential = logreg_potential(*out.logreg, t.loss);
      auto problem = std::make_shared<const LogRegProblem>(*out.logreg);
      out.metrics.push_back({"accuracy", [problem](const VectorXd& x) { return accuracy(x, *problem); }});
      break;
    }
  }
  return out;
}

std::vector<double> Curve::at(std::size_t iteration) const {
  const auto it = std::find(iterations.begin(), iterations.end(), iteration);
  if (it == iterations.end()) {
    throw Error(ErrorCode::ConfigError, "iteration " + std::to_string(iteration) + " was not recorded for " + label);
  }
  const auto row = static_cast<std::size_t>(it - iterations.begin());
  std::vector<double> out;
  for (const auto& seed_values : per_seed) out.push_back(seed_values[row]);
  return out;
}

const Curve& ExperimentResult::curve(std::string_view label) const {
  for (const Curve& c : curves) {
    if (c.label == label) return c;
  }
  throw Error(ErrorCode::ConfigError, "no curve labelled \"" + std::string(label) + "\"");
}

bool ExperimentResult::any_diverged() const {
  return std::any_of(records.begin(), records.end(), [](const RunRecord& r) { return r.diverged; });
}

std::filesystem::path resolve_data_dir(const std::optional<std::filesystem::path>& explicit_dir) {
  if (explicit_dir) return *explicit_dir;
  if (const char* env = std::getenv("RSL_DATA_DIR"); env && *env) return env;
  return RSL_DEFAULT_DATA_DIR;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentResult result;
  result.config_hash = config_hash(config);

  std::vector<BuiltTarget> targets;
  for (std::uint64_t seed : config.seeds) {
    targets.push_back(build_target(config.target, seed, options.data_dir));
    for (const auto& [name, value] : targets.back().references) result.references[name].push_back(value);
  }
  const std::size_t n_metrics = targets.front().metrics.size();
  const bool single_metric = n_metrics == 1;

  for (const RunConfig& run : config.runs) {
    const std::size_t rows = run.iterations / config.thinning + 1;
    std::vector<Curve> curves(n_metrics);
    for (std::size_t m = 0; m < n_metrics; ++m) {
      const std::string& metric = targets.front().metrics[m].name;
      curves[m].label = single_metric ? run.label : run.label + ":" + metric;
      curves[m].metric = metric;
      for (std::size_t r = 0; r < rows; ++r) curves[m].iterations.push_back(r * config.thinning);
    }

    for (std::size_t s = 0; s < config.seeds.size(); ++s) {
      const std::uint64_t seed = config.seeds[s];
      const BuiltTarget& target = targets[s];
      SamplerConfig sc;
      sc.stepsize = run.stepsize;
      sc.friction = run.friction;
      sc.iterations = run.iterations;
      sc.burn_in = config.burn_in;
      sc.batch_size = run.batch_size;
      sc.thinning = config.thinning;
      sc.record_positions = false;
      sc.x0 = config.x0;
      if (run.regime) {
        sc.regime = run.regime->spec;
        sc.regime_kernel = run.regime->kernel;
      }
      if (run.friction_regime) {
        sc.frictional_regime = run.friction_regime->spec;
        sc.regime_kernel = run.friction_regime->kernel;
      }

      RunRecord record;
      record.config_hash = result.config_hash;
      record.label = run.label;
      record.algorithm = algorithm_name(run.algorithm, run.batch_size > 0);
      record.seed = seed;

      const VectorXd start = config.x0.value_or(VectorXd::Zero(static_cast<Eigen::Index>(target.potential->dimension())));
      std::vector<std::vector<double>> columns(n_metrics);
      for (std::size_t m = 0; m < n_metrics; ++m) columns[m].push_back(target.metrics[m].fn(start));

      const auto t0 = std::chrono::steady_clock::now();
      try {
        const Trace trace = run_chain(sc, run.algorithm, *target.potential, RngStream(seed, 0), Recorder{target.metrics, {}});
        record.admissible = trace.admissible;
        record.warnings = trace.warnings;
        for (std::size_t m = 0; m < n_metrics; ++m) {
          const auto& v = trace.metrics.at(target.metrics[m].name);
          columns[m].insert(columns[m].end(), v.begin(), v.end());
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteState) throw;
        record.diverged = true;
        record.warnings.emplace_back(e.what());
        for (auto& c : columns) c.assign(rows, std::numeric_limits<double>::quiet_NaN());
      }
      record.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      if (options.write_files) {
        SeriesTable table;
        table.iterations = curves.front().iterations;
        for (std::size_t m = 0; m < n_metrics; ++m) {
          table.columns.push_back(target.metrics[m].name);
          table.values.push_back(columns[m]);
        }
        const auto path = config.output_dir / (slug(run.label) + "_seed" + std::to_string(seed) + ".csv");
        write_series_csv(path, table);
        record.csv_paths.push_back(path);
      }
      for (std::size_t m = 0; m < n_metrics; ++m) curves[m].per_seed.push_back(std::move(columns[m]));
      result.records.push_back(std::move(record));
    }

    for (Curve& c : curves) {
      c.mean.assign(rows, 0.0);
      for (const auto& v : c.per_seed) {
        for (std::size_t r = 0; r < rows; ++r) c.mean[r] += v[r] / static_cast<double>(c.per_seed.size());
      }
      result.curves.push_back(std::move(c));
    }
  }

  if (options.write_files) {
    SeriesTable summary;
    summary.iterations = result.curves.front().iterations;
    // runs with different iteration counts are padded with NaN
    std::size_t longest = 0;
    for (const Curve& c : result.curves) longest = std::max(longest, c.iterations.size());
    for (const Curve& c : result.curves) {
      if (c.iterations.size() == longest) summary.iterations = c.iterations;
    }
    for (const Curve& c : result.curves) {
      summary.columns.push_back(c.label);
      std::vector<double> col = c.mean;
      col.resize(longest, std::numeric_limits<double>::quiet_NaN());
      summary.values.push_back(std::move(col));
    }
    result.summary_path = config.output_dir / "summary.csv";
    write_series_csv(*result.summary_path, summary);

    json manifest;
    manifest["id"] = config.id;
    manifest["config_hash"] = result.config_hash;
    manifest["config"] = json::parse(canonical_config(config));
    manifest["references"] = result.references;
    json runs = json::array();
    for (const RunRecord& r : result.records) {
      json j;
      j["label"] = r.label;
      j["algorithm"] = r.algorithm;
      j["seed"] = r.seed;
      j["csv"] = r.csv_paths.empty() ? "" : r.csv_paths.front().filename().string();
      j["wall_clock_seconds"] = r.wall_clock_seconds;
      j["diverged"] = r.diverged;
      j["admissible"] = r.admissible;
      j["warnings"] = r.warnings;
      runs.push_back(j);
    }
    manifest["runs"] = runs;
    std::ofstream(config.output_dir / "runs.json", std::ios::binary) << manifest.dump(2) << '\n';
  }
  return result;
}

namespace {

void throw_if_diverged(const ExperimentResult& result) {
  if (!result.any_diverged()) return;
  std::string which;
  for (const RunRecord& r : result.records) {
    if (r.diverged) which += (which.empty() ? "" : ", ") + r.label + " (seed " + std::to_string(r.seed) + ")";
  }
  throw Error(ErrorCode::DivergenceDetected, "non-finite or exploding state in " + which);
}

}  // namespace

std::vector<RunRecord> cmd_sample(const std::filesystem::path& config_path,
                                  const std::optional<std::filesystem::path>& output_override,
                                  const std::filesystem::path& data_dir) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (output_override) cfg.output_dir = *output_override;
  const ExperimentResult result = run_experiment(cfg, {data_dir, true});
  throw_if_diverged(result);
  return result.records;
}

std::vector<std::string> bundled_experiments() {
  std::vector<std::string> out;
  for (const auto& [name, text] : detail::embedded_experiments()) out.emplace_back(name);
  return out;
}

std::string_view bundled_config(std::string_view name) {
  for (const auto& [n, text] : detail::embedded_experiments()) {
    if (n == name) return text;
  }
  std::string names;
  for (const std::string& n : bundled_experiments()) names += (names.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::ConfigError, "unknown experiment \"" + std::string(name) + "\"; bundled: " + names);
}

ExperimentConfig bundled_experiment_config(std::string_view name, const ExperimentOptions& options) {
  ExperimentConfig cfg = parse_experiment_config(bundled_config(name));
  if (options.seed_count) {
    if (*options.seed_count == 0) throw Error(ErrorCode::ConfigError, "--seeds must be at least 1");
    cfg.seeds.clear();
    for (std::size_t k = 1; k <= *options.seed_count; ++k) cfg.seeds.push_back(k);
  }
  cfg.output_dir = options.output_dir.value_or("out") / cfg.id;
  return cfg;
}

ExperimentResult cmd_experiment(std::string_view name, const ExperimentOptions& options) {
  const ExperimentConfig cfg = bundled_experiment_config(name, options);
  ExperimentResult result = run_experiment(cfg, {resolve_data_dir(options.data_dir), true});
  throw_if_diverged(result);
  return result;
}

}  // namespace rsl::cli
