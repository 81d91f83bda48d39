#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsl/ctmc.hpp"
#include "rsl/error.hpp"
#include "rsl/models.hpp"
#include "rsl/samplers.hpp"
#include "rsl/theory.hpp"

namespace rsl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitMissingData = 4;

int exit_code(ErrorCode code) noexcept;

// ---- configuration ---------------------------------------------------------

struct RegimeConfig {
  std::string name;
  RegimeSpec spec = RegimeSpec::constant(1.0);
  RegimeKernel kernel = RegimeKernel::FirstOrder;
};

enum class TargetKind { Quadratic, LinReg, LogReg };

struct TargetConfig {
  TargetKind kind = TargetKind::LinReg;
  // quadratic
  MatrixXd precision;
  VectorXd mean;
  // linreg and synthetic logreg
  std::size_t n = 1000;
  double prior_variance = 1.0;
  // logreg
  std::string dataset = "synthetic";  ///< synthetic | iris | magic
  std::size_t d = 3;
  std::string positive_class;
  bool standardize = true;
  bool intercept = false;
  LogisticLoss loss = LogisticLoss::LabelSigned;
};

struct RunConfig {
  std::string label;
  Algorithm algorithm = Algorithm::LMC;
  std::optional<RegimeConfig> regime;
  std::optional<RegimeConfig> friction_regime;
  double stepsize = 0.0;
  double friction = 1.0;
  std::size_t batch_size = 0;
  std::size_t iterations = 0;
};

struct ExperimentConfig {
  std::string id;
  TargetConfig target;
  std::vector<RunConfig> runs;
  std::vector<std::uint64_t> seeds;
  std::size_t burn_in = 0;
  std::size_t thinning = 1;
  std::optional<VectorXd> x0;
  std::filesystem::path output_dir = "out";
};

/// Parses and validates; every failure is a ConfigError naming the offending field.
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Canonical form with every default filled in; output_dir is excluded.
std::string canonical_config(const ExperimentConfig& config);
/// FNV-1a of canonical_config, hex.
std::string config_hash(const ExperimentConfig& config);

// ---- CSV -------------------------------------------------------------------

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

struct SeriesTable {
  std::vector<std::string> columns;  ///< excludes the leading "iteration"
  std::vector<std::size_t> iterations;
  std::vector<std::vector<double>> values;  ///< values[c][row]
};

void write_series_csv(const std::filesystem::path& path, const SeriesTable& table);
SeriesTable read_series_csv(const std::filesystem::path& path);

// ---- targets ---------------------------------------------------------------

struct BuiltTarget {
  std::shared_ptr<const Potential> potential;
  std::vector<MetricHook> metrics;  ///< mse | accuracy | x1..xd
  std::map<std::string, double> references;
  std::optional<LinRegProblem> linreg;
  std::optional<LogRegProblem> logreg;
};

/// Synthetic data is drawn from RngStream(seed, 1); real datasets are read from data_dir (MissingDataset if absent).
BuiltTarget build_target(const TargetConfig& target, std::uint64_t seed, const std::filesystem::path& data_dir);

// ---- runs ------------------------------------------------------------------

struct RunRecord {
  std::string config_hash;
  std::string label;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> csv_paths;
  double wall_clock_seconds = 0.0;
  bool diverged = false;
  bool admissible = true;
  std::vector<std::string> warnings;
};

struct Curve {
  std::string label;
  std::string metric;
  std::vector<std::size_t> iterations;           ///< 0, thinning, 2 thinning, ...
  std::vector<std::vector<double>> per_seed;     ///< aligned with ExperimentConfig::seeds
  std::vector<double> mean;

  /// Per-seed value at `iteration`; throws if the iteration was not recorded.
  std::vector<double> at(std::size_t iteration) const;
};

struct ExperimentResult {
  std::string config_hash;
  std::vector<RunRecord> records;
  std::vector<Curve> curves;
  /// Per-seed reference numbers for logistic targets: "bayes_accuracy", "majority_baseline".
  std::map<std::string, std::vector<double>> references;
  std::optional<std::filesystem::path> summary_path;

  const Curve& curve(std::string_view label) const;
  bool any_diverged() const;
};

struct RunOptions {
  std::filesystem::path data_dir;
  bool write_files = true;
};

/// Runs every (run, seed) pair; divergence is recorded, not thrown.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Directory for datasets: explicit value, else $RSL_DATA_DIR, else the build-time default.
std::filesystem::path resolve_data_dir(const std::optional<std::filesystem::path>& explicit_dir);

// ---- commands --------------------------------------------------------------

/// Throws DivergenceDetected after all outputs are written if any run diverged.
std::vector<RunRecord> cmd_sample(const std::filesystem::path& config_path,
                                  const std::optional<std::filesystem::path>& output_override,
                                  const std::filesystem::path& data_dir);

struct TheoryConfig {
  ComplexityInputs inputs;
  std::vector<double> eps_grid;
};

/// data_dir is only consulted for targets backed by real datasets; empty selects resolve_data_dir.
TheoryConfig parse_theory_config(std::string_view json_text, const std::filesystem::path& data_dir = {});
std::vector<ComplexityRow> cmd_theory(const std::filesystem::path& config_path, std::ostream& out);
void write_theory_csv(std::ostream& out, const std::vector<ComplexityRow>& rows);

struct CtmcReport {
  VectorXd stationary;
  ComplexSpectrum spectrum;
  double gap = 0.0;  ///< -max real part over the nonzero eigenvalues
  VectorXd occupation;
  double horizon = 0.0;
  double tv = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

CtmcReport ctmc_check(std::string_view json_text);
/// Prints the report as JSON; the caller maps `passed == false` to a nonzero exit.
CtmcReport cmd_ctmc_check(const std::filesystem::path& config_path, std::ostream& out);

std::vector<std::string> bundled_experiments();
/// Raw JSON text of a bundled experiment; ConfigError listing the valid names otherwise.
std::string_view bundled_config(std::string_view name);

struct ExperimentOptions {
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::size_t> seed_count;  ///< seeds 1..k
};

ExperimentConfig bundled_experiment_config(std::string_view name, const ExperimentOptions& options);
ExperimentResult cmd_experiment(std::string_view name, const ExperimentOptions& options);

}  // namespace rsl::cli
