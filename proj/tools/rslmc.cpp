// Command-line front end: sample, theory, ctmc-check, experiment.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rsl/cli.hpp"

namespace {

using rsl::cli::kExitFailure;
using rsl::cli::kExitOk;

std::optional<std::filesystem::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

void print_records(const std::vector<rsl::cli::RunRecord>& records) {
  for (const auto& r : records) {
    std::cout << r.label << " seed " << r.seed << ": ";
    for (const auto& p : r.csv_paths) std::cout << p.string();
    if (!r.admissible) std::cout << " (stepsize outside the theoretical caps)";
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regime-switching Langevin samplers: runs, bounds and bundled experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string data_dir;
  std::string name;
  std::size_t seeds = 0;
  bool list = false;

  auto* sample = app.add_subcommand("sample", "Run every (algorithm, seed) pair of an experiment config");
  sample->add_option("--config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  sample->add_option("--out", out, "Output directory (overrides output_dir)");
  sample->add_option("--data-dir", data_dir, "Dataset directory (default: $RSL_DATA_DIR, then the bundled data/)");

  auto* theory = app.add_subcommand("theory", "Iteration-complexity table over an eps grid");
  theory->add_option("--config", config, "JSON theory config")->required()->check(CLI::ExistingFile);
  theory->add_option("--out", out, "Write the CSV here instead of stdout");

  auto* ctmc = app.add_subcommand("ctmc-check", "Stationary law, spectrum and occupation check of a generator");
  ctmc->add_option("--config", config, "JSON generator config")->required()->check(CLI::ExistingFile);

  auto* experiment = app.add_subcommand("experiment", "Run a bundled experiment");
  experiment->add_option("--name", name, "Experiment id");
  experiment->add_flag("--list", list, "List bundled experiments");
  experiment->add_option("--data-dir", data_dir, "Dataset directory (default: $RSL_DATA_DIR, then the bundled data/)");
  experiment->add_option("--out", out, "Output root; files go to <out>/<id>/ (default: out)");
  experiment->add_option("--seeds", seeds, "Use seeds 1..k instead of the bundled list")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : rsl::cli::kExitConfig;
  }

  try {
    if (*sample) {
      const auto records =
          rsl::cli::cmd_sample(config, optional_path(out), rsl::cli::resolve_data_dir(optional_path(data_dir)));
      print_records(records);
    } else if (*theory) {
      if (out.empty()) {
        rsl::cli::cmd_theory(config, std::cout);
      } else {
        std::ofstream file(out, std::ios::binary);
        if (!file) throw rsl::Error(rsl::ErrorCode::FileNotFound, "cannot write " + out);
        rsl::cli::cmd_theory(config, file);
      }
    } else if (*ctmc) {
      const auto report = rsl::cli::cmd_ctmc_check(config, std::cout);
      if (!report.passed) {
        std::cerr << "total variation " << report.tv << " exceeds the threshold " << report.threshold << '\n';
        return kExitFailure;
      }
    } else if (*experiment) {
      if (list || name.empty()) {
        for (const auto& n : rsl::cli::bundled_experiments()) std::cout << n << '\n';
        return name.empty() && !list ? rsl::cli::kExitConfig : kExitOk;
      }
      rsl::cli::ExperimentOptions options;
      options.data_dir = optional_path(data_dir);
      options.output_dir = optional_path(out);
      if (seeds > 0) options.seed_count = seeds;
      const auto result = rsl::cli::cmd_experiment(name, options);
      print_records(result.records);
      if (result.summary_path) std::cout << "summary: " << result.summary_path->string() << '\n';
    }
  } catch (const rsl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rsl::cli::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
