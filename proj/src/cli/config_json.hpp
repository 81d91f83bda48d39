#pragma once

// JSON helpers shared by the command implementations.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rsl/cli.hpp"

namespace rsl::cli {

[[noreturn]] void config_error(const std::string& field, const std::string& what);

/// Object view that records which keys were read so leftovers can be rejected.
class Fields {
 public:
  Fields(const nlohmann::json& object, std::string path);

  const nlohmann::json* find(std::string_view key);
  const nlohmann::json& require(std::string_view key);
  bool has(std::string_view key) const;
  std::string field(std::string_view key) const;
  /// ConfigError on the first key that was never read.
  void finish() const;

 private:
  const nlohmann::json& object_;
  std::string path_;
  std::set<std::string> used_;
};

double as_number(const nlohmann::json& j, const std::string& field);
std::size_t as_count(const nlohmann::json& j, const std::string& field);
std::string as_string(const nlohmann::json& j, const std::string& field);
bool as_bool(const nlohmann::json& j, const std::string& field);
std::vector<double> as_numbers(const nlohmann::json& j, const std::string& field);
VectorXd as_vector(const nlohmann::json& j, const std::string& field);
MatrixXd as_matrix(const nlohmann::json& j, const std::string& field);

nlohmann::json matrix_json(const MatrixXd& m);
nlohmann::json vector_json(const VectorXd& v);

nlohmann::json parse_json(std::string_view text, const std::string& what);
std::string read_text(const std::filesystem::path& path);

/// {"values": [...], "generator": name | rows, "kernel": ..., "start": i}; a lone value needs no generator.
RegimeConfig parse_regime(const nlohmann::json& j, const std::string& field,
                          const std::map<std::string, MatrixXd>& generators);

/// The "target" block of an experiment config.
TargetConfig parse_target(const nlohmann::json& j);

}  // namespace rsl::cli

namespace rsl::cli::detail {

/// (name, JSON text) for every bundled experiment, sorted by name; generated at build time.
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_experiments();

}  // namespace rsl::cli::detail
