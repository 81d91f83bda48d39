#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsl/models.hpp"
#include "rsl/numerics.hpp"

namespace rsl {

/// 64-bit FNV-1a digest.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);

enum class ColumnKind { Numeric, Categorical };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
};

/// Column layout of a CSV file. Exactly one column is the label.
struct CsvSchema {
  std::string name;
  std::vector<ColumnSpec> columns;
  std::size_t label_column = 0;
  bool has_header = false;
  std::optional<std::size_t> expected_rows;
};

/// 4 numeric measurements then the species name; 150 rows, no header.
CsvSchema iris_schema();
/// 10 numeric features then the class letter g/h; 19020 rows, no header.
CsvSchema magic_schema();

struct Provenance {
  std::string source;  ///< file path or generator description
  std::string hash;    ///< FNV-1a of the file bytes, hex; empty for synthetic data
};

struct Dataset {
  MatrixXd features;
  VectorXd targets;                     ///< responses or 0/1 labels; empty until binarized for categorical labels
  std::vector<std::string> categories;  ///< raw categorical labels, one per row
  std::vector<std::string> feature_names;
  std::string label_name;
  Provenance provenance;

  std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(features.cols()); }
};

/// y = x*^T a + delta with x* = (1, -0.7, 0.5), a ~ N(0, 0.5 I3), delta ~ N(0, 0.25).
LinRegProblem gen_linreg(std::size_t n, RngStream& rng, double prior_variance = 1.0);

/// Draws c ~ N(0, lambda I_d) then X_j ~ N(0, 2 I_d), y_j = 1{p_j <= sigmoid(c^T X_j)}, p_j ~ U(0, 1).
LogRegProblem gen_logreg(std::size_t n, std::size_t d, double lambda, RngStream& rng);
/// Same generative model with the coefficient vector supplied.
LogRegProblem gen_logreg_with(const VectorXd& c, std::size_t n, double lambda, RngStream& rng);

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// targets[j] = 1 if categories[j] == positive_class else 0.
Dataset binarize_labels(const Dataset& ds, const std::string& positive_class);

struct StandardizeTransform {
  VectorXd mean;
  VectorXd scale;
};

struct Standardized {
  Dataset data;
  StandardizeTransform transform;
};

/// Centre each column and scale to unit sample variance; constant columns keep scale 1.
Standardized standardize(const Dataset& ds);
Dataset unstandardize(const Dataset& ds, const StandardizeTransform& t);

/// Adds a trailing column of ones named "intercept".
Dataset append_intercept(const Dataset& ds);

/// Needs 0/1 targets.
LogRegProblem to_logreg_problem(const Dataset& ds, double prior_variance);

}  // namespace rsl
