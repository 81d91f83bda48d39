#include "rsl/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rsl/error.hpp"

namespace rsl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string cell(std::size_t row, std::size_t column) {
  return "row " + std::to_string(row) + ", column " + std::to_string(column);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << value;
  return out.str();
}

CsvSchema iris_schema() {
  CsvSchema s;
  s.name = "iris";
  s.columns = {{"sepal_length"}, {"sepal_width"}, {"petal_length"}, {"petal_width"},
               {"species", ColumnKind::Categorical}};
  s.label_column = 4;
  s.expected_rows = 150;
  return s;
}

CsvSchema magic_schema() {
  CsvSchema s;
  s.name = "magic";
  for (const char* name : {"fLength", "fWidth", "fSize", "fConc", "fConc1", "fAsym", "fM3Long", "fM3Trans",
                           "fAlpha", "fDist"}) {
    s.columns.push_back({name});
  }
  s.columns.push_back({"class", ColumnKind::Categorical});
  s.label_column = 10;
  s.expected_rows = 19020;
  return s;
}

LinRegProblem gen_linreg(std::size_t n, RngStream& rng, double prior_variance) {
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "need at least one sample");
  LinRegProblem p;
  p.true_coefficients = VectorXd(3);
  *p.true_coefficients << 1.0, -0.7, 0.5;
  p.prior_variance = prior_variance;
  const auto rows = static_cast<Eigen::Index>(n);
  p.features.resize(rows, 3);
  p.responses.resize(rows);
  const double feature_sd = std::sqrt(0.5);
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index i = 0; i < 3; ++i) p.features(j, i) = feature_sd * rng.normal();
    p.responses[j] = p.features.row(j).dot(*p.true_coefficients) + 0.5 * rng.normal();
  }
  return p;
}

LogRegProblem gen_logreg_with(const VectorXd& c, std::size_t n, double lambda, RngStream& rng) {
  if (n == 0 || c.size() == 0) throw Error(ErrorCode::DimensionMismatch, "need n >= 1 and d >= 1");
  LogRegProblem p;
  p.prior_variance = lambda;
  p.generating_coefficients = c;
  const auto rows = static_cast<Eigen::Index>(n);
  p.features.resize(rows, c.size());
  p.labels.resize(rows);
  const double feature_sd = std::sqrt(2.0);
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index i = 0; i < c.size(); ++i) p.features(j, i) = feature_sd * rng.normal();
    const double u = rng.uniform();
    p.labels[j] = u <= sigmoid(p.features.row(j).dot(c)) ? 1.0 : 0.0;
  }
  return p;
}

LogRegProblem gen_logreg(std::size_t n, std::size_t d, double lambda, RngStream& rng) {
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "need d >= 1");
  const VectorXd c = std::sqrt(lambda) * standard_normal(rng, d);
  return gen_logreg_with(c, n, lambda, rng);
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();

  const std::size_t n_columns = schema.columns.size();
  if (schema.label_column >= n_columns) throw Error(ErrorCode::SchemaMismatch, "label column out of range");

  Dataset ds;
  ds.provenance = {path.string(), hex64(fnv1a64(content))};
  ds.label_name = schema.columns[schema.label_column].name;
  for (std::size_t c = 0; c < n_columns; ++c) {
    if (c != schema.label_column) ds.feature_names.push_back(schema.columns[c].name);
  }
  const bool numeric_label = schema.columns[schema.label_column].kind == ColumnKind::Numeric;

  std::vector<double> values;
  std::vector<double> targets;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool header_pending = schema.has_header;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    const std::string_view line = trim(std::string_view(content).substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != n_columns) {
      throw Error(ErrorCode::ParseError, "row " + std::to_string(line_no) + ": expected " +
                                             std::to_string(n_columns) + " fields, found " +
                                             std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < n_columns; ++c) {
      const std::string_view f = fields[c];
      if (schema.columns[c].kind == ColumnKind::Categorical) {
        if (f.empty()) throw Error(ErrorCode::ParseError, cell(line_no, c + 1) + ": empty category");
        if (c == schema.label_column) ds.categories.emplace_back(f);
        continue;
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, cell(line_no, c + 1) + ": '" + std::string(f) + "' is not a number");
      }
      if (c == schema.label_column) {
        targets.push_back(v);
      } else {
        values.push_back(v);
      }
    }
  }
  const std::size_t d = n_columns - 1;
  const std::size_t n = d > 0 ? values.size() / d : (numeric_label ? targets.size() : ds.categories.size());
  if (n == 0) throw Error(ErrorCode::SchemaMismatch, path.string() + " has no data rows");
  if (schema.expected_rows && *schema.expected_rows != n) {
    throw Error(ErrorCode::SchemaMismatch, schema.name + " expects " + std::to_string(*schema.expected_rows) +
                                               " rows, " + path.string() + " has " + std::to_string(n));
  }
  ds.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  if (numeric_label) ds.targets = Eigen::Map<const VectorXd>(targets.data(), static_cast<Eigen::Index>(n));
  return ds;
}

Dataset binarize_labels(const Dataset& ds, const std::string& positive_class) {
  if (ds.categories.size() != ds.size()) {
    throw Error(ErrorCode::SchemaMismatch, "label column is not categorical");
  }
  Dataset out = ds;
  out.targets.resize(static_cast<Eigen::Index>(ds.size()));
  bool seen = false;
  for (std::size_t j = 0; j < ds.size(); ++j) {
    const bool positive = ds.categories[j] == positive_class;
    seen = seen || positive;
    out.targets[static_cast<Eigen::Index>(j)] = positive ? 1.0 : 0.0;
  }
  if (!seen) throw Error(ErrorCode::UnknownClass, "class '" + positive_class + "' does not occur");
  return out;
}

Standardized standardize(const Dataset& ds) {
  Standardized out{ds, {}};
  const Eigen::Index n = ds.features.rows();
  out.transform.mean = ds.features.colwise().mean().transpose();
  out.transform.scale = VectorXd::Ones(ds.features.cols());
  for (Eigen::Index c = 0; c < ds.features.cols(); ++c) {
    out.data.features.col(c).array() -= out.transform.mean[c];
    if (n >= 2) {
      const double sd = std::sqrt(out.data.features.col(c).squaredNorm() / static_cast<double>(n - 1));
      if (sd > 0.0) {
        out.transform.scale[c] = sd;
        out.data.features.col(c) /= sd;
      }
    }
  }
  return out;
}

Dataset unstandardize(const Dataset& ds, const StandardizeTransform& t) {
  if (t.mean.size() != ds.features.cols() || t.scale.size() != ds.features.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "transform does not match the feature count");
  }
  Dataset out = ds;
  for (Eigen::Index c = 0; c < ds.features.cols(); ++c) {
    out.features.col(c) = (ds.features.col(c) * t.scale[c]).array() + t.mean[c];
  }
  return out;
}

Dataset append_intercept(const Dataset& ds) {
  Dataset out = ds;
  out.features.conservativeResize(Eigen::NoChange, ds.features.cols() + 1);
  out.features.col(ds.features.cols()).setOnes();
  out.feature_names.push_back("intercept");
  return out;
}

LogRegProblem to_logreg_problem(const Dataset& ds, double prior_variance) {
  if (ds.targets.size() != ds.features.rows()) {
    throw Error(ErrorCode::SchemaMismatch, "dataset has no binary targets; binarize the labels first");
  }
  LogRegProblem p;
  p.features = ds.features;
  p.labels = ds.targets;
  p.prior_variance = prior_variance;
  return p;
}

}  // namespace rsl
