#include "rsl/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsl/error.hpp"

namespace rsl {

double softplus(double z) noexcept {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void Potential::component_gradient_into(std::size_t, const VectorXd&, VectorXd&) const {
  throw Error(ErrorCode::BatchLargerThanDataset, "potential has no components");
}

void Potential::batch_gradient_into(std::span<const std::size_t> indices, const VectorXd& x, VectorXd& out) const {
  out.setZero(Eigen::Index(dimension()));
  VectorXd term(static_cast<Eigen::Index>(dimension()));
  for (std::size_t j : indices) {
    component_gradient_into(j, x, term);
    out += term;
  }
}

VectorXd Potential::gradient(const VectorXd& x) const {
  VectorXd out(static_cast<Eigen::Index>(dimension()));
  gradient_into(x, out);
  return out;
}

VectorXd Potential::component_gradient(std::size_t j, const VectorXd& x) const {
  VectorXd out(static_cast<Eigen::Index>(dimension()));
  component_gradient_into(j, x, out);
  return out;
}

namespace {

void check_dimension(const VectorXd& x, std::size_t d) {
  if (static_cast<std::size_t>(x.size()) != d) {
    throw Error(ErrorCode::DimensionMismatch,
                "point has dimension " + std::to_string(x.size()) + ", potential has " + std::to_string(d));
  }
}

void check_prior(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw Error(ErrorCode::NotPositiveDefinite, "prior variance must be positive");
  }
}

class QuadraticPotential final : public Potential {
 public:
  QuadraticPotential(MatrixXd a, VectorXd b) : a_(std::move(a)), b_(std::move(b)) {
    const VectorXd spectrum = symmetric_eigenvalues(a_);
    bounds_ = {spectrum.minCoeff(), spectrum.maxCoeff()};
  }

  std::size_t dimension() const override { return static_cast<std::size_t>(b_.size()); }
  double value(const VectorXd& x) const override {
    check_dimension(x, dimension());
    return 0.5 * x.dot(a_ * x) - b_.dot(x);
  }
  void gradient_into(const VectorXd& x, VectorXd& out) const override { out.noalias() = a_ * x - b_; }
  CurvatureBounds constants() const override { return bounds_; }

 private:
  MatrixXd a_;
  VectorXd b_;
  CurvatureBounds bounds_;
};

class LinearRegressionPotential final : public Potential {
 public:
  explicit LinearRegressionPotential(const LinRegProblem& p)
      : features_(p.features), responses_(p.responses), inv_prior_(1.0 / p.prior_variance) {
    gram_ = features_.transpose() * features_;
    cross_ = features_.transpose() * responses_;
    const VectorXd spectrum = symmetric_eigenvalues(gram_);
    bounds_ = {spectrum.minCoeff() + inv_prior_, spectrum.maxCoeff() + inv_prior_};
    component_prior_ = inv_prior_ / static_cast<double>(features_.rows());
  }

  std::size_t dimension() const override { return static_cast<std::size_t>(features_.cols()); }
  std::size_t component_count() const override { return static_cast<std::size_t>(features_.rows()); }

  double value(const VectorXd& theta) const override {
    check_dimension(theta, dimension());
    return 0.5 * (responses_ - features_ * theta).squaredNorm() + 0.5 * inv_prior_ * theta.squaredNorm();
  }
  void gradient_into(const VectorXd& theta, VectorXd& out) const override {
    out.noalias() = gram_ * theta - cross_;
    out += inv_prior_ * theta;
  }
  void component_gradient_into(std::size_t j, const VectorXd& theta, VectorXd& out) const override {
    const auto row = features_.row(Eigen::Index(j));
    out = (row.dot(theta) - responses_[Eigen::Index(j)]) * row.transpose() + component_prior_ * theta;
  }
  CurvatureBounds constants() const override { return bounds_; }

 private:
  MatrixXd features_;
  VectorXd responses_;
  MatrixXd gram_;
  VectorXd cross_;
  double inv_prior_;
  double component_prior_ = 0.0;
  CurvatureBounds bounds_;
};

class LogisticRegressionPotential final : public Potential {
 public:
  LogisticRegressionPotential(const LogRegProblem& p, LogisticLoss loss)
      : features_(p.features), inv_prior_(1.0 / p.prior_variance) {
    signs_.resize(p.labels.size());
    for (Eigen::Index j = 0; j < p.labels.size(); ++j) {
      signs_[j] = loss == LogisticLoss::LabelSigned ? 2.0 * p.labels[j] - 1.0 : 1.0;
    }
    const VectorXd spectrum = symmetric_eigenvalues(features_.transpose() * features_);
    bounds_ = {inv_prior_, inv_prior_ + 0.25 * spectrum.maxCoeff()};
    component_prior_ = inv_prior_ / static_cast<double>(features_.rows());
  }

  std::size_t dimension() const override { return static_cast<std::size_t>(features_.cols()); }
  std::size_t component_count() const override { return static_cast<std::size_t>(features_.rows()); }

  double value(const VectorXd& c) const override {
    check_dimension(c, dimension());
    const VectorXd margins = signs_.cwiseProduct(features_ * c);
    double total = 0.0;
    for (Eigen::Index j = 0; j < margins.size(); ++j) total += softplus(-margins[j]);
    return total + 0.5 * inv_prior_ * c.squaredNorm();
  }
  void gradient_into(const VectorXd& c, VectorXd& out) const override {
    VectorXd weights = features_ * c;
    for (Eigen::Index j = 0; j < weights.size(); ++j) weights[j] = -signs_[j] * sigmoid(-signs_[j] * weights[j]);
    out.noalias() = features_.transpose() * weights;
    out += inv_prior_ * c;
  }
  void component_gradient_into(std::size_t j, const VectorXd& c, VectorXd& out) const override {
    const auto row = features_.row(Eigen::Index(j));
    const double s = signs_[Eigen::Index(j)];
    out = (-s * sigmoid(-s * row.dot(c))) * row.transpose() + component_prior_ * c;
  }
  void batch_gradient_into(std::span<const std::size_t> indices, const VectorXd& c, VectorXd& out) const override {
    out = (component_prior_ * static_cast<double>(indices.size())) * c;
    for (std::size_t j : indices) {
      const auto row = features_.row(Eigen::Index(j));
      const double s = signs_[Eigen::Index(j)];
      out += (-s * sigmoid(-s * row.dot(c))) * row.transpose();
    }
  }
  CurvatureBounds constants() const override { return bounds_; }

 private:
  MatrixXd features_;
  VectorXd signs_;
  double inv_prior_;
  double component_prior_ = 0.0;
  CurvatureBounds bounds_;
};

}  // namespace

std::shared_ptr<const Potential> quadratic_potential(const MatrixXd& a, const VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "quadratic potential needs square A matching b");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::NotPositiveDefinite, "A is not symmetric");
  }
  if (!(symmetric_eigenvalues(a).minCoeff() > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "A has a non-positive eigenvalue");
  }
  return std::make_shared<QuadraticPotential>(a, b);
}

std::shared_ptr<const Potential> linreg_potential(const LinRegProblem& problem) {
  if (problem.features.rows() == 0 || problem.features.rows() != problem.responses.size()) {
    throw Error(ErrorCode::DimensionMismatch, "linear regression needs n >= 1 rows matching the responses");
  }
  check_prior(problem.prior_variance);
  return std::make_shared<LinearRegressionPotential>(problem);
}

std::shared_ptr<const Potential> logreg_potential(const LogRegProblem& problem, LogisticLoss loss) {
  if (problem.features.rows() == 0 || problem.features.rows() != problem.labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "logistic regression needs n >= 1 rows matching the labels");
  }
  check_prior(problem.prior_variance);
  for (Eigen::Index j = 0; j < problem.labels.size(); ++j) {
    if (problem.labels[j] != 0.0 && problem.labels[j] != 1.0) {
      throw Error(ErrorCode::SchemaMismatch, "label " + std::to_string(j) + " is not binary");
    }
  }
  return std::make_shared<LogisticRegressionPotential>(problem, loss);
}

void stochastic_gradient_into(const Potential& potential, const VectorXd& x, std::size_t batch_size, RngStream& rng,
                              std::vector<std::size_t>& scratch, VectorXd& out) {
  const std::size_t n = potential.component_count();
  if (batch_size == 0 || batch_size > n) {
    throw Error(ErrorCode::BatchLargerThanDataset,
                "batch size " + std::to_string(batch_size) + " with " + std::to_string(n) + " components");
  }
  if (batch_size == n) {
    potential.gradient_into(x, out);
    return;
  }
  // Floyd's sampling of a uniform size-b subset.
  scratch.clear();
  for (std::size_t j = n - batch_size; j < n; ++j) {
    const auto t = static_cast<std::size_t>(rng.uniform_index(j + 1));
    const bool taken = std::find(scratch.begin(), scratch.end(), t) != scratch.end();
    scratch.push_back(taken ? j : t);
  }
  potential.batch_gradient_into(scratch, x, out);
  out *= static_cast<double>(n) / static_cast<double>(batch_size);
}

VectorXd stochastic_gradient(const Potential& potential, const VectorXd& x, std::size_t batch_size, RngStream& rng) {
  std::vector<std::size_t> scratch;
  VectorXd out(static_cast<Eigen::Index>(potential.dimension()));
  stochastic_gradient_into(potential, x, batch_size, rng, scratch, out);
  return out;
}

}  // namespace rsl
