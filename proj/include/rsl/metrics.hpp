#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rsl/models.hpp"
#include "rsl/numerics.hpp"
#include "rsl/samplers.hpp"

namespace rsl {

/// Values at iterations stride, 2 stride, 3 stride, ...
struct MetricSeries {
  std::string name;
  std::vector<double> values;
  std::size_t iteration_stride = 1;

  std::size_t iteration(std::size_t i) const noexcept { return (i + 1) * iteration_stride; }
};

/// W2 between N(mu1, sigma1) and N(mu2, sigma2).
double gaussian_w2(const VectorXd& mu1, const MatrixXd& sigma1, const VectorXd& mu2, const MatrixXd& sigma2);

/// Quantile-coupling estimate of W2 between the empirical law of `samples` and a 1D target.
double empirical_w2_1d(std::span<const double> samples, const std::function<double(double)>& target_quantile);

/// Quantile function of N(mean, sd^2).
std::function<double(double)> normal_quantile(double mean = 0.0, double sd = 1.0);

/// (1/n) sum_j (y_j - x^T a_j)^2.
double mse(const VectorXd& x, const LinRegProblem& problem);
MetricSeries mse_series(const Trace& trace, const LinRegProblem& problem);

/// Fraction of rows with 1{c^T X_j >= 0} == y_j.
double accuracy(const VectorXd& c, const LogRegProblem& problem);

struct Moments {
  VectorXd mean;
  MatrixXd covariance;  ///< unbiased
};

/// Sample moments of the rows of an n x d matrix.
Moments moment_diagnostics(const MatrixXd& samples);

/// Streaming Welford accumulator for vector samples.
class RunningMoments {
 public:
  explicit RunningMoments(std::size_t d = 1);

  void push(const VectorXd& x);
  /// Combine with another accumulator (Chan et al. pairwise update).
  void merge(const RunningMoments& other);

  std::size_t count() const noexcept { return count_; }
  const VectorXd& mean() const noexcept { return mean_; }
  /// Unbiased covariance; needs count() >= 2.
  MatrixXd covariance() const;

 private:
  std::size_t count_ = 0;
  VectorXd mean_;
  MatrixXd m2_;
};

}  // namespace rsl
