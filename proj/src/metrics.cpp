#include "rsl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "rsl/error.hpp"

namespace rsl {

namespace {

void check_psd(const MatrixXd& s, const char* what) {
  if (s.rows() != s.cols()) throw Error(ErrorCode::DimensionMismatch, std::string(what) + " is not square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::NotPSD, std::string(what) + " is not symmetric");
  }
  if (symmetric_eigenvalues(s).minCoeff() < -1e-12 * scale) {
    throw Error(ErrorCode::NotPSD, std::string(what) + " has a negative eigenvalue");
  }
}

MatrixXd psd_sqrt(const MatrixXd& s) {
  const MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
  const VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double gaussian_w2(const VectorXd& mu1, const MatrixXd& sigma1, const VectorXd& mu2, const MatrixXd& sigma2) {
  const Eigen::Index d = mu1.size();
  if (mu2.size() != d || sigma1.rows() != d || sigma2.rows() != d) {
    throw Error(ErrorCode::DimensionMismatch, "Gaussian parameters disagree in dimension");
  }
  check_psd(sigma1, "sigma1");
  check_psd(sigma2, "sigma2");
  const MatrixXd root2 = psd_sqrt(sigma2);
  const MatrixXd cross = psd_sqrt(root2 * sigma1 * root2);
  const double trace_term = (sigma1 + sigma2 - 2.0 * cross).trace();
  return std::sqrt((mu1 - mu2).squaredNorm() + std::max(0.0, trace_term));
}

double empirical_w2_1d(std::span<const double> samples, const std::function<double(double)>& target_quantile) {
  const std::size_t n = samples.size();
  if (n < 2) throw Error(ErrorCode::TooFewSamples, "need at least 2 samples, got " + std::to_string(n));
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = sorted[i] - target_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    total += diff * diff;
  }
  return std::sqrt(total / static_cast<double>(n));
}

std::function<double(double)> normal_quantile(double mean, double sd) {
  const boost::math::normal_distribution<double> dist(mean, sd);
  return [dist](double p) { return boost::math::quantile(dist, p); };
}

double mse(const VectorXd& x, const LinRegProblem& problem) {
  if (static_cast<std::size_t>(x.size()) != problem.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient dimension " + std::to_string(x.size()) +
                                                  " does not match " + std::to_string(problem.dimension()));
  }
  return (problem.responses - problem.features * x).squaredNorm() / static_cast<double>(problem.size());
}

MetricSeries mse_series(const Trace& trace, const LinRegProblem& problem) {
  if (trace.dimension != problem.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "trace dimension does not match the problem");
  }
  if (trace.positions.size() != trace.size() * trace.dimension) {
    throw Error(ErrorCode::DimensionMismatch, "trace carries no positions");
  }
  MetricSeries out{"mse", {}, trace.thinning};
  out.values.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) out.values.push_back(mse(trace.position(i), problem));
  return out;
}

double accuracy(const VectorXd& c, const LogRegProblem& problem) {
  if (static_cast<std::size_t>(c.size()) != problem.dimension() || problem.labels.size() != problem.features.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "classifier dimension does not match the problem");
  }
  const VectorXd scores = problem.features * c;
  std::size_t correct = 0;
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    const double predicted = scores[j] >= 0.0 ? 1.0 : 0.0;
    if (predicted == problem.labels[j]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

Moments moment_diagnostics(const MatrixXd& samples) {
  if (samples.rows() < 2) throw Error(ErrorCode::TooFewSamples, "moment diagnostics need at least 2 rows");
  Moments m;
  m.mean = samples.colwise().mean().transpose();
  const MatrixXd centred = samples.rowwise() - m.mean.transpose();
  m.covariance = centred.transpose() * centred / static_cast<double>(samples.rows() - 1);
  return m;
}

RunningMoments::RunningMoments(std::size_t d)
    : mean_(VectorXd::Zero(static_cast<Eigen::Index>(d))),
      m2_(MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))) {}

void RunningMoments::push(const VectorXd& x) {
  if (x.size() != mean_.size()) throw Error(ErrorCode::DimensionMismatch, "sample dimension mismatch");
  ++count_;
  const VectorXd delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_.noalias() += delta * (x - mean_).transpose();
}

void RunningMoments::merge(const RunningMoments& other) {
  if (other.mean_.size() != mean_.size()) throw Error(ErrorCode::DimensionMismatch, "accumulator dimension mismatch");
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const VectorXd delta = other.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_ += other.m2_ + delta * delta.transpose() * (na * nb / n);
  count_ += other.count_;
}

MatrixXd RunningMoments::covariance() const {
  if (count_ < 2) throw Error(ErrorCode::TooFewSamples, "covariance needs at least 2 samples");
  return m2_ / static_cast<double>(count_ - 1);
}

}  // namespace rsl
