#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>

#include "rsl/numerics.hpp"

namespace rsl {

/// Strong-convexity and smoothness constants of a potential.
struct CurvatureBounds {
  double m = 0.0;
  double big_m = 0.0;
};

/**
 * Target potential f with pi proportional to exp(-f).
 *
 * Sum potentials (component_count() > 0) decompose f into per-datum terms
 * whose gradients add up to the full gradient; the prior is spread evenly
 * across components.
 */
class Potential {
 public:
  virtual ~Potential() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(const VectorXd& x) const = 0;
  virtual void gradient_into(const VectorXd& x, VectorXd& out) const = 0;
  virtual std::size_t component_count() const { return 0; }
  virtual void component_gradient_into(std::size_t j, const VectorXd& x, VectorXd& out) const;
  /// Sum of component gradients over the given indices, unscaled.
  virtual void batch_gradient_into(std::span<const std::size_t> indices, const VectorXd& x, VectorXd& out) const;
  virtual CurvatureBounds constants() const = 0;

  VectorXd gradient(const VectorXd& x) const;
  VectorXd component_gradient(std::size_t j, const VectorXd& x) const;
};

struct LinRegProblem {
  MatrixXd features;   ///< n x d, row j is a_j
  VectorXd responses;  ///< y_j
  double prior_variance = 1.0;
  std::optional<VectorXd> true_coefficients;

  std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(features.cols()); }
};

enum class LogisticLoss {
  LabelSigned,  ///< log(1 + exp(-s_j c^T X_j)) with s_j = 2 y_j - 1
  LabelFree,    ///< log(1 + exp(-c^T X_j)) exactly as printed, ignores labels
};

struct LogRegProblem {
  MatrixXd features;  ///< n x d
  VectorXd labels;    ///< entries in {0, 1}
  double prior_variance = 1.0;
  std::optional<VectorXd> generating_coefficients;

  std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(features.cols()); }
};

/// f(x) = x^T A x / 2 - b^T x; Gibbs law N(A^-1 b, A^-1).
std::shared_ptr<const Potential> quadratic_potential(const MatrixXd& a, const VectorXd& b);

/// Negative log posterior of Bayesian linear regression with N(0, lambda I) prior.
std::shared_ptr<const Potential> linreg_potential(const LinRegProblem& problem);

/// Negative log posterior of Bayesian logistic regression with N(0, lambda I) prior.
std::shared_ptr<const Potential> logreg_potential(const LogRegProblem& problem,
                                                  LogisticLoss loss = LogisticLoss::LabelSigned);

/// Unbiased minibatch gradient (n/b) sum_{j in B} grad f_j(x), B uniform without replacement.
VectorXd stochastic_gradient(const Potential& potential, const VectorXd& x, std::size_t batch_size, RngStream& rng);

/// Same as stochastic_gradient but reuses caller storage.
void stochastic_gradient_into(const Potential& potential, const VectorXd& x, std::size_t batch_size, RngStream& rng,
                              std::vector<std::size_t>& scratch, VectorXd& out);

/// Numerically stable log(1 + exp(z)).
double softplus(double z) noexcept;
/// Numerically stable 1 / (1 + exp(-z)).
double sigmoid(double z) noexcept;

}  // namespace rsl
