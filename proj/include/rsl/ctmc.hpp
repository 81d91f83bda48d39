#pragma once

#include <cstddef>
#include <vector>

#include "rsl/numerics.hpp"

namespace rsl {

/// Transition-rate matrix of a finite, irreducible continuous-time Markov chain.
class GeneratorMatrix {
 public:
  /// Validates sign pattern, zero row sums and strong connectivity.
  static GeneratorMatrix validate(const MatrixXd& q);

  std::size_t size() const noexcept { return static_cast<std::size_t>(q_.rows()); }
  const MatrixXd& matrix() const noexcept { return q_; }
  double rate(std::size_t from, std::size_t to) const { return q_(Eigen::Index(from), Eigen::Index(to)); }
  /// q_i = -q_ii, the total exit rate of state i.
  double exit_rate(std::size_t state) const { return -q_(Eigen::Index(state), Eigen::Index(state)); }
  double max_exit_rate() const noexcept;

 private:
  explicit GeneratorMatrix(MatrixXd q) : q_(std::move(q)) {}
  MatrixXd q_;
};

inline GeneratorMatrix validate_generator(const MatrixXd& q) { return GeneratorMatrix::validate(q); }

/// Probability row psi with psi Q = 0 and sum(psi) = 1.
VectorXd stationary_distribution(const GeneratorMatrix& g);

/**
 * Regime values (step multipliers or friction levels) attached to a
 * generator, plus the law of the initial regime.
 */
class RegimeSpec {
 public:
  RegimeSpec(std::vector<double> values, GeneratorMatrix generator, VectorXd initial_law);

  /// Initial regime drawn from the stationary law of the generator.
  static RegimeSpec stationary(std::vector<double> values, GeneratorMatrix generator);
  /// Initial regime pinned to one state.
  static RegimeSpec fixed_start(std::vector<double> values, GeneratorMatrix generator, std::size_t state);
  /// One regime with the given value; the generator is the 1x1 zero matrix.
  static RegimeSpec constant(double value);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double value(std::size_t i) const { return values_.at(i); }
  const GeneratorMatrix& generator() const noexcept { return generator_; }
  const VectorXd& initial_law() const noexcept { return initial_law_; }
  const VectorXd& stationary_law() const noexcept { return stationary_; }
  double min_value() const noexcept { return min_; }
  double max_value() const noexcept { return max_; }
  /// Lambda = diag(values).
  MatrixXd diag() const;
  /// diag(1 / values).
  MatrixXd inverse_diag() const;
  std::vector<double> reciprocal_values() const;

 private:
  std::vector<double> values_;
  GeneratorMatrix generator_;
  VectorXd initial_law_;
  VectorXd stationary_;
  double min_ = 0.0;
  double max_ = 0.0;
};

/// One realization of the chain on [0, horizon].
struct ContinuousPath {
  std::vector<double> jump_times;  ///< starts at 0, strictly increasing
  std::vector<std::size_t> states;  ///< states[k] holds on [jump_times[k], jump_times[k+1])
  double horizon = 0.0;

  std::size_t jumps() const noexcept { return states.empty() ? 0 : states.size() - 1; }
  /// Fraction of [0, horizon] spent in each of n states.
  VectorXd occupation(std::size_t n) const;
  /// Integral over [0, horizon] of values[state(s)] ds.
  double integral(const std::vector<double>& values) const;
};

struct DiscreteRegimeChain {
  std::vector<std::size_t> indices;
};

/// P_ij = q_ij eta off the diagonal and 1 - q_i eta on it; requires q_i eta <= 1.
MatrixXd discrete_kernel(const GeneratorMatrix& g, double eta);
/// exp(Q eta), the exact transition matrix over one step.
MatrixXd exact_kernel(const GeneratorMatrix& g, double eta);

DiscreteRegimeChain simulate_discrete_chain(const MatrixXd& p, const VectorXd& initial_law, std::size_t steps,
                                            RngStream& rng);

ContinuousPath simulate_exact_path(const GeneratorMatrix& g, const VectorXd& initial_law, double horizon,
                                   RngStream& rng);

/// alpha = -max Re lambda(Q - c diag(values)).
double spectral_rate(const GeneratorMatrix& g, double c, const std::vector<double>& values);

/// psi^T exp((Q - c diag(values)) t) 1, the Feynman-Kac survival functional.
double survival_functional(const GeneratorMatrix& g, const std::vector<double>& values, const VectorXd& psi,
                           double c, double t);

/// Total-variation distance between two probability rows.
double total_variation(const VectorXd& p, const VectorXd& q);

}  // namespace rsl
