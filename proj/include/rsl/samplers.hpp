#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsl/ctmc.hpp"
#include "rsl/models.hpp"
#include "rsl/numerics.hpp"

namespace rsl {

struct OverdampedState {
  VectorXd x;
};

struct KineticState {
  VectorXd x;
  VectorXd v;
};

/// psi0 = e^{-gh}, psi1 = (1 - e^{-gh}) / g, psi2 = (h - psi1) / g.
struct IntegratorCoefficients {
  double psi0 = 1.0;
  double psi1 = 0.0;
  double psi2 = 0.0;
  double horizon = 0.0;
  double friction = 1.0;
};

/// Per-coordinate covariance of (n_v, n_x), the 2 gamma prefactor included.
struct NoiseCovariance2x2 {
  double var_v = 0.0;
  double cov_vx = 0.0;
  double var_x = 0.0;
};

IntegratorCoefficients klmc_coefficients(double h, double gamma);
NoiseCovariance2x2 klmc_noise_covariance(double h, double gamma);

/// Coefficients plus the lower Cholesky factor of the noise covariance.
struct KlmcKernel {
  IntegratorCoefficients coeff;
  double l11 = 0.0;
  double l21 = 0.0;
  double l22 = 0.0;

  static KlmcKernel make(double h, double gamma);
};

// Deterministic cores: the caller supplies the standard normal draws.
void lmc_update(VectorXd& x, const VectorXd& grad, double h, const VectorXd& xi);
void klmc_update(KineticState& s, const VectorXd& grad, const KlmcKernel& kernel, const VectorXd& z_v,
                 const VectorXd& z_x);

OverdampedState lmc_step(const OverdampedState& s, const VectorXd& grad, double eta, RngStream& rng);
/// LMC step with effective stepsize beta * eta.
OverdampedState rslmc_step(const OverdampedState& s, double beta, const VectorXd& grad, double eta, RngStream& rng);
/// Draws z_v (d values) then z_x (d values) from rng.
KineticState klmc_step(const KineticState& s, const VectorXd& grad, double h, double gamma, RngStream& rng);

enum class Algorithm { LMC, RSLMC, KLMC, RSKLMC, FRSKLMC };

bool is_kinetic(Algorithm a) noexcept;
bool is_regime_switching(Algorithm a) noexcept;
/// Display name; stochastic-gradient runs use the SG naming (SGLD, RS-SGHMC, ...).
std::string algorithm_name(Algorithm a, bool stochastic_gradient = false);
/// Accepts both full-gradient and SG names, case-sensitive.
std::optional<Algorithm> parse_algorithm(std::string_view name);

enum class RegimeKernel {
  FirstOrder,  ///< P(eta) = I + eta Q
  Exact,       ///< exp(eta Q)
};

struct SamplerConfig {
  double stepsize = 0.0;
  double friction = 1.0;
  std::size_t iterations = 0;
  std::optional<std::size_t> burn_in;  ///< defaults to iterations / 10
  std::size_t batch_size = 0;          ///< 0 selects the full gradient
  std::optional<RegimeSpec> regime;
  std::optional<RegimeSpec> frictional_regime;
  RegimeKernel regime_kernel = RegimeKernel::FirstOrder;
  std::size_t thinning = 1;
  bool record_positions = true;
  bool record_velocity = false;
  std::optional<VectorXd> x0;  ///< defaults to the origin
  std::optional<VectorXd> v0;  ///< defaults to a N(0, I) draw

  std::size_t effective_burn_in() const noexcept { return burn_in.value_or(iterations / 10); }
};

/// Read-only view handed to per-step observers.
struct StepView {
  std::size_t iteration;  ///< 1-based count of completed steps
  const VectorXd& x;
  const VectorXd* v;   ///< null for overdamped chains
  std::size_t regime;  ///< regime index used by this step
};

struct MetricHook {
  std::string name;
  std::function<double(const VectorXd&)> fn;
};

struct Recorder {
  std::vector<MetricHook> metrics;
  /// Called after every step, unthinned; suited to streaming statistics.
  std::function<void(const StepView&)> on_step;
};

struct Trace {
  std::size_t dimension = 0;
  std::size_t thinning = 1;
  std::size_t burn_in = 0;
  std::vector<std::size_t> iterations;  ///< recorded step counts
  std::vector<double> positions;        ///< row-major, one row per recorded iteration
  std::vector<double> velocities;
  std::vector<std::size_t> regime_indices;  ///< one per step, unthinned
  std::map<std::string, std::vector<double>> metrics;
  bool admissible = true;
  std::map<std::string, double> stepsize_caps;
  std::vector<std::string> warnings;
  VectorXd final_position;
  VectorXd final_velocity;

  std::size_t size() const noexcept { return iterations.size(); }
  Eigen::Map<const VectorXd> position(std::size_t row) const;
  Eigen::Map<const VectorXd> velocity(std::size_t row) const;
};

/**
 * Runs K iterations. Each iteration draws the next regime index first and
 * then moves the state with the regime in force before that draw.
 *
 * RNG lanes of `rng`: 0 carries the state noise (and v0), 1 the regime
 * chain, 2 the minibatch indices. Sharing lane 0 is what makes a one-regime
 * switching sampler trace-identical to its classical counterpart.
 */
Trace run_chain(const SamplerConfig& config, Algorithm algorithm, const Potential& potential, const RngStream& rng,
                const Recorder& recorder = {});

}  // namespace rsl
