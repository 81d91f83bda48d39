#include "rsl/samplers.hpp"

#include <cmath>
#include <string>

#include "rsl/error.hpp"
#include "rsl/theory.hpp"

namespace rsl {

namespace {

constexpr double kSeriesThreshold = 0.1;
constexpr double kDivergenceNorm = 1e12;

// sum_{k>=2} (-1)^k x^{k-2} / k!, so that psi2 = h^2 * this.
double psi2_series(double x) {
  double term = 0.5;
  double sum = term;
  for (int k = 3; k < 40; ++k) {
    term *= -x / k;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// g(x) = x - 2(1 - e^{-x}) + (1 - e^{-2x})/2 = sum_{k>=3} (-1)^{k+1} (2^{k-1} - 2) x^k / k!.
double g_closed(double x) { return x + 2.0 * std::expm1(-x) - 0.5 * std::expm1(-2.0 * x); }

double g_series(double x) {
  double power = x * x * x / 6.0;  // x^k / k!
  double two = 4.0;                // 2^{k-1}
  double sum = (two - 2.0) * power;
  for (int k = 4; k < 60; ++k) {
    power *= x / k;
    two *= 2.0;
    const double term = ((k % 2 == 0) ? -1.0 : 1.0) * (two - 2.0) * power;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

void check_coefficient_args(double h, double gamma) {
  if (!(h >= 0.0) || !std::isfinite(h) || !(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::NonFiniteEntry,
                "need h >= 0 and gamma > 0, got h = " + std::to_string(h) + ", gamma = " + std::to_string(gamma));
  }
}

void check_state(const VectorXd& x, const VectorXd* v, std::size_t iteration) {
  const bool finite = x.allFinite() && (v == nullptr || v->allFinite());
  if (!finite || x.norm() > kDivergenceNorm) {
    throw Error(ErrorCode::NonFiniteState, "chain diverged at iteration " + std::to_string(iteration));
  }
}

StepsizeCaps stepsize_caps(const SamplerConfig& config, Algorithm algorithm, const Potential& potential) {
  const CurvatureBounds b = potential.constants();
  const std::size_t d = potential.dimension();
  switch (algorithm) {
    case Algorithm::LMC:
      return rslmc_constants(RegimeSpec::constant(1.0), b.m, b.big_m, d).caps;
    case Algorithm::RSLMC:
      return rslmc_constants(*config.regime, b.m, b.big_m, d).caps;
    case Algorithm::KLMC:
      return rsklmc_constants(RegimeSpec::constant(1.0), b.m, b.big_m, config.friction, d).caps;
    case Algorithm::RSKLMC:
      return rsklmc_constants(*config.regime, b.m, b.big_m, config.friction, d).caps;
    case Algorithm::FRSKLMC:
      return frsklmc_constants(*config.frictional_regime, b.m, b.big_m, d, 0.0).caps;
  }
  return {};
}

void validate(const SamplerConfig& config, Algorithm algorithm, const Potential& potential) {
  if (!(config.stepsize > 0.0) || !std::isfinite(config.stepsize)) {
    throw Error(ErrorCode::ConfigError, "stepsize must be positive and finite");
  }
  if (is_kinetic(algorithm) && algorithm != Algorithm::FRSKLMC && !(config.friction > 0.0)) {
    throw Error(ErrorCode::ConfigError, "friction must be positive");
  }
  const bool wants_regime = algorithm == Algorithm::RSLMC || algorithm == Algorithm::RSKLMC;
  if (wants_regime != config.regime.has_value()) {
    throw Error(ErrorCode::ConfigError, algorithm_name(algorithm) + (wants_regime ? " needs" : " does not take") +
                                            " a stepsize regime");
  }
  if ((algorithm == Algorithm::FRSKLMC) != config.frictional_regime.has_value()) {
    throw Error(ErrorCode::ConfigError, algorithm_name(algorithm) +
                                            (algorithm == Algorithm::FRSKLMC ? " needs" : " does not take") +
                                            " a friction regime");
  }
  if (config.iterations > 0 && config.effective_burn_in() >= config.iterations) {
    throw Error(ErrorCode::ConfigError, "burn_in must be smaller than iterations");
  }
  if (config.thinning == 0) throw Error(ErrorCode::ConfigError, "thinning must be at least 1");
  const auto d = static_cast<Eigen::Index>(potential.dimension());
  if (config.x0 && config.x0->size() != d) throw Error(ErrorCode::DimensionMismatch, "x0 has the wrong dimension");
  if (config.v0 && config.v0->size() != d) throw Error(ErrorCode::DimensionMismatch, "v0 has the wrong dimension");
  if (config.batch_size > 0 && config.batch_size > potential.component_count()) {
    throw Error(ErrorCode::BatchLargerThanDataset, "batch size " + std::to_string(config.batch_size) + " exceeds " +
                                                       std::to_string(potential.component_count()) + " components");
  }
}

}  // namespace

IntegratorCoefficients klmc_coefficients(double h, double gamma) {
  check_coefficient_args(h, gamma);
  const double x = gamma * h;
  IntegratorCoefficients c;
  c.horizon = h;
  c.friction = gamma;
  c.psi0 = std::exp(-x);
  c.psi1 = -std::expm1(-x) / gamma;
  c.psi2 = x < kSeriesThreshold ? h * h * psi2_series(x) : (x + std::expm1(-x)) / (gamma * gamma);
  return c;
}

NoiseCovariance2x2 klmc_noise_covariance(double h, double gamma) {
  check_coefficient_args(h, gamma);
  const double x = gamma * h;
  const double one_minus = -std::expm1(-x);
  NoiseCovariance2x2 n;
  n.var_v = -std::expm1(-2.0 * x);
  n.cov_vx = one_minus * one_minus / gamma;
  n.var_x = 2.0 / (gamma * gamma) * (x < kSeriesThreshold ? g_series(x) : g_closed(x));
  return n;
}

KlmcKernel KlmcKernel::make(double h, double gamma) {
  KlmcKernel k;
  k.coeff = klmc_coefficients(h, gamma);
  const NoiseCovariance2x2 n = klmc_noise_covariance(h, gamma);
  if (n.var_v > 0.0) {
    k.l11 = std::sqrt(n.var_v);
    k.l21 = n.cov_vx / k.l11;
    k.l22 = std::sqrt(std::max(0.0, n.var_x - k.l21 * k.l21));
  }
  return k;
}

void lmc_update(VectorXd& x, const VectorXd& grad, double h, const VectorXd& xi) {
  x += -h * grad + std::sqrt(2.0 * h) * xi;
}

void klmc_update(KineticState& s, const VectorXd& grad, const KlmcKernel& k, const VectorXd& z_v,
                 const VectorXd& z_x) {
  const IntegratorCoefficients& c = k.coeff;
  s.x += c.psi1 * s.v - c.psi2 * grad + k.l21 * z_v + k.l22 * z_x;
  s.v = c.psi0 * s.v - c.psi1 * grad + k.l11 * z_v;
}

OverdampedState lmc_step(const OverdampedState& s, const VectorXd& grad, double eta, RngStream& rng) {
  return rslmc_step(s, 1.0, grad, eta, rng);
}

OverdampedState rslmc_step(const OverdampedState& s, double beta, const VectorXd& grad, double eta, RngStream& rng) {
  if (!(eta * beta > 0.0)) throw Error(ErrorCode::ConfigError, "effective stepsize must be positive");
  OverdampedState out = s;
  lmc_update(out.x, grad, beta * eta, standard_normal(rng, static_cast<std::size_t>(s.x.size())));
  check_state(out.x, nullptr, 1);
  return out;
}

KineticState klmc_step(const KineticState& s, const VectorXd& grad, double h, double gamma, RngStream& rng) {
  if (!(h > 0.0)) throw Error(ErrorCode::ConfigError, "horizon must be positive");
  const auto d = static_cast<std::size_t>(s.x.size());
  const VectorXd z_v = standard_normal(rng, d);
  const VectorXd z_x = standard_normal(rng, d);
  KineticState out = s;
  klmc_update(out, grad, KlmcKernel::make(h, gamma), z_v, z_x);
  check_state(out.x, &out.v, 1);
  return out;
}

bool is_kinetic(Algorithm a) noexcept { return a != Algorithm::LMC && a != Algorithm::RSLMC; }

bool is_regime_switching(Algorithm a) noexcept { return a != Algorithm::LMC && a != Algorithm::KLMC; }

std::string algorithm_name(Algorithm a, bool stochastic_gradient) {
  switch (a) {
    case Algorithm::LMC: return stochastic_gradient ? "SGLD" : "LMC";
    case Algorithm::RSLMC: return stochastic_gradient ? "RS-SGLD" : "RS-LMC";
    case Algorithm::KLMC: return stochastic_gradient ? "SGHMC" : "KLMC";
    case Algorithm::RSKLMC: return stochastic_gradient ? "RS-SGHMC" : "RS-KLMC";
    case Algorithm::FRSKLMC: return stochastic_gradient ? "FRS-SGHMC" : "FRS-KLMC";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::LMC, Algorithm::RSLMC, Algorithm::KLMC, Algorithm::RSKLMC, Algorithm::FRSKLMC}) {
    if (name == algorithm_name(a, false) || name == algorithm_name(a, true)) return a;
  }
  return std::nullopt;
}

Eigen::Map<const VectorXd> Trace::position(std::size_t row) const {
  return {positions.data() + row * dimension, static_cast<Eigen::Index>(dimension)};
}

Eigen::Map<const VectorXd> Trace::velocity(std::size_t row) const {
  return {velocities.data() + row * dimension, static_cast<Eigen::Index>(dimension)};
}

Trace run_chain(const SamplerConfig& config, Algorithm algorithm, const Potential& potential, const RngStream& rng,
                const Recorder& recorder) {
  validate(config, algorithm, potential);
  const std::size_t d = potential.dimension();
  const auto di = static_cast<Eigen::Index>(d);
  const bool kinetic = is_kinetic(algorithm);

  Trace trace;
  trace.dimension = d;
  trace.thinning = config.thinning;
  trace.burn_in = config.effective_burn_in();
  try {
    const StepsizeCaps caps = stepsize_caps(config, algorithm, potential);
    trace.stepsize_caps = caps.caps;
    trace.admissible = caps.admits(config.stepsize);
    if (!trace.admissible) {
      trace.warnings.push_back("stepsize " + std::to_string(config.stepsize) + " exceeds the sufficient cap " +
                               std::to_string(caps.min()));
    }
  } catch (const Error& e) {
    trace.admissible = false;
    trace.warnings.push_back(std::string("stepsize caps unavailable: ") + e.what());
  }
  for (const MetricHook& hook : recorder.metrics) trace.metrics[hook.name];

  RngStream noise = rng.with_lane(0);
  RngStream regime_rng = rng.with_lane(1);
  RngStream batch_rng = rng.with_lane(2);

  KineticState s;
  s.x = config.x0.value_or(VectorXd::Zero(di));
  if (kinetic) s.v = config.v0 ? *config.v0 : standard_normal(noise, d);

  // Regime chain and per-regime kernel tables.
  const RegimeSpec* spec = config.regime ? &*config.regime : (config.frictional_regime ? &*config.frictional_regime : nullptr);
  const std::size_t n_regimes = spec ? spec->size() : 1;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> transition;
  std::size_t regime = 0;
  if (spec) {
    transition = config.regime_kernel == RegimeKernel::FirstOrder ? discrete_kernel(spec->generator(), config.stepsize)
                                                                  : exact_kernel(spec->generator(), config.stepsize);
    regime = sample_categorical(regime_rng, {spec->initial_law().data(), n_regimes});
    trace.regime_indices.reserve(config.iterations);
  }
  std::vector<double> horizons(n_regimes, config.stepsize);
  std::vector<KlmcKernel> kernels;
  for (std::size_t i = 0; i < n_regimes; ++i) {
    if (config.regime) horizons[i] = config.regime->value(i) * config.stepsize;
    if (kinetic) {
      const double gamma = config.frictional_regime ? config.frictional_regime->value(i) : config.friction;
      kernels.push_back(KlmcKernel::make(horizons[i], gamma));
    }
  }

  const std::size_t records = config.iterations / config.thinning;
  trace.iterations.reserve(records);
  if (config.record_positions) trace.positions.reserve(records * d);
  if (config.record_velocity && kinetic) trace.velocities.reserve(records * d);

  VectorXd grad(di);
  VectorXd z1(di);
  VectorXd z2(di);
  std::vector<std::size_t> batch_scratch;
  const bool minibatch = config.batch_size > 0;

  for (std::size_t k = 0; k < config.iterations; ++k) {
    const std::size_t current = regime;
    if (spec) {
      trace.regime_indices.push_back(current);
      regime = detail::sample_categorical_unchecked(regime_rng, {transition.data() + current * n_regimes, n_regimes});
    }
    if (minibatch) {
      stochastic_gradient_into(potential, s.x, config.batch_size, batch_rng, batch_scratch, grad);
    } else {
      potential.gradient_into(s.x, grad);
    }
    noise.fill_normal({z1.data(), d});
    if (kinetic) {
      noise.fill_normal({z2.data(), d});
      klmc_update(s, grad, kernels[current], z1, z2);
    } else {
      lmc_update(s.x, grad, horizons[current], z1);
    }
    check_state(s.x, kinetic ? &s.v : nullptr, k + 1);

    const std::size_t step = k + 1;
    if (step % config.thinning == 0) {
      trace.iterations.push_back(step);
      if (config.record_positions) trace.positions.insert(trace.positions.end(), s.x.data(), s.x.data() + d);
      if (config.record_velocity && kinetic) {
        trace.velocities.insert(trace.velocities.end(), s.v.data(), s.v.data() + d);
      }
      for (const MetricHook& hook : recorder.metrics) trace.metrics[hook.name].push_back(hook.fn(s.x));
    }
    if (recorder.on_step) recorder.on_step(StepView{step, s.x, kinetic ? &s.v : nullptr, current});
  }
  trace.final_position = s.x;
  if (kinetic) trace.final_velocity = s.v;
  return trace;
}

}  // namespace rsl
