#include "rsl/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rsl/error.hpp"

namespace rsl {

namespace {

void check_curvature(double m, double big_m) {
  if (!(m > 0.0) || !(big_m >= m) || !std::isfinite(big_m)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "need M >= m > 0, got m = " + std::to_string(m) + ", M = " + std::to_string(big_m));
  }
}

double matrix_norm(const MatrixXd& a, MatrixNorm norm) {
  return norm == MatrixNorm::Spectral ? spectral_norm(a) : a.norm();
}

double contraction(double alpha, double eta, std::size_t iterations) {
  const double factor = std::max(0.0, 1.0 - 0.5 * alpha * eta);
  return std::pow(factor, 0.5 * static_cast<double>(iterations));
}

std::size_t iteration_count(double alpha, double eta, double log_argument) {
  if (log_argument <= 1.0) return 1;
  const double k = std::ceil(4.0 / (alpha * eta) * std::log(log_argument));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

double clamp_to(const StepsizeCaps& caps, double eta) { return std::min(eta, caps.min()); }

std::map<std::string, double> with_alpha(std::map<std::string, double> named, double alpha) {
  named.emplace("alpha", alpha);
  return named;
}

void check_friction_floor(const RegimeSpec& frictions, double m, double big_m) {
  const double floor = std::max(std::sqrt(2.0), std::sqrt(m + big_m));
  if (frictions.min_value() < floor) {
    throw Error(ErrorCode::FrictionTooSmall, "min friction " + std::to_string(frictions.min_value()) +
                                                 " below max(sqrt 2, sqrt(m + M)) = " + std::to_string(floor));
  }
}

}  // namespace

double StepsizeCaps::min() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& [name, cap] : caps) out = std::min(out, cap);
  return out;
}

double rsld_bound(const RegimeSpec& spec, double m, double t, double w0) {
  const double survival =
      survival_functional(spec.generator(), spec.values(), spec.stationary_law(), 2.0 * m, t);
  return std::sqrt(std::max(0.0, survival)) * w0;
}

RslmcConstants rslmc_constants(const RegimeSpec& spec, double m, double big_m, std::size_t d, MatrixNorm norm) {
  check_curvature(m, big_m);
  const MatrixXd& q = spec.generator().matrix();
  const MatrixXd lambda = spec.diag();
  const ComplexSpectrum spectrum = eigenvalues(q - m * lambda);
  const double beta_max = spec.max_value();
  const double beta_min = spec.min_value();

  RslmcConstants k;
  k.alpha = -spectrum.max_real();
  const double root = 1.65 * big_m * std::sqrt(static_cast<double>(d)) * std::pow(beta_max, 1.5) / (m * beta_min);
  k.c = 2.0 * root * root;
  const double lam = spectrum.max_abs();
  k.c_m = 0.5 * lam * lam + matrix_norm(q * q, norm) + 2.0 * m * matrix_norm(q * lambda, norm) +
          0.5 * m * m * matrix_norm(lambda * lambda, norm);
  k.caps.caps = {
      {"smoothness", 2.0 / (beta_max * (m + big_m))},
      {"convexity", 1.0 / (m * beta_max)},
      {"spectrum", -1.0 / (2.0 * spectrum.min_real())},
      {"absorption", k.alpha / (2.0 * k.c_m)},
  };
  return k;
}

BoundReport rslmc_bound(const RslmcConstants& k, double eta, std::size_t iterations, double w0) {
  BoundReport r;
  r.bound_value = contraction(k.alpha, eta, iterations) * w0 + std::sqrt(2.0 * k.c * eta / k.alpha);
  r.constants = {{"alpha", k.alpha}, {"C", k.c}, {"C_M", k.c_m}};
  r.admissible = k.caps.admits(eta);
  r.admissibility_limits = k.caps.caps;
  return r;
}

Complexity rslmc_complexity(const RslmcConstants& k, double eps, double w0) {
  const double eta = clamp_to(k.caps, eps * eps * k.alpha / (8.0 * k.c));
  return {eta, iteration_count(k.alpha, eta, 2.0 * w0 / eps)};
}

double rskld_bound(const RegimeSpec& spec, double m, double big_m, double gamma, std::optional<double> lambda_minus,
                   double t, double w0) {
  check_curvature(m, big_m);
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidLambdaSplit, "friction must be positive");
  double prefactor = 0.0;
  double rate = 0.0;
  if (lambda_minus) {
    const double lm = *lambda_minus;
    if (!(lm > 0.0) || !(lm < 0.5 * gamma)) {
      throw Error(ErrorCode::InvalidLambdaSplit,
                  "need 0 < lambda_- < gamma/2, got " + std::to_string(lm) + " with gamma " + std::to_string(gamma));
    }
    const double lp = gamma - lm;
    prefactor = std::sqrt(2.0 * (lp * lp + lm * lm)) / (lp - lm);
    rate = -2.0 * std::max(lm * lm - m, big_m - lp * lp) / (lp - lm);
  } else {
    if (gamma * gamma < 2.0 * (big_m + m)) {
      throw Error(ErrorCode::InvalidLambdaSplit, "default split needs gamma^2 >= 2(M + m); pass lambda_- explicitly");
    }
    const double g2 = gamma * gamma;
    prefactor = std::sqrt((2.0 * g2 - 4.0 * m) / (g2 - 4.0 * m));
    rate = 2.0 * m / gamma;
  }
  const double survival = survival_functional(spec.generator(), spec.values(), spec.stationary_law(), rate, t);
  return prefactor * std::sqrt(std::max(0.0, survival)) * w0;
}

RsklmcConstants rsklmc_constants(const RegimeSpec& spec, double m, double big_m, double gamma, std::size_t d) {
  check_curvature(m, big_m);
  const double beta_max = spec.max_value();
  const double beta_min = spec.min_value();
  RsklmcConstants k;
  k.alpha = spectral_rate(spec.generator(), m / gamma, spec.values());
  k.c = 18.0 * big_m * big_m * std::pow(beta_max, 4) * static_cast<double>(d) / (m * m * beta_min * beta_min);
  k.caps.caps = {
      {"coupling", m / (4.0 * beta_max * gamma * big_m)},
      {"friction", m * gamma / ((m * m + 1.5 * big_m * gamma * gamma) * beta_max)},
      {"convexity", 2.0 * gamma / (m * beta_min)},
  };
  return k;
}

BoundReport rsklmc_bound(const RsklmcConstants& k, double gamma, double eta, std::size_t iterations, double w0) {
  BoundReport r;
  r.bound_value = 2.0 * contraction(k.alpha, eta, iterations) * w0 + std::sqrt(2.0 * k.c / (gamma * gamma)) * eta;
  r.constants = {{"alpha", k.alpha}, {"C", k.c}};
  r.admissible = k.caps.admits(eta);
  r.admissibility_limits = k.caps.caps;
  return r;
}

Complexity rsklmc_complexity(const RsklmcConstants& k, double gamma, double eps, double w0) {
  const double eta = clamp_to(k.caps, eps * gamma / (2.0 * std::sqrt(2.0 * k.c)));
  return {eta, iteration_count(k.alpha, eta, 4.0 * w0 / eps)};
}

double frskld_bound(const RegimeSpec& frictions, double m, double big_m, double t, double w0) {
  check_curvature(m, big_m);
  check_friction_floor(frictions, m, big_m);
  const double survival = survival_functional(frictions.generator(), frictions.reciprocal_values(),
                                              frictions.stationary_law(), 2.0 * m, t);
  return std::sqrt(std::max(0.0, survival)) * w0;
}

FrsklmcConstants frsklmc_constants(const RegimeSpec& frictions, double m, double big_m, std::size_t d, double w0) {
  check_curvature(m, big_m);
  const double g_max = frictions.max_value();
  const double g_min = frictions.min_value();
  FrsklmcConstants k;
  k.alpha = spectral_rate(frictions.generator(), 2.0 * m, frictions.reciprocal_values());
  double second_moment = 0.0;
  const VectorXd& psi = frictions.stationary_law();
  for (std::size_t i = 0; i < frictions.size(); ++i) {
    second_moment += psi[Eigen::Index(i)] * frictions.value(i) * frictions.value(i);
  }
  k.c_b = std::sqrt(2.0) * g_max * big_m / (3.0 * m) *
          (2.0 * std::sqrt(static_cast<double>(d)) + std::sqrt(second_moment) * w0);
  k.caps.caps = {
      {"coupling", std::sqrt(m / (1.5 * big_m * g_max))},
      {"friction", m * g_min / (m * m + 1.5 * big_m * g_max * g_max)},
      {"smoothness", m / (4.0 * g_max * big_m)},
  };
  return k;
}

BoundReport frsklmc_bound(const RegimeSpec& frictions, double m, double big_m, std::size_t d, double eta,
                          std::size_t iterations, double w0) {
  check_friction_floor(frictions, m, big_m);
  const FrsklmcConstants k = frsklmc_constants(frictions, m, big_m, d, w0);
  BoundReport r;
  r.bound_value = std::sqrt(2.0) * contraction(k.alpha, eta, iterations) * w0 + k.c_b * eta * eta;
  r.constants = {{"alpha", k.alpha}, {"C_B", k.c_b}};
  r.admissible = k.caps.admits(eta);
  r.admissibility_limits = k.caps.caps;
  return r;
}

Complexity frsklmc_complexity(const RegimeSpec& frictions, double m, double big_m, std::size_t d, double eps,
                              double w0) {
  check_friction_floor(frictions, m, big_m);
  const FrsklmcConstants k = frsklmc_constants(frictions, m, big_m, d, w0);
  const double eta = clamp_to(k.caps, std::sqrt(eps / (2.0 * k.c_b)));
  return {eta, iteration_count(k.alpha, eta, 2.0 * std::sqrt(2.0) * w0 / eps)};
}

std::vector<ComplexityRow> complexity_table(const ComplexityInputs& in, const std::vector<double>& eps_grid) {
  const ProblemConstants& p = in.problem;
  std::vector<ComplexityRow> rows;
  if (in.stepsize_regime) {
    const RslmcConstants k = rslmc_constants(*in.stepsize_regime, p.m, p.big_m, p.d);
    for (double eps : eps_grid) {
      const Complexity c = rslmc_complexity(k, eps, p.w0);
      rows.push_back({"RS-LMC", eps, c.eta, c.iterations, k.alpha, with_alpha({{"C", k.c}, {"C_M", k.c_m}}, k.alpha)});
    }
    const RsklmcConstants kk = rsklmc_constants(*in.stepsize_regime, p.m, p.big_m, in.gamma, p.d);
    for (double eps : eps_grid) {
      const Complexity c = rsklmc_complexity(kk, in.gamma, eps, p.w0);
      rows.push_back({"RS-KLMC", eps, c.eta, c.iterations, kk.alpha, with_alpha({{"C", kk.c}}, kk.alpha)});
    }
  }
  if (in.friction_regime) {
    const FrsklmcConstants k = frsklmc_constants(*in.friction_regime, p.m, p.big_m, p.d, p.w0);
    for (double eps : eps_grid) {
      const Complexity c = frsklmc_complexity(*in.friction_regime, p.m, p.big_m, p.d, eps, p.w0);
      rows.push_back({"FRS-KLMC", eps, c.eta, c.iterations, k.alpha, with_alpha({{"C_B", k.c_b}}, k.alpha)});
    }
  }
  return rows;
}

}  // namespace rsl
