#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rsl/ctmc.hpp"

namespace rsl {

/// Norm used for the matrix terms of C_M.
enum class MatrixNorm { Spectral, Frobenius };

/// Named stepsize caps; a stepsize is admissible when it satisfies all of them.
struct StepsizeCaps {
  std::map<std::string, double> caps;

  double min() const;
  bool admits(double eta) const { return eta <= min(); }
};

struct BoundReport {
  double bound_value = 0.0;
  std::map<std::string, double> constants;
  bool admissible = false;
  std::map<std::string, double> admissibility_limits;
};

struct Complexity {
  double eta = 0.0;
  std::size_t iterations = 0;
};

// ---- overdamped -----------------------------------------------------------

/// sqrt(psi^T exp((Q - 2m Lambda) t) 1) w0.
double rsld_bound(const RegimeSpec& spec, double m, double t, double w0);

struct RslmcConstants {
  double alpha = 0.0;
  double c = 0.0;
  double c_m = 0.0;
  StepsizeCaps caps;
};

RslmcConstants rslmc_constants(const RegimeSpec& spec, double m, double big_m, std::size_t d,
                               MatrixNorm norm = MatrixNorm::Spectral);
/// (1 - alpha eta / 2)^{K/2} w0 + sqrt(2 C eta / alpha).
BoundReport rslmc_bound(const RslmcConstants& k, double eta, std::size_t iterations, double w0);
/// eta = eps^2 alpha / (8C) clamped to the caps, K = ceil(4/(alpha eta) log(2 w0 / eps)).
Complexity rslmc_complexity(const RslmcConstants& k, double eps, double w0);

// ---- kinetic, regime-switching stepsize ------------------------------------

/**
 * Contraction bound for the continuous kinetic dynamics with split
 * lambda_+ + lambda_- = gamma. Without an explicit lambda_minus the split
 * lambda_- = (gamma - sqrt(gamma^2 - 4m)) / 2 is used, which requires
 * gamma^2 >= 2(M + m); the decay matrix is then Q - (2m/gamma) Lambda.
 */
double rskld_bound(const RegimeSpec& spec, double m, double big_m, double gamma, std::optional<double> lambda_minus,
                   double t, double w0);

struct RsklmcConstants {
  double alpha = 0.0;
  double c = 0.0;
  StepsizeCaps caps;
};

RsklmcConstants rsklmc_constants(const RegimeSpec& spec, double m, double big_m, double gamma, std::size_t d);
/// 2 (1 - alpha eta / 2)^{K/2} w0 + sqrt(2 C / gamma^2) eta.
BoundReport rsklmc_bound(const RsklmcConstants& k, double gamma, double eta, std::size_t iterations, double w0);
/// eta = eps gamma / (2 sqrt(2C)) clamped, K = ceil(4/(alpha eta) log(4 w0 / eps)).
Complexity rsklmc_complexity(const RsklmcConstants& k, double gamma, double eps, double w0);

// ---- kinetic, regime-switching friction ------------------------------------

/// sqrt(psi^T exp((Q - 2m diag(1/gamma_i)) t) 1) w0; needs min gamma_i >= max(sqrt 2, sqrt(m + M)).
double frskld_bound(const RegimeSpec& frictions, double m, double big_m, double t, double w0);

struct FrsklmcConstants {
  double alpha = 0.0;
  double c_b = 0.0;
  StepsizeCaps caps;
};

/// Caps and alpha need no friction floor; C_B depends on w0.
FrsklmcConstants frsklmc_constants(const RegimeSpec& frictions, double m, double big_m, std::size_t d, double w0);
/// sqrt(2) (1 - alpha eta / 2)^{K/2} w0 + C_B eta^2; enforces the friction floor.
BoundReport frsklmc_bound(const RegimeSpec& frictions, double m, double big_m, std::size_t d, double eta,
                          std::size_t iterations, double w0);
/// eta = sqrt(eps / (2 C_B)) clamped, K = ceil(4/(alpha eta) log(2 sqrt(2) w0 / eps)).
Complexity frsklmc_complexity(const RegimeSpec& frictions, double m, double big_m, std::size_t d, double eps,
                              double w0);

// ---- complexity ladder -------------------------------------------------------

struct ProblemConstants {
  double m = 0.0;
  double big_m = 0.0;
  std::size_t d = 1;
  double w0 = 1.0;
};

struct ComplexityRow {
  std::string algorithm;
  double eps = 0.0;
  double eta = 0.0;
  std::size_t iterations = 0;
  double alpha = 0.0;
  std::map<std::string, double> constants;
};

struct ComplexityInputs {
  ProblemConstants problem;
  std::optional<RegimeSpec> stepsize_regime;  ///< drives RS-LMC and RS-KLMC
  double gamma = 1.0;                         ///< RS-KLMC friction
  std::optional<RegimeSpec> friction_regime;  ///< drives FRS-KLMC
};

/// One row per (algorithm, eps), algorithms RS-LMC, RS-KLMC, FRS-KLMC in that order when their inputs are present.
std::vector<ComplexityRow> complexity_table(const ComplexityInputs& inputs, const std::vector<double>& eps_grid);

}  // namespace rsl
