#include "rsl/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "rsl/error.hpp"

namespace rsl {

namespace {

std::vector<bool> reachable(const MatrixXd& q, bool reverse) {
  const auto n = static_cast<std::size_t>(q.rows());
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> frontier{0};
  seen[0] = true;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    for (std::size_t j = 0; j < n; ++j) {
      const double rate = reverse ? q(Eigen::Index(j), Eigen::Index(i)) : q(Eigen::Index(i), Eigen::Index(j));
      if (j != i && rate > 0.0 && !seen[j]) {
        seen[j] = true;
        frontier.push_back(j);
      }
    }
  }
  return seen;
}

void require_probability_row(const VectorXd& law, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(law.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has length " + std::to_string(law.size()) +
                                                  ", expected " + std::to_string(n));
  }
  for (Eigen::Index i = 0; i < law.size(); ++i) {
    if (!(law[i] >= 0.0)) throw Error(ErrorCode::NegativeWeight, std::string(what) + " has a negative entry");
  }
  if (std::abs(law.sum() - 1.0) > 1e-12) {
    throw Error(ErrorCode::UnnormalizedWeights, std::string(what) + " sums to " + std::to_string(law.sum()));
  }
}

}  // namespace

GeneratorMatrix GeneratorMatrix::validate(const MatrixXd& q) {
  if (q.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "generator must have at least one state");
  if (!q.allFinite()) throw Error(ErrorCode::NonFiniteEntry, "generator has a non-finite entry");
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    double scale = 1.0;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (j != i && q(i, j) < 0.0) {
        throw Error(ErrorCode::NegativeOffDiagonal,
                    "q(" + std::to_string(i) + "," + std::to_string(j) + ") = " + std::to_string(q(i, j)));
      }
      scale = std::max(scale, std::abs(q(i, j)));
    }
    const double row_sum = q.row(i).sum();
    if (std::abs(row_sum) > 1e-10 * scale) {
      throw Error(ErrorCode::RowSumNonzero, "row " + std::to_string(i) + " sums to " + std::to_string(row_sum));
    }
  }
  if (q.rows() != q.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "generator is " + std::to_string(q.rows()) + "x" + std::to_string(q.cols()) + ", not square");
  }
  const auto forward = reachable(q, false);
  const auto backward = reachable(q, true);
  for (std::size_t i = 0; i < forward.size(); ++i) {
    if (!forward[i] || !backward[i]) {
      throw Error(ErrorCode::NotIrreducible,
                  "state " + std::to_string(i) + " does not communicate with state 0");
    }
  }
  return GeneratorMatrix(q);
}

double GeneratorMatrix::max_exit_rate() const noexcept {
  return (-q_.diagonal()).maxCoeff();
}

VectorXd stationary_distribution(const GeneratorMatrix& g) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  MatrixXd system = g.matrix().transpose();
  system.row(n - 1).setOnes();
  VectorXd rhs = VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::FullPivLU<MatrixXd> lu(system);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularSolve, "stationary system is singular");
  VectorXd psi = lu.solve(rhs);
  // one step of iterative refinement
  psi += lu.solve(rhs - system * psi);
  psi = psi.cwiseMax(0.0);
  psi /= psi.sum();
  if (!psi.allFinite()) throw Error(ErrorCode::SingularSolve, "stationary solve produced non-finite values");
  return psi;
}

RegimeSpec::RegimeSpec(std::vector<double> values, GeneratorMatrix generator, VectorXd initial_law)
    : values_(std::move(values)), generator_(std::move(generator)), initial_law_(std::move(initial_law)) {
  if (values_.size() != generator_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "regime has " + std::to_string(values_.size()) +
                                                  " values but the generator has " +
                                                  std::to_string(generator_.size()) + " states");
  }
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteEntry, "regime values must be finite and strictly positive");
    }
  }
  require_probability_row(initial_law_, values_.size(), "initial law");
  stationary_ = stationary_distribution(generator_);
  min_ = *std::min_element(values_.begin(), values_.end());
  max_ = *std::max_element(values_.begin(), values_.end());
}

RegimeSpec RegimeSpec::stationary(std::vector<double> values, GeneratorMatrix generator) {
  VectorXd psi = stationary_distribution(generator);
  return RegimeSpec(std::move(values), std::move(generator), std::move(psi));
}

RegimeSpec RegimeSpec::fixed_start(std::vector<double> values, GeneratorMatrix generator, std::size_t state) {
  VectorXd law = VectorXd::Zero(static_cast<Eigen::Index>(generator.size()));
  if (state >= generator.size()) throw Error(ErrorCode::DimensionMismatch, "initial state out of range");
  law[Eigen::Index(state)] = 1.0;
  return RegimeSpec(std::move(values), std::move(generator), std::move(law));
}

RegimeSpec RegimeSpec::constant(double value) {
  return stationary({value}, GeneratorMatrix::validate(MatrixXd::Zero(1, 1)));
}

MatrixXd RegimeSpec::diag() const {
  return Eigen::Map<const VectorXd>(values_.data(), Eigen::Index(values_.size())).asDiagonal();
}

MatrixXd RegimeSpec::inverse_diag() const {
  return Eigen::Map<const VectorXd>(values_.data(), Eigen::Index(values_.size())).cwiseInverse().asDiagonal();
}

std::vector<double> RegimeSpec::reciprocal_values() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](double v) { return 1.0 / v; });
  return out;
}

VectorXd ContinuousPath::occupation(std::size_t n) const {
  VectorXd out = VectorXd::Zero(Eigen::Index(n));
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double end = k + 1 < jump_times.size() ? jump_times[k + 1] : horizon;
    out[Eigen::Index(states[k])] += end - jump_times[k];
  }
  return out / horizon;
}

double ContinuousPath::integral(const std::vector<double>& values) const {
  double total = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double end = k + 1 < jump_times.size() ? jump_times[k + 1] : horizon;
    total += values.at(states[k]) * (end - jump_times[k]);
  }
  return total;
}

MatrixXd discrete_kernel(const GeneratorMatrix& g, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorCode::StepsizeTooLarge, "stepsize must be positive");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.exit_rate(i) * eta > 1.0) {
      throw Error(ErrorCode::StepsizeTooLarge, "q_" + std::to_string(i) + " * eta = " +
                                                   std::to_string(g.exit_rate(i) * eta) + " > 1");
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  MatrixXd p = g.matrix() * eta;
  for (Eigen::Index i = 0; i < n; ++i) p(i, i) = 1.0 - g.exit_rate(std::size_t(i)) * eta;
  return p;
}

MatrixXd exact_kernel(const GeneratorMatrix& g, double eta) {
  return matrix_exp(g.matrix(), eta);
}

DiscreteRegimeChain simulate_discrete_chain(const MatrixXd& p, const VectorXd& initial_law, std::size_t steps,
                                            RngStream& rng) {
  if (p.rows() != p.cols()) throw Error(ErrorCode::DimensionMismatch, "transition matrix must be square");
  const auto n = static_cast<std::size_t>(p.rows());
  require_probability_row(initial_law, n, "initial law");
  // Row-major copy so each row is a contiguous span.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = p;
  for (std::size_t i = 0; i < n; ++i) {
    require_probability_row(rows.row(Eigen::Index(i)).transpose(), n, "transition row");
  }
  DiscreteRegimeChain chain;
  if (steps == 0) return chain;
  chain.indices.reserve(steps);
  std::size_t state = sample_categorical(rng, {initial_law.data(), n});
  chain.indices.push_back(state);
  for (std::size_t k = 1; k < steps; ++k) {
    state = detail::sample_categorical_unchecked(rng, {rows.data() + state * n, n});
    chain.indices.push_back(state);
  }
  return chain;
}

ContinuousPath simulate_exact_path(const GeneratorMatrix& g, const VectorXd& initial_law, double horizon,
                                   RngStream& rng) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::DimensionMismatch, "path horizon must be positive");
  const std::size_t n = g.size();
  require_probability_row(initial_law, n, "initial law");
  // Embedded jump chain: row i is q_ij / q_i off the diagonal.
  std::vector<double> jump(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double qi = g.exit_rate(i);
    if (qi <= 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) jump[i * n + j] = g.rate(i, j) / qi;
    }
  }
  ContinuousPath path;
  path.horizon = horizon;
  std::size_t state = sample_categorical(rng, {initial_law.data(), n});
  double t = 0.0;
  path.jump_times.push_back(0.0);
  path.states.push_back(state);
  for (;;) {
    const double qi = g.exit_rate(state);
    if (qi <= 0.0) break;
    t += rng.exponential(qi);
    if (t >= horizon) break;
    state = detail::sample_categorical_unchecked(rng, {jump.data() + state * n, n});
    path.jump_times.push_back(t);
    path.states.push_back(state);
  }
  return path;
}

double spectral_rate(const GeneratorMatrix& g, double c, const std::vector<double>& values) {
  if (values.size() != g.size()) throw Error(ErrorCode::DimensionMismatch, "values do not match generator size");
  for (double v : values) {
    if (!(v > 0.0)) throw Error(ErrorCode::NonFiniteEntry, "values must be strictly positive");
  }
  const MatrixXd lambda = Eigen::Map<const VectorXd>(values.data(), Eigen::Index(values.size())).asDiagonal();
  return -eigenvalues(g.matrix() - c * lambda).max_real();
}

double survival_functional(const GeneratorMatrix& g, const std::vector<double>& values, const VectorXd& psi,
                           double c, double t) {
  if (values.size() != g.size() || static_cast<std::size_t>(psi.size()) != g.size()) {
    throw Error(ErrorCode::DimensionMismatch, "values/psi do not match generator size");
  }
  const MatrixXd lambda = Eigen::Map<const VectorXd>(values.data(), Eigen::Index(values.size())).asDiagonal();
  const MatrixXd semigroup = matrix_exp(g.matrix() - c * lambda, t);
  return psi.dot(semigroup.rowwise().sum());
}

double total_variation(const VectorXd& p, const VectorXd& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "distributions differ in length");
  return 0.5 * (p - q).cwiseAbs().sum();
}

}  // namespace rsl
