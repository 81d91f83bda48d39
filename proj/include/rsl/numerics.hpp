#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rsl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace detail {
using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key) noexcept;
}  // namespace detail

/**
 * Counter-based random stream.
 *
 * A stream is addressed by (seed, stream id, lane). The Philox key is the
 * seed, the upper 64 counter bits hold the stream id and the lower 64 bits
 * hold the block index whose top byte is the lane. Distinct (stream, lane)
 * pairs therefore occupy disjoint counter ranges and never overlap.
 *
 * Gaussians use the Marsaglia polar method; the second variate of each
 * accepted pair is cached, so the cache is part of the stream state.
 */
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint8_t lane = 0) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  std::uint8_t lane() const noexcept { return lane_; }

  /// Fresh stream on the same (seed, stream id) but another lane.
  RngStream with_lane(std::uint8_t lane) const noexcept { return RngStream(seed_, stream_, lane); }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double normal() noexcept;
  /// Exponential with the given rate (> 0).
  double exponential(double rate) noexcept;
  void fill_normal(std::span<double> out) noexcept;
  /// Uniform integer on [0, n) by rejection, n >= 1.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint8_t lane_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// n iid standard normal draws, n >= 1.
VectorXd standard_normal(RngStream& rng, std::size_t n);

/// Inverse-CDF draw; the lowest index wins ties between equal cumulative thresholds.
std::size_t sample_categorical(RngStream& rng, std::span<const double> weights);

namespace detail {
/// sample_categorical without validation, for rows checked once up front.
std::size_t sample_categorical_unchecked(RngStream& rng, std::span<const double> weights) noexcept;
}  // namespace detail

struct ComplexSpectrum {
  std::vector<std::complex<double>> eigenvalues;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  double max_real() const;
  double min_real() const;
  double max_abs() const;
};

/// Eigenvalues of a dense real matrix, ordered by decreasing real part then imaginary part.
ComplexSpectrum eigenvalues(const MatrixXd& a);

/// Eigenvalues of a symmetric matrix in ascending order.
VectorXd symmetric_eigenvalues(const MatrixXd& a);

/// Largest singular value.
double spectral_norm(const MatrixXd& a);

/// exp(a * t) by Pade-13 scaling and squaring.
MatrixXd matrix_exp(const MatrixXd& a, double t);

/**
 * Adaptive Gauss-Kronrod (7/15) integral of f over [a, b] to absolute
 * tolerance tol. The tolerance is floored at the round-off level of the
 * accumulated estimate (50 ulp of the integral of |f|).
 */
double quadrature(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace rsl
