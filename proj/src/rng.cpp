#include <cmath>
#include <limits>

#include "rsl/error.hpp"
#include "rsl/numerics.hpp"

namespace rsl {

namespace detail {

PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::size_t sample_categorical_unchecked(RngStream& rng, std::span<const double> weights) noexcept {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // u landed in the rounding gap above the final cumulative sum
  return last_positive;
}

}  // namespace detail

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream, std::uint8_t lane) noexcept
    : seed_(seed), stream_(stream), lane_(lane) {}

void RngStream::refill() noexcept {
  const std::uint64_t counter = (static_cast<std::uint64_t>(lane_) << 56) | block_;
  ++block_;
  const detail::PhiloxBlock ctr{static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                                static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const detail::PhiloxKey key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  const auto out = detail::philox4x32_10(ctr, key);
  buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  buffered_ = 2;
}

std::uint64_t RngStream::next_u64() noexcept {
  if (buffered_ == 0) refill();
  return buffer_[2 - buffered_--];
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() noexcept {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * factor;
  has_cached_normal_ = true;
  return u * factor;
}

double RngStream::exponential(double rate) noexcept {
  return -std::log1p(-uniform()) / rate;
}

void RngStream::fill_normal(std::span<double> out) noexcept {
  for (double& z : out) z = normal();
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) noexcept {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

VectorXd standard_normal(RngStream& rng, std::size_t n) {
  VectorXd out(static_cast<Eigen::Index>(n));
  rng.fill_normal(std::span<double>(out.data(), n));
  return out;
}

std::size_t sample_categorical(RngStream& rng, std::span<const double> weights) {
  if (weights.empty()) throw Error(ErrorCode::UnnormalizedWeights, "empty weight vector");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) {
      throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(i) + " is negative or NaN");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::UnnormalizedWeights, "weights sum to " + std::to_string(total));
  }
  return detail::sample_categorical_unchecked(rng, weights);
}

}  // namespace rsl
