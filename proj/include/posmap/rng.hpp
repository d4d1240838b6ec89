// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>

namespace posmap {

/// Counter-based, splittable generator.
///
/// Output i of a stream is a pure function of (key, i), so results never depend
/// on thread scheduling or on the platform's <random> distributions. Streams
/// derived with split() are statistically independent for distinct indices.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  /// Child stream; does not advance this generator.
  Rng split(std::uint64_t stream) const noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;
  /// Complex normal with E|z|^2 = 1.
  std::complex<double> complex_normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  Rng(std::uint64_t key, std::uint64_t counter) noexcept : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace posmap
