// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_RNG_HPP
#define CBMOR_RNG_HPP

#include <cstdint>
#include <random>

namespace cbmor {

/// Deterministic random stream: mt19937_64 with hand-rolled Box-Muller so
/// that sequences are reproducible independently of the standard library's
/// distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in (0, 1].
  double uniform();

  /// Standard normal deviate.
  double normal();

  /// Normal with the given mean/stddev, redrawn until it falls inside the
  /// open interval (lo, hi).
  double truncated_normal(double mean, double stddev, double lo, double hi);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cbmor

#endif
