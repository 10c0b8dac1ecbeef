// SPDX-License-Identifier: Apache-2.0

#include "cbmor/rng.hpp"

#include <cmath>

#include "cbmor/errors.hpp"

namespace cbmor {

double RandomStream::uniform() {
  // (0, 1]: shift by one ulp-ish step so log() below stays finite.
  const std::uint64_t r = engine_();
  return (static_cast<double>(r >> 11) + 1.0) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

double RandomStream::truncated_normal(double mean, double stddev, double lo,
                                      double hi) {
  if (!(lo < hi)) throw ConfigError("truncated normal: empty interval");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double x = mean + stddev * normal();
    if (x > lo && x < hi) return x;
  }
  throw ConfigError("truncated normal: interval rejects every draw");
}

}  // namespace cbmor
