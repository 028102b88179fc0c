/*
 Copyright 2026 the a2gsounder authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <cstdint>
#include <random>

#include "a2g/common.hpp"

namespace a2g {

// Seeded generator with hand-rolled transforms. std::mt19937_64 output is
// pinned by the standard; the distribution transforms below are ours, so a
// given seed produces the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return (eng_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    double u = 0.0;
    while (u == 0.0) u = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    return r * std::cos(kTwoPi * uniform());
  }

  double normal(double mean, double std_dev) { return mean + std_dev * normal(); }

  /// Circularly symmetric complex normal with E|z|^2 = variance.
  cplx cnormal(double variance = 1.0) {
    double s = std::sqrt(variance * 0.5);
    return {s * normal(), s * normal()};
  }

  /// QPSK symbol from {(+-1 +- j)/sqrt(2)}.
  cplx qpsk() {
    static const double r = 1.0 / std::sqrt(2.0);
    std::uint64_t b = eng_();
    return {(b & 1) ? r : -r, (b & 2) ? r : -r};
  }

  std::uint64_t raw() { return eng_(); }

  /// Derives an independent child seed from (seed, tag); used to split
  /// deterministic streams per stage, frame or block.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
    // splitmix64 finalizer
    std::uint64_t z = seed ^ (tag + 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 eng_;
};

} // namespace a2g
