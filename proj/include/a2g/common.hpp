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

#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace a2g {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSpeedOfLight = 299792458.0; // m/s

inline double db10(double linear) { return 10.0 * std::log10(linear); }
inline double undb10(double db) { return std::pow(10.0, db / 10.0); }

inline double power_sum(const CVec& v) {
  double p = 0.0;
  for (const auto& x : v) p += std::norm(x);
  return p;
}

/// Thrown on bad user input (CLI flags, config files, out-of-range arguments).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a processing stage cannot proceed (short trace, lost signal, ...).
class StageError : public std::runtime_error {
 public:
  explicit StageError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace a2g
