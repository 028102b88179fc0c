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
#include "a2g/sequences.hpp"

#include <array>

namespace a2g {

CVec pss_sequence(int root_index) {
  static const std::array<int, 3> roots = {25, 29, 34};
  if (root_index < 0 || root_index > 2)
    throw ConfigError("pss_sequence: root index out of range 0..2");
  const int u = roots[static_cast<std::size_t>(root_index)];
  CVec d(62);
  for (int n = 0; n <= 30; ++n)
    d[n] = std::polar(1.0, -kPi * u * n * (n + 1) / 63.0);
  for (int n = 31; n <= 61; ++n)
    d[n] = std::polar(1.0, -kPi * u * (n + 1) * (n + 2) / 63.0);
  return d;
}

std::vector<int> msequence31_s(int shift) {
  std::array<int, 31> x{};
  x[4] = 1; // x(0..4) = 0,0,0,0,1
  for (int i = 0; i + 5 < 31; ++i) x[i + 5] = (x[i + 2] + x[i]) % 2;
  std::vector<int> s(31);
  for (int n = 0; n < 31; ++n) s[n] = 1 - 2 * x[(n + shift) % 31];
  return s;
}

namespace {

// Companion registers for the secondary-sequence scrambling.
std::vector<int> msequence31_c(int shift) {
  std::array<int, 31> x{};
  x[4] = 1;
  for (int i = 0; i + 5 < 31; ++i)
    x[i + 5] = (x[i + 3] + x[i]) % 2;
  std::vector<int> c(31);
  for (int n = 0; n < 31; ++n) c[n] = 1 - 2 * x[(n + shift) % 31];
  return c;
}

std::vector<int> msequence31_z(int shift) {
  std::array<int, 31> x{};
  x[4] = 1;
  for (int i = 0; i + 5 < 31; ++i)
    x[i + 5] = (x[i + 4] + x[i + 2] + x[i + 1] + x[i]) % 2;
  std::vector<int> z(31);
  for (int n = 0; n < 31; ++n) z[n] = 1 - 2 * x[(n + shift) % 31];
  return z;
}

} // namespace

CVec sss_sequence(int sss_index, HalfFrame half, int pss_root_index) {
  if (sss_index < 0 || sss_index > 335)
    throw ConfigError("sss_sequence: index out of range 0..335");
  if (pss_root_index < 0 || pss_root_index > 2)
    throw ConfigError("sss_sequence: root index out of range 0..2");
  const int group = sss_index % 168;

  const int qp = group / 30;
  const int q = (group + qp * (qp + 1) / 2) / 30;
  const int mp = group + q * (q + 1) / 2;
  const int m0 = mp % 31;
  const int m1 = (m0 + mp / 31 + 1) % 31;

  const auto s0 = msequence31_s(m0);
  const auto s1 = msequence31_s(m1);
  const auto c0 = msequence31_c(pss_root_index);
  const auto c1 = msequence31_c(pss_root_index + 3);
  const auto z0 = msequence31_z(m0 % 8);
  const auto z1 = msequence31_z(m1 % 8);

  CVec d(62);
  const bool second = (half == HalfFrame::second);
  for (int n = 0; n < 31; ++n) {
    const int even = second ? s1[n] * c0[n] : s0[n] * c0[n];
    const int odd =
        second ? s0[n] * c1[n] * z1[n] : s1[n] * c1[n] * z0[n];
    d[2 * n] = static_cast<double>(even);
    d[2 * n + 1] = static_cast<double>(odd);
  }
  return d;
}

std::vector<std::uint8_t> gold_sequence(std::uint32_t cinit, int count) {
  constexpr int kWarmup = 1600;
  std::uint32_t x1 = 1;
  std::uint32_t x2 = cinit & 0x7fffffffu;
  auto step = [](std::uint32_t& x, bool second) {
    std::uint32_t fb;
    if (second)
      fb = ((x >> 3) ^ (x >> 2) ^ (x >> 1) ^ x) & 1u;
    else
      fb = ((x >> 3) ^ x) & 1u;
    x = (x >> 1) | (fb << 30);
  };
  for (int i = 0; i < kWarmup; ++i) {
    step(x1, false);
    step(x2, true);
  }
  std::vector<std::uint8_t> c(count);
  for (int i = 0; i < count; ++i) {
    c[i] = static_cast<std::uint8_t>((x1 ^ x2) & 1u);
    step(x1, false);
    step(x2, true);
  }
  return c;
}

CVec crs_sequence(int pci, int slot, int symbol, CpMode cp, int n_rb) {
  if (pci < 0 || pci > 503) throw ConfigError("crs_sequence: pci out of range");
  const int second = (cp == CpMode::normal) ? 4 : 3;
  if (symbol != 0 && symbol != second)
    throw ConfigError("crs_sequence: not a reference symbol position");
  const int ncp = (cp == CpMode::normal) ? 1 : 0;
  const std::uint32_t cinit =
      static_cast<std::uint32_t>(1024u * (7u * (slot + 1u) + symbol + 1u) *
                                     (2u * pci + 1u) +
                                 2u * pci + ncp);
  // The sequence is defined against a 110-RB master grid; narrower grids
  // take the centered portion.
  constexpr int kMaxRb = 110;
  const auto bits = gold_sequence(cinit, 4 * kMaxRb);
  const double r = 1.0 / std::sqrt(2.0);
  CVec pilots(2 * n_rb);
  for (int m = 0; m < 2 * n_rb; ++m) {
    const int mp = m + kMaxRb - n_rb;
    pilots[m] = {r * (1.0 - 2.0 * bits[2 * mp]),
                 r * (1.0 - 2.0 * bits[2 * mp + 1])};
  }
  return pilots;
}

std::vector<int> crs_subcarrier_indices(int pci, int symbol,
                                        const Numerology& num) {
  if (symbol != 0 && symbol != num.symbols_per_slot - 3)
    throw ConfigError("crs_subcarrier_indices: not a reference symbol position");
  // Port-0 pattern: frequency offset 0 on the first reference symbol of the
  // slot, 3 on the second.
  const int v = (symbol == 0) ? 0 : 3;
  const int shift = (v + pci) % 6;
  std::vector<int> idx;
  idx.reserve(num.occupied_subcarriers / 6);
  for (int k = shift; k < num.occupied_subcarriers; k += 6) idx.push_back(k);
  return idx;
}

void place_central62(CVec& grid, const CVec& seq62, const Numerology& num) {
  if (static_cast<int>(grid.size()) != num.occupied_subcarriers)
    throw ConfigError("place_central62: grid size mismatch");
  if (seq62.size() != 62) throw ConfigError("place_central62: need 62 values");
  const int dc = num.occupied_subcarriers / 2;
  for (int n = 0; n < 31; ++n) grid[dc - 31 + n] = seq62[n];
  for (int n = 31; n < 62; ++n) grid[dc + n - 30] = seq62[n];
}

CVec take_central62(const CVec& grid, const Numerology& num) {
  if (static_cast<int>(grid.size()) != num.occupied_subcarriers)
    throw ConfigError("take_central62: grid size mismatch");
  const int dc = num.occupied_subcarriers / 2;
  CVec seq(62);
  for (int n = 0; n < 31; ++n) seq[n] = grid[dc - 31 + n];
  for (int n = 31; n < 62; ++n) seq[n] = grid[dc + n - 30];
  return seq;
}

} // namespace a2g
