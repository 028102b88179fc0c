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
#include "a2g/numerology.hpp"

#include <numeric>

namespace a2g {

namespace {

Numerology make_profile(double fs, int fft, int occupied, CpMode cp) {
  Numerology n;
  n.sample_rate = fs;
  n.fft_size = fft;
  n.occupied_subcarriers = occupied;
  n.cp_mode = cp;
  // CP lengths scale with the FFT size (reference pattern is 160/144 and
  // 512 at FFT 2048).
  const int scale = 2048 / fft;
  if (cp == CpMode::normal) {
    n.symbols_per_slot = 7;
    n.cp_lengths.assign(7, 144 / scale);
    n.cp_lengths[0] = 160 / scale;
  } else {
    n.symbols_per_slot = 6;
    n.cp_lengths.assign(6, 512 / scale);
  }
  n.validate();
  return n;
}

} // namespace

Numerology Numerology::lte20(CpMode cp) {
  return make_profile(30.72e6, 2048, 1200, cp);
}

Numerology Numerology::lte1p4(CpMode cp) {
  return make_profile(1.92e6, 128, 72, cp);
}

Numerology Numerology::with_cp(CpMode cp) const {
  return make_profile(sample_rate, fft_size, occupied_subcarriers, cp);
}

int Numerology::samples_per_slot() const {
  int s = 0;
  for (int cp : cp_lengths) s += cp + fft_size;
  return s;
}

int Numerology::samples_per_frame() const {
  return samples_per_slot() * slots_per_frame;
}

int Numerology::symbol_start(int slot, int symbol) const {
  if (slot < 0 || slot >= slots_per_frame || symbol < 0 ||
      symbol >= symbols_per_slot)
    throw ConfigError("symbol_start: coordinate out of range");
  int off = slot * samples_per_slot();
  for (int l = 0; l < symbol; ++l) off += cp_lengths[l] + fft_size;
  return off;
}

void Numerology::validate() const {
  if (occupied_subcarriers > fft_size)
    throw ConfigError("numerology: occupied subcarriers exceed FFT size");
  const int expect_sym = (cp_mode == CpMode::normal) ? 7 : 6;
  if (symbols_per_slot != expect_sym)
    throw ConfigError("numerology: symbols per slot inconsistent with CP mode");
  if (static_cast<int>(cp_lengths.size()) != symbols_per_slot)
    throw ConfigError("numerology: cp_lengths size mismatch");
  // A slot must tile exactly: sum(cp + fft) == slot duration * rate.
  const double slot_dur = frame_duration / slots_per_frame;
  const double want = slot_dur * sample_rate;
  if (std::abs(want - samples_per_slot()) > 1e-6)
    throw ConfigError("numerology: slot does not tile the sample grid");
}

CellConfig CellConfig::from_pci(int pci, CpMode cp) {
  if (pci < 0 || pci > 503) throw ConfigError("pci out of range 0..503");
  CellConfig c;
  c.pci = pci;
  c.pss_root_index = pci % 3;
  c.sss_index = pci / 3;
  c.cp_mode = cp;
  return c;
}

void CellConfig::validate() const {
  if (pci < 0 || pci > 503) throw ConfigError("pci out of range 0..503");
  if (pss_root_index < 0 || pss_root_index > 2)
    throw ConfigError("pss root index out of range 0..2");
  if (sss_index < 0 || sss_index > 335)
    throw ConfigError("sss index out of range 0..335");
  if (compute_pci(pss_root_index, sss_index) != pci)
    throw ConfigError("cell config: pci does not match (root, sss) pair");
}

int compute_pci(int pss_root_index, int sss_index) {
  if (pss_root_index < 0 || pss_root_index > 2)
    throw ConfigError("compute_pci: root index out of range 0..2");
  if (sss_index < 0 || sss_index > 335)
    throw ConfigError("compute_pci: sss index out of range 0..335");
  return pss_root_index + 3 * (sss_index % 168);
}

SymbolMap SymbolMap::build(const CellConfig& cell, const Numerology& num) {
  SymbolMap map;
  const int last = num.symbols_per_slot - 1;
  // FDD layout: synchronization symbols sit at the end of slots 0 and 10,
  // one pair per half-frame.
  map.pss_positions = {{0, last}, {10, last}};
  map.sss_positions = {{0, last - 1}, {10, last - 1}};
  const int crs_second = num.symbols_per_slot - 3; // 4 (normal), 3 (extended)
  for (int s = 0; s < num.slots_per_frame; ++s) {
    map.crs_positions.push_back({s, 0});
    map.crs_positions.push_back({s, crs_second});
  }
  map.crs_subcarrier_stride = 6;
  map.crs_freq_shift = cell.pci % 6;
  return map;
}

bool SymbolMap::is_crs_position(int slot, int symbol) const {
  for (const auto& p : crs_positions)
    if (p.slot == slot && p.symbol == symbol) return true;
  return false;
}

} // namespace a2g
