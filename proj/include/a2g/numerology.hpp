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
#include <vector>

#include "a2g/common.hpp"

namespace a2g {

enum class CpMode { normal, extended };
enum class HalfFrame { first, second };

/// OFDM downlink numerology. The default profile is the 18 MHz-occupied
/// configuration (2048 FFT at 30.72 Msps, 1200 subcarriers at 15 kHz).
struct Numerology {
  double sample_rate = 30.72e6;
  int fft_size = 2048;
  double subcarrier_spacing = 15e3;
  int occupied_subcarriers = 1200;
  CpMode cp_mode = CpMode::normal;
  std::vector<int> cp_lengths; // per symbol position within a slot
  double frame_duration = 10e-3;
  int slots_per_frame = 20;
  int symbols_per_slot = 7;

  static Numerology lte20(CpMode cp = CpMode::normal);
  /// Small 1.4 MHz-class profile (128 FFT at 1.92 Msps, 72 subcarriers);
  /// used to keep Monte-Carlo tests cheap.
  static Numerology lte1p4(CpMode cp = CpMode::normal);

  /// Same profile with the other CP mode (detector hypothesis helper).
  Numerology with_cp(CpMode cp) const;

  int samples_per_slot() const;
  int samples_per_frame() const;
  int samples_per_half_frame() const { return samples_per_frame() / 2; }
  int symbols_per_frame() const { return slots_per_frame * symbols_per_slot; }
  double occupied_bandwidth() const {
    return occupied_subcarriers * subcarrier_spacing;
  }
  /// Sample offset of (slot, symbol)'s CP start within a frame.
  int symbol_start(int slot, int symbol) const;
  /// Sample offset of the useful (post-CP) part of (slot, symbol).
  int useful_start(int slot, int symbol) const {
    return symbol_start(slot, symbol) + cp_lengths.at(symbol);
  }
  /// Subcarrier frequency offset from DC, in units of subcarrier_spacing.
  /// The grid is the contiguous band [-occ/2, occ/2), DC included.
  int subcarrier_offset(int k_occ) const {
    return k_occ - occupied_subcarriers / 2;
  }

  /// Checks the structural invariants; throws ConfigError on violation.
  void validate() const;
};

struct CellConfig {
  int pci = 0;             // 0..503
  int pss_root_index = 0;  // 0..2
  int sss_index = 0;       // 0..335; value mod 168 is the group number
  CpMode cp_mode = CpMode::normal;

  static CellConfig from_pci(int pci, CpMode cp);
  void validate() const;
};

/// N_id = i + 3 * (k mod 168). Throws ConfigError on out-of-range input.
int compute_pci(int pss_root_index, int sss_index);

struct SlotSymbol {
  int slot;
  int symbol;
  bool operator==(const SlotSymbol&) const = default;
};

/// Reference-signal coordinates for one cell on one numerology.
struct SymbolMap {
  std::vector<SlotSymbol> pss_positions; // one per half-frame
  std::vector<SlotSymbol> sss_positions;
  std::vector<SlotSymbol> crs_positions;
  int crs_subcarrier_stride = 6;
  int crs_freq_shift = 0; // pci mod 6

  static SymbolMap build(const CellConfig& cell, const Numerology& num);
  bool is_crs_position(int slot, int symbol) const;
};

} // namespace a2g
