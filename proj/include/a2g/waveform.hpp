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
#include <span>

#include "a2g/common.hpp"
#include "a2g/numerology.hpp"
#include "a2g/sequences.hpp"

namespace a2g {

struct TxOptions {
  bool fill_data = true;   // pseudo-random QPSK on non-reference elements
  double data_power = 1.0; // linear per-element power of the data fill
  std::uint64_t seed = 1;  // data-fill stream seed
};

/// Frequency-domain content (occupied grid) of one symbol, reference
/// signals plus deterministic data fill.
CVec build_symbol_grid(const CellConfig& cell, const SymbolMap& map,
                       const Numerology& num, std::uint64_t frame_index,
                       int slot, int symbol, const TxOptions& opts = {});

/// CP-prefixed time-domain symbol from an occupied grid (unitary IFFT).
CVec ofdm_modulate_symbol(const CVec& grid, const Numerology& num, int symbol);

/// Occupied grid from the useful (post-CP) part of a received symbol
/// (unitary FFT). `samples` must hold at least fft_size values.
CVec ofdm_demodulate_symbol(std::span<const cplx> samples,
                            const Numerology& num);

/// One full downlink frame, exactly frame_duration * sample_rate samples.
CVec modulate_frame(const CellConfig& cell, std::uint64_t frame_index,
                    const Numerology& num, const TxOptions& opts = {});

/// Demodulates (slot, symbol) of the frame starting at `frame_start` in the
/// trace. Throws StageError if the trace is too short.
CVec demodulate_at(std::span<const cplx> trace, std::size_t frame_start,
                   int slot, int symbol, const Numerology& num);

} // namespace a2g
