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
#include "a2g/waveform.hpp"

#include <algorithm>

#include "a2g/fft.hpp"
#include "a2g/rng.hpp"

namespace a2g {

CVec build_symbol_grid(const CellConfig& cell, const SymbolMap& map,
                       const Numerology& num, std::uint64_t frame_index,
                       int slot, int symbol, const TxOptions& opts) {
  CVec grid(num.occupied_subcarriers, cplx{0.0, 0.0});
  std::vector<bool> reserved(num.occupied_subcarriers, false);

  const int dc = num.occupied_subcarriers / 2;
  auto reserve_central = [&] {
    for (int k = dc - 31; k <= dc + 31; ++k) reserved[k] = true;
  };

  for (const auto& p : map.pss_positions) {
    if (p.slot == slot && p.symbol == symbol) {
      place_central62(grid, pss_sequence(cell.pss_root_index), num);
      reserve_central();
    }
  }
  for (std::size_t i = 0; i < map.sss_positions.size(); ++i) {
    const auto& p = map.sss_positions[i];
    if (p.slot == slot && p.symbol == symbol) {
      const HalfFrame half = (i == 0) ? HalfFrame::first : HalfFrame::second;
      place_central62(grid,
                      sss_sequence(cell.sss_index, half, cell.pss_root_index),
                      num);
      reserve_central();
    }
  }
  if (map.is_crs_position(slot, symbol)) {
    const auto idx = crs_subcarrier_indices(cell.pci, symbol, num);
    const auto pilots =
        crs_sequence(cell.pci, slot, symbol, cell.cp_mode, num.occupied_subcarriers / 12);
    for (std::size_t m = 0; m < idx.size(); ++m) {
      grid[idx[m]] = pilots[m];
      reserved[idx[m]] = true;
    }
  }
  if (opts.fill_data) {
    // Stream is a pure function of (seed, frame, slot, symbol) so frames
    // regenerate identically in the detector-side tests.
    const std::uint64_t tag =
        (frame_index << 16) ^ (static_cast<std::uint64_t>(slot) << 8) ^
        static_cast<std::uint64_t>(symbol);
    Rng rng(Rng::mix(opts.seed, tag));
    const double amp = std::sqrt(opts.data_power);
    for (int k = 0; k < num.occupied_subcarriers; ++k) {
      const cplx v = rng.qpsk(); // keep streams aligned across layouts
      if (!reserved[k]) grid[k] = amp * v;
    }
  }
  return grid;
}

CVec ofdm_modulate_symbol(const CVec& grid, const Numerology& num,
                          int symbol) {
  if (static_cast<int>(grid.size()) != num.occupied_subcarriers)
    throw ConfigError("ofdm_modulate_symbol: grid size mismatch");
  CVec bins(num.fft_size, cplx{0.0, 0.0});
  for (int k = 0; k < num.occupied_subcarriers; ++k) {
    const int off = num.subcarrier_offset(k);
    const int bin = (off + num.fft_size) % num.fft_size;
    bins[bin] = grid[k];
  }
  CVec useful = ifft_unitary(bins);
  const int cp = num.cp_lengths.at(symbol);
  CVec out(cp + num.fft_size);
  std::copy(useful.end() - cp, useful.end(), out.begin());
  std::copy(useful.begin(), useful.end(), out.begin() + cp);
  return out;
}

CVec ofdm_demodulate_symbol(std::span<const cplx> samples,
                            const Numerology& num) {
  if (samples.size() < static_cast<std::size_t>(num.fft_size))
    throw StageError("ofdm_demodulate_symbol: not enough samples");
  CVec in(samples.begin(), samples.begin() + num.fft_size);
  CVec bins = fft_unitary(in);
  CVec grid(num.occupied_subcarriers);
  for (int k = 0; k < num.occupied_subcarriers; ++k) {
    const int off = num.subcarrier_offset(k);
    const int bin = (off + num.fft_size) % num.fft_size;
    grid[k] = bins[bin];
  }
  return grid;
}

CVec modulate_frame(const CellConfig& cell, std::uint64_t frame_index,
                    const Numerology& num, const TxOptions& opts) {
  cell.validate();
  num.validate();
  const SymbolMap map = SymbolMap::build(cell, num);
  CVec frame(num.samples_per_frame());
  for (int s = 0; s < num.slots_per_frame; ++s) {
    for (int l = 0; l < num.symbols_per_slot; ++l) {
      const CVec grid =
          build_symbol_grid(cell, map, num, frame_index, s, l, opts);
      const CVec sym = ofdm_modulate_symbol(grid, num, l);
      std::copy(sym.begin(), sym.end(), frame.begin() + num.symbol_start(s, l));
    }
  }
  return frame;
}

CVec demodulate_at(std::span<const cplx> trace, std::size_t frame_start,
                   int slot, int symbol, const Numerology& num) {
  const std::size_t useful =
      frame_start + static_cast<std::size_t>(num.useful_start(slot, symbol));
  if (useful + num.fft_size > trace.size())
    throw StageError("demodulate_at: trace too short");
  return ofdm_demodulate_symbol(trace.subspan(useful), num);
}

} // namespace a2g
