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

#include "a2g/airchan.hpp"
#include "a2g/iq.hpp"
#include "a2g/numerology.hpp"
#include "a2g/waveform.hpp"

namespace a2g::testutil {

/// Concatenated downlink frames, optionally preceded by `delay` zero
/// samples and impaired by AWGN at `snr_db` over the occupied band.
inline IqTrace make_cell_trace(const CellConfig& cell, const Numerology& num,
                               int n_frames, std::uint64_t seed,
                               double snr_db = 1e9, int delay = 0) {
  IqTrace t;
  t.sample_rate_hz = num.sample_rate;
  t.samples.assign(static_cast<std::size_t>(delay), cplx{0.0, 0.0});
  TxOptions opts;
  opts.seed = seed;
  for (int f = 0; f < n_frames; ++f) {
    const CVec frame = modulate_frame(cell, static_cast<std::uint64_t>(f), num, opts);
    t.samples.insert(t.samples.end(), frame.begin(), frame.end());
  }
  if (snr_db < 1e8)
    return add_awgn(t, snr_db, num.occupied_bandwidth(), seed ^ 0xa5a5a5a5ull);
  return t;
}

inline std::int64_t nominal_pss_t0(const Numerology& num) {
  return num.useful_start(0, num.symbols_per_slot - 1);
}

} // namespace a2g::testutil

#include "a2g/cir.hpp"
#include "a2g/rng.hpp"

namespace a2g::testutil {

/// Snapshot on the default extraction geometry (200-tap grid, 10 CIRs at
/// 5 ms) rendered from ground-truth paths; per-tap noise at `snr_db` below
/// the strongest path.
inline CirSnapshot make_snapshot(const std::vector<Mpc>& paths, double snr_db,
                                 std::uint64_t seed, int grid = 200,
                                 int n_cirs = 10, double spacing = 5e-3,
                                 double span = 1.0 / 90e3) {
  CirSnapshot snap;
  snap.t = 0.0;
  snap.spacing_s = spacing;
  snap.span_s = span;
  Rng rng(seed);
  double peak = 0.0;
  for (const auto& p : paths) peak = std::max(peak, std::norm(p.amplitude));
  const double var = (snr_db < 1e8 && !paths.empty())
                         ? peak / undb10(snr_db)
                         : 0.0;
  for (int m = 0; m < n_cirs; ++m) {
    Cir c;
    c.timestamp_s = m * spacing;
    c.taps = render_cir_taps(paths, c.timestamp_s, grid, span);
    if (var > 0.0)
      for (auto& v : c.taps) v += rng.cnormal(var);
    snap.cirs.push_back(std::move(c));
  }
  return snap;
}

} // namespace a2g::testutil
