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
#include "a2g/iq.hpp"
#include "a2g/numerology.hpp"
#include "a2g/parallel.hpp"

namespace a2g {

// Cell search on raw IQ. The search works at the trace's sample rate:
// replicas are synthesized from the tone sets at that rate, so native and
// capture-rate traces go through the same path. Correlation is evaluated at
// sample granularity; sub-sample timing is the CIR/estimator's business.

struct FilterResult {
  IqTrace trace;
  int group_delay_samples = 0; // 0 for the zero-phase implementation
};

/// Confines the trace to a band (zero-phase spectral mask, >= 60 dB past
/// the edge). Throws ConfigError when the rate cannot carry the band.
FilterResult lowpass_band(const IqTrace& iq, double band_hz);

/// The standard 18 MHz occupied-band confinement applied to wide captures.
FilterResult lowpass_18mhz(const IqTrace& iq);

struct PssDetection {
  std::int64_t t0_hat = 0; // sample index of the PSS useful-part start
  int root_hat = -1;
  bool found = false;
  double peak = 0.0;
  double floor_median = 0.0;
  std::vector<double> peak_per_root;
  std::vector<double> median_per_root;
  std::vector<std::vector<double>> metric; // [root][t0], averaged
};

/// Averaged squared correlation against the three PSS replicas over
/// t0 in [0, half-frame). Throws StageError if the trace is too short.
PssDetection detect_pss(const IqTrace& iq, int n_half_frames,
                        const Numerology& num, Exec exec = Exec::parallel,
                        double floor_ratio = 8.0);

struct SssDetection {
  int sss_index_hat = -1; // 0..335
  CpMode cp_mode_hat = CpMode::normal;
  bool found = false;
  double peak = 0.0;
  double floor_median = 0.0;
};

/// Joint CP-mode / sequence-index search one symbol ahead of the detected
/// PSS, averaged with full-frame period.
SssDetection detect_sss(const IqTrace& iq, std::int64_t t0_hat, int root_hat,
                        int n_frames, const Numerology& num,
                        double floor_ratio = 4.0);

struct SyncResult {
  std::int64_t t0_hat = 0;
  int pss_root_hat = -1;
  int sss_index_hat = -1;
  CpMode cp_mode_hat = CpMode::normal;
  HalfFrame half_frame_flag = HalfFrame::first;
  int pci_hat = -1;
  bool cell_found = false;
  double pss_peak = 0.0, pss_floor = 0.0;
  double sss_peak = 0.0, sss_floor = 0.0;

  /// Sample index of the start (CP of slot 0 symbol 0) of the frame the
  /// detected PSS belongs to. May be negative if the capture started
  /// mid-frame; the next frame is one frame length later.
  std::int64_t frame_start(const Numerology& num, double fs) const;
};

struct SyncConfig {
  int n_half_frames = 10;
  double pss_floor_ratio = 8.0; // peak < ratio x median -> no cell
  bool apply_filter = true;
  bool refine_timing = true; // pilot phase-slope alignment after SSS
  Exec exec = Exec::parallel;
};

/// Full cell search: filter, PSS, SSS/CP, PCI, optional timing refinement.
SyncResult cell_search(const IqTrace& iq, const Numerology& num,
                       const SyncConfig& cfg = {});

/// Time-domain synchronization replica (useful part, no CP) of a 62-tone
/// grid at an arbitrary sample rate.
CVec synth_central62_replica(const CVec& seq62, const Numerology& num,
                             double sample_rate);

} // namespace a2g
