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

#include <string>
#include <vector>

#include "a2g/cir.hpp"
#include "a2g/common.hpp"
#include "a2g/parallel.hpp"

namespace a2g {

// Joint per-path (amplitude, delay, Doppler) estimation on 50 ms snapshots
// by coordinate-wise expectation-maximization with successive interference
// cancellation initialization. Two passes: a wide pre-pass whose sorted
// amplitudes pick the model order against the noise floor, then a full run
// at that order.

struct SageConfig {
  int pre_pass_paths = 30;
  int iterations = 15;    // EM sweeps in the final pass
  int pre_iterations = 3; // EM sweeps in the pre-pass
  double delay_oversampling = 8.0; // grid step = 1/(oversampling x bandwidth)
  double doppler_step_hz = 1.0;
  double doppler_max_hz = 100.0; // clamped to the snapshot Nyquist limit
  double noise_floor_margin_db = 3.0;
  double tail_fraction = 0.25; // trailing share of the delay grid
  double dynamic_range_db = 40.0;
  Exec exec = Exec::parallel; // snapshot-level parallelism in sage_run
};

struct PathEstimate {
  cplx amplitude{0.0, 0.0};
  double delay_s = 0.0;
  double doppler_hz = 0.0;
  double power() const { return std::norm(amplitude); }
};

struct SnapshotEstimate {
  double t = 0.0;
  int l_hat = 0;
  std::vector<PathEstimate> paths; // descending power
  double noise_floor_db = 0.0;
  double input_power = 0.0;    // total |Y|^2 over the snapshot cells
  double residual_power = 0.0; // |Y - reconstruction|^2
  std::vector<double> residual_history; // per final-pass iteration
};

/// Mean tail power of the snapshot-averaged PDP plus the margin, in dB.
/// Throws StageError when the snapshot holds no valid CIR.
double estimate_noise_floor(const CirSnapshot& snap, double margin_db = 3.0,
                            double tail_fraction = 0.25);

/// Two-pass estimate for one snapshot. An empty estimate (l_hat = 0) is a
/// valid outcome when nothing clears the noise floor.
SnapshotEstimate sage_snapshot(const CirSnapshot& snap,
                               const SageConfig& cfg = {});

/// One estimate per full snapshot; unusable snapshots (invalid CIRs) are
/// skipped. Throws StageError when the stream yields no full snapshot.
std::vector<SnapshotEstimate> sage_run(const CirStream& stream,
                                       const SageConfig& cfg = {});
std::vector<SnapshotEstimate> sage_run(const std::vector<CirSnapshot>& snaps,
                                       const SageConfig& cfg = {});

void write_estimates_jsonl(const std::string& path,
                           const std::vector<SnapshotEstimate>& estimates);
std::vector<SnapshotEstimate> read_estimates_jsonl(const std::string& path);

} // namespace a2g
