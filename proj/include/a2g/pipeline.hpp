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
#include <string>
#include <vector>

#include "a2g/model.hpp"
#include "a2g/numerology.hpp"
#include "a2g/stats.hpp"
#include "a2g/sync.hpp"

namespace a2g {

// File-based stage orchestration: every stage reads and writes artifacts so
// each can run standalone and tests can inject fixtures.

inline const std::vector<std::string> kStageOrder = {
    "wavegen", "fly", "cellsearch", "cir", "sage", "stats", "model"};

struct RunConfig {
  std::string scenario_path;
  int pci = 301;
  CpMode cp_mode = CpMode::normal;
  int n_frames = 12;
  double snr_db = 15.0;
  double capture_rate_hz = 0.0; // 0 keeps the native rate
  std::uint64_t seed = 1;
  std::vector<std::string> stages = kStageOrder; // must be a prefix
  std::string out_dir = "run";

  void validate() const; // prefix rule + referenced files exist
};

struct StageRecord {
  std::string name;
  double seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> artifacts; // path, hash
};

struct RunManifest {
  RunConfig config;
  std::vector<StageRecord> stages;
  std::string to_json() const;
};

/// Executes the configured stage prefix in order. Throws StageError naming
/// the failing stage; artifacts written so far stay on disk.
RunManifest run_pipeline(const RunConfig& cfg);

/// CSV/JSON series for the standard plots (CPDP heatmap, delay/Doppler
/// scatter, power vs distance, CDFs with fitted curves) from a finished
/// run directory. Throws ConfigError when inputs are missing.
void emit_plots(const std::string& run_dir);

/// FNV-1a 64-bit file hash, hex-encoded; the manifest's artifact digest.
std::string fnv1a64_file(const std::string& path);

void write_sync_json(const std::string& path, const SyncResult& sync,
                     const Numerology& num);
SyncResult read_sync_json(const std::string& path);

/// Per-snapshot statistics CSV plus the fit-summary JSON for one flight.
void write_stats_outputs(const std::string& csv_path,
                         const std::string& summary_path,
                         const FlightStats& fs,
                         const std::vector<SnapshotEstimate>& estimates,
                         FlightMode mode);

} // namespace a2g
