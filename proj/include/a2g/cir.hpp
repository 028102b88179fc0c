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

#include "a2g/airchan.hpp"
#include "a2g/common.hpp"
#include "a2g/iq.hpp"
#include "a2g/numerology.hpp"
#include "a2g/parallel.hpp"
#include "a2g/sync.hpp"

namespace a2g {

// CIR extraction: least-squares pilot-domain channel estimates on the
// stride-6 lattice, inverse transform over the lattice, one CIR per
// half-frame. No interpolation to non-pilot carriers: keeps the full
// unambiguous span and leaves resolution to the estimator.

struct Cir {
  CVec taps;            // length = pilots per symbol
  double timestamp_s = 0.0;
  bool valid = true;
};

struct CirStream {
  std::vector<Cir> cirs; // ordered by timestamp, one per 5 ms
  int grid_size = 0;
  double delay_resolution_s = 0.0;  // 1 / occupied bandwidth
  double unambiguous_span_s = 0.0;  // 1 / pilot spacing
  double start_time_s = 0.0;
};

struct CirexConfig {
  enum class Window { rectangular, hann };
  Window window = Window::rectangular;
  /// CIRs whose mean pilot power falls this far under the stream median are
  /// flagged invalid (temporary signal loss) instead of aborting the run.
  double invalid_below_db = -20.0;
  int max_cirs = -1; // -1: as many as the trace holds
  Exec exec = Exec::parallel;
};

CirStream extract_cir(const IqTrace& iq, const SyncResult& sync,
                      const Numerology& num, const CirexConfig& cfg = {});

/// |h|^2 matrix (rows = CIRs, cols = delay bins), linear power.
struct PdpMatrix {
  std::vector<double> times;
  std::vector<std::vector<double>> power;
  double delay_resolution_s = 0.0;
};

PdpMatrix pdp(const CirStream& stream);

/// 10 consecutive CIRs form one snapshot; trailing partials are dropped.
struct CirSnapshot {
  std::vector<Cir> cirs;
  double t = 0.0;         // snapshot time (first CIR)
  double spacing_s = 0.0; // CIR-to-CIR spacing
  double span_s = 0.0;    // unambiguous delay span of the grid
  bool usable() const {
    for (const auto& c : cirs)
      if (!c.valid) return false;
    return !cirs.empty();
  }
};

std::vector<CirSnapshot> make_snapshots(const CirStream& stream,
                                        int per_snapshot = 10);

void write_cir(const std::string& path, const CirStream& stream);
CirStream read_cir(const std::string& path);

/// Renders an Mpc set onto the pilot-lattice delay grid: the synthesis
/// counterpart of extraction, used by closed-loop drivers and tests.
CVec render_cir_taps(const std::vector<Mpc>& paths, double t, int grid_size,
                     double span_s);

} // namespace a2g
