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

// Compares the serial reference kernels against their OpenMP variants on
// representative workloads and reports timings plus the max deviation.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "a2g/airchan.hpp"
#include "a2g/cir.hpp"
#include "a2g/rng.hpp"
#include "a2g/sage.hpp"
#include "a2g/sync.hpp"
#include "a2g/waveform.hpp"

using namespace a2g;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double timed(F&& fn) {
  const double t0 = now_s();
  fn();
  return now_s() - t0;
}

double max_cvec_dev(const CVec& a, const CVec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp: %d thread(s)\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled at build time\n");
#endif

  const Numerology num = Numerology::lte20();
  const CellConfig cell = CellConfig::from_pci(301, CpMode::normal);

  // trace: 6 frames with a flight channel on top
  TxOptions opts;
  opts.seed = 5;
  IqTrace tx;
  tx.sample_rate_hz = num.sample_rate;
  for (int f = 0; f < 6; ++f) {
    const CVec fr = modulate_frame(cell, f, num, opts);
    tx.samples.insert(tx.samples.end(), fr.begin(), fr.end());
  }
  const auto sc = horizontal_scenario(75.0);
  const auto tracks = mpc_tracks(sc.trajectory, sc.scatterers, 200.0);

  std::printf("%-22s %10s %10s %8s %12s\n", "kernel", "serial[s]",
              "openmp[s]", "speedup", "max|dev|");

  // channel application
  IqTrace rx_s, rx_p;
  {
    ChannelOptions o;
    o.exec = Exec::serial;
    const double ts = timed([&] { rx_s = apply_channel(tx, tracks, o); });
    o.exec = Exec::parallel;
    const double tp = timed([&] { rx_p = apply_channel(tx, tracks, o); });
    std::printf("%-22s %10.3f %10.3f %8.2f %12.3e\n", "apply_channel", ts, tp,
                ts / tp, max_cvec_dev(rx_s.samples, rx_p.samples));
  }
  const IqTrace rx = add_awgn(rx_p, 10.0, num.occupied_bandwidth(), 9);

  // PSS correlation search
  {
    PssDetection a, b;
    const double ts =
        timed([&] { a = detect_pss(rx, 10, num, Exec::serial); });
    const double tp =
        timed([&] { b = detect_pss(rx, 10, num, Exec::parallel); });
    double dev = 0.0;
    for (int r = 0; r < 3; ++r)
      for (std::size_t i = 0; i < a.metric[r].size(); ++i)
        dev = std::max(dev, std::fabs(a.metric[r][i] - b.metric[r][i]));
    std::printf("%-22s %10.3f %10.3f %8.2f %12.3e\n", "detect_pss", ts, tp,
                ts / tp, dev);
  }

  // CIR extraction and the per-snapshot estimator
  SyncResult sync;
  sync.cell_found = true;
  sync.t0_hat = num.useful_start(0, num.symbols_per_slot - 1);
  sync.pss_root_hat = cell.pss_root_index;
  sync.sss_index_hat = cell.sss_index;
  sync.cp_mode_hat = cell.cp_mode;
  sync.half_frame_flag = HalfFrame::first;
  sync.pci_hat = cell.pci;
  {
    CirStream a, b;
    CirexConfig o;
    o.exec = Exec::serial;
    const double ts = timed([&] { a = extract_cir(rx, sync, num, o); });
    o.exec = Exec::parallel;
    const double tp = timed([&] { b = extract_cir(rx, sync, num, o); });
    double dev = 0.0;
    for (std::size_t i = 0; i < a.cirs.size(); ++i)
      dev = std::max(dev, max_cvec_dev(a.cirs[i].taps, b.cirs[i].taps));
    std::printf("%-22s %10.3f %10.3f %8.2f %12.3e\n", "extract_cir", ts, tp,
                ts / tp, dev);
  }
  {
    // synthetic one-second stream so sage_run has snapshots to chew on
    CirStream stream;
    stream.grid_size = 200;
    stream.unambiguous_span_s = 1.0 / 90e3;
    stream.delay_resolution_s = 1.0 / 18e6;
    std::vector<Mpc> paths;
    Mpc p1;
    p1.amplitude = {1.0, 0.0};
    p1.delay_s = 500e-9;
    p1.doppler_hz = 30.0;
    Mpc p2;
    p2.amplitude = {0.4, 0.1};
    p2.delay_s = 1.5e-6;
    p2.doppler_hz = -50.0;
    paths = {p1, p2};
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
      Cir c;
      c.timestamp_s = i * 5e-3;
      c.taps = render_cir_taps(paths, c.timestamp_s, 200, stream.unambiguous_span_s);
      for (auto& v : c.taps) v += rng.cnormal(1e-3);
      stream.cirs.push_back(std::move(c));
    }
    SageConfig o;
    o.pre_pass_paths = 10;
    std::vector<SnapshotEstimate> a, b;
    o.exec = Exec::serial;
    const double ts = timed([&] { a = sage_run(stream, o); });
    o.exec = Exec::parallel;
    const double tp = timed([&] { b = sage_run(stream, o); });
    double dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      dev = std::max(dev, std::fabs(a[i].residual_power - b[i].residual_power));
    std::printf("%-22s %10.3f %10.3f %8.2f %12.3e\n", "sage_run", ts, tp,
                ts / tp, dev);
  }
  return 0;
}
