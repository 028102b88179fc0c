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
#include "a2g/cir.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "a2g/fft.hpp"
#include "a2g/sequences.hpp"
#include "a2g/tones.hpp"

namespace a2g {

CirStream extract_cir(const IqTrace& iq, const SyncResult& sync,
                      const Numerology& num, const CirexConfig& cfg) {
  if (!sync.cell_found) throw StageError("extract_cir: no synchronized cell");
  const double fs = iq.sample_rate_hz;
  if (fs <= 0.0) throw ConfigError("extract_cir: trace has no sample rate");

  const Numerology prof = num.with_cp(sync.cp_mode_hat);
  const int pci = sync.pci_hat;
  const int n_pilots = prof.occupied_subcarriers / 6;

  CirStream stream;
  stream.grid_size = n_pilots;
  stream.delay_resolution_s = 1.0 / prof.occupied_bandwidth();
  stream.unambiguous_span_s = 1.0 / (6.0 * prof.subcarrier_spacing);
  stream.start_time_s = iq.start_time_s;

  const auto frame_len =
      static_cast<std::int64_t>(std::llround(fs * prof.frame_duration));
  const auto half_len = frame_len / 2;
  const auto lu =
      static_cast<std::int64_t>(std::llround(fs / prof.subcarrier_spacing));

  std::int64_t origin = sync.frame_start(prof, fs);
  while (origin > 0) origin -= frame_len; // cover leading half-frames too

  // the designated reference symbol: first CRS symbol of each half-frame
  const int n_rb = prof.occupied_subcarriers / 12;
  const auto freqs = crs_pilot_freqs(pci, 0, prof);
  const CVec pilots0 = crs_sequence(pci, 0, 0, sync.cp_mode_hat, n_rb);
  const CVec pilots10 = crs_sequence(pci, 10, 0, sync.cp_mode_hat, n_rb);
  const double us0 =
      static_cast<double>(prof.useful_start(0, 0)) / prof.sample_rate;
  // tone_dft of a unitary-IFFT symbol scales by fft/sqrt(fft) at the native
  // rate and by lu/sqrt(fft) in general
  const double dft_scale = std::sqrt(static_cast<double>(prof.fft_size)) /
                           static_cast<double>(lu);

  struct Job {
    std::int64_t base;
    double timestamp;
    bool second_half;
  };
  std::vector<Job> jobs;
  for (std::int64_t f = 0;; ++f) {
    bool any = false;
    for (int h = 0; h < 2; ++h) {
      const std::int64_t sym =
          origin + f * frame_len + h * half_len +
          static_cast<std::int64_t>(std::llround(us0 * fs));
      if (sym < 0) {
        any = true; // not yet in range, keep scanning
        continue;
      }
      if (sym + lu > static_cast<std::int64_t>(iq.samples.size())) continue;
      any = true;
      jobs.push_back({sym, iq.start_time_s + static_cast<double>(sym) / fs,
                      h == 1});
      if (cfg.max_cirs > 0 &&
          static_cast<int>(jobs.size()) >= cfg.max_cirs)
        break;
    }
    if (!any || (cfg.max_cirs > 0 &&
                 static_cast<int>(jobs.size()) >= cfg.max_cirs))
      break;
  }
  if (jobs.empty()) throw StageError("extract_cir: no full reference symbol");

  std::vector<Cir> cirs(jobs.size());
  std::vector<double> pilot_power(jobs.size());

  auto run_job = [&](std::size_t j) {
    const auto& job = jobs[j];
    const CVec tones = tone_dft(
        {iq.samples.data() + job.base, static_cast<std::size_t>(lu)}, freqs,
        fs);
    const CVec& sent = job.second_half ? pilots10 : pilots0;
    CVec ratio(tones.size());
    double pp = 0.0;
    for (std::size_t m = 0; m < tones.size(); ++m) {
      ratio[m] = tones[m] * dft_scale / sent[m];
      pp += std::norm(tones[m] * dft_scale);
    }
    pilot_power[j] = pp / static_cast<double>(tones.size());
    if (cfg.window == CirexConfig::Window::hann) {
      const std::size_t n = ratio.size();
      for (std::size_t m = 0; m < n; ++m)
        ratio[m] *= 0.5 - 0.5 * std::cos(kTwoPi * m / (n - 1));
    }
    Cir c;
    c.taps = ifft(ratio);
    c.timestamp_s = job.timestamp;
    c.valid = true;
    for (const auto& v : c.taps)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) c.valid = false;
    cirs[j] = std::move(c);
  };

  if (cfg.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  }

  // flag signal-loss records against the stream median pilot power
  std::vector<double> sorted = pilot_power;
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  const double floor = sorted[mid] * undb10(cfg.invalid_below_db);
  for (std::size_t j = 0; j < cirs.size(); ++j)
    if (pilot_power[j] < floor) cirs[j].valid = false;

  stream.cirs = std::move(cirs);
  return stream;
}

PdpMatrix pdp(const CirStream& stream) {
  if (stream.cirs.empty()) throw StageError("pdp: empty stream");
  PdpMatrix m;
  m.delay_resolution_s = stream.delay_resolution_s;
  m.times.reserve(stream.cirs.size());
  m.power.reserve(stream.cirs.size());
  for (const auto& c : stream.cirs) {
    m.times.push_back(c.timestamp_s);
    std::vector<double> row(c.taps.size());
    for (std::size_t g = 0; g < c.taps.size(); ++g) row[g] = std::norm(c.taps[g]);
    m.power.push_back(std::move(row));
  }
  return m;
}

std::vector<CirSnapshot> make_snapshots(const CirStream& stream,
                                        int per_snapshot) {
  if (per_snapshot < 1) throw ConfigError("make_snapshots: bad group size");
  std::vector<CirSnapshot> out;
  const std::size_t n = stream.cirs.size() / per_snapshot;
  for (std::size_t s = 0; s < n; ++s) {
    CirSnapshot snap;
    snap.cirs.assign(stream.cirs.begin() + s * per_snapshot,
                     stream.cirs.begin() + (s + 1) * per_snapshot);
    snap.t = snap.cirs.front().timestamp_s;
    snap.spacing_s = (per_snapshot > 1)
                         ? snap.cirs[1].timestamp_s - snap.cirs[0].timestamp_s
                         : 0.0;
    snap.span_s = stream.unambiguous_span_s;
    out.push_back(std::move(snap));
  }
  return out;
}

namespace {
constexpr char kMagic[4] = {'A', '2', 'G', 'C'};

template <typename T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
} // namespace

void write_cir(const std::string& path, const CirStream& stream) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("write_cir: cannot open " + path);
  f.write(kMagic, 4);
  put<std::uint32_t>(f, 1); // version
  put<std::uint32_t>(f, static_cast<std::uint32_t>(stream.grid_size));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(stream.cirs.size()));
  put<double>(f, stream.delay_resolution_s);
  put<double>(f, stream.unambiguous_span_s);
  put<double>(f, stream.start_time_s);
  for (const auto& c : stream.cirs) {
    put<double>(f, c.timestamp_s);
    put<std::uint8_t>(f, c.valid ? 1 : 0);
    for (const auto& v : c.taps) {
      put<float>(f, static_cast<float>(v.real()));
      put<float>(f, static_cast<float>(v.imag()));
    }
  }
  if (!f) throw ConfigError("write_cir: short write to " + path);
}

CirStream read_cir(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("read_cir: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("read_cir: not a CIR file: " + path);
  const auto version = get<std::uint32_t>(f);
  if (version != 1) throw ConfigError("read_cir: unsupported version");
  CirStream stream;
  stream.grid_size = static_cast<int>(get<std::uint32_t>(f));
  const auto count = get<std::uint32_t>(f);
  stream.delay_resolution_s = get<double>(f);
  stream.unambiguous_span_s = get<double>(f);
  stream.start_time_s = get<double>(f);
  stream.cirs.resize(count);
  for (auto& c : stream.cirs) {
    c.timestamp_s = get<double>(f);
    c.valid = get<std::uint8_t>(f) != 0;
    c.taps.resize(stream.grid_size);
    for (auto& v : c.taps) {
      const float re = get<float>(f);
      const float im = get<float>(f);
      v = {re, im};
    }
  }
  if (!f) throw ConfigError("read_cir: truncated file " + path);
  return stream;
}

CVec render_cir_taps(const std::vector<Mpc>& paths, double t, int grid_size,
                     double span_s) {
  const double df = 1.0 / span_s; // pilot spacing
  CVec freq(grid_size, cplx{0.0, 0.0});
  for (const auto& p : paths) {
    const cplx a = p.amplitude * std::polar(1.0, kTwoPi * p.doppler_hz * t);
    const cplx rot = std::polar(1.0, -kTwoPi * df * p.delay_s);
    cplx ph{1.0, 0.0};
    for (int m = 0; m < grid_size; ++m) {
      freq[m] += a * ph;
      ph *= rot;
    }
  }
  return ifft(freq);
}

} // namespace a2g
