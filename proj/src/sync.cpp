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
#include "a2g/sync.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "a2g/fft.hpp"
#include "a2g/sequences.hpp"
#include "a2g/tones.hpp"

namespace a2g {

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

} // namespace

CVec synth_central62_replica(const CVec& seq62, const Numerology& num,
                             double sample_rate) {
  if (seq62.size() != 62) throw ConfigError("replica: need 62 tone values");
  const auto freqs = central62_freqs(num);
  const int lu = static_cast<int>(std::llround(sample_rate / num.subcarrier_spacing));
  CVec p(lu, cplx{0.0, 0.0});
  for (int t = 0; t < 62; ++t) {
    const cplx rot = std::polar(1.0, kTwoPi * freqs[t] / sample_rate);
    cplx ph{1.0, 0.0};
    for (int k = 0; k < lu; ++k) {
      p[k] += seq62[t] * ph;
      ph *= rot;
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(lu) * 62.0);
  for (auto& v : p) v *= scale;
  return p;
}

FilterResult lowpass_band(const IqTrace& iq, double band_hz) {
  const double fs = iq.sample_rate_hz;
  if (fs < band_hz)
    throw ConfigError("lowpass: sample rate below the confined band");
  FilterResult res;
  res.group_delay_samples = 0;
  res.trace = iq;
  if (iq.samples.empty()) return res;

  // zero-phase spectral mask: flat across the half-band, narrow cosine edge
  const double edge = band_hz / 2.0;
  const double width = band_hz / 1800.0;
  const std::size_t n = iq.samples.size();
  const std::size_t nfft = next_pow2(n + 16384);
  CVec buf(iq.samples);
  buf.resize(nfft, cplx{0.0, 0.0});
  CVec spec = fft(buf);
  for (std::size_t k = 0; k < nfft; ++k) {
    double f = static_cast<double>(k) * fs / static_cast<double>(nfft);
    if (f > fs / 2) f -= fs;
    const double a = std::fabs(f);
    double g;
    if (a <= edge) g = 1.0;
    else if (a >= edge + width) g = 0.0;
    else g = std::cos(0.5 * kPi * (a - edge) / width);
    spec[k] *= g;
  }
  CVec filtered = ifft(spec);
  res.trace.samples.assign(filtered.begin(), filtered.begin() + n);
  return res;
}

FilterResult lowpass_18mhz(const IqTrace& iq) { return lowpass_band(iq, 18e6); }

PssDetection detect_pss(const IqTrace& iq, int n_half_frames,
                        const Numerology& num, Exec exec, double floor_ratio) {
  const double fs = iq.sample_rate_hz;
  if (fs <= 0.0) throw ConfigError("detect_pss: trace has no sample rate");
  if (n_half_frames < 1) throw ConfigError("detect_pss: need N >= 1");
  const auto half =
      static_cast<std::size_t>(std::llround(fs * num.frame_duration / 2.0));
  const auto lu =
      static_cast<std::size_t>(std::llround(fs / num.subcarrier_spacing));
  const std::size_t need = static_cast<std::size_t>(n_half_frames) * half + lu;
  if (iq.samples.size() < need)
    throw StageError("detect_pss: trace too short for requested averaging");

  const std::size_t nfft = next_pow2(half + lu);

  PssDetection det;
  det.metric.assign(3, std::vector<double>(half, 0.0));
  det.peak_per_root.assign(3, 0.0);
  det.median_per_root.assign(3, 0.0);

  for (int root = 0; root < 3; ++root) {
    CVec replica = synth_central62_replica(pss_sequence(root), num, fs);
    replica.resize(nfft, cplx{0.0, 0.0});
    CVec rep_spec = fft(replica);
    for (auto& v : rep_spec) v = std::conj(v);

    // one |correlation|^2 row per half-frame, then an ordered reduction so
    // serial and parallel runs produce identical sums
    std::vector<std::vector<double>> rows(n_half_frames);
    auto compute_row = [&](int n) {
      CVec seg(nfft, cplx{0.0, 0.0});
      const std::size_t base = static_cast<std::size_t>(n) * half;
      const std::size_t take = std::min(half + lu, iq.samples.size() - base);
      std::copy(iq.samples.begin() + base, iq.samples.begin() + base + take,
                seg.begin());
      CVec spec = fft(seg);
      for (std::size_t k = 0; k < nfft; ++k) spec[k] *= rep_spec[k];
      CVec corr = ifft(spec);
      rows[n].resize(half);
      for (std::size_t t = 0; t < half; ++t) rows[n][t] = std::norm(corr[t]);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
      for (int n = 0; n < n_half_frames; ++n) compute_row(n);
    } else {
      for (int n = 0; n < n_half_frames; ++n) compute_row(n);
    }
    auto& m = det.metric[root];
    for (int n = 0; n < n_half_frames; ++n)
      for (std::size_t t = 0; t < half; ++t) m[t] += rows[n][t];
    const double inv = 1.0 / n_half_frames;
    for (auto& v : m) v *= inv;

    const auto it = std::max_element(m.begin(), m.end());
    det.peak_per_root[root] = *it;
    det.median_per_root[root] = median_of(m);
    if (*it > det.peak) {
      det.peak = *it;
      det.root_hat = root;
      det.t0_hat = static_cast<std::int64_t>(it - m.begin());
    }
  }
  det.floor_median = det.median_per_root[det.root_hat];
  det.found = det.peak >= floor_ratio * det.floor_median &&
              det.floor_median > 0.0;
  return det;
}

SssDetection detect_sss(const IqTrace& iq, std::int64_t t0_hat, int root_hat,
                        int n_frames, const Numerology& num,
                        double floor_ratio) {
  const double fs = iq.sample_rate_hz;
  if (root_hat < 0 || root_hat > 2) throw ConfigError("detect_sss: bad root");
  if (n_frames < 1) throw ConfigError("detect_sss: need N >= 1");
  const auto frame =
      static_cast<std::int64_t>(std::llround(fs * num.frame_duration));
  const auto lu =
      static_cast<std::int64_t>(std::llround(fs / num.subcarrier_spacing));
  const auto freqs = central62_freqs(num);

  // candidate dictionary: group x half-frame variant, for the detected root
  std::vector<CVec> cand(336);
  for (int g = 0; g < 168; ++g) {
    cand[g] = sss_sequence(g, HalfFrame::first, root_hat);
    cand[g + 168] = sss_sequence(g, HalfFrame::second, root_hat);
  }

  SssDetection det;
  double best = -1.0;
  std::vector<double> all_metrics;
  all_metrics.reserve(2 * 336);

  for (CpMode cp : {CpMode::normal, CpMode::extended}) {
    const Numerology prof = num.with_cp(cp);
    const double cp_s =
        static_cast<double>(prof.cp_lengths.back()) / prof.sample_rate;
    const auto offset = -static_cast<std::int64_t>(
        std::llround((1.0 / num.subcarrier_spacing + cp_s) * fs));

    std::vector<double> acc(336, 0.0);
    int used = 0;
    for (int n = 0; n < n_frames; ++n) {
      const std::int64_t base = t0_hat + offset + n * frame;
      if (base < 0 ||
          base + lu > static_cast<std::int64_t>(iq.samples.size()))
        continue;
      const CVec tones =
          tone_dft({iq.samples.data() + base, static_cast<std::size_t>(lu)},
                   freqs, fs);
      ++used;
      for (int k = 0; k < 336; ++k) {
        cplx dot = 0.0;
        for (int t = 0; t < 62; ++t) dot += tones[t] * std::conj(cand[k][t]);
        acc[k] += std::norm(dot);
      }
    }
    if (used == 0)
      throw StageError("detect_sss: no usable frame at hypothesized offset");
    for (int k = 0; k < 336; ++k) {
      acc[k] /= used;
      all_metrics.push_back(acc[k]);
      if (acc[k] > best) {
        best = acc[k];
        det.sss_index_hat = k;
        det.cp_mode_hat = cp;
      }
    }
  }
  det.peak = best;
  det.floor_median = median_of(all_metrics);
  det.found = det.peak >= floor_ratio * det.floor_median && det.floor_median > 0.0;
  return det;
}

std::int64_t SyncResult::frame_start(const Numerology& num, double fs) const {
  const int slot = (half_frame_flag == HalfFrame::first) ? 0 : 10;
  const int last_sym = num.symbols_per_slot - 1;
  const double us =
      static_cast<double>(num.useful_start(slot, last_sym)) / num.sample_rate;
  return t0_hat - static_cast<std::int64_t>(std::llround(us * fs));
}

namespace {

/// Pilot-lattice timing estimate: power-average the lattice-domain CIR over
/// the designated reference symbol of every half-frame, then read the
/// strongest tap with parabolic sub-tap refinement. Aligns the timeline to
/// the strongest path; the lattice's 1/(6 x 15 kHz) span keeps offsets of a
/// few samples unambiguous.
double crs_timing_offset(const IqTrace& iq, const SyncResult& sync,
                         const Numerology& num, int max_frames) {
  const double fs = iq.sample_rate_hz;
  const auto frame_len =
      static_cast<std::int64_t>(std::llround(fs * num.frame_duration));
  const auto half_len = frame_len / 2;
  const auto lu =
      static_cast<std::int64_t>(std::llround(fs / num.subcarrier_spacing));
  const Numerology prof = num.with_cp(sync.cp_mode_hat);
  const int n_rb = prof.occupied_subcarriers / 12;

  const auto freqs = crs_pilot_freqs(sync.pci_hat, 0, prof);
  const CVec pilots0 =
      crs_sequence(sync.pci_hat, 0, 0, sync.cp_mode_hat, n_rb);
  const CVec pilots10 =
      crs_sequence(sync.pci_hat, 10, 0, sync.cp_mode_hat, n_rb);

  const double us0 =
      static_cast<double>(prof.useful_start(0, 0)) / prof.sample_rate;
  std::int64_t f0 = sync.frame_start(prof, fs);
  while (f0 < 0) f0 += frame_len;

  const std::size_t k_lat = freqs.size();
  std::vector<double> acc(k_lat, 0.0);
  int used = 0;
  for (int f = 0; f < max_frames; ++f) {
    for (int h = 0; h < 2; ++h) {
      const std::int64_t base =
          f0 + f * frame_len + h * half_len +
          static_cast<std::int64_t>(std::llround(us0 * fs));
      if (base < 0 || base + lu > static_cast<std::int64_t>(iq.samples.size()))
        continue;
      const CVec tones =
          tone_dft({iq.samples.data() + base, static_cast<std::size_t>(lu)},
                   freqs, fs);
      const CVec& sent = (h == 1) ? pilots10 : pilots0;
      CVec ratio(k_lat);
      for (std::size_t m = 0; m < k_lat; ++m) ratio[m] = tones[m] / sent[m];
      const CVec cir = ifft(ratio);
      for (std::size_t g = 0; g < k_lat; ++g) acc[g] += std::norm(cir[g]);
      ++used;
    }
  }
  if (used == 0) return 0.0;

  std::size_t peak = 0;
  for (std::size_t g = 1; g < k_lat; ++g)
    if (acc[g] > acc[peak]) peak = g;
  const double y0 = acc[(peak + k_lat - 1) % k_lat];
  const double y1 = acc[peak];
  const double y2 = acc[(peak + 1) % k_lat];
  double frac = 0.0;
  const double denom = y0 - 2.0 * y1 + y2;
  if (denom < 0.0) frac = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
  double pos = static_cast<double>(peak) + frac;
  if (pos > static_cast<double>(k_lat) / 2.0) pos -= static_cast<double>(k_lat);
  const double tap_quantum = 1.0 / (6.0 * prof.subcarrier_spacing * k_lat);
  return pos * tap_quantum;
}

} // namespace

SyncResult cell_search(const IqTrace& iq, const Numerology& num,
                       const SyncConfig& cfg) {
  const IqTrace* work = &iq;
  FilterResult filt;
  if (cfg.apply_filter && iq.sample_rate_hz > num.occupied_bandwidth()) {
    filt = lowpass_band(iq, num.occupied_bandwidth());
    work = &filt.trace;
  }

  SyncResult res;
  const PssDetection pss =
      detect_pss(*work, cfg.n_half_frames, num, cfg.exec, cfg.pss_floor_ratio);
  res.t0_hat = pss.t0_hat;
  res.pss_root_hat = pss.root_hat;
  res.pss_peak = pss.peak;
  res.pss_floor = pss.floor_median;
  if (!pss.found) {
    res.cell_found = false;
    return res;
  }

  const int n_frames = std::max(1, cfg.n_half_frames / 2);
  const SssDetection sss =
      detect_sss(*work, pss.t0_hat, pss.root_hat, n_frames, num);
  res.sss_index_hat = sss.sss_index_hat;
  res.cp_mode_hat = sss.cp_mode_hat;
  res.sss_peak = sss.peak;
  res.sss_floor = sss.floor_median;
  res.half_frame_flag =
      (sss.sss_index_hat >= 168) ? HalfFrame::second : HalfFrame::first;
  res.pci_hat = compute_pci(pss.root_hat, sss.sss_index_hat);
  res.cell_found = sss.found;

  if (cfg.refine_timing && res.cell_found) {
    const double dt = crs_timing_offset(*work, res, num, 4);
    res.t0_hat += static_cast<std::int64_t>(std::llround(dt * iq.sample_rate_hz));
  }
  return res;
}

} // namespace a2g
