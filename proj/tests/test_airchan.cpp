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
#include <cmath>

#include "a2g/airchan.hpp"
#include "a2g/rng.hpp"
#include "doctest.h"

using namespace a2g;

namespace {

MpcTrackSet constant_channel(std::vector<Mpc> paths, double span_s = 1.0,
                             double rate = 200.0) {
  MpcTrackSet set;
  set.snapshot_rate_hz = rate;
  const int n = static_cast<int>(span_s * rate) + 1;
  for (int k = 0; k < n; ++k) set.times.push_back(k / rate);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    MpcTrack tr;
    tr.source = "p" + std::to_string(i);
    tr.amplitude.assign(n, paths[i].amplitude);
    tr.delay_s.assign(n, paths[i].delay_s);
    tr.doppler_hz.assign(n, paths[i].doppler_hz);
    set.tracks.push_back(tr);
  }
  return set;
}

IqTrace noise_trace(double fs, std::size_t n, std::uint64_t seed) {
  IqTrace t;
  t.sample_rate_hz = fs;
  t.samples.resize(n);
  Rng rng(seed);
  for (auto& v : t.samples) v = rng.cnormal();
  return t;
}

} // namespace

TEST_CASE("stationary uav sees one static los path") {
  FlightTrajectory traj;
  traj.waypoints = {{0.0, 100.0, 0.0, 50.0}, {1.0, 100.0, 0.0, 50.0}};
  ScattererSet scat; // BS default (0,0,20), no scatterers
  const auto set = mpc_tracks(traj, scat, 200.0);
  REQUIRE(set.tracks.size() == 1);
  const double want_delay =
      std::sqrt(100.0 * 100.0 + 30.0 * 30.0) / kSpeedOfLight;
  for (std::size_t k = 0; k < set.times.size(); ++k) {
    CHECK(set.tracks[0].delay_s[k] == doctest::Approx(want_delay).epsilon(1e-12));
    CHECK(std::fabs(set.tracks[0].doppler_hz[k]) < 1e-9);
  }
}

TEST_CASE("radial recede at 6 m/s gives -51.7 Hz doppler") {
  // Same height as the mast, flying straight away: range rate is exactly 6.
  FlightTrajectory traj;
  traj.waypoints = {{0.0, 100.0, 0.0, 20.0}, {10.0, 160.0, 0.0, 20.0}};
  ScattererSet scat;
  const auto set = mpc_tracks(traj, scat, 100.0);
  const double fc = scat.carrier_hz;
  const double want = -6.0 * fc / kSpeedOfLight; // oracle: -v fc / c
  CHECK(want == doctest::Approx(-51.7).epsilon(0.002));
  // inside the moving span (velocity is zero exactly at the last waypoint)
  const std::size_t mid = set.times.size() / 2;
  CHECK(set.tracks[0].doppler_hz[mid] == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("vertical ascent crosses zero doppler near mast height") {
  FlightTrajectory traj;
  traj.type = FlightType::vertical;
  traj.waypoints = {{0.0, 100.0, 0.0, 1.0}, {119.6, 100.0, 0.0, 300.0}};
  ScattererSet scat; // BS at z=20
  const auto set = mpc_tracks(traj, scat, 10.0);
  const auto& nu = set.tracks[0].doppler_hz;
  // find the sign change and the height where it happens
  double z_cross = -1.0;
  for (std::size_t k = 1; k + 1 < nu.size(); ++k) {
    if (nu[k - 1] > 0.0 && nu[k] <= 0.0) {
      z_cross = traj.position(set.times[k])[2];
      break;
    }
  }
  REQUIRE(z_cross > 0.0);
  CHECK(std::fabs(z_cross - 20.0) < 2.0);
}

TEST_CASE("ground image and scatterer paths arrive after los") {
  auto sc = horizontal_scenario(75.0);
  const auto set = mpc_tracks(sc.trajectory, sc.scatterers, 10.0);
  REQUIRE(set.tracks.size() >= 3);
  for (std::size_t k = 0; k < set.times.size(); ++k)
    for (std::size_t p = 1; p < set.tracks.size(); ++p)
      CHECK(set.tracks[p].delay_s[k] > set.tracks[0].delay_s[k]);
}

TEST_CASE("identity channel returns the input") {
  auto trace = noise_trace(1e6, 20000, 3);
  const auto ch = constant_channel({Mpc{{1.0, 0.0}, 0.0, 0.0}});
  const auto out = apply_channel(trace, ch);
  REQUIRE(out.samples.size() == trace.samples.size());
  double err = 0.0;
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    err += std::norm(out.samples[i] - trace.samples[i]);
  CHECK(err / power_sum(trace.samples) < 1e-20);
}

TEST_CASE("amplitude 0.5 quarters the power") {
  auto trace = noise_trace(1e6, 20000, 4);
  const auto ch = constant_channel({Mpc{{0.5, 0.0}, 0.0, 0.0}});
  const auto out = apply_channel(trace, ch);
  CHECK(power_sum(out.samples) ==
        doctest::Approx(0.25 * power_sum(trace.samples)).epsilon(1e-9));
}

TEST_CASE("opposed equal paths cancel (deep fade)") {
  auto trace = noise_trace(1e6, 20000, 5);
  const auto ch = constant_channel(
      {Mpc{{1.0, 0.0}, 0.0, 0.0}, Mpc{{-1.0, 0.0}, 0.0, 0.0}});
  const auto out = apply_channel(trace, ch);
  CHECK(power_sum(out.samples) < 1e-18 * power_sum(trace.samples));
}

TEST_CASE("integer and fractional delays are recovered by correlation") {
  const double fs = 1e6;
  auto trace = noise_trace(fs, 40000, 6);
  for (double delay_samples : {12.0, 7.3}) {
    const auto ch =
        constant_channel({Mpc{{1.0, 0.0}, delay_samples / fs, 0.0}});
    const auto out = apply_channel(trace, ch);
    // brute-force cross correlation over lags 0..31
    double best = -1.0;
    int best_lag = -1;
    for (int lag = 0; lag < 32; ++lag) {
      cplx acc = 0.0;
      for (std::size_t n = lag; n < out.samples.size(); ++n)
        acc += out.samples[n] * std::conj(trace.samples[n - lag]);
      if (std::abs(acc) > best) {
        best = std::abs(acc);
        best_lag = lag;
      }
    }
    CHECK(std::fabs(best_lag - delay_samples) <= 1.0);
  }
}

TEST_CASE("single-path energy is conserved") {
  auto trace = noise_trace(1e6, 30000, 7);
  const auto ch = constant_channel({Mpc{{1.0, 0.0}, 15.0 / 1e6, 0.0}});
  const auto out = apply_channel(trace, ch);
  // ignore the 15-sample head/tail spill
  double e_in = 0.0, e_out = 0.0;
  for (std::size_t n = 100; n + 100 < trace.samples.size(); ++n) {
    e_in += std::norm(trace.samples[n - 15]);
    e_out += std::norm(out.samples[n]);
  }
  CHECK(e_out == doctest::Approx(e_in).epsilon(1e-6));
}

TEST_CASE("doppler shifts a tone by nu within 0.1 Hz") {
  const double fs = 20000.0, f0 = 1000.0, nu = 40.0;
  IqTrace tone;
  tone.sample_rate_hz = fs;
  tone.samples.resize(static_cast<std::size_t>(fs)); // 1 s
  for (std::size_t n = 0; n < tone.samples.size(); ++n)
    tone.samples[n] = std::polar(1.0, kTwoPi * f0 * n / fs);
  const auto ch = constant_channel({Mpc{{1.0, 0.0}, 0.0, nu}}, 1.0);
  const auto out = apply_channel(tone, ch);
  // linear fit of the demodulated phase
  double sum_t = 0, sum_tt = 0, sum_p = 0, sum_tp = 0;
  double prev = 0.0, unwrapped = 0.0;
  const std::size_t n_used = out.samples.size();
  for (std::size_t n = 0; n < n_used; ++n) {
    const double ph = std::arg(out.samples[n] * std::conj(tone.samples[n]));
    double d = ph - prev;
    while (d > kPi) d -= kTwoPi;
    while (d < -kPi) d += kTwoPi;
    unwrapped += d;
    prev = ph;
    const double t = n / fs;
    sum_t += t;
    sum_tt += t * t;
    sum_p += unwrapped;
    sum_tp += t * unwrapped;
  }
  const double n_d = static_cast<double>(n_used);
  const double slope =
      (sum_tp - sum_t * sum_p / n_d) / (sum_tt - sum_t * sum_t / n_d);
  CHECK(std::fabs(slope / kTwoPi - nu) < 0.1);
}

TEST_CASE("serial and parallel channel rendering agree exactly") {
  auto trace = noise_trace(1e6, 15000, 8);
  auto sc = horizontal_scenario(75.0);
  auto set = mpc_tracks(sc.trajectory, sc.scatterers, 200.0);
  ChannelOptions o1;
  o1.exec = Exec::serial;
  ChannelOptions o2;
  o2.exec = Exec::parallel;
  const auto a = apply_channel(trace, set, o1);
  const auto b = apply_channel(trace, set, o2);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(a.samples[i] == b.samples[i]);
}

TEST_CASE("awgn lands at the requested in-band snr") {
  const double fs = 30.72e6, bw = 18e6, snr_db = 15.0;
  auto trace = noise_trace(fs, 200000, 9);
  const double p_sig = power_sum(trace.samples) / trace.samples.size();
  const auto noisy = add_awgn(trace, snr_db, bw, 1234);
  double p_noise = 0.0;
  for (std::size_t i = 0; i < trace.samples.size(); ++i)
    p_noise += std::norm(noisy.samples[i] - trace.samples[i]);
  p_noise /= static_cast<double>(trace.samples.size());
  const double want = p_sig / undb10(snr_db) * fs / bw;
  CHECK(p_noise == doctest::Approx(want).epsilon(0.02));
}

TEST_CASE("resample identity and duration") {
  auto trace = noise_trace(30.72e6, 61440, 10); // 2 ms
  const auto same = resample(trace, 30.72e6);
  CHECK(same.samples == trace.samples);
  const auto down = resample(trace, 25e6);
  CHECK(down.sample_rate_hz == 25e6);
  const double dur_in = trace.samples.size() / trace.sample_rate_hz;
  const double dur_out = down.samples.size() / down.sample_rate_hz;
  CHECK(std::fabs(dur_in - dur_out) < 1.0 / 25e6);
  CHECK_THROWS_AS(resample(trace, 10e6), ConfigError);
}

TEST_CASE("in-band tone preserved within 0.1 dB through 30.72 -> 25 Msps") {
  const double fs = 30.72e6, f0 = 5e6;
  IqTrace tone;
  tone.sample_rate_hz = fs;
  tone.samples.resize(1 << 16);
  for (std::size_t n = 0; n < tone.samples.size(); ++n)
    tone.samples[n] = std::polar(1.0, kTwoPi * f0 * n / fs);
  const auto out = resample(tone, 25e6);
  // mean power in the steady-state middle section
  double p = 0.0;
  std::size_t cnt = 0;
  for (std::size_t n = 500; n + 500 < out.samples.size(); ++n, ++cnt)
    p += std::norm(out.samples[n]);
  p /= static_cast<double>(cnt);
  CHECK(std::fabs(db10(p)) < 0.1);
}

TEST_CASE("scenario json round trip") {
  const char* text = R"({
    "name": "h75",
    "seed": 7,
    "bs_position": [0, 0, 20],
    "carrier_hz": 2.585e9,
    "trajectory": {
      "type": "horizontal",
      "waypoints": [[0, 50, 0, 75], [89.3, 550, 0, 75], [178.6, 50, 0, 75]]
    },
    "scatterers": [{"x": 120, "y": 60, "z": 15, "loss_db": 12}],
    "ground_reflection": {"enabled": true, "loss_db": 6}
  })";
  const Scenario sc = parse_scenario(text);
  CHECK(sc.name == "h75");
  CHECK(sc.seed == 7);
  CHECK(sc.trajectory.type == FlightType::horizontal);
  CHECK(sc.scatterers.scatterers.size() == 2);
  CHECK(sc.scatterers.bs_position[2] == 20.0);
  CHECK_THROWS_AS(parse_scenario("{nope"), ConfigError);
}

TEST_CASE("trajectory validation") {
  FlightTrajectory bad;
  bad.waypoints = {{0.0, 0.0, 0.0, 10.0}, {0.0, 1.0, 0.0, 10.0}};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.waypoints = {{0.0, 0.0, 0.0, -1.0}};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
