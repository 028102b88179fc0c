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
#include "a2g/airchan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "a2g/rng.hpp"
#include "json.hpp"

namespace a2g {

namespace {

double dist(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// d/dt |p(t) - s| for a fixed point s and velocity v at p.
double range_rate(const Vec3& p, const Vec3& v, const Vec3& s) {
  const double d = dist(p, s);
  if (d == 0.0) return 0.0;
  return ((p[0] - s[0]) * v[0] + (p[1] - s[1]) * v[1] + (p[2] - s[2]) * v[2]) / d;
}

double sinc(double x) {
  if (std::fabs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

} // namespace

void FlightTrajectory::validate() const {
  if (waypoints.size() < 1) throw ConfigError("trajectory: no waypoints");
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const auto& w = waypoints[i];
    if (!std::isfinite(w.t) || !std::isfinite(w.x) || !std::isfinite(w.y) ||
        !std::isfinite(w.z))
      throw ConfigError("trajectory: non-finite waypoint");
    if (w.z < 0.0) throw ConfigError("trajectory: negative height");
    if (i > 0 && w.t <= waypoints[i - 1].t)
      throw ConfigError("trajectory: times not strictly increasing");
  }
}

Vec3 FlightTrajectory::position(double t) const {
  if (waypoints.empty()) throw ConfigError("trajectory: no waypoints");
  if (t <= waypoints.front().t)
    return {waypoints.front().x, waypoints.front().y, waypoints.front().z};
  if (t >= waypoints.back().t)
    return {waypoints.back().x, waypoints.back().y, waypoints.back().z};
  std::size_t i = 1;
  while (waypoints[i].t < t) ++i;
  const auto& a = waypoints[i - 1];
  const auto& b = waypoints[i];
  const double f = (t - a.t) / (b.t - a.t);
  return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y), a.z + f * (b.z - a.z)};
}

Vec3 FlightTrajectory::velocity(double t) const {
  if (waypoints.size() < 2) return {0.0, 0.0, 0.0};
  if (t < waypoints.front().t || t >= waypoints.back().t) return {0.0, 0.0, 0.0};
  std::size_t i = 1;
  while (waypoints[i].t <= t) ++i;
  const auto& a = waypoints[i - 1];
  const auto& b = waypoints[i];
  const double dt = b.t - a.t;
  return {(b.x - a.x) / dt, (b.y - a.y) / dt, (b.z - a.z) / dt};
}

void ScattererSet::validate() const {
  for (const auto& s : scatterers)
    if (s.loss_db < 0.0) throw ConfigError("scatterer: negative loss");
  if (carrier_hz <= 0.0) throw ConfigError("scatterer set: bad carrier");
}

std::vector<std::vector<Mpc>> MpcTrackSet::snapshots() const {
  std::vector<std::vector<Mpc>> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out[k].reserve(tracks.size());
    for (const auto& tr : tracks) {
      Mpc m;
      m.amplitude = tr.amplitude[k];
      m.delay_s = tr.delay_s[k];
      m.doppler_hz = tr.doppler_hz[k];
      m.birth_s = times.front();
      out[k].push_back(m);
    }
  }
  return out;
}

MpcTrackSet mpc_tracks(const FlightTrajectory& traj, const ScattererSet& scat,
                       double snapshot_rate_hz) {
  traj.validate();
  scat.validate();
  if (snapshot_rate_hz <= 0.0) throw ConfigError("mpc_tracks: bad rate");

  const double lambda = kSpeedOfLight / scat.carrier_hz;
  const double t0 = traj.start_time();
  const double t1 = traj.end_time();
  const int n = std::max(1, static_cast<int>(std::floor((t1 - t0) * snapshot_rate_hz)) + 1);

  MpcTrackSet set;
  set.snapshot_rate_hz = snapshot_rate_hz;
  set.times.resize(n);
  for (int k = 0; k < n; ++k) set.times[k] = t0 + k / snapshot_rate_hz;

  // reflector list: LoS pseudo-entry first, then scatterers
  struct Leg {
    std::string name;
    bool los;
    Vec3 point;     // scattering point, or BS image for ground bounce
    double loss_db; // 0 for LoS
    bool image;     // single effective point (mirror source)
  };
  std::vector<Leg> legs;
  legs.push_back({"los", true, scat.bs_position, 0.0, false});
  int si = 0;
  for (const auto& s : scat.scatterers) {
    if (s.kind == Scatterer::Kind::ground_image) {
      Vec3 img = scat.bs_position;
      img[2] = -img[2];
      legs.push_back({"ground", false, img, s.loss_db, true});
    } else {
      legs.push_back({"scat" + std::to_string(si), false, s.pos, s.loss_db, false});
    }
    ++si;
  }

  for (const auto& leg : legs) {
    MpcTrack tr;
    tr.source = leg.name;
    tr.amplitude.resize(n);
    tr.delay_s.resize(n);
    tr.doppler_hz.resize(n);
    for (int k = 0; k < n; ++k) {
      const double t = set.times[k];
      const Vec3 p = traj.position(t);
      const Vec3 v = traj.velocity(t);
      double total_len, rate;
      if (leg.los || leg.image) {
        const double d = dist(p, leg.point);
        if (d == 0.0) throw StageError("mpc_tracks: zero link distance");
        total_len = d;
        rate = range_rate(p, v, leg.point);
      } else {
        const double d_fixed = dist(scat.bs_position, leg.point);
        const double d_move = dist(p, leg.point);
        if (d_move == 0.0) throw StageError("mpc_tracks: zero link distance");
        total_len = d_fixed + d_move;
        rate = range_rate(p, v, leg.point);
      }
      const double tau = total_len / kSpeedOfLight;
      const double gain =
          lambda / (4.0 * kPi * total_len) * std::pow(10.0, -leg.loss_db / 20.0);
      tr.delay_s[k] = tau;
      tr.doppler_hz[k] = -rate / lambda;
      tr.amplitude[k] = std::polar(gain, -kTwoPi * scat.carrier_hz * tau);
    }
    set.tracks.push_back(std::move(tr));
  }
  return set;
}

namespace {

// Per-track cumulative Doppler phase at snapshot times (trapezoid rule);
// lets blocks evaluate the phase integral independently.
std::vector<double> phase_prefix(const MpcTrack& tr,
                                 const std::vector<double>& times) {
  std::vector<double> phi(times.size(), 0.0);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double dt = times[k] - times[k - 1];
    phi[k] = phi[k - 1] +
             kPi * (tr.doppler_hz[k - 1] + tr.doppler_hz[k]) * dt; // 2π·avg·dt
  }
  return phi;
}

struct TrackSampler {
  const MpcTrack* tr;
  const std::vector<double>* times;
  std::vector<double> phi;
  double base_phase;

  /// (magnitude, phase, delay) at absolute time t. Parameters hold their
  /// boundary value outside the snapshot span; the Doppler phase keeps
  /// integrating with the boundary rate.
  void at(double t, double& mag, double& phase, double& delay) const {
    const auto& ts = *times;
    const std::size_t last = ts.size() - 1;
    if (t <= ts.front() || last == 0) {
      mag = std::abs(tr->amplitude.front());
      delay = tr->delay_s.front();
      phase = base_phase + kTwoPi * tr->doppler_hz.front() * (t - ts.front());
      return;
    }
    if (t >= ts.back()) {
      mag = std::abs(tr->amplitude[last]);
      delay = tr->delay_s[last];
      phase = base_phase + phi[last] +
              kTwoPi * tr->doppler_hz[last] * (t - ts.back());
      return;
    }
    // uniform snapshot grid
    const double step = ts[1] - ts[0];
    std::size_t k = std::min(static_cast<std::size_t>((t - ts[0]) / step), last - 1);
    if (ts[k] > t && k > 0) --k;
    if (ts[k + 1] < t) ++k;
    const double f = (t - ts[k]) / (ts[k + 1] - ts[k]);
    mag = (1.0 - f) * std::abs(tr->amplitude[k]) +
          f * std::abs(tr->amplitude[k + 1]);
    delay = (1.0 - f) * tr->delay_s[k] + f * tr->delay_s[k + 1];
    const double nu0 = tr->doppler_hz[k];
    const double nu = (1.0 - f) * nu0 + f * tr->doppler_hz[k + 1];
    // integral of the linearly interpolated Doppler within the segment
    phase = base_phase + phi[k] + kPi * (nu0 + nu) * (t - ts[k]);
  }
};

} // namespace

IqTrace apply_channel(const IqTrace& iq, const MpcTrackSet& tracks,
                      const ChannelOptions& opts) {
  if (tracks.tracks.empty() || tracks.times.empty())
    throw ConfigError("apply_channel: empty track set");
  const double fs = iq.sample_rate_hz;
  if (fs <= 0.0) throw ConfigError("apply_channel: trace has no sample rate");
  for (const auto& tr : tracks.tracks)
    for (double d : tr.delay_s) {
      if (!std::isfinite(d)) throw ConfigError("apply_channel: non-finite delay");
      if (d > opts.max_delay_s)
        throw ConfigError("apply_channel: delay exceeds configured maximum");
    }

  std::vector<TrackSampler> samplers;
  samplers.reserve(tracks.tracks.size());
  for (const auto& tr : tracks.tracks) {
    TrackSampler s;
    s.tr = &tr;
    s.times = &tracks.times;
    s.phi = phase_prefix(tr, tracks.times);
    s.base_phase = std::arg(tr.amplitude.front());
    samplers.push_back(std::move(s));
  }

  const auto& x = iq.samples;
  const std::int64_t n_samp = static_cast<std::int64_t>(x.size());
  IqTrace out = iq;
  auto& y = out.samples;

  const int taps = opts.interp_taps;
  const int half = taps / 2;

  auto render = [&](std::int64_t n) {
    const double t = iq.start_time_s + static_cast<double>(n) / fs;
    cplx acc = 0.0;
    for (const auto& s : samplers) {
      double mag, phase, delay;
      s.at(t, mag, phase, delay);
      const double pos = static_cast<double>(n) - delay * fs;
      const auto i0 = static_cast<std::int64_t>(std::floor(pos));
      const double frac = pos - static_cast<double>(i0);
      // windowed-sinc fractional delay around pos
      cplx v = 0.0;
      for (int m = -half + 1; m <= half; ++m) {
        const std::int64_t idx = i0 + m;
        if (idx < 0 || idx >= n_samp) continue;
        const double u = static_cast<double>(m) - frac;
        const double w = 0.5 + 0.5 * std::cos(kPi * u / half); // Hann
        v += x[idx] * (sinc(u) * w);
      }
      acc += std::polar(mag, phase) * v;
    }
    y[n] = acc;
  };

  if (opts.exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t n = 0; n < n_samp; ++n) render(n);
  } else {
    for (std::int64_t n = 0; n < n_samp; ++n) render(n);
  }
  return out;
}

IqTrace add_awgn(const IqTrace& iq, double snr_db, double occupied_bw_hz,
                 std::uint64_t seed) {
  if (occupied_bw_hz <= 0.0 || occupied_bw_hz > iq.sample_rate_hz)
    throw ConfigError("add_awgn: bad occupied bandwidth");
  const double p_sig = power_sum(iq.samples) / std::max<std::size_t>(1, iq.samples.size());
  const double p_noise_band = p_sig / undb10(snr_db);
  // white across the whole Nyquist span; requested SNR holds in-band
  const double var = p_noise_band * iq.sample_rate_hz / occupied_bw_hz;
  IqTrace out = iq;
  Rng rng(seed);
  for (auto& v : out.samples) v += rng.cnormal(var);
  return out;
}

IqTrace resample(const IqTrace& iq, double target_rate_hz,
                 double occupied_bw_hz) {
  const double fs_in = iq.sample_rate_hz;
  if (fs_in <= 0.0) throw ConfigError("resample: trace has no sample rate");
  if (target_rate_hz < occupied_bw_hz)
    throw ConfigError("resample: target rate below occupied bandwidth");
  if (target_rate_hz == fs_in) return iq;

  const double ratio = fs_in / target_rate_hz;
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(iq.samples.size()) / ratio));
  // anti-alias / anti-image cutoff at the narrower Nyquist
  const double cutoff = 0.5 * std::min(fs_in, target_rate_hz) / fs_in; // cycles/sample
  const int taps = 128;
  const int half = taps / 2;
  const double gain = 2.0 * cutoff;

  IqTrace out = iq;
  out.sample_rate_hz = target_rate_hz;
  out.samples.assign(n_out, cplx{0.0, 0.0});
  const auto n_in = static_cast<std::int64_t>(iq.samples.size());

#pragma omp parallel for schedule(static)
  for (std::int64_t n = 0; n < static_cast<std::int64_t>(n_out); ++n) {
    const double pos = static_cast<double>(n) * ratio;
    const auto i0 = static_cast<std::int64_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i0);
    cplx acc = 0.0;
    for (int m = -half + 1; m <= half; ++m) {
      const std::int64_t idx = i0 + m;
      if (idx < 0 || idx >= n_in) continue;
      const double u = static_cast<double>(m) - frac;
      const double arg = u / half;
      // Blackman window
      const double w =
          0.42 + 0.5 * std::cos(kPi * arg) + 0.08 * std::cos(2.0 * kPi * arg);
      acc += iq.samples[idx] * (gain * sinc(2.0 * cutoff * u) * w);
    }
    out.samples[n] = acc;
  }
  return out;
}

namespace {

FlightTrajectory traj_from_json(const nlohmann::json& j) {
  FlightTrajectory t;
  const std::string type = j.value("type", "custom");
  if (type == "horizontal") t.type = FlightType::horizontal;
  else if (type == "vertical") t.type = FlightType::vertical;
  else t.type = FlightType::custom;
  for (const auto& w : j.at("waypoints"))
    t.waypoints.push_back(
        {w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>(),
         w.at(3).get<double>()});
  t.validate();
  return t;
}

} // namespace

Scenario parse_scenario(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario: bad JSON: " + std::string(e.what()));
  }
  Scenario sc;
  sc.name = j.value("name", "scenario");
  sc.seed = j.value("seed", 1ull);
  sc.trajectory = traj_from_json(j.at("trajectory"));
  auto& set = sc.scatterers;
  if (j.contains("bs_position")) {
    const auto& b = j["bs_position"];
    set.bs_position = {b.at(0).get<double>(), b.at(1).get<double>(),
                       b.at(2).get<double>()};
  }
  set.carrier_hz = j.value("carrier_hz", 2.585e9);
  if (j.contains("scatterers")) {
    for (const auto& s : j["scatterers"]) {
      Scatterer sc2;
      sc2.pos = {s.at("x").get<double>(), s.at("y").get<double>(),
                 s.at("z").get<double>()};
      sc2.loss_db = s.value("loss_db", 0.0);
      set.scatterers.push_back(sc2);
    }
  }
  if (j.contains("ground_reflection") &&
      j["ground_reflection"].value("enabled", false)) {
    Scatterer g;
    g.kind = Scatterer::Kind::ground_image;
    g.loss_db = j["ground_reflection"].value("loss_db", 3.0);
    set.scatterers.push_back(g);
  }
  set.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("scenario: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return parse_scenario(text);
}

Scenario horizontal_scenario(double height_m, double out_distance_m,
                             double speed_mps) {
  Scenario sc;
  sc.name = "horizontal" + std::to_string(static_cast<int>(height_m));
  const double t_leg = out_distance_m / speed_mps;
  // route starts 50 m from the mast along +x and flies outward, then back
  const double x0 = 50.0;
  sc.trajectory.type = FlightType::horizontal;
  sc.trajectory.waypoints = {
      {0.0, x0, 0.0, height_m},
      {t_leg, x0 + out_distance_m, 0.0, height_m},
      {2.0 * t_leg, x0, 0.0, height_m},
  };
  sc.scatterers.bs_position = {0.0, 0.0, 20.0};
  Scatterer g;
  g.kind = Scatterer::Kind::ground_image;
  g.loss_db = 6.0;
  sc.scatterers.scatterers.push_back(g);
  // two building-like reflectors near the first leg
  sc.scatterers.scatterers.push_back(
      {Scatterer::Kind::point, {120.0, 60.0, 15.0}, 12.0});
  sc.scatterers.scatterers.push_back(
      {Scatterer::Kind::point, {200.0, -80.0, 18.0}, 15.0});
  return sc;
}

Scenario vertical_scenario(double distance_m, double top_height_m,
                           double speed_mps) {
  Scenario sc;
  sc.name = "vertical" + std::to_string(static_cast<int>(distance_m));
  const double t_top = top_height_m / speed_mps;
  sc.trajectory.type = FlightType::vertical;
  sc.trajectory.waypoints = {
      {0.0, distance_m, 0.0, 1.0},
      {t_top, distance_m, 0.0, 1.0 + top_height_m},
  };
  sc.scatterers.bs_position = {0.0, 0.0, 20.0};
  Scatterer g;
  g.kind = Scatterer::Kind::ground_image;
  g.loss_db = 6.0;
  sc.scatterers.scatterers.push_back(g);
  sc.scatterers.scatterers.push_back(
      {Scatterer::Kind::point, {60.0, 40.0, 12.0}, 10.0});
  return sc;
}

} // namespace a2g
