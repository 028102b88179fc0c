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

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "a2g/common.hpp"
#include "a2g/iq.hpp"
#include "a2g/parallel.hpp"

namespace a2g {

// Geometry-driven flight/channel simulator. Produces ground-truth multipath
// tracks for a flight route, renders them onto baseband IQ, and emulates a
// lower capture rate. This is the oracle the receiver chain is tested
// against.

using Vec3 = std::array<double, 3>;

struct Waypoint {
  double t; // s
  double x, y, z; // m
};

enum class FlightType { horizontal, vertical, custom };

struct FlightTrajectory {
  std::vector<Waypoint> waypoints;
  FlightType type = FlightType::custom;

  void validate() const;
  double start_time() const { return waypoints.front().t; }
  double end_time() const { return waypoints.back().t; }
  Vec3 position(double t) const;  // clamped linear interpolation
  Vec3 velocity(double t) const;  // piecewise constant between waypoints
};

struct Scatterer {
  enum class Kind { point, ground_image };
  Kind kind = Kind::point;
  Vec3 pos{0.0, 0.0, 0.0}; // ignored for ground_image
  double loss_db = 0.0;    // interaction loss, >= 0
};

struct ScattererSet {
  std::vector<Scatterer> scatterers;
  Vec3 bs_position{0.0, 0.0, 20.0};
  double carrier_hz = 2.585e9;
  void validate() const;
};

/// One path at one instant: complex amplitude (linear, geometric phase
/// included), delay and Doppler shift.
struct Mpc {
  cplx amplitude{0.0, 0.0};
  double delay_s = 0.0;
  double doppler_hz = 0.0;
  double birth_s = 0.0;
  double death_s = std::numeric_limits<double>::infinity();
};

/// One path's parameter series over the snapshot grid.
struct MpcTrack {
  std::string source; // "los", "scat0", "ground"
  std::vector<cplx> amplitude;
  std::vector<double> delay_s;
  std::vector<double> doppler_hz;
};

struct MpcTrackSet {
  double snapshot_rate_hz = 0.0;
  std::vector<double> times;
  std::vector<MpcTrack> tracks;

  /// Per-snapshot Mpc sets (the SAGE-facing view).
  std::vector<std::vector<Mpc>> snapshots() const;
};

/// Line-of-sight path plus one single-bounce path per scatterer, sampled at
/// `snapshot_rate_hz` over the trajectory's time span. Throws StageError on
/// zero link distance.
MpcTrackSet mpc_tracks(const FlightTrajectory& traj, const ScattererSet& scat,
                       double snapshot_rate_hz);

struct ChannelOptions {
  double max_delay_s = 20e-6;
  int interp_taps = 64; // windowed-sinc fractional delay
  Exec exec = Exec::parallel;
};

/// Renders the tracks onto the trace: fractional delays by band-limited
/// interpolation, Doppler as cumulative phase rotation. Noiseless; compose
/// with add_awgn.
IqTrace apply_channel(const IqTrace& iq, const MpcTrackSet& tracks,
                      const ChannelOptions& opts = {});

/// Complex white Gaussian noise at `snr_db` measured over `occupied_bw_hz`.
IqTrace add_awgn(const IqTrace& iq, double snr_db, double occupied_bw_hz,
                 std::uint64_t seed);

/// Band-limited resampling to an arbitrary target rate. Throws ConfigError
/// if the target rate cannot carry `occupied_bw_hz`.
IqTrace resample(const IqTrace& iq, double target_rate_hz,
                 double occupied_bw_hz = 18e6);

// Scenario file: BS position, trajectory, scatterers, seed.
struct Scenario {
  std::string name;
  FlightTrajectory trajectory;
  ScattererSet scatterers;
  std::uint64_t seed = 1;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

/// Canned routes mirroring the measured campaign layout: horizontal
/// round trips at a given height (out-and-back along +x) and vertical
/// ascents at a given horizontal distance.
Scenario horizontal_scenario(double height_m, double out_distance_m = 500.0,
                             double speed_mps = 6.0);
Scenario vertical_scenario(double distance_m, double top_height_m = 300.0,
                           double speed_mps = 2.5);

} // namespace a2g
