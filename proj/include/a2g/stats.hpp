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

#include <optional>
#include <span>
#include <vector>

#include "a2g/airchan.hpp"
#include "a2g/common.hpp"
#include "a2g/distributions.hpp"
#include "a2g/sage.hpp"

namespace a2g {

// Channel statistics over estimate streams: total power, spatial smoothing,
// path-loss regression with shadow residuals, moment-based K factor, RMS
// delay/Doppler spreads, correlation and distribution fitting.

/// Total path power of a snapshot (0 for an empty estimate).
double channel_power(const SnapshotEstimate& est);

struct GeoTaggedPower {
  double t = 0.0;
  double d_m = 0.0;     // horizontal distance to the mast
  double h_m = 0.0;     // height
  double arc_m = 0.0;   // along-track distance, for spatial windows
  double power = 0.0;   // linear
  double power_db() const { return db10(power); }
};

/// Tags each estimate with the platform geometry at its snapshot time.
std::vector<GeoTaggedPower> geo_tag(
    const std::vector<SnapshotEstimate>& estimates,
    const FlightTrajectory& traj, const Vec3& bs_position);

/// Centered moving average in linear power over a spatial window of
/// `window_wavelengths` x (c / carrier_hz) meters along track; edges
/// truncate. Throws ConfigError when the window exceeds the trace extent.
std::vector<double> smooth_power(const std::vector<GeoTaggedPower>& series,
                                 double window_wavelengths, double carrier_hz);

struct FitResult {
  double gamma = 0.0;        // loss slope per decade / 10
  double intercept_db = 0.0; // relative, no absolute calibration
  double residual_std_db = 0.0;
  double r_squared = 0.0;
  std::vector<double> shadow_db; // residual series X
};

/// Ordinary least squares of loss_db on 10*log10(regressor). Requires at
/// least 30 points and a regressor spanning a factor of 2.
FitResult fit_path_loss(std::span<const double> loss_db,
                        std::span<const double> regressor);

struct GammaHeightModel {
  double a = -0.02;
  double b = 3.42;
  double sigma_c = 0.48;
  double mean(double h_m) const { return a * h_m + b; }
  double stddev() const { return sigma_c; }
};

struct KFactorEstimate {
  double k_db = 0.0;
  double gamma_m = 0.0; // Var[P]/E[P]^2
  bool saturated = false;    // near-zero variance, clamped at k_max
  bool rayleigh_like = false; // gamma_m >= 1, reported as K = 0
  double k_linear() const { return undb10(k_db); }
};

/// Moment-based K estimate from unsmoothed linear power samples.
/// Throws ConfigError for windows shorter than 50 samples.
KFactorEstimate k_factor(std::span<const double> power_linear,
                         double k_max_db = 40.0);

/// Power-weighted RMS spread of per-path delays; throws StageError on an
/// empty estimate.
double rms_delay_spread(const SnapshotEstimate& est);
double rms_doppler_spread(const SnapshotEstimate& est);

// Composite per-flight analysis (the `stats` stage).

struct WindowStat {
  double t = 0.0, d_m = 0.0, h_m = 0.0;
  KFactorEstimate k;
  bool k_valid = false;
  int first_index = 0, count = 0;
};

struct FlightStats {
  std::vector<GeoTaggedPower> series;
  std::vector<double> smoothed_db;
  std::vector<double> sigma_tau_s;  // per snapshot; NaN when L = 0
  std::vector<double> sigma_nu_hz;
  /// Absent when the flight is too short for a meaningful regression
  /// (fewer than 30 points or regressor span under a factor of 2).
  std::optional<FitResult> path_loss;
  std::vector<WindowStat> windows;
  // correlations against the flight's geometry variable (d or h)
  double rho_abs_shadow = 0.0;
  double rho_k = 0.0;
  double rho_log_sigma_tau = 0.0;
  double rho_log_sigma_nu = 0.0;
  std::optional<DistFit> shadow_fit;
  std::optional<DistFit> k_fit;
  std::optional<DistFit> log_sigma_tau_fit;
  std::optional<DistFit> log_sigma_nu_fit;
};

struct StatsConfig {
  double smoothing_wavelengths = 20.0;
  double carrier_hz = 2.585e9;
  int k_window_min_samples = 50; // widen 20-wavelength windows to this
  double k_max_db = 40.0;
};

enum class FlightMode { horizontal, vertical };

/// Runs the whole statistics chain on one flight's estimates.
FlightStats analyze_flight(const std::vector<SnapshotEstimate>& estimates,
                           const FlightTrajectory& traj,
                           const Vec3& bs_position, FlightMode mode,
                           const StatsConfig& cfg = {});

} // namespace a2g
