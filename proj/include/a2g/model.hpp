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

#include "a2g/airchan.hpp"
#include "a2g/distributions.hpp"
#include "a2g/sage.hpp"
#include "a2g/stats.hpp"

namespace a2g {

// Empirical stochastic model: a parameter bank of per-regime marginals with
// geometry correlations, a correlated draw generator (Gaussian copula), an
// MPC-set synthesizer that realizes drawn statistics exactly, and a
// closed-loop driver that feeds synthetic flights back through the
// statistics chain.

struct Marginal {
  DistFamily family = DistFamily::normal;
  double p1 = 0.0;  // mean (normal) or location (extreme value)
  double p2 = 1.0;  // std (normal) or scale (extreme value)
  double rho = 0.0; // target rank correlation against the geometry variable
  bool correlate_abs = false; // couple |value| (shadow-fading rows)

  double quantile(double u) const;
  double analytic_mean() const;
  double analytic_std() const;
};

/// One statistic's bank: regimes keyed by the selector (height for the
/// horizontal bank, distance for the vertical one).
struct RegimeRow {
  double lo = 0.0, hi = 0.0; // selector interval, [lo, hi)
  Marginal marginal;
};

struct ModelParams {
  int version = 1;

  // horizontal bank (selector: flight height, m)
  std::vector<std::pair<double, double>> gamma_h_table;
  GammaHeightModel gamma_h_linear;
  std::vector<RegimeRow> shadow_h, k_h, log_sigma_tau_h, log_sigma_nu_h;
  double h_lo = 15.0, h_hi = 100.0;  // modeled height range
  double d_lo = 50.0, d_hi = 550.0;  // uniform distance draw

  // vertical bank (selector: horizontal distance, m)
  std::vector<std::pair<double, double>> gamma_d_table;
  std::vector<RegimeRow> shadow_d, k_d, log_sigma_tau_d, log_sigma_nu_d;
  double vd_lo = 100.0, vd_hi = 500.0; // modeled distance range
  double vh_lo = 10.0, vh_hi = 300.0;  // uniform height draw

  static ModelParams defaults();
  static ModelParams from_json(const std::string& text);
  static ModelParams load(const std::string& path);
  std::string to_json() const;

  double gamma_at(FlightMode mode, double selector, bool use_linear = false,
                  double c_draw = 0.0) const;
  const Marginal& row(FlightMode mode, const std::string& stat,
                      double selector) const;
};

struct ModelDraw {
  double selector = 0.0;  // the fixed regime key (h or d)
  double geo = 0.0;       // the drawn geometry variable (d or h)
  double gamma = 0.0;
  double shadow_db = 0.0;
  double k_db = 0.0;
  double sigma_tau_s = 0.0;
  double sigma_nu_hz = 0.0;
  double rel_gain_db = 0.0; // -10 gamma log10(geo/geo_ref) + shadow
};

/// n correlated draws for one regime selector. Marginals are preserved
/// exactly; rank correlation against the geometry variable hits each row's
/// rho via the copula transform. Throws ConfigError when the selector lies
/// outside the modeled range and extrapolation is not allowed.
std::vector<ModelDraw> draw_statistics(FlightMode mode, double selector,
                                       int n, std::uint64_t seed,
                                       const ModelParams& params = ModelParams::defaults(),
                                       bool allow_extrapolation = false);

/// Realizes one draw as a dominant path plus L-1 scattered paths: the
/// dominant/scattered power ratio equals K, the power-weighted spreads
/// equal the drawn sigmas after deterministic rescaling, and the total
/// power matches the drawn relative gain. Throws StageError when the
/// targets are infeasible for the requested L.
std::vector<Mpc> synthesize_mpcs(const ModelDraw& draw, int n_paths,
                                 std::uint64_t seed = 1);

struct RegimeReport {
  std::string stat;
  double selector = 0.0;
  double mean_cfg = 0.0, mean_rec = 0.0;
  double rho_cfg = 0.0, rho_rec = 0.0;
};

struct RoundtripReport {
  FlightMode mode;
  double selector = 0.0;
  int n_windows = 0;
  double gamma_cfg = 0.0, gamma_rec = 0.0;
  double shadow_std_cfg = 0.0, shadow_std_rec = 0.0;
  double shadow_rho_cfg = 0.0, shadow_rho_rec = 0.0;
  std::vector<RegimeReport> stats;
  std::string to_json() const;
};

struct RoundtripConfig {
  int n_windows = 400;
  int snapshots_per_window = 200;
  int paths_per_snapshot = 8;
  std::uint64_t seed = 1;
};

/// Model-to-statistics closed loop for one regime selector: draw, build
/// per-snapshot MPC sets with a fading dominant path, run the statistics
/// operations on the synthetic windows, report recovered against
/// configured values.
RoundtripReport model_roundtrip(FlightMode mode, double selector,
                                const RoundtripConfig& cfg = {},
                                const ModelParams& params = ModelParams::defaults());

void write_draws_csv(const std::string& path,
                     const std::vector<ModelDraw>& draws);

} // namespace a2g
