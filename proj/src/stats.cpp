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
#include "a2g/stats.hpp"

#include <algorithm>
#include <cmath>

namespace a2g {

double channel_power(const SnapshotEstimate& est) {
  double p = 0.0;
  for (const auto& path : est.paths) p += path.power();
  return p;
}

std::vector<GeoTaggedPower> geo_tag(
    const std::vector<SnapshotEstimate>& estimates,
    const FlightTrajectory& traj, const Vec3& bs_position) {
  std::vector<GeoTaggedPower> out;
  out.reserve(estimates.size());
  double arc = 0.0;
  Vec3 prev{};
  bool have_prev = false;
  for (const auto& e : estimates) {
    const Vec3 p = traj.position(e.t);
    if (have_prev) {
      const double dx = p[0] - prev[0], dy = p[1] - prev[1], dz = p[2] - prev[2];
      arc += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    prev = p;
    have_prev = true;
    GeoTaggedPower g;
    g.t = e.t;
    g.d_m = std::hypot(p[0] - bs_position[0], p[1] - bs_position[1]);
    g.h_m = p[2];
    g.arc_m = arc;
    g.power = channel_power(e);
    out.push_back(g);
  }
  return out;
}

std::vector<double> smooth_power(const std::vector<GeoTaggedPower>& series,
                                 double window_wavelengths,
                                 double carrier_hz) {
  if (series.empty()) throw ConfigError("smooth_power: empty series");
  const double lambda = kSpeedOfLight / carrier_hz;
  const double half = 0.5 * window_wavelengths * lambda;
  const double extent = series.back().arc_m - series.front().arc_m;
  if (2.0 * half > extent && series.size() > 1)
    throw ConfigError("smooth_power: window exceeds trace extent");
  std::vector<double> out(series.size());
  std::size_t lo = 0, hi = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double c = series[i].arc_m;
    while (hi < series.size() && series[hi].arc_m <= c + half) {
      acc += series[hi].power;
      ++hi;
    }
    while (lo < hi && series[lo].arc_m < c - half) {
      acc -= series[lo].power;
      ++lo;
    }
    out[i] = acc / static_cast<double>(hi - lo);
  }
  return out;
}

FitResult fit_path_loss(std::span<const double> loss_db,
                        std::span<const double> regressor) {
  if (loss_db.size() != regressor.size())
    throw ConfigError("fit_path_loss: length mismatch");
  if (loss_db.size() < 30) throw ConfigError("fit_path_loss: need >= 30 points");
  double rmin = regressor[0], rmax = regressor[0];
  for (double r : regressor) {
    if (r <= 0.0) throw ConfigError("fit_path_loss: non-positive regressor");
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  if (rmax < 2.0 * rmin)
    throw ConfigError("fit_path_loss: regressor spans less than a factor of 2");

  const std::size_t n = loss_db.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 10.0 * std::log10(regressor[i]);
  const double mx = mean_of(x), my = mean_of(loss_db);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (loss_db[i] - my);
    syy += (loss_db[i] - my) * (loss_db[i] - my);
  }
  FitResult fit;
  const double slope = sxy / sxx;
  fit.gamma = slope;
  fit.intercept_db = my - slope * mx;
  fit.shadow_db.resize(n);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fit.shadow_db[i] = loss_db[i] - (slope * x[i] + fit.intercept_db);
    ss_res += fit.shadow_db[i] * fit.shadow_db[i];
  }
  fit.residual_std_db = std::sqrt(ss_res / static_cast<double>(n));
  fit.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

KFactorEstimate k_factor(std::span<const double> power_linear,
                         double k_max_db) {
  if (power_linear.size() < 50)
    throw ConfigError("k_factor: window shorter than 50 samples");
  const double mean = mean_of(power_linear);
  if (mean <= 0.0) throw ConfigError("k_factor: non-positive mean power");
  double var = 0.0;
  for (double p : power_linear) var += (p - mean) * (p - mean);
  var /= static_cast<double>(power_linear.size());
  KFactorEstimate est;
  est.gamma_m = var / (mean * mean);
  if (est.gamma_m >= 1.0) {
    // moment estimator breaks down (Rayleigh-like window)
    est.k_db = 0.0;
    est.rayleigh_like = true;
    return est;
  }
  const double root = std::sqrt(1.0 - est.gamma_m);
  if (1.0 - root < 1e-12) {
    est.k_db = k_max_db;
    est.saturated = true;
    return est;
  }
  const double k_lin = root / (1.0 - root);
  est.k_db = db10(k_lin);
  if (est.k_db > k_max_db) {
    est.k_db = k_max_db;
    est.saturated = true;
  }
  return est;
}

namespace {

double weighted_rms_spread(const SnapshotEstimate& est, bool use_doppler) {
  if (est.paths.empty())
    throw StageError("rms spread: empty estimate (L = 0)");
  // centered two-pass form; the one-pass moment difference cancels badly
  // when the spread is tiny against the mean delay
  double wsum = 0.0, m1 = 0.0;
  for (const auto& p : est.paths) {
    const double w = p.power();
    m1 += w * (use_doppler ? p.doppler_hz : p.delay_s);
    wsum += w;
  }
  m1 /= wsum;
  double var = 0.0;
  for (const auto& p : est.paths) {
    const double v = (use_doppler ? p.doppler_hz : p.delay_s) - m1;
    var += p.power() * v * v;
  }
  return std::sqrt(std::max(0.0, var / wsum));
}

} // namespace

double rms_delay_spread(const SnapshotEstimate& est) {
  return weighted_rms_spread(est, false);
}

double rms_doppler_spread(const SnapshotEstimate& est) {
  return weighted_rms_spread(est, true);
}

FlightStats analyze_flight(const std::vector<SnapshotEstimate>& estimates,
                           const FlightTrajectory& traj,
                           const Vec3& bs_position, FlightMode mode,
                           const StatsConfig& cfg) {
  if (estimates.empty()) throw StageError("analyze_flight: no estimates");
  FlightStats fs;
  fs.series = geo_tag(estimates, traj, bs_position);
  fs.smoothed_db.resize(fs.series.size());
  std::vector<double> smoothed;
  try {
    smoothed = smooth_power(fs.series, cfg.smoothing_wavelengths, cfg.carrier_hz);
  } catch (const ConfigError&) {
    // trace shorter than the window: keep the raw power
    smoothed.resize(fs.series.size());
    for (std::size_t i = 0; i < fs.series.size(); ++i)
      smoothed[i] = fs.series[i].power;
  }
  for (std::size_t i = 0; i < smoothed.size(); ++i)
    fs.smoothed_db[i] = db10(std::max(smoothed[i], 1e-30));

  // per-snapshot spreads
  fs.sigma_tau_s.resize(estimates.size());
  fs.sigma_nu_hz.resize(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i].paths.empty()) {
      fs.sigma_tau_s[i] = std::nan("");
      fs.sigma_nu_hz[i] = std::nan("");
    } else {
      fs.sigma_tau_s[i] = rms_delay_spread(estimates[i]);
      fs.sigma_nu_hz[i] = rms_doppler_spread(estimates[i]);
    }
  }

  // path loss on the smoothed power (loss = -relative power); short runs
  // simply skip the regression
  std::vector<double> loss_db(fs.series.size());
  std::vector<double> reg(fs.series.size());
  for (std::size_t i = 0; i < fs.series.size(); ++i) {
    loss_db[i] = -fs.smoothed_db[i];
    reg[i] = (mode == FlightMode::horizontal) ? fs.series[i].d_m
                                              : fs.series[i].h_m;
    reg[i] = std::max(reg[i], 1e-3);
  }
  try {
    fs.path_loss = fit_path_loss(loss_db, reg);
  } catch (const ConfigError&) {
    fs.path_loss.reset();
  }

  // K-factor windows: 20-wavelength spatial blocks, widened to the minimum
  // sample count the moment estimator needs
  const double lambda = kSpeedOfLight / cfg.carrier_hz;
  const double min_len = cfg.smoothing_wavelengths * lambda;
  std::size_t i = 0;
  while (i < fs.series.size()) {
    std::size_t j = i;
    while (j < fs.series.size() &&
           (fs.series[j].arc_m - fs.series[i].arc_m < min_len ||
            j - i < static_cast<std::size_t>(cfg.k_window_min_samples)))
      ++j;
    if (j > fs.series.size()) break;
    const std::size_t count = j - i;
    if (count < static_cast<std::size_t>(cfg.k_window_min_samples)) break;
    WindowStat w;
    w.first_index = static_cast<int>(i);
    w.count = static_cast<int>(count);
    const std::size_t mid = i + count / 2;
    w.t = fs.series[mid].t;
    w.d_m = fs.series[mid].d_m;
    w.h_m = fs.series[mid].h_m;
    std::vector<double> pw(count);
    for (std::size_t k = 0; k < count; ++k) pw[k] = fs.series[i + k].power;
    try {
      w.k = k_factor(pw, cfg.k_max_db);
      w.k_valid = true;
    } catch (const ConfigError&) {
      w.k_valid = false;
    }
    fs.windows.push_back(w);
    i = j;
  }

  // correlations and distribution fits against the geometry variable
  auto geo_of = [&](std::size_t idx) {
    return (mode == FlightMode::horizontal) ? fs.series[idx].d_m
                                            : fs.series[idx].h_m;
  };
  if (fs.path_loss.has_value()) {
    std::vector<double> g, xs;
    for (std::size_t k = 0; k < fs.series.size(); ++k) {
      g.push_back(geo_of(k));
      xs.push_back(std::fabs(fs.path_loss->shadow_db[k]));
    }
    if (xs.size() >= 2) {
      try {
        fs.rho_abs_shadow = correlation(xs, g);
      } catch (const ConfigError&) {
        fs.rho_abs_shadow = 0.0;
      }
    }
    if (fs.path_loss->shadow_db.size() >= 30)
      fs.shadow_fit =
          fit_distribution(fs.path_loss->shadow_db, DistFamily::normal);
  }
  {
    std::vector<double> g, ks;
    for (const auto& w : fs.windows) {
      if (!w.k_valid) continue;
      g.push_back((mode == FlightMode::horizontal) ? w.d_m : w.h_m);
      ks.push_back(w.k.k_db);
    }
    if (ks.size() >= 2) {
      try {
        fs.rho_k = correlation(ks, g);
      } catch (const ConfigError&) {
        fs.rho_k = 0.0;
      }
    }
    if (ks.size() >= 30) fs.k_fit = fit_distribution(ks, DistFamily::normal);
  }
  {
    std::vector<double> g, lt, ln, gn;
    for (std::size_t k = 0; k < estimates.size(); ++k) {
      if (std::isnan(fs.sigma_tau_s[k]) || fs.sigma_tau_s[k] <= 0.0) continue;
      g.push_back(geo_of(k));
      lt.push_back(std::log10(fs.sigma_tau_s[k]));
      if (fs.sigma_nu_hz[k] > 0.0) {
        gn.push_back(geo_of(k));
        ln.push_back(std::log10(fs.sigma_nu_hz[k]));
      }
    }
    if (lt.size() >= 2) {
      try {
        fs.rho_log_sigma_tau = correlation(lt, g);
      } catch (const ConfigError&) {
        fs.rho_log_sigma_tau = 0.0;
      }
    }
    if (ln.size() >= 2) {
      try {
        fs.rho_log_sigma_nu = correlation(ln, gn);
      } catch (const ConfigError&) {
        fs.rho_log_sigma_nu = 0.0;
      }
    }
    if (lt.size() >= 30)
      fs.log_sigma_tau_fit = fit_distribution(lt, DistFamily::normal);
    if (ln.size() >= 30)
      fs.log_sigma_nu_fit = fit_distribution(ln, DistFamily::extreme_value);
  }
  return fs;
}

} // namespace a2g
