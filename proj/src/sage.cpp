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
#include "a2g/sage.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "a2g/fft.hpp"
#include "json.hpp"

namespace a2g {

double estimate_noise_floor(const CirSnapshot& snap, double margin_db,
                            double tail_fraction) {
  int used = 0;
  std::vector<double> pdp;
  for (const auto& c : snap.cirs) {
    if (!c.valid) continue;
    if (pdp.empty()) pdp.assign(c.taps.size(), 0.0);
    for (std::size_t g = 0; g < c.taps.size(); ++g)
      pdp[g] += std::norm(c.taps[g]);
    ++used;
  }
  if (used == 0) throw StageError("estimate_noise_floor: all CIRs invalid");
  for (auto& v : pdp) v /= used;
  const auto k = static_cast<std::size_t>(pdp.size() * (1.0 - tail_fraction));
  if (k >= pdp.size())
    throw ConfigError("estimate_noise_floor: tail fraction too small");
  double tail = 0.0;
  for (std::size_t g = k; g < pdp.size(); ++g) tail += pdp[g];
  tail /= static_cast<double>(pdp.size() - k);
  // keep a finite floor for noiseless snapshots
  const double tiny = 1e-300;
  return 10.0 * std::log10(std::max(tail, tiny)) + margin_db;
}

namespace {

struct Path {
  cplx amp{0.0, 0.0};
  double tau = 0.0;
  double nu = 0.0;
};

// Frequency(lattice) x time working set for one snapshot.
struct Workspace {
  int n_tones = 0; // K
  int n_cirs = 0;  // M
  double df = 0.0; // lattice spacing, 1/span
  double span = 0.0;
  std::vector<double> t; // CIR times relative to snapshot start
  CVec y;                // K*M observation, k-major
  CVec recon;            // running sum of path signals
  int grid = 0;          // delay grid points

  std::size_t cells() const { return y.size(); }

  cplx& Y(int k, int m) { return y[static_cast<std::size_t>(k) * n_cirs + m]; }

  /// s_{k,m} of one path.
  CVec signal(const Path& p) const {
    CVec s(cells());
    const cplx ur = std::polar(1.0, -kTwoPi * df * p.tau);
    CVec vm(n_cirs);
    for (int m = 0; m < n_cirs; ++m)
      vm[m] = std::polar(1.0, kTwoPi * p.nu * t[m]);
    cplx uk{1.0, 0.0};
    for (int k = 0; k < n_tones; ++k) {
      for (int m = 0; m < n_cirs; ++m)
        s[static_cast<std::size_t>(k) * n_cirs + m] = p.amp * uk * vm[m];
      uk *= ur;
    }
    return s;
  }
};

/// z(tau, nu) = sum_{k,m} X_{k,m} e^{+j2pi df k tau} e^{-j2pi nu t_m};
/// |z|^2 is the matched-filter objective, alpha_hat = z / (K M).
cplx objective_z(const Workspace& w, const CVec& x, double tau, double nu) {
  const cplx ur = std::polar(1.0, kTwoPi * w.df * tau);
  CVec vm(w.n_cirs);
  for (int m = 0; m < w.n_cirs; ++m)
    vm[m] = std::polar(1.0, -kTwoPi * nu * w.t[m]);
  cplx z = 0.0;
  cplx uk{1.0, 0.0};
  for (int k = 0; k < w.n_tones; ++k) {
    cplx bk = 0.0;
    for (int m = 0; m < w.n_cirs; ++m)
      bk += x[static_cast<std::size_t>(k) * w.n_cirs + m] * vm[m];
    z += bk * uk;
    uk *= ur;
  }
  return z;
}

/// Parabolic vertex around (x1, y1) given neighbors at x0, x2 (equal
/// spacing h); falls back to x1 when the curvature is not concave.
double parabolic_vertex(double x1, double h, double y0, double y1, double y2) {
  const double denom = y0 - 2.0 * y1 + y2;
  if (denom >= 0.0) return x1;
  double off = 0.5 * (y0 - y2) / denom;
  off = std::clamp(off, -0.5, 0.5);
  return x1 + off * h;
}

double wrap_delay(double tau, double span) {
  tau = std::fmod(tau, span);
  if (tau < 0.0) tau += span;
  return tau;
}

/// Delay search: coarse grid by zero-padded inverse transform of the
/// time-combined tones, then parabolic refinement plus a short exact
/// polish. Returns (tau, |z|^2 at tau).
std::pair<double, double> search_delay(const Workspace& w, const CVec& x,
                                       double nu) {
  CVec b(w.grid, cplx{0.0, 0.0});
  CVec vm(w.n_cirs);
  for (int m = 0; m < w.n_cirs; ++m)
    vm[m] = std::polar(1.0, -kTwoPi * nu * w.t[m]);
  for (int k = 0; k < w.n_tones; ++k) {
    cplx bk = 0.0;
    for (int m = 0; m < w.n_cirs; ++m)
      bk += x[static_cast<std::size_t>(k) * w.n_cirs + m] * vm[m];
    b[k] = bk;
  }
  const CVec zg = ifft(b); // z(tau_g) up to the 1/G scale
  int g_best = 0;
  double p_best = 0.0;
  for (int g = 0; g < w.grid; ++g) {
    const double p = std::norm(zg[g]);
    if (p > p_best) {
      p_best = p;
      g_best = g;
    }
  }
  const double step = w.span / w.grid;
  const double y0 = std::norm(zg[(g_best + w.grid - 1) % w.grid]);
  const double y2 = std::norm(zg[(g_best + 1) % w.grid]);
  double tau = parabolic_vertex(g_best * step, step, y0, p_best, y2);
  tau = wrap_delay(tau, w.span);

  // exact polish: shrink a bracket of one grid step around the candidate
  double best_tau = tau;
  double best_p = std::norm(objective_z(w, x, tau, nu));
  double lo = tau - 0.5 * step, hi = tau + 0.5 * step;
  for (int it = 0; it < 12; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double p1 = std::norm(objective_z(w, x, wrap_delay(m1, w.span), nu));
    const double p2 = std::norm(objective_z(w, x, wrap_delay(m2, w.span), nu));
    if (p1 > best_p) {
      best_p = p1;
      best_tau = wrap_delay(m1, w.span);
    }
    if (p2 > best_p) {
      best_p = p2;
      best_tau = wrap_delay(m2, w.span);
    }
    if (p1 < p2)
      lo = m1;
    else
      hi = m2;
  }
  return {best_tau, best_p};
}

/// Doppler search at fixed delay: uniform grid, parabolic refinement,
/// exact polish, clamped to +-nu_max.
std::pair<double, double> search_doppler(const Workspace& w, const CVec& x,
                                         double tau, double step,
                                         double nu_max) {
  CVec d(w.n_cirs, cplx{0.0, 0.0});
  const cplx ur = std::polar(1.0, kTwoPi * w.df * tau);
  cplx uk{1.0, 0.0};
  for (int k = 0; k < w.n_tones; ++k) {
    for (int m = 0; m < w.n_cirs; ++m)
      d[m] += x[static_cast<std::size_t>(k) * w.n_cirs + m] * uk;
    uk *= ur;
  }
  auto zp = [&](double nu) {
    cplx z = 0.0;
    for (int m = 0; m < w.n_cirs; ++m)
      z += d[m] * std::polar(1.0, -kTwoPi * nu * w.t[m]);
    return std::norm(z);
  };
  const int n_pts = static_cast<int>(std::floor(2.0 * nu_max / step)) + 1;
  int best_i = 0;
  double best_p = -1.0;
  for (int i = 0; i < n_pts; ++i) {
    const double p = zp(-nu_max + i * step);
    if (p > best_p) {
      best_p = p;
      best_i = i;
    }
  }
  double nu = -nu_max + best_i * step;
  if (best_i > 0 && best_i + 1 < n_pts) {
    const double y0 = zp(nu - step), y2 = zp(nu + step);
    nu = parabolic_vertex(nu, step, y0, best_p, y2);
  }
  double best_nu = std::clamp(nu, -nu_max, nu_max);
  best_p = zp(best_nu);
  double lo = std::max(best_nu - 0.5 * step, -nu_max);
  double hi = std::min(best_nu + 0.5 * step, nu_max);
  for (int it = 0; it < 10; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double p1 = zp(m1);
    const double p2 = zp(m2);
    if (p1 > best_p) {
      best_p = p1;
      best_nu = m1;
    }
    if (p2 > best_p) {
      best_p = p2;
      best_nu = m2;
    }
    if (p1 < p2)
      lo = m1;
    else
      hi = m2;
  }
  return {best_nu, best_p};
}

/// One coordinate update (tau -> nu -> alpha) against complete data x.
/// Keeps the previous parameters when they score better (EM safeguard).
Path update_path(const Workspace& w, const CVec& x, const Path& prev,
                 const SageConfig& cfg, double nu_max) {
  auto [tau, p_tau] = search_delay(w, x, prev.nu);
  auto [nu, p_nu] = search_doppler(w, x, tau, cfg.doppler_step_hz, nu_max);
  double best_tau = tau, best_nu = nu, best_p = p_nu;
  const double p_prev = std::norm(objective_z(w, x, prev.tau, prev.nu));
  if (p_prev > best_p) {
    best_tau = prev.tau;
    best_nu = prev.nu;
    best_p = p_prev;
  }
  Path out;
  out.tau = best_tau;
  out.nu = best_nu;
  out.amp = objective_z(w, x, best_tau, best_nu) /
            static_cast<double>(w.cells());
  return out;
}

/// Successive cancellation: peel `count` paths off the residual.
std::vector<Path> sic_init(Workspace& w, int count, const SageConfig& cfg,
                           double nu_max) {
  std::vector<Path> paths;
  w.recon.assign(w.cells(), cplx{0.0, 0.0});
  CVec x(w.cells());
  // coarse Doppler sweep wide enough to keep a fast path from washing out
  const double coarse = (w.t.back() > 0.0) ? 0.5 / w.t.back() : nu_max;
  for (int p = 0; p < count; ++p) {
    for (std::size_t i = 0; i < w.cells(); ++i) x[i] = w.y[i] - w.recon[i];
    double best_p = -1.0;
    Path cand;
    for (double nu = -nu_max; nu <= nu_max + 1e-9; nu += coarse) {
      auto [tau, pw] = search_delay(w, x, nu);
      if (pw > best_p) {
        best_p = pw;
        cand.tau = tau;
        cand.nu = nu;
      }
    }
    auto [nu_f, p_f] = search_doppler(w, x, cand.tau, cfg.doppler_step_hz, nu_max);
    cand.nu = nu_f;
    auto [tau_f, p_t] = search_delay(w, x, cand.nu);
    cand.tau = tau_f;
    cand.amp = objective_z(w, x, cand.tau, cand.nu) /
               static_cast<double>(w.cells());
    paths.push_back(cand);
    const CVec s = w.signal(cand);
    for (std::size_t i = 0; i < w.cells(); ++i) w.recon[i] += s[i];
  }
  return paths;
}

double residual_energy(const Workspace& w) {
  double e = 0.0;
  for (std::size_t i = 0; i < w.cells(); ++i) e += std::norm(w.y[i] - w.recon[i]);
  return e;
}

/// Full EM sweeps over all paths; returns the residual after each sweep.
std::vector<double> em_sweeps(Workspace& w, std::vector<Path>& paths,
                              int n_sweeps, const SageConfig& cfg,
                              double nu_max) {
  std::vector<double> history;
  CVec x(w.cells());
  for (int it = 0; it < n_sweeps; ++it) {
    // strongest first
    std::vector<std::size_t> order(paths.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::norm(paths[a].amp) > std::norm(paths[b].amp);
    });
    for (std::size_t oi : order) {
      Path& p = paths[oi];
      const CVec s_old = w.signal(p);
      for (std::size_t i = 0; i < w.cells(); ++i)
        x[i] = w.y[i] - w.recon[i] + s_old[i];
      const Path updated = update_path(w, x, p, cfg, nu_max);
      const CVec s_new = w.signal(updated);
      for (std::size_t i = 0; i < w.cells(); ++i)
        w.recon[i] += s_new[i] - s_old[i];
      p = updated;
    }
    // rebuild the reconstruction to keep incremental drift out of the
    // recorded residuals
    w.recon.assign(w.cells(), cplx{0.0, 0.0});
    for (const auto& p : paths) {
      const CVec s = w.signal(p);
      for (std::size_t i = 0; i < w.cells(); ++i) w.recon[i] += s[i];
    }
    history.push_back(residual_energy(w));
  }
  return history;
}

} // namespace

SnapshotEstimate sage_snapshot(const CirSnapshot& snap, const SageConfig& cfg) {
  if (snap.cirs.size() < 2)
    throw ConfigError("sage_snapshot: need at least 2 CIRs");
  for (const auto& c : snap.cirs)
    if (!c.valid) throw StageError("sage_snapshot: snapshot has invalid CIRs");
  if (snap.spacing_s <= 0.0 || snap.span_s <= 0.0)
    throw ConfigError("sage_snapshot: bad snapshot geometry");

  Workspace w;
  w.n_tones = static_cast<int>(snap.cirs.front().taps.size());
  w.n_cirs = static_cast<int>(snap.cirs.size());
  w.span = snap.span_s;
  w.df = 1.0 / snap.span_s;
  w.grid = static_cast<int>(std::lround(w.n_tones * cfg.delay_oversampling));
  w.t.resize(w.n_cirs);
  for (int m = 0; m < w.n_cirs; ++m) w.t[m] = m * snap.spacing_s;
  w.y.resize(static_cast<std::size_t>(w.n_tones) * w.n_cirs);
  for (int m = 0; m < w.n_cirs; ++m) {
    const CVec tones = fft(snap.cirs[m].taps);
    for (int k = 0; k < w.n_tones; ++k) w.Y(k, m) = tones[k];
  }

  const double nyquist = 0.5 / snap.spacing_s;
  const double nu_max = std::min(cfg.doppler_max_hz, nyquist);

  SnapshotEstimate est;
  est.t = snap.t;
  est.noise_floor_db =
      estimate_noise_floor(snap, cfg.noise_floor_margin_db, cfg.tail_fraction);
  est.input_power = power_sum(w.y);

  // pass 1: wide pre-estimate, then model order from the sorted amplitudes
  std::vector<Path> pre = sic_init(w, cfg.pre_pass_paths, cfg, nu_max);
  em_sweeps(w, pre, cfg.pre_iterations, cfg, nu_max);
  std::sort(pre.begin(), pre.end(), [](const Path& a, const Path& b) {
    return std::norm(a.amp) > std::norm(b.amp);
  });
  const double floor_lin = undb10(est.noise_floor_db);
  const double guard_lin =
      pre.empty() ? 0.0
                  : std::norm(pre.front().amp) * undb10(-cfg.dynamic_range_db);
  int l_hat = 0;
  for (const auto& p : pre) {
    if (std::norm(p.amp) < floor_lin || std::norm(p.amp) < guard_lin) break;
    ++l_hat;
  }
  est.l_hat = l_hat;
  if (l_hat == 0) {
    est.residual_power = est.input_power;
    return est;
  }

  // pass 2: rerun at the selected order
  Workspace w2 = w;
  std::vector<Path> paths = sic_init(w2, l_hat, cfg, nu_max);
  est.residual_history = em_sweeps(w2, paths, cfg.iterations, cfg, nu_max);
  est.residual_power = est.residual_history.empty()
                           ? residual_energy(w2)
                           : est.residual_history.back();

  std::sort(paths.begin(), paths.end(), [](const Path& a, const Path& b) {
    return std::norm(a.amp) > std::norm(b.amp);
  });
  // delays are modulo the lattice span; place the cluster around the
  // strongest path so small timing residuals show up as small negatives
  // instead of wrapping to the far end of the span
  const double span = w.span;
  const double tau0 = paths.front().tau;
  const double tau0_c = (tau0 > 0.5 * span) ? tau0 - span : tau0;
  for (const auto& p : paths) {
    PathEstimate pe;
    pe.amplitude = p.amp;
    double delta = std::fmod(p.tau - tau0 + 1.5 * span, span) - 0.5 * span;
    pe.delay_s = tau0_c + delta;
    pe.doppler_hz = p.nu;
    est.paths.push_back(pe);
  }
  return est;
}

std::vector<SnapshotEstimate> sage_run(const std::vector<CirSnapshot>& snaps,
                                       const SageConfig& cfg) {
  std::vector<const CirSnapshot*> usable;
  for (const auto& s : snaps)
    if (s.usable()) usable.push_back(&s);
  if (usable.empty()) throw StageError("sage_run: no usable snapshot");
  std::vector<SnapshotEstimate> out(usable.size());
  if (cfg.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < usable.size(); ++i)
      out[i] = sage_snapshot(*usable[i], cfg);
  } else {
    for (std::size_t i = 0; i < usable.size(); ++i)
      out[i] = sage_snapshot(*usable[i], cfg);
  }
  return out;
}

std::vector<SnapshotEstimate> sage_run(const CirStream& stream,
                                       const SageConfig& cfg) {
  const auto snaps = make_snapshots(stream);
  if (snaps.empty()) throw StageError("sage_run: stream shorter than one snapshot");
  return sage_run(snaps, cfg);
}

void write_estimates_jsonl(const std::string& path,
                           const std::vector<SnapshotEstimate>& estimates) {
  std::ofstream f(path);
  if (!f) throw ConfigError("write_estimates_jsonl: cannot open " + path);
  for (const auto& e : estimates) {
    nlohmann::json j;
    j["t"] = e.t;
    j["L"] = e.l_hat;
    j["noise_floor_db"] = e.noise_floor_db;
    j["paths"] = nlohmann::json::array();
    for (const auto& p : e.paths)
      j["paths"].push_back({{"re", p.amplitude.real()},
                            {"im", p.amplitude.imag()},
                            {"tau_s", p.delay_s},
                            {"nu_hz", p.doppler_hz}});
    f << j.dump() << "\n";
  }
}

std::vector<SnapshotEstimate> read_estimates_jsonl(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("read_estimates_jsonl: cannot open " + path);
  std::vector<SnapshotEstimate> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("read_estimates_jsonl: bad line: " + std::string(e.what()));
    }
    SnapshotEstimate e;
    e.t = j.at("t").get<double>();
    e.l_hat = j.at("L").get<int>();
    e.noise_floor_db = j.value("noise_floor_db", 0.0);
    for (const auto& p : j.at("paths")) {
      PathEstimate pe;
      pe.amplitude = {p.at("re").get<double>(), p.at("im").get<double>()};
      pe.delay_s = p.at("tau_s").get<double>();
      pe.doppler_hz = p.at("nu_hz").get<double>();
      e.paths.push_back(pe);
    }
    out.push_back(std::move(e));
  }
  return out;
}

} // namespace a2g
