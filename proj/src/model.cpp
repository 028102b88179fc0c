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
#include "a2g/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "a2g/rng.hpp"
#include "json.hpp"

namespace a2g {

double Marginal::quantile(double u) const {
  switch (family) {
    case DistFamily::normal: return p1 + p2 * norm_quantile(u);
    case DistFamily::extreme_value: return ev_quantile(u, p1, p2);
  }
  throw ConfigError("marginal: unsupported family");
}

double Marginal::analytic_mean() const {
  return family == DistFamily::normal ? p1 : ev_mean(p1, p2);
}

double Marginal::analytic_std() const {
  return family == DistFamily::normal ? p2 : ev_std(p1, p2);
}

namespace {

RegimeRow row1(double lo, double hi, DistFamily fam, double p1, double p2,
               double rho, bool abs_flag = false) {
  RegimeRow r;
  r.lo = lo;
  r.hi = hi;
  r.marginal.family = fam;
  r.marginal.p1 = p1;
  r.marginal.p2 = p2;
  r.marginal.rho = rho;
  r.marginal.correlate_abs = abs_flag;
  return r;
}

constexpr double kInf = 1e30;

} // namespace

ModelParams ModelParams::defaults() {
  ModelParams p;
  // horizontal bank: regimes keyed by flight height; the 15 m flight is its
  // own regime for K and delay spread, 30-100 m merge into one
  p.gamma_h_table = {{15, 3.64}, {30, 2.30}, {50, 2.28}, {75, 1.31}, {100, 1.67}};
  p.gamma_h_linear = GammaHeightModel{-0.02, 3.42, 0.48};
  p.shadow_h = {row1(0, kInf, DistFamily::normal, 0.0, 2.7, 0.36, true)};
  p.k_h = {row1(0, 22.5, DistFamily::normal, 12.6, 5.1, -0.64),
           row1(22.5, kInf, DistFamily::normal, 7.6, 5.6, -0.65)};
  p.log_sigma_tau_h = {row1(0, 22.5, DistFamily::normal, -7.41, 0.22, -0.76),
                       row1(22.5, kInf, DistFamily::normal, -7.12, 0.33, -0.38)};
  p.log_sigma_nu_h = {row1(0, kInf, DistFamily::extreme_value, 0.9, 0.4, -0.55)};

  // vertical bank: regimes keyed by the ascent position's distance
  p.gamma_d_table = {{100, 1.17}, {200, 1.58}, {300, 1.35}, {400, 0.92}, {500, 0.07}};
  p.shadow_d = {row1(0, kInf, DistFamily::normal, 0.0, 3.0, 0.16, true)};
  p.k_d = {row1(0, 250, DistFamily::normal, 15.2, 4.7, 0.29),
           row1(250, kInf, DistFamily::normal, 8.4, 3.8, 0.20)};
  p.log_sigma_tau_d = {row1(0, 450, DistFamily::normal, -6.97, 0.25, -0.38),
                       row1(450, kInf, DistFamily::normal, -7.33, 0.13, -0.12)};
  p.log_sigma_nu_d = {row1(0, kInf, DistFamily::normal, -0.3, 0.3, -0.7)};
  return p;
}

namespace {

nlohmann::json rows_to_json(const std::vector<RegimeRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"lo", r.lo},
                   {"hi", r.hi},
                   {"family", r.marginal.family == DistFamily::normal
                                  ? "normal"
                                  : "extreme_value"},
                   {"p1", r.marginal.p1},
                   {"p2", r.marginal.p2},
                   {"rho", r.marginal.rho},
                   {"correlate_abs", r.marginal.correlate_abs}});
  }
  return out;
}

std::vector<RegimeRow> rows_from_json(const nlohmann::json& j) {
  std::vector<RegimeRow> rows;
  for (const auto& e : j) {
    RegimeRow r;
    r.lo = e.at("lo").get<double>();
    r.hi = e.at("hi").get<double>();
    const std::string fam = e.at("family").get<std::string>();
    r.marginal.family =
        (fam == "normal") ? DistFamily::normal : DistFamily::extreme_value;
    r.marginal.p1 = e.at("p1").get<double>();
    r.marginal.p2 = e.at("p2").get<double>();
    r.marginal.rho = e.at("rho").get<double>();
    r.marginal.correlate_abs = e.value("correlate_abs", false);
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json table_to_json(const std::vector<std::pair<double, double>>& t) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [k, v] : t) out.push_back({{"key", k}, {"gamma", v}});
  return out;
}

std::vector<std::pair<double, double>> table_from_json(const nlohmann::json& j) {
  std::vector<std::pair<double, double>> t;
  for (const auto& e : j)
    t.emplace_back(e.at("key").get<double>(), e.at("gamma").get<double>());
  return t;
}

} // namespace

std::string ModelParams::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["horizontal"] = {
      {"_note", "statistics vs horizontal distance at fixed flight height"},
      {"gamma_table", table_to_json(gamma_h_table)},
      {"gamma_linear",
       {{"a", gamma_h_linear.a}, {"b", gamma_h_linear.b},
        {"sigma_c", gamma_h_linear.sigma_c},
        {"_note", "path loss exponent vs height: a*h + b + N(0, sigma_c)"}}},
      {"shadow_db", rows_to_json(shadow_h)},
      {"k_db", rows_to_json(k_h)},
      {"log10_sigma_tau_s", rows_to_json(log_sigma_tau_h)},
      {"log10_sigma_nu_hz", rows_to_json(log_sigma_nu_h)},
      {"height_range_m", {h_lo, h_hi}},
      {"distance_draw_m", {d_lo, d_hi}}};
  j["vertical"] = {
      {"_note", "statistics vs height at fixed ascent-position distance"},
      {"gamma_table", table_to_json(gamma_d_table)},
      {"shadow_db", rows_to_json(shadow_d)},
      {"k_db", rows_to_json(k_d)},
      {"log10_sigma_tau_s", rows_to_json(log_sigma_tau_d)},
      {"log10_sigma_nu_hz", rows_to_json(log_sigma_nu_d)},
      {"distance_range_m", {vd_lo, vd_hi}},
      {"height_draw_m", {vh_lo, vh_hi}}};
  return j.dump(2);
}

ModelParams ModelParams::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model params: bad JSON: " + std::string(e.what()));
  }
  ModelParams p;
  p.version = j.value("version", 1);
  const auto& h = j.at("horizontal");
  p.gamma_h_table = table_from_json(h.at("gamma_table"));
  p.gamma_h_linear.a = h.at("gamma_linear").at("a").get<double>();
  p.gamma_h_linear.b = h.at("gamma_linear").at("b").get<double>();
  p.gamma_h_linear.sigma_c = h.at("gamma_linear").at("sigma_c").get<double>();
  p.shadow_h = rows_from_json(h.at("shadow_db"));
  p.k_h = rows_from_json(h.at("k_db"));
  p.log_sigma_tau_h = rows_from_json(h.at("log10_sigma_tau_s"));
  p.log_sigma_nu_h = rows_from_json(h.at("log10_sigma_nu_hz"));
  p.h_lo = h.at("height_range_m")[0].get<double>();
  p.h_hi = h.at("height_range_m")[1].get<double>();
  p.d_lo = h.at("distance_draw_m")[0].get<double>();
  p.d_hi = h.at("distance_draw_m")[1].get<double>();
  const auto& v = j.at("vertical");
  p.gamma_d_table = table_from_json(v.at("gamma_table"));
  p.shadow_d = rows_from_json(v.at("shadow_db"));
  p.k_d = rows_from_json(v.at("k_db"));
  p.log_sigma_tau_d = rows_from_json(v.at("log10_sigma_tau_s"));
  p.log_sigma_nu_d = rows_from_json(v.at("log10_sigma_nu_hz"));
  p.vd_lo = v.at("distance_range_m")[0].get<double>();
  p.vd_hi = v.at("distance_range_m")[1].get<double>();
  p.vh_lo = v.at("height_draw_m")[0].get<double>();
  p.vh_hi = v.at("height_draw_m")[1].get<double>();
  return p;
}

ModelParams ModelParams::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("model params: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

double ModelParams::gamma_at(FlightMode mode, double selector, bool use_linear,
                             double c_draw) const {
  if (mode == FlightMode::horizontal && use_linear)
    return gamma_h_linear.mean(selector) + c_draw;
  const auto& table =
      (mode == FlightMode::horizontal) ? gamma_h_table : gamma_d_table;
  double best = table.front().second;
  double bd = std::fabs(selector - table.front().first);
  for (const auto& [k, g] : table) {
    const double d = std::fabs(selector - k);
    if (d < bd) {
      bd = d;
      best = g;
    }
  }
  return best;
}

const Marginal& ModelParams::row(FlightMode mode, const std::string& stat,
                                 double selector) const {
  const std::vector<RegimeRow>* rows = nullptr;
  if (mode == FlightMode::horizontal) {
    if (stat == "shadow") rows = &shadow_h;
    else if (stat == "k") rows = &k_h;
    else if (stat == "log_sigma_tau") rows = &log_sigma_tau_h;
    else if (stat == "log_sigma_nu") rows = &log_sigma_nu_h;
  } else {
    if (stat == "shadow") rows = &shadow_d;
    else if (stat == "k") rows = &k_d;
    else if (stat == "log_sigma_tau") rows = &log_sigma_tau_d;
    else if (stat == "log_sigma_nu") rows = &log_sigma_nu_d;
  }
  if (!rows) throw ConfigError("model params: unknown statistic " + stat);
  for (const auto& r : *rows)
    if (selector >= r.lo && selector < r.hi) return r.marginal;
  throw ConfigError("model params: no regime covers the selector");
}

std::vector<ModelDraw> draw_statistics(FlightMode mode, double selector, int n,
                                       std::uint64_t seed,
                                       const ModelParams& params,
                                       bool allow_extrapolation) {
  if (n < 1) throw ConfigError("draw_statistics: need n >= 1");
  const bool horizontal = (mode == FlightMode::horizontal);
  const double lo = horizontal ? params.h_lo : params.vd_lo;
  const double hi = horizontal ? params.h_hi : params.vd_hi;
  if (!allow_extrapolation && (selector < lo || selector > hi))
    throw ConfigError("draw_statistics: selector outside the modeled range");

  const Marginal& m_shadow = params.row(mode, "shadow", selector);
  const Marginal& m_k = params.row(mode, "k", selector);
  const Marginal& m_st = params.row(mode, "log_sigma_tau", selector);
  const Marginal& m_sn = params.row(mode, "log_sigma_nu", selector);
  const double geo_lo = horizontal ? params.d_lo : params.vh_lo;
  const double geo_hi = horizontal ? params.d_hi : params.vh_hi;
  const double gamma = params.gamma_at(mode, selector);

  Rng rng(seed);
  std::vector<ModelDraw> out;
  out.reserve(n);
  // copula: transform the geometry to a normal score, mix, map back through
  // each marginal; 2 sin(pi rho / 6) makes the rank correlation land on rho
  auto coupled_u = [&](double zg, double rho) {
    const double rho_g = 2.0 * std::sin(kPi * rho / 6.0);
    const double z = rho_g * zg + std::sqrt(1.0 - rho_g * rho_g) * rng.normal();
    return norm_cdf(z);
  };
  for (int i = 0; i < n; ++i) {
    ModelDraw d;
    d.selector = selector;
    double ug = rng.uniform();
    ug = std::min(std::max(ug, 1e-15), 1.0 - 1e-15);
    d.geo = geo_lo + ug * (geo_hi - geo_lo);
    const double zg = norm_quantile(ug);

    // shadow couples through its magnitude, sign stays symmetric
    {
      const double u = coupled_u(zg, m_shadow.rho);
      const double mag = m_shadow.p2 * norm_quantile(0.5 * (1.0 + u));
      const double sign = (rng.uniform() < 0.5) ? -1.0 : 1.0;
      d.shadow_db = m_shadow.correlate_abs
                        ? sign * mag
                        : m_shadow.quantile(u);
    }
    d.k_db = m_k.quantile(coupled_u(zg, m_k.rho));
    d.sigma_tau_s = std::pow(10.0, m_st.quantile(coupled_u(zg, m_st.rho)));
    d.sigma_nu_hz = std::pow(10.0, m_sn.quantile(coupled_u(zg, m_sn.rho)));
    d.gamma = gamma;
    d.rel_gain_db = -10.0 * gamma * std::log10(d.geo / geo_lo) + d.shadow_db;
    out.push_back(d);
  }
  return out;
}

std::vector<Mpc> synthesize_mpcs(const ModelDraw& draw, int n_paths,
                                 std::uint64_t seed) {
  if (n_paths < 1) throw ConfigError("synthesize_mpcs: need at least 1 path");
  const double p_tot = undb10(draw.rel_gain_db);
  const double k_lin = undb10(draw.k_db);
  const bool degenerate = (n_paths == 1) || !std::isfinite(k_lin) ||
                          k_lin > 1e12;
  if (degenerate) {
    if (draw.sigma_tau_s > 1e-15 || draw.sigma_nu_hz > 1e-12)
      throw StageError("synthesize_mpcs: single dominant path cannot carry "
                       "nonzero spreads");
    Mpc m;
    m.amplitude = std::polar(std::sqrt(p_tot), 0.0);
    return {m};
  }

  const double p_dom = p_tot * k_lin / (1.0 + k_lin);
  const double p_scat_total = p_tot / (1.0 + k_lin);
  const int n_scat = n_paths - 1;
  const double p_each = p_scat_total / n_scat;

  Rng rng(seed);
  std::vector<double> dtau(n_scat), dnu(n_scat);
  for (int i = 0; i < n_scat; ++i) {
    dtau[i] = rng.uniform(0.5, 1.5) * (i + 1);
    dnu[i] = -rng.uniform(0.5, 1.5) * (i + 1); // scattered left of dominant
  }
  std::vector<double> phases(n_paths);
  for (auto& ph : phases) ph = rng.uniform(0.0, kTwoPi);

  // weighted spread of the raw layout, then one exact rescale
  auto spread = [&](const std::vector<double>& v) {
    double m1 = p_dom * 0.0, m2 = 0.0;
    for (int i = 0; i < n_scat; ++i) {
      m1 += p_each * v[i];
      m2 += p_each * v[i] * v[i];
    }
    m1 /= p_tot;
    m2 /= p_tot;
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
  };
  const double s_tau = spread(dtau);
  const double s_nu = spread(dnu);
  if ((draw.sigma_tau_s > 0.0 && s_tau <= 0.0) ||
      (draw.sigma_nu_hz > 0.0 && s_nu <= 0.0))
    throw StageError("synthesize_mpcs: layout cannot carry the spreads");
  const double c_tau = (s_tau > 0.0) ? draw.sigma_tau_s / s_tau : 0.0;
  const double c_nu = (s_nu > 0.0) ? draw.sigma_nu_hz / s_nu : 0.0;

  std::vector<Mpc> out;
  Mpc dom;
  dom.amplitude = std::polar(std::sqrt(p_dom), phases[0]);
  out.push_back(dom);
  for (int i = 0; i < n_scat; ++i) {
    Mpc m;
    m.amplitude = std::polar(std::sqrt(p_each), phases[i + 1]);
    m.delay_s = dtau[i] * c_tau;
    m.doppler_hz = dnu[i] * c_nu;
    out.push_back(m);
  }
  return out;
}

namespace {

/// Diffuse-power knob: choose the dominant-path fading variance x so the
/// moment estimator applied to P = |V + c|^2 + P_scat returns K. Monotone
/// in x, solved by bisection.
double solve_fading_power(double v2, double p_scat, double k_lin) {
  const double gamma_target = (1.0 + 2.0 * k_lin) /
                              ((1.0 + k_lin) * (1.0 + k_lin));
  auto gamma_of = [&](double x) {
    const double mean = v2 + x + p_scat;
    return (x * x + 2.0 * x * v2) / (mean * mean);
  };
  double lo = 0.0, hi = std::max(v2, p_scat) * 4.0 + 1e-30;
  while (gamma_of(hi) < gamma_target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_of(mid) < gamma_target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

RoundtripReport model_roundtrip(FlightMode mode, double selector,
                                const RoundtripConfig& cfg,
                                const ModelParams& params) {
  const auto draws =
      draw_statistics(mode, selector, cfg.n_windows, cfg.seed, params);

  std::vector<double> geo_w, k_rec, lst_rec, lsn_rec, power_db_w;
  Rng rng(Rng::mix(cfg.seed, 0x524f554eull));
  for (int w = 0; w < cfg.n_windows; ++w) {
    const ModelDraw& d = draws[w];
    const auto base = synthesize_mpcs(d, cfg.paths_per_snapshot,
                                      Rng::mix(cfg.seed, 1000 + w));
    const double k_lin = undb10(d.k_db);
    const double v2 = std::norm(base.front().amplitude);
    double p_scat = 0.0;
    for (std::size_t i = 1; i < base.size(); ++i)
      p_scat += std::norm(base[i].amplitude);
    const double x = solve_fading_power(v2, p_scat, k_lin);
    const double v = std::sqrt(v2);
    const double mean_p = v2 + x + p_scat;

    // the whole snapshot co-fades with the dominant envelope: the power
    // sequence carries the drawn K while the weight shares, and with them
    // the spreads, stay exact
    std::vector<double> p_samples(cfg.snapshots_per_window);
    std::vector<double> lst(cfg.snapshots_per_window);
    std::vector<double> lsn(cfg.snapshots_per_window);
    for (int s = 0; s < cfg.snapshots_per_window; ++s) {
      const double p_inst = std::norm(cplx{v, 0.0} + rng.cnormal(x)) + p_scat;
      const double scale = std::sqrt(p_inst / mean_p);
      SnapshotEstimate est;
      est.t = (w * cfg.snapshots_per_window + s) * 0.05;
      for (const auto& b : base) {
        PathEstimate pe;
        pe.amplitude = b.amplitude * scale;
        pe.delay_s = b.delay_s;
        pe.doppler_hz = b.doppler_hz;
        est.paths.push_back(pe);
      }
      est.l_hat = static_cast<int>(est.paths.size());
      p_samples[s] = channel_power(est);
      lst[s] = std::log10(rms_delay_spread(est));
      lsn[s] = std::log10(rms_doppler_spread(est));
    }
    geo_w.push_back(d.geo);
    k_rec.push_back(k_factor(p_samples).k_db);
    lst_rec.push_back(mean_of(lst));
    lsn_rec.push_back(mean_of(lsn));
    power_db_w.push_back(db10(mean_of(p_samples)));
  }

  RoundtripReport rep;
  rep.mode = mode;
  rep.selector = selector;
  rep.n_windows = cfg.n_windows;

  // path loss and shadow across windows
  std::vector<double> loss_db(power_db_w.size());
  for (std::size_t i = 0; i < power_db_w.size(); ++i) loss_db[i] = -power_db_w[i];
  const auto fit = fit_path_loss(loss_db, geo_w);
  rep.gamma_cfg = params.gamma_at(mode, selector);
  rep.gamma_rec = fit.gamma;
  const Marginal& m_shadow = params.row(mode, "shadow", selector);
  rep.shadow_std_cfg = m_shadow.p2;
  rep.shadow_std_rec = fit.residual_std_db;
  rep.shadow_rho_cfg = m_shadow.rho;
  std::vector<double> abs_x(fit.shadow_db.size());
  for (std::size_t i = 0; i < abs_x.size(); ++i)
    abs_x[i] = std::fabs(fit.shadow_db[i]);
  rep.shadow_rho_rec = rank_correlation(abs_x, geo_w);

  auto add_stat = [&](const std::string& name, const Marginal& m,
                      const std::vector<double>& rec) {
    RegimeReport r;
    r.stat = name;
    r.selector = selector;
    r.mean_cfg = m.analytic_mean();
    r.mean_rec = mean_of(rec);
    r.rho_cfg = m.rho;
    r.rho_rec = rank_correlation(rec, geo_w);
    rep.stats.push_back(r);
  };
  add_stat("k_db", params.row(mode, "k", selector), k_rec);
  add_stat("log10_sigma_tau", params.row(mode, "log_sigma_tau", selector),
           lst_rec);
  add_stat("log10_sigma_nu", params.row(mode, "log_sigma_nu", selector),
           lsn_rec);
  return rep;
}

std::string RoundtripReport::to_json() const {
  nlohmann::json j;
  j["mode"] = (mode == FlightMode::horizontal) ? "horizontal" : "vertical";
  j["selector_m"] = selector;
  j["n_windows"] = n_windows;
  j["gamma"] = {{"configured", gamma_cfg}, {"recovered", gamma_rec}};
  j["shadow_std_db"] = {{"configured", shadow_std_cfg},
                        {"recovered", shadow_std_rec}};
  j["shadow_rho"] = {{"configured", shadow_rho_cfg},
                     {"recovered", shadow_rho_rec}};
  j["stats"] = nlohmann::json::array();
  for (const auto& s : stats)
    j["stats"].push_back({{"stat", s.stat},
                          {"mean_configured", s.mean_cfg},
                          {"mean_recovered", s.mean_rec},
                          {"rho_configured", s.rho_cfg},
                          {"rho_recovered", s.rho_rec}});
  return j.dump(2);
}

void write_draws_csv(const std::string& path,
                     const std::vector<ModelDraw>& draws) {
  std::ofstream f(path);
  if (!f) throw ConfigError("write_draws_csv: cannot open " + path);
  f << "selector_m,geo_m,gamma,shadow_db,k_db,sigma_tau_s,sigma_nu_hz,"
       "rel_gain_db\n";
  for (const auto& d : draws)
    f << d.selector << ',' << d.geo << ',' << d.gamma << ',' << d.shadow_db
      << ',' << d.k_db << ',' << d.sigma_tau_s << ',' << d.sigma_nu_hz << ','
      << d.rel_gain_db << "\n";
}

} // namespace a2g
