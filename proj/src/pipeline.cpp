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
#include "a2g/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "a2g/airchan.hpp"
#include "a2g/cir.hpp"
#include "a2g/iq.hpp"
#include "a2g/rng.hpp"
#include "a2g/sage.hpp"
#include "a2g/waveform.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace a2g {

void RunConfig::validate() const {
  if (stages.empty() || stages.size() > kStageOrder.size())
    throw ConfigError("pipeline: bad stage list");
  for (std::size_t i = 0; i < stages.size(); ++i)
    if (stages[i] != kStageOrder[i])
      throw ConfigError("pipeline: stages must be a prefix of " +
                        std::string("wavegen,fly,cellsearch,cir,sage,stats,model"));
  if (pci < 0 || pci > 503) throw ConfigError("pipeline: pci out of range");
  if (n_frames < 1) throw ConfigError("pipeline: need at least one frame");
  const bool needs_scenario = stages.size() >= 2;
  if (needs_scenario && !fs::exists(scenario_path))
    throw ConfigError("pipeline: scenario file not found: " + scenario_path);
}

std::string fnv1a64_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("fnv1a64: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (f) {
    f.read(buf, sizeof(buf));
    const std::streamsize n = f.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

void write_sync_json(const std::string& path, const SyncResult& sync,
                     const Numerology& num) {
  nlohmann::json j;
  j["cell_found"] = sync.cell_found;
  j["t0_hat"] = sync.t0_hat;
  j["pss_root_hat"] = sync.pss_root_hat;
  j["sss_index_hat"] = sync.sss_index_hat;
  j["cp_mode_hat"] = (sync.cp_mode_hat == CpMode::normal) ? "normal" : "extended";
  j["half_frame"] = (sync.half_frame_flag == HalfFrame::first) ? "first" : "second";
  j["pci_hat"] = sync.pci_hat;
  j["metrics"] = {{"pss_peak", sync.pss_peak},
                  {"pss_floor", sync.pss_floor},
                  {"sss_peak", sync.sss_peak},
                  {"sss_floor", sync.sss_floor}};
  (void)num;
  std::ofstream f(path);
  if (!f) throw ConfigError("write_sync_json: cannot open " + path);
  f << j.dump(2) << "\n";
}

SyncResult read_sync_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("read_sync_json: cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("read_sync_json: " + std::string(e.what()));
  }
  SyncResult s;
  s.cell_found = j.at("cell_found").get<bool>();
  s.t0_hat = j.at("t0_hat").get<std::int64_t>();
  s.pss_root_hat = j.at("pss_root_hat").get<int>();
  s.sss_index_hat = j.at("sss_index_hat").get<int>();
  s.cp_mode_hat = (j.at("cp_mode_hat").get<std::string>() == "normal")
                      ? CpMode::normal
                      : CpMode::extended;
  s.half_frame_flag = (j.at("half_frame").get<std::string>() == "first")
                          ? HalfFrame::first
                          : HalfFrame::second;
  s.pci_hat = j.at("pci_hat").get<int>();
  if (j.contains("metrics")) {
    s.pss_peak = j["metrics"].value("pss_peak", 0.0);
    s.pss_floor = j["metrics"].value("pss_floor", 0.0);
    s.sss_peak = j["metrics"].value("sss_peak", 0.0);
    s.sss_floor = j["metrics"].value("sss_floor", 0.0);
  }
  return s;
}

namespace {

nlohmann::json fit_to_json(const std::optional<DistFit>& fit) {
  if (!fit.has_value()) return nullptr;
  return {{"family",
           fit->family == DistFamily::normal ? "normal" : "extreme_value"},
          {"p1", fit->p1},
          {"p2", fit->p2},
          {"ks_stat", fit->ks_stat},
          {"ks_pvalue", fit->ks_pvalue}};
}

} // namespace

void write_stats_outputs(const std::string& csv_path,
                         const std::string& summary_path,
                         const FlightStats& fs,
                         const std::vector<SnapshotEstimate>& estimates,
                         FlightMode mode) {
  std::ofstream csv(csv_path);
  if (!csv) throw ConfigError("stats: cannot open " + csv_path);
  csv << "t,d_m,h_m,P_dB,P_smoothed_dB,X_dB,K_dB,log10_ds,log10_dops\n";
  const bool have_fit = fs.path_loss.has_value();
  // window K lookup per snapshot index
  std::vector<double> k_of(fs.series.size(), std::nan(""));
  for (const auto& w : fs.windows) {
    if (!w.k_valid) continue;
    for (int i = 0; i < w.count; ++i)
      k_of[static_cast<std::size_t>(w.first_index) + i] = w.k.k_db;
  }
  for (std::size_t i = 0; i < fs.series.size(); ++i) {
    const auto& g = fs.series[i];
    csv << g.t << ',' << g.d_m << ',' << g.h_m << ','
        << db10(std::max(g.power, 1e-30)) << ',' << fs.smoothed_db[i] << ',';
    if (have_fit) csv << -fs.path_loss->shadow_db[i];
    csv << ',';
    if (std::isnan(k_of[i])) csv << "";
    else csv << k_of[i];
    csv << ',';
    if (std::isnan(fs.sigma_tau_s[i]) || fs.sigma_tau_s[i] <= 0.0) csv << "";
    else csv << std::log10(fs.sigma_tau_s[i]);
    csv << ',';
    if (std::isnan(fs.sigma_nu_hz[i]) || fs.sigma_nu_hz[i] <= 0.0) csv << "";
    else csv << std::log10(fs.sigma_nu_hz[i]);
    csv << "\n";
  }
  (void)estimates;

  nlohmann::json j;
  j["mode"] = (mode == FlightMode::horizontal) ? "horizontal" : "vertical";
  if (fs.path_loss.has_value())
    j["path_loss"] = {{"gamma", fs.path_loss->gamma},
                      {"intercept_db_relative", fs.path_loss->intercept_db},
                      {"residual_std_db", fs.path_loss->residual_std_db},
                      {"r_squared", fs.path_loss->r_squared}};
  else
    j["path_loss"] = nullptr;
  j["rho"] = {{"abs_shadow_vs_geometry", fs.rho_abs_shadow},
              {"k_vs_geometry", fs.rho_k},
              {"log_sigma_tau_vs_geometry", fs.rho_log_sigma_tau},
              {"log_sigma_nu_vs_geometry", fs.rho_log_sigma_nu}};
  j["fits"] = {{"shadow_db", fit_to_json(fs.shadow_fit)},
               {"k_db", fit_to_json(fs.k_fit)},
               {"log10_sigma_tau", fit_to_json(fs.log_sigma_tau_fit)},
               {"log10_sigma_nu", fit_to_json(fs.log_sigma_nu_fit)}};
  j["n_windows"] = fs.windows.size();
  std::ofstream sf(summary_path);
  if (!sf) throw ConfigError("stats: cannot open " + summary_path);
  sf << j.dump(2) << "\n";
}

namespace {

struct StageTimer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

} // namespace

RunManifest run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const auto out = [&](const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
  };

  RunManifest manifest;
  manifest.config = cfg;
  const Numerology num = Numerology::lte20(cfg.cp_mode);
  Scenario scenario;
  if (!cfg.scenario_path.empty()) scenario = load_scenario(cfg.scenario_path);

  std::string current = "";
  try {
    for (const auto& stage : cfg.stages) {
      current = stage;
      StageTimer timer;
      StageRecord rec;
      rec.name = stage;

      if (stage == "wavegen") {
        const CellConfig cell = CellConfig::from_pci(cfg.pci, cfg.cp_mode);
        TxOptions opts;
        opts.seed = cfg.seed;
        IqTrace tx;
        tx.sample_rate_hz = num.sample_rate;
        tx.center_freq_hz = scenario.scatterers.carrier_hz;
        tx.description = "downlink frames, pci " + std::to_string(cfg.pci);
        tx.samples.reserve(static_cast<std::size_t>(num.samples_per_frame()) *
                           cfg.n_frames);
        for (int f = 0; f < cfg.n_frames; ++f) {
          const CVec fr = modulate_frame(cell, f, num, opts);
          tx.samples.insert(tx.samples.end(), fr.begin(), fr.end());
        }
        write_iq(out("tx.iq"), tx);
        rec.artifacts = {{out("tx.iq"), fnv1a64_file(out("tx.iq"))},
                         {out("tx.iq.json"), fnv1a64_file(out("tx.iq.json"))}};
      } else if (stage == "fly") {
        IqTrace tx = read_iq(out("tx.iq"));
        const auto tracks =
            mpc_tracks(scenario.trajectory, scenario.scatterers, 200.0);
        IqTrace rx = apply_channel(tx, tracks);
        if (cfg.capture_rate_hz > 0.0)
          rx = resample(rx, cfg.capture_rate_hz, num.occupied_bandwidth());
        rx = add_awgn(rx, cfg.snr_db, num.occupied_bandwidth(),
                      Rng::mix(cfg.seed, 0xf17));
        write_iq(out("rx.iq"), rx);
        rec.artifacts = {{out("rx.iq"), fnv1a64_file(out("rx.iq"))}};
      } else if (stage == "cellsearch") {
        const IqTrace rx = read_iq(out("rx.iq"));
        SyncConfig sc;
        const auto sync = cell_search(rx, num, sc);
        if (!sync.cell_found) throw StageError("cellsearch: no cell found");
        write_sync_json(out("sync.json"), sync, num);
        rec.artifacts = {{out("sync.json"), fnv1a64_file(out("sync.json"))}};
      } else if (stage == "cir") {
        const IqTrace rx = read_iq(out("rx.iq"));
        const SyncResult sync = read_sync_json(out("sync.json"));
        const auto stream = extract_cir(rx, sync, num);
        write_cir(out("cirs.bin"), stream);
        rec.artifacts = {{out("cirs.bin"), fnv1a64_file(out("cirs.bin"))}};
      } else if (stage == "sage") {
        const auto stream = read_cir(out("cirs.bin"));
        const auto estimates = sage_run(stream);
        write_estimates_jsonl(out("mpcs.jsonl"), estimates);
        rec.artifacts = {{out("mpcs.jsonl"), fnv1a64_file(out("mpcs.jsonl"))}};
      } else if (stage == "stats") {
        const auto estimates = read_estimates_jsonl(out("mpcs.jsonl"));
        const FlightMode mode =
            (scenario.trajectory.type == FlightType::vertical)
                ? FlightMode::vertical
                : FlightMode::horizontal;
        const auto fstats =
            analyze_flight(estimates, scenario.trajectory,
                           scenario.scatterers.bs_position, mode);
        write_stats_outputs(out("stats.csv"), out("summary.json"), fstats,
                            estimates, mode);
        rec.artifacts = {{out("stats.csv"), fnv1a64_file(out("stats.csv"))},
                         {out("summary.json"), fnv1a64_file(out("summary.json"))}};
      } else if (stage == "model") {
        const bool vertical =
            scenario.trajectory.type == FlightType::vertical;
        const FlightMode mode =
            vertical ? FlightMode::vertical : FlightMode::horizontal;
        // regime selector from the scenario geometry
        const auto p0 = scenario.trajectory.position(
            scenario.trajectory.start_time());
        const auto& bs = scenario.scatterers.bs_position;
        const double selector =
            vertical ? std::hypot(p0[0] - bs[0], p0[1] - bs[1]) : p0[2];
        const ModelParams params = ModelParams::defaults();
        const auto draws =
            draw_statistics(mode, selector, 10000, cfg.seed, params, true);
        write_draws_csv(out("draws.csv"), draws);
        RoundtripConfig rc;
        rc.n_windows = 500;
        rc.seed = cfg.seed;
        ModelParams clamped = params; // allow selectors at the range edge
        const double sel = vertical
                               ? std::clamp(selector, clamped.vd_lo, clamped.vd_hi)
                               : std::clamp(selector, clamped.h_lo, clamped.h_hi);
        const auto report = model_roundtrip(mode, sel, rc, clamped);
        std::ofstream rf(out("model_report.json"));
        rf << report.to_json() << "\n";
        rec.artifacts = {{out("draws.csv"), fnv1a64_file(out("draws.csv"))},
                         {out("model_report.json"),
                          fnv1a64_file(out("model_report.json"))}};
      } else {
        throw ConfigError("pipeline: unknown stage " + stage);
      }
      rec.seconds = timer.seconds();
      manifest.stages.push_back(std::move(rec));
    }
  } catch (const std::exception& e) {
    // partial artifacts stay on disk for inspection
    throw StageError("stage '" + current + "' failed: " + e.what());
  }

  std::ofstream mf(out("run_manifest.json"));
  if (!mf) throw ConfigError("pipeline: cannot write manifest");
  mf << manifest.to_json() << "\n";
  return manifest;
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["config"] = {{"scenario", config.scenario_path},
                 {"pci", config.pci},
                 {"cp_mode",
                  config.cp_mode == CpMode::normal ? "normal" : "extended"},
                 {"n_frames", config.n_frames},
                 {"snr_db", config.snr_db},
                 {"capture_rate_hz", config.capture_rate_hz},
                 {"seed", config.seed},
                 {"stages", config.stages},
                 {"out_dir", config.out_dir}};
  j["stages"] = nlohmann::json::array();
  for (const auto& s : stages) {
    nlohmann::json e;
    e["name"] = s.name;
    e["seconds"] = s.seconds;
    e["artifacts"] = nlohmann::json::array();
    for (const auto& [path, hash] : s.artifacts)
      e["artifacts"].push_back({{"path", path}, {"fnv1a64", hash}});
    j["stages"].push_back(e);
  }
  return j.dump(2);
}

void emit_plots(const std::string& run_dir) {
  const auto in = [&](const std::string& name) {
    return (fs::path(run_dir) / name).string();
  };
  const auto need = [&](const std::string& name) {
    if (!fs::exists(in(name)))
      throw ConfigError("plots: missing input " + in(name));
  };

  // CPDP heatmap: rows = CIRs, columns = delay bins (dB)
  need("cirs.bin");
  {
    const auto stream = read_cir(in("cirs.bin"));
    const auto m = pdp(stream);
    std::ofstream f(in("cpdp.csv"));
    f << "t_s";
    for (std::size_t g = 0; g < m.power.front().size(); ++g)
      f << ",delay_" << static_cast<double>(g) * m.delay_resolution_s;
    f << "\n";
    for (std::size_t i = 0; i < m.power.size(); ++i) {
      f << m.times[i];
      for (double p : m.power[i]) f << ',' << db10(std::max(p, 1e-30));
      f << "\n";
    }
  }

  // MPC scatter in delay and Doppler
  need("mpcs.jsonl");
  {
    const auto estimates = read_estimates_jsonl(in("mpcs.jsonl"));
    std::ofstream fd(in("mpc_delay.csv"));
    std::ofstream fn(in("mpc_doppler.csv"));
    fd << "t_s,tau_s,power_db\n";
    fn << "t_s,nu_hz,power_db\n";
    for (const auto& e : estimates)
      for (const auto& p : e.paths) {
        fd << e.t << ',' << p.delay_s << ',' << db10(p.power()) << "\n";
        fn << e.t << ',' << p.doppler_hz << ',' << db10(p.power()) << "\n";
      }
  }

  // power vs geometry and CDFs with fitted curves
  need("stats.csv");
  need("summary.json");
  {
    std::ifstream sf(in("summary.json"));
    nlohmann::json summary;
    sf >> summary;
    std::ifstream cf(in("stats.csv"));
    std::string header;
    std::getline(cf, header);
    std::vector<double> d, p_db, ps_db, x_db;
    std::string line;
    while (std::getline(cf, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cols;
      std::size_t pos = 0;
      while (true) {
        const auto c = line.find(',', pos);
        cols.push_back(line.substr(pos, c - pos));
        if (c == std::string::npos) break;
        pos = c + 1;
      }
      const auto num_or_nan = [](const std::string& c) {
        return c.empty() ? std::nan("") : std::stod(c);
      };
      d.push_back(num_or_nan(cols[1]));
      p_db.push_back(num_or_nan(cols[3]));
      ps_db.push_back(num_or_nan(cols[4]));
      if (cols.size() > 5 && !cols[5].empty()) x_db.push_back(std::stod(cols[5]));
    }
    std::ofstream pf(in("power_vs_distance.csv"));
    pf << "d_m,P_dB,P_smoothed_dB\n";
    for (std::size_t i = 0; i < d.size(); ++i)
      pf << d[i] << ',' << p_db[i] << ',' << ps_db[i] << "\n";

    // shadow CDF: empirical plus the fitted normal evaluated on the grid
    if (!summary["fits"]["shadow_db"].is_null()) {
      const double mu = summary["fits"]["shadow_db"]["p1"].get<double>();
      const double sd = summary["fits"]["shadow_db"]["p2"].get<double>();
      std::sort(x_db.begin(), x_db.end());
      std::ofstream xf(in("shadow_cdf.csv"));
      xf << "x_db,empirical,fitted\n";
      const double n = static_cast<double>(x_db.size());
      for (std::size_t i = 0; i < x_db.size(); ++i)
        xf << x_db[i] << ',' << (i + 1.0) / n << ','
           << norm_cdf((x_db[i] - mu) / sd) << "\n";
    }
  }
}

} // namespace a2g
