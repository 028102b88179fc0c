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
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "a2g/airchan.hpp"
#include "a2g/cir.hpp"
#include "a2g/iq.hpp"
#include "a2g/model.hpp"
#include "a2g/pipeline.hpp"
#include "a2g/rng.hpp"
#include "a2g/sage.hpp"
#include "a2g/stats.hpp"
#include "a2g/sync.hpp"
#include "a2g/waveform.hpp"

using namespace a2g;

namespace {

CpMode parse_cp(const std::string& s) {
  if (s == "normal") return CpMode::normal;
  if (s == "extended") return CpMode::extended;
  throw ConfigError("--cp must be 'normal' or 'extended'");
}

int run(int argc, char** argv) {
  CLI::App app{"passive downlink channel sounding and stochastic A2G "
               "channel modeling toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_dir = ".";
  app.add_option("--seed", seed, "global random seed")->capture_default_str();
  app.add_option("--out-dir", out_dir, "output directory for pipeline runs")
      ->capture_default_str();

  // wavegen
  auto* wg = app.add_subcommand("wavegen", "generate downlink frames");
  int wg_pci = 301, wg_frames = 10;
  std::string wg_cp = "normal", wg_out = "tx.iq";
  bool wg_pilots_only = false;
  wg->add_option("--pci", wg_pci, "physical cell identity 0..503")->required();
  wg->add_option("--cp", wg_cp, "cyclic prefix: normal|extended")
      ->capture_default_str();
  wg->add_option("--frames", wg_frames, "number of 10 ms frames")
      ->capture_default_str();
  wg->add_option("--out", wg_out, "output IQ path")->capture_default_str();
  wg->add_flag("--pilots-only", wg_pilots_only,
               "leave non-reference elements empty");

  // fly
  auto* fly = app.add_subcommand("fly", "apply a simulated flight channel");
  std::string fly_scenario, fly_in = "tx.iq", fly_out = "rx.iq";
  double fly_snr = 15.0, fly_rate = 0.0;
  fly->add_option("--scenario", fly_scenario, "scenario JSON")->required();
  fly->add_option("--in", fly_in, "input IQ")->capture_default_str();
  fly->add_option("--out", fly_out, "output IQ")->capture_default_str();
  fly->add_option("--snr", fly_snr, "in-band SNR, dB")->capture_default_str();
  fly->add_option("--capture-rate", fly_rate,
                  "resample to this rate before adding noise (Hz)");

  // cellsearch
  auto* cs = app.add_subcommand("cellsearch", "PSS/SSS cell search");
  std::string cs_in = "rx.iq", cs_json = "sync.json", cs_cp = "normal";
  int cs_half = 10;
  bool cs_nofilter = false, cs_norefine = false, cs_serial = false;
  cs->add_option("--in", cs_in, "input IQ")->capture_default_str();
  cs->add_option("--half-frames", cs_half, "averaging depth N")
      ->capture_default_str();
  cs->add_option("--json", cs_json, "output JSON")->capture_default_str();
  cs->add_flag("--no-filter", cs_nofilter, "skip the band-confinement filter");
  cs->add_flag("--no-refine", cs_norefine, "skip pilot timing refinement");
  cs->add_flag("--serial", cs_serial, "use the serial reference kernels");

  // cir
  auto* cir = app.add_subcommand("cir", "extract channel impulse responses");
  std::string cir_in = "rx.iq", cir_sync = "sync.json", cir_out = "cirs.bin";
  std::string cir_window = "rectangular";
  int cir_max = -1;
  cir->add_option("--in", cir_in, "input IQ")->capture_default_str();
  cir->add_option("--sync", cir_sync, "sync JSON")->capture_default_str();
  cir->add_option("--out", cir_out, "output CIR binary")->capture_default_str();
  cir->add_option("--window", cir_window, "lattice window: rectangular|hann")
      ->capture_default_str();
  cir->add_option("--max-cirs", cir_max, "stop after this many records");

  // sage
  auto* sg = app.add_subcommand("sage", "per-snapshot multipath estimation");
  std::string sg_in = "cirs.bin", sg_out = "mpcs.jsonl";
  int sg_paths = 30, sg_iters = 15;
  double sg_margin = 3.0;
  bool sg_serial = false;
  sg->add_option("--in", sg_in, "input CIR binary")->capture_default_str();
  sg->add_option("--out", sg_out, "output JSON lines")->capture_default_str();
  sg->add_option("--paths", sg_paths, "pre-pass path count")
      ->capture_default_str();
  sg->add_option("--iters", sg_iters, "final-pass iterations")
      ->capture_default_str();
  sg->add_option("--floor-margin", sg_margin, "noise-floor margin, dB")
      ->capture_default_str();
  sg->add_flag("--serial", sg_serial, "disable snapshot parallelism");

  // stats
  auto* st = app.add_subcommand("stats", "channel statistics for one flight");
  std::string st_mpcs = "mpcs.jsonl", st_geo, st_out = "stats.csv";
  std::string st_summary = "summary.json", st_mode = "auto";
  st->add_option("--mpcs", st_mpcs, "estimates JSON lines")
      ->capture_default_str();
  st->add_option("--geometry", st_geo, "scenario JSON")->required();
  st->add_option("--out", st_out, "per-snapshot CSV")->capture_default_str();
  st->add_option("--summary", st_summary, "fit summary JSON")
      ->capture_default_str();
  st->add_option("--mode", st_mode, "horizontal|vertical|auto")
      ->capture_default_str();

  // model
  auto* md = app.add_subcommand("model", "stochastic model draws");
  std::string md_mode = "horizontal", md_out = "draws.csv", md_params;
  double md_height = 50.0, md_distance = 300.0;
  int md_n = 100000;
  bool md_extrapolate = false;
  md->add_option("--mode", md_mode, "horizontal|vertical")
      ->capture_default_str();
  md->add_option("--height", md_height, "flight height (horizontal mode), m")
      ->capture_default_str();
  md->add_option("--distance", md_distance,
                 "ascent-position distance (vertical mode), m")
      ->capture_default_str();
  md->add_option("--n", md_n, "number of draws")->capture_default_str();
  md->add_option("--out", md_out, "output CSV")->capture_default_str();
  md->add_option("--params", md_params, "parameter bank JSON (default built-in)");
  md->add_flag("--extrapolate", md_extrapolate,
               "allow selectors outside the modeled range");

  auto* rt = md->add_subcommand("roundtrip", "closed-loop recovery report");
  std::string rt_report = "report.json";
  int rt_windows = 2000;
  rt->add_option("--report", rt_report, "output JSON")->capture_default_str();
  rt->add_option("--windows", rt_windows, "synthetic windows")
      ->capture_default_str();

  // pipeline
  auto* pl = app.add_subcommand("pipeline", "run the staged chain");
  RunConfig rc;
  std::string pl_cp = "normal", pl_stages;
  pl->add_option("--scenario", rc.scenario_path, "scenario JSON")->required();
  pl->add_option("--pci", rc.pci, "cell identity")->capture_default_str();
  pl->add_option("--cp", pl_cp, "cyclic prefix")->capture_default_str();
  pl->add_option("--frames", rc.n_frames, "frame count")->capture_default_str();
  pl->add_option("--snr", rc.snr_db, "in-band SNR, dB")->capture_default_str();
  pl->add_option("--capture-rate", rc.capture_rate_hz,
                 "emulated capture rate (Hz), 0 = native");
  pl->add_option("--stages", pl_stages,
                 "comma-separated stage prefix (default: all)");

  // plots
  auto* plots = app.add_subcommand("plots", "emit plot-data files for a run");
  std::string plots_dir = "run";
  plots->add_option("--run-dir", plots_dir, "pipeline output directory")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  const Numerology num = Numerology::lte20();

  if (wg->parsed()) {
    const CpMode cp = parse_cp(wg_cp);
    const Numerology n = Numerology::lte20(cp);
    const CellConfig cell = CellConfig::from_pci(wg_pci, cp);
    TxOptions opts;
    opts.seed = seed;
    opts.fill_data = !wg_pilots_only;
    IqTrace tx;
    tx.sample_rate_hz = n.sample_rate;
    tx.center_freq_hz = 2.585e9;
    tx.description = "downlink frames, pci " + std::to_string(wg_pci);
    for (int f = 0; f < wg_frames; ++f) {
      const CVec fr = modulate_frame(cell, f, n, opts);
      tx.samples.insert(tx.samples.end(), fr.begin(), fr.end());
    }
    write_iq(wg_out, tx);
    std::printf("wrote %zu samples to %s\n", tx.samples.size(), wg_out.c_str());
  } else if (fly->parsed()) {
    const Scenario sc = load_scenario(fly_scenario);
    IqTrace tx = read_iq(fly_in);
    const auto tracks = mpc_tracks(sc.trajectory, sc.scatterers, 200.0);
    IqTrace rx = apply_channel(tx, tracks);
    if (fly_rate > 0.0) rx = resample(rx, fly_rate, num.occupied_bandwidth());
    rx = add_awgn(rx, fly_snr, num.occupied_bandwidth(), Rng::mix(seed, 0xf17));
    write_iq(fly_out, rx);
    std::printf("wrote %zu samples to %s\n", rx.samples.size(), fly_out.c_str());
  } else if (cs->parsed()) {
    const IqTrace rx = read_iq(cs_in);
    SyncConfig cfg;
    cfg.n_half_frames = cs_half;
    cfg.apply_filter = !cs_nofilter;
    cfg.refine_timing = !cs_norefine;
    cfg.exec = cs_serial ? Exec::serial : Exec::parallel;
    const auto sync = cell_search(rx, num, cfg);
    write_sync_json(cs_json, sync, num);
    if (!sync.cell_found) {
      std::fprintf(stderr, "no cell found (peak %.3g, floor %.3g)\n",
                   sync.pss_peak, sync.pss_floor);
      return 3;
    }
    std::printf("pci %d, cp %s, t0 %lld\n", sync.pci_hat,
                sync.cp_mode_hat == CpMode::normal ? "normal" : "extended",
                static_cast<long long>(sync.t0_hat));
  } else if (cir->parsed()) {
    const IqTrace rx = read_iq(cir_in);
    const SyncResult sync = read_sync_json(cir_sync);
    CirexConfig cfg;
    if (cir_window == "hann") cfg.window = CirexConfig::Window::hann;
    cfg.max_cirs = cir_max;
    const auto stream = extract_cir(rx, sync, num, cfg);
    write_cir(cir_out, stream);
    std::printf("wrote %zu CIRs to %s\n", stream.cirs.size(), cir_out.c_str());
  } else if (sg->parsed()) {
    const auto stream = read_cir(sg_in);
    SageConfig cfg;
    cfg.pre_pass_paths = sg_paths;
    cfg.iterations = sg_iters;
    cfg.noise_floor_margin_db = sg_margin;
    cfg.exec = sg_serial ? Exec::serial : Exec::parallel;
    const auto estimates = sage_run(stream, cfg);
    write_estimates_jsonl(sg_out, estimates);
    std::printf("wrote %zu snapshot estimates to %s\n", estimates.size(),
                sg_out.c_str());
  } else if (st->parsed()) {
    const auto estimates = read_estimates_jsonl(st_mpcs);
    const Scenario sc = load_scenario(st_geo);
    FlightMode mode;
    if (st_mode == "horizontal") mode = FlightMode::horizontal;
    else if (st_mode == "vertical") mode = FlightMode::vertical;
    else
      mode = (sc.trajectory.type == FlightType::vertical)
                 ? FlightMode::vertical
                 : FlightMode::horizontal;
    const auto fstats = analyze_flight(estimates, sc.trajectory,
                                       sc.scatterers.bs_position, mode);
    write_stats_outputs(st_out, st_summary, fstats, estimates, mode);
    if (fstats.path_loss.has_value())
      std::printf("gamma %.3f, shadow std %.2f dB, %zu K windows\n",
                  fstats.path_loss->gamma, fstats.path_loss->residual_std_db,
                  fstats.windows.size());
    else
      std::printf("flight too short for a path-loss fit; %zu K windows\n",
                  fstats.windows.size());
  } else if (md->parsed()) {
    const FlightMode mode = (md_mode == "vertical") ? FlightMode::vertical
                                                    : FlightMode::horizontal;
    const double selector =
        (mode == FlightMode::horizontal) ? md_height : md_distance;
    const ModelParams params =
        md_params.empty() ? ModelParams::defaults() : ModelParams::load(md_params);
    if (rt->parsed()) {
      RoundtripConfig cfg;
      cfg.n_windows = rt_windows;
      cfg.seed = seed;
      const auto report = model_roundtrip(mode, selector, cfg, params);
      std::ofstream f(rt_report);
      if (!f) throw ConfigError("cannot open " + rt_report);
      f << report.to_json() << "\n";
      std::printf("roundtrip report written to %s\n", rt_report.c_str());
    } else {
      const auto draws = draw_statistics(mode, selector, md_n, seed, params,
                                         md_extrapolate);
      write_draws_csv(md_out, draws);
      std::printf("wrote %d draws to %s\n", md_n, md_out.c_str());
    }
  } else if (pl->parsed()) {
    rc.cp_mode = parse_cp(pl_cp);
    rc.seed = seed;
    rc.out_dir = out_dir;
    if (!pl_stages.empty()) {
      rc.stages.clear();
      std::size_t pos = 0;
      while (true) {
        const auto c = pl_stages.find(',', pos);
        rc.stages.push_back(pl_stages.substr(pos, c - pos));
        if (c == std::string::npos) break;
        pos = c + 1;
      }
    }
    const auto manifest = run_pipeline(rc);
    std::printf("pipeline complete: %zu stages, manifest in %s\n",
                manifest.stages.size(), rc.out_dir.c_str());
  } else if (plots->parsed()) {
    emit_plots(plots_dir);
    std::printf("plot data written under %s\n", plots_dir.c_str());
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const StageError& e) {
    std::fprintf(stderr, "stage failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
