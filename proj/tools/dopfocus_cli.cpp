#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "config.hpp"
#include "dopfocus/detectors.hpp"
#include "dopfocus/eval.hpp"
#include "dopfocus/scene_io.hpp"
#include "dopfocus/xampler.hpp"

namespace fs = std::filesystem;
using namespace dopfocus;
using namespace dopfocus::cli;

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

Scenario load_scenario(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("scenario file not found: " + path.string());
  try {
    return read_scenario(path);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

RunConfig config_or_default(const std::string& path) {
  if (path.empty()) return RunConfig{};
  if (!fs::exists(path)) throw UsageError("config file not found: " + path);
  return load_run_config(path);
}

fs::path scenario_path(const RunConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (cfg.scenario) return resolve(cfg, *cfg.scenario);
  throw UsageError("no scenario given (config \"scenario\" or --scenario)");
}

Target reference_target(const std::vector<Target>& targets) {
  Target ref{0.0, 0.0, cplx{1.0, 0.0}};
  double best = -1.0;
  for (const auto& t : targets)
    if (std::abs(t.amplitude) > best) {
      best = std::abs(t.amplitude);
      ref = t;
    }
  return ref;
}

struct SimulateArgs {
  std::string config, scenario, out;
  std::optional<std::uint64_t> seed;
  std::optional<double> snr;
  bool no_signal = false;
};

int cmd_simulate(const SimulateArgs& a) {
  RunConfig cfg = config_or_default(a.config);
  if (a.seed) cfg.seed = a.seed;
  if (a.snr) cfg.snr_db = a.snr;
  if (a.no_signal) cfg.write_signal = false;
  if (!cfg.seed) throw UsageError("a master seed is required (config \"seed\" or --seed)");
  const Scenario scen = load_scenario(scenario_path(cfg, a.scenario));
  const auto& params = scen.params;
  const PulseShape shape(params, cfg.pulse);
  const auto targets = scen.all_targets();
  const auto clutter = scen.clutter_field();
  const ClutterField* cp = clutter ? &*clutter : nullptr;
  const auto kappa = make_kappa(cfg, params);

  XampleSet x = xample_analytic(params, shape, targets, cp, kappa);
  std::optional<NyquistSignal> signal;
  if (cfg.write_signal) signal = synthesize(params, shape, targets, cp);
  if (cfg.snr_db) {
    const auto noise = draw_noise(params, derive_seed(*cfg.seed, 0, 2));
    const double scale = std::sqrt(noise_power_for_snr(shape, reference_target(targets), *cfg.snr_db));
    add_coefficient_noise(x, noise, scale);
    if (signal) *signal = *signal + noise.scaled(scale).to_signal(params.pri, signal->frame_len);
  }

  const fs::path out = output_dir(cfg, a.out);
  fs::create_directories(out);
  Scenario resolved;
  resolved.params = params;
  resolved.targets = targets;
  resolved.clutter = scen.clutter;
  write_scenario(out / "scene.json", resolved);
  write_xamples(out / "xamples.dfxs", x);
  std::cout << "scene      " << (out / "scene.json").string() << "  (" << targets.size() << " targets)\n";
  std::cout << "xamples    " << (out / "xamples.dfxs").string() << "  (P=" << x.pulses()
            << ", |kappa|=" << x.width() << ")\n";
  if (signal) {
    write_signal(out / "signal.dfsg", *signal);
    std::cout << "signal     " << (out / "signal.dfsg").string() << "  (" << signal->frame_len
              << " samples/frame)\n";
  }
  return 0;
}

struct RecoverArgs {
  std::string config, scenario, xamples, signal, truth, out, detector;
  int targets = 0;
};

int cmd_recover(const RecoverArgs& a) {
  RunConfig cfg = config_or_default(a.config);
  if (!a.detector.empty()) cfg.recovery.detectors = parse_detectors(a.detector);
  if (a.targets > 0) cfg.recovery.targets = a.targets;
  const fs::path out = output_dir(cfg, a.out);

  std::optional<Scenario> truth_scen;
  if (!a.truth.empty()) truth_scen = load_scenario(a.truth);
  std::optional<Scenario> scen;
  if (!a.scenario.empty() || cfg.scenario) scen = load_scenario(scenario_path(cfg, a.scenario));
  else if (truth_scen) scen = truth_scen;
  if (!scen) throw UsageError("radar parameters unknown: give --scenario, --truth or a config scenario");
  if (!truth_scen) truth_scen = scen;
  const auto& params = scen->params;
  const auto truth = truth_scen->all_targets();
  const int L = cfg.recovery.targets > 0 ? cfg.recovery.targets : static_cast<int>(truth.size());
  if (L < 1) throw UsageError("target count unknown: set recovery.targets or --targets");

  const PulseShape shape(params, cfg.pulse);
  const fs::path xpath = a.xamples.empty() ? out / "xamples.dfxs" : fs::path(a.xamples);
  const fs::path spath = a.signal.empty() ? out / "signal.dfsg" : fs::path(a.signal);
  std::optional<XampleSet> x;
  std::optional<Dictionary> dict;
  std::optional<NyquistSignal> sig;
  auto need_x = [&] {
    if (x) return;
    if (!fs::exists(xpath)) throw UsageError("Xample dump not found: " + xpath.string());
    x = read_xamples(xpath, params);
    dict = build_dictionary(params, shape, x->kappa, half_bin_delay(params));
  };
  auto need_sig = [&] {
    if (sig) return;
    if (!fs::exists(spath)) throw UsageError("signal dump not found: " + spath.string());
    sig = read_signal(spath);
    if (sig->pulses != params.pulse_count)
      throw UsageError(spath.string() + ": dump has P = " + std::to_string(sig->pulses) +
                       " but configuration has P = " + std::to_string(params.pulse_count));
    if (std::abs(sig->frame_len / sig->rate - params.pri) > 1e-9 * params.pri)
      throw UsageError(spath.string() + ": frame length and rate do not span one PRI");
  };

  fs::create_directories(out);
  const int M = cfg.recovery.M > 0 ? cfg.recovery.M : 2 * params.pulse_count;
  const HitCriterion crit = HitCriterion::nyquist(params);
  for (const auto& name : cfg.recovery.detectors) {
    std::vector<Detection> det;
    if (name == "focusing" || name == "focusing-random") {
      need_x();
      FocusingOptions fo;
      fo.targets = L;
      fo.M = M;
      fo.window = parse_window(cfg.recovery.window, params.pulse_count);
      fo.refine = cfg.recovery.refine;
      fo.gridless = cfg.recovery.gridless;
      fo.dc_exclusion_bins = cfg.recovery.dc_exclusion_bins;
      det = focusing_detect(*x, *dict, fo);
    } else if (name == "twostage") {
      need_x();
      TwoStageOptions to;
      to.targets = L;
      to.M = M;
      to.refine = cfg.recovery.refine;
      det = twostage_detect(*x, *dict, to);
    } else {
      need_sig();
      ClassicOptions co;
      co.targets = L;
      co.M = M;
      co.refine = cfg.recovery.refine;
      det = classic_detect(name == "classic" ? *sig : decimate(*sig, cfg.recovery.decimation), params,
                           shape, co);
    }
    const fs::path csv = out / ("detections_" + name + ".csv");
    write_detections_csv(csv, det);
    std::printf("%s: %zu detections -> %s\n", name.c_str(), det.size(), csv.string().c_str());
    for (const auto& d : det)
      std::printf("  tau=%.6e s  nu=%+.6e rad/s  |alpha|=%.4f\n", d.tau_hat, d.nu_hat, std::abs(d.alpha_hat));
    if (!truth.empty()) {
      const auto r = score(truth, det, crit, params.pri);
      std::printf("  hit rate: %d/%zu (%.3f), false alarms %d\n", r.hits, truth.size(),
                  double(r.hits) / truth.size(), r.false_alarms);
    }
  }
  return 0;
}

struct BenchArgs {
  std::string config, out, snr, detectors;
  std::optional<std::uint64_t> seed;
  int trials = 0;
  int workers = -1;
};

std::vector<double> parse_snr_list(const std::string& text) {
  std::vector<double> v;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw UsageError("bad SNR value '" + tok + "'");
    }
  }
  return v;
}

int cmd_bench(const BenchArgs& a) {
  RunConfig cfg = config_or_default(a.config);
  if (a.seed) cfg.seed = a.seed;
  std::optional<RadarParams> fallback;
  if (cfg.scenario) fallback = load_scenario(resolve(cfg, *cfg.scenario)).params;
  SuiteConfig sc = make_suite_config(cfg, fallback);
  if (a.trials > 0) sc.trials = a.trials;
  if (a.workers >= 0) sc.workers = a.workers;
  if (!a.snr.empty()) sc.snr_db = parse_snr_list(a.snr);
  if (!a.detectors.empty()) sc.detectors = parse_detectors(a.detectors);

  const fs::path out = output_dir(cfg, a.out);
  fs::create_directories(out);
  std::signal(SIGINT, on_sigint);
  SuiteHooks hooks;
  hooks.cancel = &g_interrupted;
  int last_pct = -1;
  hooks.progress = [&](int done, int total) {
    const int pct = 100 * done / total;
    if (pct / 5 != last_pct / 5 || done == total) {
      last_pct = pct;
      std::fprintf(stderr, "\r[%s] %d/%d trials", sc.name.c_str(), done, total);
      if (done == total) std::fputc('\n', stderr);
    }
  };
  const SuiteResult res = run_suite(sc, hooks);
  std::signal(SIGINT, SIG_DFL);
  if (!res.complete) {
    const fs::path partial = out / (sc.name + ".incomplete.csv");
    write_suite_csv(partial, res);
    std::fprintf(stderr, "\ninterrupted: %d/%d trials, partial results in %s\n", res.trials_done,
                 sc.trials, partial.string().c_str());
    return 1;
  }
  const fs::path csv = out / (sc.name + ".csv");
  write_suite_csv(csv, res);
  std::cout << suite_csv(res);
  std::fprintf(stderr, "wrote %s\n", csv.string().c_str());
  return 0;
}

int cmd_inspect(const std::vector<std::string>& files) {
  for (const auto& f : files) {
    if (!fs::exists(f)) throw UsageError("file not found: " + f);
    std::ifstream in(f, std::ios::binary);
    char magic[4] = {};
    in.read(magic, 4);
    const std::string m(magic, 4);
    std::cout << f << '\n';
    if (m == "DFSG") {
      const auto s = read_signal(f);
      std::printf("  Nyquist signal dump\n  rate       %.6g Hz\n  pulses     %d\n  frame_len  %d\n",
                  s.rate, s.pulses, s.frame_len);
    } else if (m == "DFXS") {
      const auto h = read_xample_header(f);
      bool run = true;
      for (std::size_t i = 1; i < h.kappa.size(); ++i) run = run && h.kappa[i] == h.kappa[i - 1] + 1;
      std::printf("  Xample dump\n  pulses     %d\n  |kappa|    %d (%s, %d..%d)\n  pri        %.6g s\n"
                  "  noise_var  %.6g\n",
                  h.pulses, h.width, run ? "consecutive" : "scattered", h.kappa.front(), h.kappa.back(),
                  h.pri, h.noise_var);
    } else if (fs::path(f).extension() == ".json") {
      const auto s = load_scenario(f);
      std::printf("  scenario\n  P=%d  tau=%.6g s  B_h=%.6g Hz  N=%d  T_p=%.6g s\n  targets    %zu%s\n",
                  s.params.pulse_count, s.params.pri, s.params.bandwidth, s.params.nyquist_count(),
                  s.params.pulse_time, s.targets.size(), s.generator ? " (+ generator)" : "");
    } else {
      std::ifstream text(f);
      std::string header, line;
      std::getline(text, header);
      long rows = 0;
      while (std::getline(text, line)) rows += !line.empty();
      std::printf("  table: %s\n  rows       %ld\n", header.c_str(), rows);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-Nyquist pulse-Doppler radar: simulation, recovery and benchmarks"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Write scene, Xample dump and Nyquist signal dump");
  s->add_option("-c,--config", sim.config, "Run configuration (JSON)");
  s->add_option("--scenario", sim.scenario, "Scenario file (overrides config)");
  s->add_option("-o,--out", sim.out, "Output directory");
  s->add_option("--seed", sim.seed, "Master seed");
  s->add_option("--snr", sim.snr, "Noise level in dB against the strongest target");
  s->add_flag("--no-signal", sim.no_signal, "Skip the Nyquist signal dump");

  RecoverArgs rec;
  auto* r = app.add_subcommand("recover", "Run detectors on dumps and write detection CSVs");
  r->add_option("-c,--config", rec.config, "Run configuration (JSON)");
  r->add_option("--scenario", rec.scenario, "Scenario file supplying radar parameters");
  r->add_option("--xamples", rec.xamples, "Xample dump (default <out>/xamples.dfxs)");
  r->add_option("--signal", rec.signal, "Signal dump (default <out>/signal.dfsg)");
  r->add_option("--truth", rec.truth, "Scenario with true targets for scoring");
  r->add_option("-d,--detector", rec.detector, "Detector name, comma list or 'all'");
  r->add_option("-L,--targets", rec.targets, "Number of targets to recover");
  r->add_option("-o,--out", rec.out, "Output directory");

  BenchArgs ben;
  auto* b = app.add_subcommand("bench", "Monte Carlo suite; writes the result table as CSV");
  b->add_option("-c,--config", ben.config, "Run configuration with a suite section")->required();
  b->add_option("--trials", ben.trials, "Trials per SNR point");
  b->add_option("--seed", ben.seed, "Master seed");
  b->add_option("--snr", ben.snr, "Comma separated SNR grid in dB");
  b->add_option("--detectors", ben.detectors, "Comma separated detector list or 'all'");
  b->add_option("-j,--workers", ben.workers, "Worker threads (0 = all cores)");
  b->add_option("-o,--out", ben.out, "Output directory");

  std::vector<std::string> files;
  auto* ins = app.add_subcommand("inspect", "Print dump headers and table summaries");
  ins->add_option("files", files, "Files to inspect")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*r) return cmd_recover(rec);
    if (*b) return cmd_bench(ben);
    if (*ins) return cmd_inspect(files);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
