#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "dopfocus/eval.hpp"
#include "dopfocus/fft.hpp"

namespace dopfocus {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::random: return "random";
    case ScenarioKind::dynamic_range: return "dynamic-range";
    case ScenarioKind::clutter: return "clutter";
    case ScenarioKind::doppler_pair: return "doppler-pair";
  }
  return "random";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  if (name == "random") return ScenarioKind::random;
  if (name == "dynamic-range") return ScenarioKind::dynamic_range;
  if (name == "clutter") return ScenarioKind::clutter;
  if (name == "doppler-pair") return ScenarioKind::doppler_pair;
  throw std::invalid_argument("unknown scenario '" + name +
                              "' (valid: random, dynamic-range, clutter, doppler-pair)");
}

const std::vector<std::string>& detector_names() {
  static const std::vector<std::string> names{"focusing", "focusing-random", "twostage", "classic",
                                              "classic-decimated"};
  return names;
}

const SuiteRow* SuiteResult::find(double snr_db, const std::string& detector) const {
  for (const auto& r : rows)
    if (r.snr_db == snr_db && r.detector == detector) return &r;
  return nullptr;
}

namespace {

enum Stream : std::uint64_t { kScene = 1, kNoise = 2, kClutter = 3, kKappa = 7, kKappaRandom = 8 };

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

NyquistSignal signal_from_coefficients(const XampleSet& full) {
  const int n = full.width();
  NyquistSignal s;
  s.pulses = full.pulses();
  s.frame_len = n;
  s.rate = n / full.params.pri;
  s.samples.assign(static_cast<std::size_t>(s.pulses) * n, cplx{0.0, 0.0});
  for (int p = 0; p < s.pulses; ++p) {
    auto f = s.frame(p);
    for (int j = 0; j < n; ++j) {
      const int k = full.kappa.kappa[j];
      f[((k % n) + n) % n] = full.coeffs(p, j);
    }
    fft::inverse(f);
  }
  return s;
}

}  // namespace

TrialScene suite_trial_scene(const SuiteConfig& c, int trial) {
  const auto& prm = c.params;
  TrialScene s;
  s.reference = Target{0.0, 0.0, cplx{1.0, 0.0}};
  const auto seed = derive_seed(c.seed, static_cast<std::uint64_t>(trial), kScene);
  std::mt19937_64 rng(seed);
  switch (c.scenario) {
    case ScenarioKind::random:
      s.targets = random_scene(prm, c.targets, seed, c.amp_db_spread);
      break;
    case ScenarioKind::dynamic_range: {
      const double t0 = uniform(rng, 0.0, 0.95 * prm.pri - prm.delay_bin());
      const double nu = uniform(rng, -kPi / prm.pri, kPi / prm.pri);
      const double weak = std::pow(10.0, -c.dynamic_range_db / 20.0);
      s.targets.push_back({t0, nu, std::polar(1.0, uniform(rng, 0.0, kTwoPi))});
      const double sign = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
      const double nu2 = wrap_doppler(nu + sign * c.pair_doppler_bins * prm.doppler_bin(), prm.pri);
      s.targets.push_back({t0 + prm.delay_bin(), nu2, std::polar(weak, uniform(rng, 0.0, kTwoPi))});
      s.reference.amplitude = weak;
      break;
    }
    case ScenarioKind::doppler_pair: {
      const int P = prm.pulse_count;
      const int M = c.M > 0 ? c.M : 2 * P;
      const int shift = static_cast<int>(std::lround(c.doppler_separation_bins * M / double(P)));
      if (shift >= M) throw std::invalid_argument("Doppler separation exceeds the unambiguous band");
      const int n_tau = 2 * prm.nyquist_count();
      const int n = std::uniform_int_distribution<int>(0, static_cast<int>(0.95 * n_tau) - 1)(rng);
      const int m1 = std::uniform_int_distribution<int>(-(M / 2), M - M / 2 - 1 - shift)(rng);
      const double tau = n * prm.pri / n_tau;
      for (int m : {m1, m1 + shift})
        s.targets.push_back({tau, kTwoPi * m / (prm.pri * M), std::polar(1.0, uniform(rng, 0.0, kTwoPi))});
      break;
    }
    case ScenarioKind::clutter: {
      // Evenly spread Dopplers keep every target clear of the zero-Doppler bin.
      const int L = c.targets;
      const double step = kTwoPi / (prm.pri * L);
      const double offset = (L % 2 == 0) ? 0.5 * step : 0.0;
      for (int i = 0; i < L; ++i) {
        const double nu = wrap_doppler(-kPi / prm.pri + offset + i * step, prm.pri);
        s.targets.push_back({uniform(rng, 0.0, 0.95 * prm.pri), nu,
                             std::polar(1.0, uniform(rng, 0.0, kTwoPi))});
      }
      s.clutter = make_clutter(prm, c.clutter_scatterers, c.scr_db, 1.0,
                               derive_seed(c.seed, static_cast<std::uint64_t>(trial), kClutter));
      break;
    }
  }
  return s;
}

SuiteResult run_suite(const SuiteConfig& c, const SuiteHooks& hooks) {
  c.params.validate();
  SuiteResult result;
  result.name = c.name;
  if (c.snr_db.empty() || c.detectors.empty()) return result;
  for (const auto& d : c.detectors)
    if (std::find(detector_names().begin(), detector_names().end(), d) == detector_names().end())
      throw std::invalid_argument("unknown detector '" + d + "'");
  if (c.trials < 1) throw std::invalid_argument("trials must be >= 1");

  const auto& prm = c.params;
  const int P = prm.pulse_count;
  const int N = prm.nyquist_count();
  const int M = c.M > 0 ? c.M : 2 * P;
  const int L = c.scenario == ScenarioKind::dynamic_range || c.scenario == ScenarioKind::doppler_pair
                    ? 2
                    : c.targets;
  const PulseShape shape(prm, c.pulse);
  const Window window = parse_window(c.window, P);
  const HitCriterion crit = HitCriterion::nyquist(prm, c.hit_bins);
  auto wants = [&](const char* name) {
    return std::find(c.detectors.begin(), c.detectors.end(), name) != c.detectors.end();
  };
  const bool need_c = wants("focusing") || wants("twostage");
  const bool need_r = wants("focusing-random");
  const bool need_sig = wants("classic") || wants("classic-decimated");
  if (wants("classic-decimated") && (c.decimation < 1 || N % c.decimation != 0))
    throw std::invalid_argument("decimation factor must divide the Nyquist count");

  CoefficientSet kappa_c, kappa_r;
  Dictionary dict_c, dict_r;
  if (need_c) {
    kappa_c = select_kappa(prm, c.kappa_size, c.kappa_mode, derive_seed(c.seed, 0, kKappa), c.kappa_offset);
    dict_c = build_dictionary(prm, shape, kappa_c, half_bin_delay(prm));
  }
  if (need_r) {
    kappa_r = select_kappa(prm, c.kappa_size, KappaMode::random, derive_seed(c.seed, 0, kKappaRandom));
    dict_r = build_dictionary(prm, shape, kappa_r, half_bin_delay(prm));
  }
  const auto kappa_full = select_kappa(prm, N, KappaMode::consecutive);

  FocusingOptions fo;
  fo.targets = L;
  fo.M = M;
  fo.window = window;
  fo.refine = c.refine;
  fo.gridless = c.gridless;
  fo.dc_exclusion_bins = c.dc_exclusion_bins;
  fo.exec = Exec::serial;
  TwoStageOptions to;
  to.targets = L;
  to.M = M;
  to.refine = c.refine;
  ClassicOptions co;
  co.targets = L;
  co.M = M;
  co.delay_points = 2 * N;
  co.refine = c.refine;
  co.exec = Exec::serial;

  const int S = static_cast<int>(c.snr_db.size());
  const int D = static_cast<int>(c.detectors.size());
  std::vector<std::vector<TrialResult>> per_trial(c.trials);
  std::vector<char> done(c.trials, 0);
  int finished = 0;
  std::exception_ptr failure;
  const int workers = c.workers > 0 ? c.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int t = 0; t < c.trials; ++t) {
    if (hooks.cancel && hooks.cancel->load()) continue;
    try {
    const int id = c.first_trial + t;
    const TrialScene scene = suite_trial_scene(c, id);
    const ClutterField* clutter = scene.clutter.scatterers.empty() ? nullptr : &scene.clutter;
    const auto noise = draw_noise(prm, derive_seed(c.seed, static_cast<std::uint64_t>(id), kNoise));
    XampleSet clean_c, clean_r;
    NyquistSignal clean_sig;
    if (need_c) clean_c = xample_analytic(prm, shape, scene.targets, clutter, kappa_c);
    if (need_r) clean_r = xample_analytic(prm, shape, scene.targets, clutter, kappa_r);
    if (need_sig)
      clean_sig = signal_from_coefficients(xample_analytic(prm, shape, scene.targets, clutter, kappa_full));

    std::vector<TrialResult> out(static_cast<std::size_t>(S) * D);
    for (int si = 0; si < S; ++si) {
      const double scale = std::sqrt(noise_power_for_snr(shape, scene.reference, c.snr_db[si]));
      XampleSet xc, xr;
      NyquistSignal sig;
      if (need_c) {
        xc = clean_c;
        add_coefficient_noise(xc, noise, scale);
      }
      if (need_r) {
        xr = clean_r;
        add_coefficient_noise(xr, noise, scale);
      }
      if (need_sig) sig = clean_sig + noise.scaled(scale).to_signal(prm.pri, N);
      for (int di = 0; di < D; ++di) {
        const auto& name = c.detectors[di];
        std::vector<Detection> det;
        if (name == "focusing")
          det = focusing_detect(xc, dict_c, fo);
        else if (name == "focusing-random")
          det = focusing_detect(xr, dict_r, fo);
        else if (name == "twostage")
          det = twostage_detect(xc, dict_c, to);
        else if (name == "classic")
          det = classic_detect(sig, prm, shape, co);
        else
          det = classic_detect(decimate(sig, c.decimation), prm, shape, co);
        out[static_cast<std::size_t>(si) * D + di] = score(scene.targets, det, crit, prm.pri);
      }
    }
    per_trial[t] = std::move(out);
    done[t] = 1;
    } catch (...) {
#pragma omp critical(dopfocus_suite_error)
      if (!failure) failure = std::current_exception();
      continue;
    }
#pragma omp critical(dopfocus_suite_progress)
    {
      ++finished;
      if (hooks.progress) hooks.progress(finished, c.trials);
    }
  }

  if (failure) std::rethrow_exception(failure);
  for (int t = 0; t < c.trials; ++t) result.trials_done += done[t];
  result.complete = result.trials_done == c.trials;
  for (int si = 0; si < S; ++si)
    for (int di = 0; di < D; ++di) {
      SuiteRow row;
      row.snr_db = c.snr_db[si];
      row.detector = c.detectors[di];
      double st = 0.0, sf = 0.0;
      for (int t = 0; t < c.trials; ++t) {
        if (!done[t]) continue;
        const auto& r = per_trial[t][static_cast<std::size_t>(si) * D + di];
        ++row.trials;
        row.hits += r.hits;
        row.opportunities += r.hits + r.misses;
        if (r.misses == 0) ++row.all_hit_trials;
        for (double e : r.time_errors) st += e * e;
        for (double e : r.freq_errors) sf += e * e;
      }
      row.hit_rate = wilson_interval(row.hits, row.opportunities);
      row.rmse_t = row.hits > 0 ? std::sqrt(st / row.hits) : std::nan("");
      row.rmse_f = row.hits > 0 ? std::sqrt(sf / row.hits) : std::nan("");
      row.mean_hits = row.trials > 0 ? double(row.hits) / row.trials : 0.0;
      result.rows.push_back(row);
    }
  return result;
}

std::string suite_csv(const SuiteResult& result) {
  std::ostringstream out;
  out << "snr_db,detector,hit_rate,ci_lo,ci_hi,rmse_t,rmse_f,trials\n";
  char buf[256];
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%s,%.10g,%.10g,%.10g,%.10g,%.10g,%d\n", r.snr_db,
                  r.detector.c_str(), r.hit_rate.p, r.hit_rate.lo, r.hit_rate.hi, r.rmse_t, r.rmse_f,
                  r.trials);
    out << buf;
  }
  return out.str();
}

void write_suite_csv(const std::filesystem::path& path, const SuiteResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << suite_csv(result);
}

}  // namespace dopfocus
