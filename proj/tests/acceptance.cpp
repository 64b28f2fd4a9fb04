// Acceptance run: one PASS/FAIL line per criterion, extra context as INFO.
// Usage: acceptance [output_dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dopfocus/eval.hpp"

using namespace dopfocus;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kOracleRelErr = 1e-6;
constexpr double kMachineRel = 1e-12;
constexpr double kNullTol = 1e-10;
constexpr double kStatRel = 0.05;
constexpr int kNoiseDraws = 10000;
constexpr double kCoherenceConsecutive = 0.9;
constexpr double kCoherenceRandom = 0.3;
constexpr double kCoherenceSlack = 0.1;
constexpr int kHeadlineTrials = 200;
constexpr double kHeadlineTopRate = 0.95;
constexpr int kPairTrials = 20;
constexpr int kDynamicTrials = 100;
constexpr double kDynamicFocusFrac = 0.9;
constexpr double kDynamicClassicFrac = 0.5;
constexpr int kClutterTrials = 50;
constexpr double kClutterTaylorFrac = 0.9;
constexpr double kClutterRectMeanHits = 5.0;

fs::path g_out = ".";
int g_failures = 0;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void report(int id, bool pass, const std::string& detail, double secs) {
  std::printf("CRITERION %d %s  %s  [%.1fs]\n", id, pass ? "PASS" : "FAIL", detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void info(int id, const std::string& detail) {
  std::printf("  INFO %d  %s\n", id, detail.c_str());
  std::fflush(stdout);
}

void timed(int id, const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  auto [ok, detail] = body();
  report(id, ok, detail,
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

RadarParams desk_params() { return make_params(100, 10e-6, 200, 5e-6); }

SuiteResult run_and_save(const SuiteConfig& c) {
  auto r = run_suite(c);
  write_suite_csv(g_out / (c.name + ".csv"), r);
  return r;
}

// 1: closed-form coefficients agree with quadrature of the synthesized signal.
std::pair<bool, std::string> oracle() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const int P = std::uniform_int_distribution<int>(1, 16)(rng);
    const int L = std::uniform_int_distribution<int>(1, 5)(rng);
    const auto params = make_params(P, 10e-6, 200, 5e-6);
    const PulseShape shape(params);
    const auto scene = random_scene(params, L, rng(), 6.0);
    const auto kappa = select_kappa(params, 200, KappaMode::consecutive);
    const auto a = xample_analytic(params, shape, scene, nullptr, kappa);
    const auto n = xample_numeric(synthesize(params, shape, scene, nullptr, 8), params, kappa);
    worst = std::max(worst, (a.coeffs - n.coeffs).norm() / a.coeffs.norm());
  }
  return {worst < kOracleRelErr, fmt("max relative Frobenius error %.3e over 50 scenes (< %.0e)",
                                     worst, kOracleRelErr)};
}

// 2: focusing gain, Dirichlet null, focused noise variance and SNR gain.
std::pair<bool, std::string> focusing_identities() {
  const auto params = desk_params();
  const int P = params.pulse_count;
  const PulseShape shape(params);
  const auto kappa = select_kappa(params, 20, KappaMode::consecutive);
  const auto rect = make_window(WindowKind::rectangular, P);

  const Target t{3.1e-6, kTwoPi * 17 / (params.pri * 200), cplx(0.6, 0.8)};
  const auto x = xample_analytic(params, shape, {t}, nullptr, kappa);
  const auto on = focus_at(x, t.doppler, rect);
  double gain_err = 0.0;
  for (int j = 0; j < x.width(); ++j)
    gain_err = std::max(gain_err, std::abs(on.psi[j] / x.coeffs(0, j) - double(P)) / P);
  const bool a = gain_err < kMachineRel;

  const double null_nu = t.doppler + params.doppler_bin();
  const double g_closed = std::abs(dirichlet_gain(null_nu, t.doppler, params.pri, rect)) / P;
  const double g_direct = focus_at(x, null_nu, rect).psi.norm() / on.psi.norm();
  const double g_inside = std::abs(dirichlet_gain(t.doppler + 0.99 * params.doppler_bin(), t.doppler,
                                                  params.pri, rect)) / P;
  const bool b = g_closed < kNullTol && g_direct < kNullTol && g_inside > kNullTol;

  const double sigma2 = 1e-12;
  const auto snr = snr_gain_experiment(params, sigma2, kNoiseDraws, 77);
  const double var_err = std::abs(snr.focused_noise_var / snr.expected_focused_var - 1.0);
  const bool c = var_err < kStatRel;
  const double ratio_err = std::abs(snr.ratio / P - 1.0);
  const bool d = ratio_err < kStatRel;

  // Time-domain noise through quadrature lands at sigma^2 / tau per coefficient.
  const Target ref{0.0, 0.0, 1.0};
  const double power = noise_power_for_snr(shape, ref, 0.0);
  const auto full = select_kappa(params, 200, KappaMode::consecutive);
  const auto w = draw_noise(params, 9).scaled(std::sqrt(power)).to_signal(params.pri, 400);
  const auto nx = xample_numeric(w, params, full);
  const double law = nx.coeffs.cwiseAbs2().mean() /
                     (noise_sigma2_for_snr(params, shape, ref, 0.0) / params.pri);
  const bool e = std::abs(law - 1.0) < kStatRel;

  return {a && b && c && d && e,
          fmt("(a) |gain/P - 1| = %.1e; (b) null %.1e / %.1e; (c) focused var ratio %.4f; "
              "(d) SNR gain %.2f (P = %d); noise law %.4f",
              gain_err, g_closed, g_direct, snr.focused_noise_var / snr.expected_focused_var,
              snr.ratio, P, law)};
}

// 3: exact recovery with 2L consecutive coefficients; ambiguity below that.
std::pair<bool, std::string> exact_recovery() {
  bool ok = true;
  std::string detail;
  for (int L : {1, 2, 3})
    for (int f : {2, 4}) {
      const auto r = exact_recovery_trials(L, f * L, 2 * L, 100,
                                           derive_seed(303, static_cast<std::uint64_t>(L),
                                                       static_cast<std::uint64_t>(f)));
      ok = ok && r.recovered == r.trials;
      detail += fmt("L=%d M=%d %d/%d; ", L, r.M, r.recovered, r.trials);
      info(3, fmt("L=%d M=%d |kappa|=%d recovered %d/%d  max delay err %.2e  max amp err %.2e", L,
                  r.M, r.kappa_size, r.recovered, r.trials, r.max_delay_rel_err, r.max_amp_rel_err));
    }
  for (int L : {1, 2, 3}) {
    const auto pair = ambiguity_pair(make_params(8, 10e-6, 200, 10e-6), L, 31);
    const bool amb = pair.max_sample_diff < 1e-9 && pair.min_param_gap > 0.0;
    ok = ok && amb;
    info(3, fmt("|kappa|=%d, L=%d: two scenes with delay gap %.3e s differ by %.2e on kappa", 2 * L - 1,
                L, pair.min_param_gap, pair.max_sample_diff));
  }
  detail += "ambiguity pairs for 2L-1";
  return {ok, detail};
}

// 4: coherence of consecutive and random kappa on the half-bin grid.
std::pair<bool, std::string> coherence_figures() {
  const auto params = make_params(100, 10e-6, 2000, 5e-6);
  PulseOptions flat;
  flat.dispersive = false;
  const PulseShape shape(params, flat);
  const double step = half_bin_delay(params);
  const double cons =
      coherence(build_dictionary(params, shape, select_kappa(params, 200, KappaMode::consecutive), step));
  double rnd = 0.0, rnd_nyq = 0.0;
  for (int s = 0; s < 20; ++s) {
    const auto k = select_kappa(params, 200, KappaMode::random, 1000 + s);
    rnd += coherence(build_dictionary(params, shape, k, step)) / 20.0;
    rnd_nyq += coherence(build_dictionary(params, shape, k, params.delay_bin())) / 20.0;
  }
  info(4, fmt("random kappa on the Nyquist delay grid (N_tau = 2000): mean coherence %.3f", rnd_nyq));
  const bool ok = std::abs(cons - kCoherenceConsecutive) <= kCoherenceSlack &&
                  std::abs(rnd - kCoherenceRandom) <= kCoherenceSlack;
  return {ok, fmt("N_tau = 4000: consecutive %.3f (target 0.9 +- 0.1), random mean of 20 %.3f "
                  "(target 0.3 +- 0.1)",
                  cons, rnd)};
}

// 5: detector ordering over SNR at desk scale.
std::pair<bool, std::string> headline() {
  SuiteConfig c;
  c.name = "headline";
  c.params = desk_params();
  c.targets = 5;
  c.kappa_size = 20;
  c.M = 200;
  c.snr_db = {-30, -25, -20, -15, -10, -5, 0};
  c.detectors = {"focusing", "focusing-random", "twostage", "classic", "classic-decimated"};
  c.trials = kHeadlineTrials;
  c.seed = 5;
  const auto r = run_and_save(c);
  for (const auto& row : r.rows)
    info(5, fmt("%6.1f dB %-18s %.3f [%.3f, %.3f]", row.snr_db, row.detector.c_str(), row.hit_rate.p,
                row.hit_rate.lo, row.hit_rate.hi));

  bool a_raw = true;
  int strict = 0;
  for (double s : c.snr_db) {
    const auto* f = r.find(s, "focusing");
    const auto* t = r.find(s, "twostage");
    a_raw = a_raw && f->hit_rate.p >= t->hit_rate.p;
    if (s <= -15 && f->hit_rate.lo > t->hit_rate.hi) ++strict;
  }
  const bool a = a_raw && strict >= 2;
  const double top = r.find(0.0, "focusing")->hit_rate.p;
  const bool b = top >= kHeadlineTopRate;

  bool mono = true;
  for (const auto& d : c.detectors)
    for (std::size_t i = 0; i + 1 < c.snr_db.size(); ++i) {
      const auto* lo_snr = r.find(c.snr_db[i], d);
      const auto* hi_snr = r.find(c.snr_db[i + 1], d);
      if (hi_snr->hit_rate.hi < lo_snr->hit_rate.lo) {
        mono = false;
        info(5, fmt("monotonicity broken for %s between %g and %g dB", d.c_str(), c.snr_db[i],
                    c.snr_db[i + 1]));
      }
    }

  bool worst = true;
  for (double s : c.snr_db) {
    if (s > -10) continue;
    const double dec = r.find(s, "classic-decimated")->hit_rate.p;
    for (const auto& d : c.detectors)
      if (d != "classic-decimated" && dec > r.find(s, d)->hit_rate.p) {
        worst = false;
        info(5, fmt("classic-decimated above %s at %g dB", d.c_str(), s));
      }
  }
  return {a && b && mono && worst,
          fmt("(a) %s, %d strict points <= -15 dB; (b) focusing at 0 dB %.3f; (c) %s; (d) %s",
              a_raw ? "focusing >= two-stage everywhere" : "two-stage above focusing somewhere",
              strict, top, mono ? "monotone" : "not monotone",
              worst ? "decimated classic worst" : "decimated classic not worst")};
}

SuiteConfig pair_config() {
  SuiteConfig c;
  c.name = "doppler_pair";
  c.params = desk_params();
  c.scenario = ScenarioKind::doppler_pair;
  c.kappa_size = 20;
  c.M = 200;
  c.snr_db = {INFINITY};
  c.detectors = {"focusing", "twostage"};
  c.trials = kPairTrials;
  c.seed = 6;
  return c;
}

// 6: two targets in one delay cell, ten Doppler bins apart, noiseless.
std::pair<bool, std::string> doppler_pair() {
  const auto c = pair_config();
  const auto r = run_and_save(c);
  const auto* f = r.find(INFINITY, "focusing");
  const auto* t = r.find(INFINITY, "twostage");
  const bool ok = f->all_hit_trials == f->trials && t->all_hit_trials == 0;
  return {ok, fmt("focusing 2 hits in %d/%d trials; two-stage 2 hits in %d/%d (mean %.2f)",
                  f->all_hit_trials, f->trials, t->all_hit_trials, t->trials, t->mean_hits)};
}

SuiteConfig dynamic_config() {
  SuiteConfig c;
  c.name = "dynamic_range";
  c.params = desk_params();
  c.scenario = ScenarioKind::dynamic_range;
  c.kappa_size = 20;
  c.M = 200;
  c.snr_db = {-10};
  c.detectors = {"focusing", "classic"};
  c.trials = kDynamicTrials;
  c.seed = 7;
  return c;
}

// 7: strong and weak target in adjacent delay cells.
std::pair<bool, std::string> dynamic_range() {
  auto c = dynamic_config();
  const auto r = run_and_save(c);
  const auto* f = r.find(-10, "focusing");
  const auto* k = r.find(-10, "classic");
  const bool ok = f->all_hit_trials >= kDynamicFocusFrac * f->trials &&
                  k->all_hit_trials < kDynamicClassicFrac * k->trials;

  c.name = "dynamic_range_same_doppler";
  c.pair_doppler_bins = 0.0;
  c.detectors = {"focusing", "focusing-random", "classic"};
  const auto same = run_and_save(c);
  for (const auto& row : same.rows)
    info(7, fmt("same Doppler: %-16s both hit in %d/%d", row.detector.c_str(), row.all_hit_trials,
                row.trials));
  return {ok, fmt("focusing both hit in %d/%d; classic at Nyquist both hit in %d/%d", f->all_hit_trials,
                  f->trials, k->all_hit_trials, k->trials)};
}

// 8: targets around dense DC clutter.
std::pair<bool, std::string> clutter() {
  SuiteConfig c;
  c.name = "clutter_taylor";
  c.params = make_params(100, 10e-6, 2000, 5e-6);
  c.scenario = ScenarioKind::clutter;
  c.targets = 9;
  c.clutter_scatterers = 400;
  c.scr_db = -30;
  c.kappa_size = 200;
  c.M = 200;
  c.window = "taylor:5:-50";
  c.dc_exclusion_bins = 2;
  c.snr_db = {-20};
  c.detectors = {"focusing"};
  c.trials = kClutterTrials;
  c.seed = 8;
  const auto taylor = run_and_save(c);
  c.name = "clutter_rect";
  c.window = "rect";
  const auto rect = run_and_save(c);
  const auto* t = taylor.find(-20, "focusing");
  const auto* r = rect.find(-20, "focusing");
  const bool ok = t->all_hit_trials >= kClutterTaylorFrac * t->trials &&
                  r->mean_hits <= kClutterRectMeanHits;
  return {ok, fmt("Taylor: all 9 hit in %d/%d; rectangular: %.2f hits per trial on average",
                  t->all_hit_trials, t->trials, r->mean_hits)};
}

// 9: reruns give byte-identical tables, whatever the worker count.
std::pair<bool, std::string> determinism() {
  std::vector<SuiteConfig> configs = {pair_config(), dynamic_config()};
  SuiteConfig h;
  h.name = "headline_short";
  h.params = desk_params();
  h.kappa_size = 20;
  h.M = 200;
  h.snr_db = {-20, -5};
  h.detectors = detector_names();
  h.trials = 12;
  h.seed = 5;
  configs.push_back(h);

  bool ok = true;
  int compared = 0;
  for (auto c : configs) {
    c.trials = std::min(c.trials, 12);
    c.workers = 1;
    const auto p1 = g_out / ("rerun_" + c.name + "_a.csv");
    write_suite_csv(p1, run_suite(c));
    c.workers = 3;
    const auto p2 = g_out / ("rerun_" + c.name + "_b.csv");
    write_suite_csv(p2, run_suite(c));
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    const bool same = s1.str() == s2.str() && !s1.str().empty();
    if (!same) info(9, "tables differ for " + c.name);
    ok = ok && same;
    ++compared;
  }
  return {ok, fmt("%d suites rerun with 1 and 3 workers; tables %s", compared,
                  ok ? "byte-identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_out = argv[1];
  fs::create_directories(g_out);
  timed(1, oracle);
  timed(2, focusing_identities);
  timed(3, exact_recovery);
  timed(4, coherence_figures);
  timed(5, headline);
  timed(6, doppler_pair);
  timed(7, dynamic_range);
  timed(8, clutter);
  timed(9, determinism);
  std::printf("%d of 9 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
