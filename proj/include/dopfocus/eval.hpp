#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dopfocus/detectors.hpp"

namespace dopfocus {

/// Detection counts as a hit when strictly inside the ellipse
/// (dtau / a)^2 + (dnu / b)^2 < 1.
struct HitCriterion {
  double a_time = 0.0;  ///< [s]
  double b_freq = 0.0;  ///< [rad/s]

  /// Three Nyquist bins on each axis.
  static HitCriterion nyquist(const RadarParams& params, double bins = 3.0);
};

struct TrialResult {
  int hits = 0;
  int misses = 0;
  int false_alarms = 0;
  std::vector<double> time_errors;  ///< per hit, signed [s]
  std::vector<double> freq_errors;  ///< per hit, signed [rad/s]
  std::vector<int> matched;         ///< per truth target: detection index or -1
};

/// Greedy one-to-one assignment by normalized elliptic distance, closest pair
/// first. Delay and Doppler differences are wrapped to the unambiguous region.
/// Degenerate detections are ignored.
TrialResult score(const std::vector<Target>& truth, const std::vector<Detection>& est,
                  const HitCriterion& crit, double pri);

struct Proportion {
  double p = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval; z = 1.959964 gives 95 %.
Proportion wilson_interval(long successes, long trials, double z = 1.959964);

struct SnrGainReport {
  double pre_snr = 0.0;   ///< |c_p[k]|^2 / E|w_p[k]|^2, empirical
  double post_snr = 0.0;  ///< |Psi[k]|^2 / E|w_nu[k]|^2, empirical
  double ratio = 0.0;     ///< post / pre
  double noise_var = 0.0;           ///< empirical E|w_p[k]|^2
  double focused_noise_var = 0.0;   ///< empirical E|w_nu[k]|^2
  double expected_noise_var = 0.0;  ///< sigma^2 / tau
  double expected_focused_var = 0.0;  ///< P sigma^2 / tau
};

/// Monte Carlo SNR before and after focusing for one on-grid, on-focus
/// target with a rectangular window.
SnrGainReport snr_gain_experiment(const RadarParams& params, double sigma2, int draws,
                                  std::uint64_t seed, int kappa_size = 8);

struct ExactRecoveryRow {
  int L = 0;
  int M = 0;
  int kappa_size = 0;
  int trials = 0;
  int recovered = 0;
  double max_delay_rel_err = 0.0;
  double max_amp_rel_err = 0.0;
};

/// Focusing with P = M and per-bin annihilating filters on |kappa| consecutive
/// coefficients; noiseless, on-grid Dopplers, continuous delays.
std::vector<Target> focus_annihilate(const XampleSet& x, const PulseShape& shape);

/// Random trial scene for the exact-recovery study: on-grid Dopplers
/// (M = P), delays on [0.05 tau, 0.95 tau) with 0.02 tau minimum spacing
/// inside a Doppler bin, unit-modulus amplitudes.
std::vector<Target> exact_recovery_scene(const RadarParams& params, int L, std::uint64_t seed);

ExactRecoveryRow exact_recovery_trials(int L, int M, int kappa_size, int trials,
                                       std::uint64_t seed);

/// Runs exact_recovery_trials for each L and each M = f * L in m_factors, with |kappa| = 2L.
std::vector<ExactRecoveryRow> theorem_bound_suite(const std::vector<int>& L_values,
                                                  const std::vector<int>& m_factors, int trials,
                                                  std::uint64_t seed);

/// Two distinct L-target scenes in one Doppler bin whose coefficients agree
/// on 2L - 1 consecutive indices.
struct AmbiguityPair {
  std::vector<Target> scene_a;
  std::vector<Target> scene_b;
  CoefficientSet kappa;
  double max_sample_diff = 0.0;  ///< max |c_A - c_B| / max |c_A|
  double min_param_gap = 0.0;    ///< smallest delay gap between the scenes [s]
};

AmbiguityPair ambiguity_pair(const RadarParams& params, int L, std::uint64_t seed);

enum class ScenarioKind { random, dynamic_range, clutter, doppler_pair };
std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

/// Valid detector names for suites and the CLI.
const std::vector<std::string>& detector_names();

struct SuiteConfig {
  std::string name = "suite";
  RadarParams params;
  PulseOptions pulse;
  ScenarioKind scenario = ScenarioKind::random;
  int targets = 5;
  double amp_db_spread = 0.0;
  int kappa_size = 0;
  KappaMode kappa_mode = KappaMode::consecutive;
  int kappa_offset = 0;
  int M = 0;  ///< 0 means 2P
  std::string window = "rect";
  bool refine = true;
  bool gridless = false;
  std::vector<double> snr_db;
  std::vector<std::string> detectors;
  int trials = 100;
  int first_trial = 0;  ///< trial ids run from first_trial to first_trial + trials - 1
  std::uint64_t seed = 1;
  int decimation = 10;
  double hit_bins = 3.0;
  // dynamic_range
  double dynamic_range_db = 20.0;
  /// Doppler offset of the weak target in Nyquist bins (sign drawn at random).
  double pair_doppler_bins = 2.0;
  // clutter
  int clutter_scatterers = 400;
  double scr_db = -30.0;
  double dc_exclusion_bins = -1.0;
  // doppler_pair
  double doppler_separation_bins = 10.0;
  /// 0 uses every available thread.
  int workers = 0;
};

struct SuiteRow {
  double snr_db = 0.0;
  std::string detector;
  long hits = 0;
  long opportunities = 0;  ///< trials * targets
  Proportion hit_rate;
  double rmse_t = 0.0;
  double rmse_f = 0.0;
  int trials = 0;
  int all_hit_trials = 0;  ///< trials in which every target was hit
  double mean_hits = 0.0;
};

struct SuiteResult {
  std::string name;
  std::vector<SuiteRow> rows;  ///< snr-major, detector order as configured
  bool complete = true;
  int trials_done = 0;

  const SuiteRow* find(double snr_db, const std::string& detector) const;
};

struct SuiteHooks {
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(int done, int total)> progress;
};

/// Scene, noise realization and sample sets depend only on (seed, trial), so
/// every detector sees identical data and the output is independent of the
/// worker count.
SuiteResult run_suite(const SuiteConfig& config, const SuiteHooks& hooks = {});

/// Truth scene of one trial (same draw run_suite uses).
struct TrialScene {
  std::vector<Target> targets;
  ClutterField clutter;
  Target reference;  ///< SNR reference
};
TrialScene suite_trial_scene(const SuiteConfig& config, int trial);

/// snr_db,detector,hit_rate,ci_lo,ci_hi,rmse_t,rmse_f,trials
void write_suite_csv(const std::filesystem::path& path, const SuiteResult& result);
std::string suite_csv(const SuiteResult& result);

/// Seed for (master, trial, stream) through std::seed_seq.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t stream);

}  // namespace dopfocus
