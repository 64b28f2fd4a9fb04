#include "dopfocus/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <tuple>

namespace dopfocus {

HitCriterion HitCriterion::nyquist(const RadarParams& params, double bins) {
  return {bins * params.delay_bin(), bins * params.doppler_bin()};
}

TrialResult score(const std::vector<Target>& truth, const std::vector<Detection>& est,
                  const HitCriterion& crit, double pri) {
  if (!(crit.a_time > 0.0 && crit.b_freq > 0.0))
    throw std::invalid_argument("hit ellipse axes must be positive");
  struct Pair {
    double d2;
    int i, j;
    double dt, dn;
  };
  std::vector<Pair> pairs;
  int valid = 0;
  for (std::size_t j = 0; j < est.size(); ++j) {
    if (est[j].degenerate) continue;
    ++valid;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const double dt = wrap_delay(est[j].tau_hat - truth[i].delay + 0.5 * pri, pri) - 0.5 * pri;
      const double dn = wrap_doppler(est[j].nu_hat - truth[i].doppler, pri);
      const double d2 = (dt / crit.a_time) * (dt / crit.a_time) + (dn / crit.b_freq) * (dn / crit.b_freq);
      if (d2 < 1.0) pairs.push_back({d2, int(i), int(j), dt, dn});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.d2, a.i, a.j) < std::tie(b.d2, b.i, b.j);
  });
  TrialResult r;
  r.matched.assign(truth.size(), -1);
  std::vector<char> used(est.size(), 0);
  for (const auto& p : pairs) {
    if (r.matched[p.i] >= 0 || used[p.j]) continue;
    r.matched[p.i] = p.j;
    used[p.j] = 1;
    r.time_errors.push_back(p.dt);
    r.freq_errors.push_back(p.dn);
  }
  r.hits = static_cast<int>(r.time_errors.size());
  r.misses = static_cast<int>(truth.size()) - r.hits;
  r.false_alarms = valid - r.hits;
  return r;
}

Proportion wilson_interval(long successes, long trials, double z) {
  if (trials <= 0) return {0.0, 0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double z2 = z * z;
  const double den = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / den;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / den;
  return {p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

SnrGainReport snr_gain_experiment(const RadarParams& params, double sigma2, int draws,
                                  std::uint64_t seed, int kappa_size) {
  if (draws < 1) throw std::invalid_argument("draws must be >= 1");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  const PulseShape shape(params, PulseOptions{});
  const auto kappa = select_kappa(params, kappa_size, KappaMode::consecutive);
  const int P = params.pulse_count;
  const double nu0 = wrap_doppler(params.doppler_bin() * (P / 4), params.pri);
  const Target t{0.3 * params.pri, nu0, cplx{1.0, 0.0}};
  const Window rect = make_window(WindowKind::rectangular, P);

  const auto clean = xample_analytic(params, shape, {t}, nullptr, kappa);
  const double sig_pre = clean.coeffs.cwiseAbs2().mean();
  const double sig_post = focus_at(clean, nu0, rect).psi.cwiseAbs2().mean();

  double acc = 0.0, acc_focused = 0.0;
  for (int d = 0; d < draws; ++d) {
    const auto w = xample_analytic(params, shape, {}, nullptr, kappa, sigma2,
                                   derive_seed(seed, static_cast<std::uint64_t>(d), 0));
    acc += w.coeffs.cwiseAbs2().sum();
    acc_focused += focus_at(w, nu0, rect).psi.cwiseAbs2().sum();
  }
  SnrGainReport r;
  r.noise_var = acc / (double(draws) * P * kappa.size());
  r.focused_noise_var = acc_focused / (double(draws) * kappa.size());
  r.expected_noise_var = sigma2 / params.pri;
  r.expected_focused_var = P * sigma2 / params.pri;
  r.pre_snr = sig_pre / r.noise_var;
  r.post_snr = sig_post / r.focused_noise_var;
  r.ratio = r.post_snr / r.pre_snr;
  return r;
}

std::vector<Target> focus_annihilate(const XampleSet& x, const PulseShape& shape) {
  const int P = x.pulses();
  const auto& k = x.kappa.kappa;
  for (std::size_t i = 1; i < k.size(); ++i)
    if (k[i] != k[i - 1] + 1) throw std::invalid_argument("annihilating path needs consecutive kappa");
  const auto grid = focus_grid(x, P, make_window(WindowKind::rectangular, P), Exec::serial);
  std::vector<double> energy(P);
  double emax = 0.0;
  for (int r = 0; r < P; ++r) {
    energy[r] = grid.psi.row(r).squaredNorm();
    emax = std::max(emax, energy[r]);
  }
  std::vector<Target> out;
  if (emax == 0.0) return out;
  std::vector<cplx> s(k.size());
  for (int r = 0; r < P; ++r) {
    if (energy[r] <= 1e-16 * emax) continue;
    for (std::size_t i = 0; i < k.size(); ++i)
      s[i] = grid.psi(r, i) * x.params.pri / (double(P) * shape.spectrum_at(k[i]));
    const auto sol = annihilating_solve(s, k.front(), 0, x.params.pri);
    if (!sol.recovered) continue;
    for (int l = 0; l < sol.order; ++l) out.push_back({sol.delays[l], grid.nu(r), sol.amplitudes[l]});
  }
  return out;
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Draws delays in [0.05 tau, 0.95 tau) spaced by at least 0.02 tau within a group.
double spaced_delay(std::mt19937_64& rng, double pri, const std::vector<double>& taken) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double d = uniform(rng, 0.05 * pri, 0.95 * pri);
    bool ok = true;
    for (double t : taken) ok = ok && std::abs(t - d) >= 0.02 * pri;
    if (ok) return d;
  }
  throw std::runtime_error("could not place delays with the required spacing");
}

}  // namespace

std::vector<Target> exact_recovery_scene(const RadarParams& params, int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int P = params.pulse_count;
  std::vector<Target> t;
  std::vector<std::vector<double>> by_bin(P);
  for (int l = 0; l < L; ++l) {
    const int m = std::uniform_int_distribution<int>(-(P / 2), P - P / 2 - 1)(rng);
    auto& taken = by_bin[m + P / 2];
    const double d = spaced_delay(rng, params.pri, taken);
    taken.push_back(d);
    t.push_back({d, kTwoPi * m / (params.pri * P), std::polar(1.0, uniform(rng, 0.0, kTwoPi))});
  }
  return t;
}

ExactRecoveryRow exact_recovery_trials(int L, int M, int kappa_size, int trials,
                                       std::uint64_t seed) {
  const auto params = make_params(M, 10e-6, 200, 10e-6);
  const PulseShape shape(params, PulseOptions{});
  const auto kappa = select_kappa(params, kappa_size, KappaMode::consecutive);
  ExactRecoveryRow row{L, M, kappa_size, trials, 0, 0.0, 0.0};
  auto key = [](const Target& a) { return std::make_pair(a.doppler, a.delay); };
  for (int t = 0; t < trials; ++t) {
    auto truth = exact_recovery_scene(params, L, derive_seed(seed, t, 0));
    auto est = focus_annihilate(xample_analytic(params, shape, truth, nullptr, kappa), shape);
    if (static_cast<int>(est.size()) != L) {
      row.max_delay_rel_err = std::max(row.max_delay_rel_err, 1.0);
      row.max_amp_rel_err = std::max(row.max_amp_rel_err, 1.0);
      continue;
    }
    std::sort(truth.begin(), truth.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
    std::sort(est.begin(), est.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
    double de = 0.0, ae = 0.0;
    bool same_bins = true;
    for (int l = 0; l < L; ++l) {
      same_bins = same_bins && std::abs(est[l].doppler - truth[l].doppler) < 1e-9 * params.doppler_bin();
      de = std::max(de, std::abs(est[l].delay - truth[l].delay) / truth[l].delay);
      ae = std::max(ae, std::abs(est[l].amplitude - truth[l].amplitude) / std::abs(truth[l].amplitude));
    }
    if (!same_bins) de = ae = 1.0;
    row.max_delay_rel_err = std::max(row.max_delay_rel_err, de);
    row.max_amp_rel_err = std::max(row.max_amp_rel_err, ae);
    if (de < 1e-9 && ae < 1e-7) ++row.recovered;
  }
  return row;
}

std::vector<ExactRecoveryRow> theorem_bound_suite(const std::vector<int>& L_values,
                                                  const std::vector<int>& m_factors, int trials,
                                                  std::uint64_t seed) {
  std::vector<ExactRecoveryRow> rows;
  for (int L : L_values)
    for (int f : m_factors)
      rows.push_back(exact_recovery_trials(L, f * L, 2 * L, trials,
                                           derive_seed(seed, static_cast<std::uint64_t>(L),
                                                       static_cast<std::uint64_t>(f))));
  return rows;
}

AmbiguityPair ambiguity_pair(const RadarParams& params, int L, std::uint64_t seed) {
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  AmbiguityPair out;
  out.kappa = select_kappa(params, 2 * L - 1, KappaMode::consecutive);
  const int k0 = out.kappa.kappa.front();
  std::mt19937_64 rng(seed);
  std::vector<double> delays;
  for (int j = 0; j < 2 * L; ++j) delays.push_back(spaced_delay(rng, params.pri, delays));
  std::vector<cplx> u(2 * L), z(2 * L);
  for (int j = 0; j < 2 * L; ++j) u[j] = std::polar(1.0, -kTwoPi * delays[j] / params.pri);
  // Lagrange weights annihilate every polynomial of degree < 2L - 1 on these nodes.
  double zmax = 0.0;
  for (int j = 0; j < 2 * L; ++j) {
    cplx den{1.0, 0.0};
    for (int i = 0; i < 2 * L; ++i)
      if (i != j) den *= u[j] - u[i];
    z[j] = std::polar(1.0, kTwoPi * k0 * delays[j] / params.pri) / den;
    zmax = std::max(zmax, std::abs(z[j]));
  }
  for (int j = 0; j < 2 * L; ++j) {
    const Target t{delays[j], 0.0, z[j] / zmax};
    if (j < L)
      out.scene_a.push_back(t);
    else
      out.scene_b.push_back({t.delay, t.doppler, -t.amplitude});
  }
  const PulseShape shape(params, PulseOptions{});
  const auto a = xample_analytic(params, shape, out.scene_a, nullptr, out.kappa);
  const auto b = xample_analytic(params, shape, out.scene_b, nullptr, out.kappa);
  out.max_sample_diff = (a.coeffs - b.coeffs).cwiseAbs().maxCoeff() / a.coeffs.cwiseAbs().maxCoeff();
  out.min_param_gap = params.pri;
  for (const auto& ta : out.scene_a)
    for (const auto& tb : out.scene_b)
      out.min_param_gap = std::min(out.min_param_gap, std::abs(ta.delay - tb.delay));
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

}  // namespace dopfocus
