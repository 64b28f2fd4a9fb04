#include "dopfocus/scene.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace dopfocus {

int RadarParams::nyquist_count() const {
  return static_cast<int>(std::llround(pri * bandwidth));
}

void RadarParams::validate() const {
  if (pulse_count < 1) throw std::invalid_argument("pulse_count must be >= 1");
  if (!(pri > 0.0)) throw std::invalid_argument("pri must be > 0");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
  if (!(pulse_time > 0.0) || pulse_time > pri * (1.0 + 1e-12))
    throw std::invalid_argument("pulse_time must satisfy 0 < T_p <= pri");
  if (carrier < 0.0 || noise_psd < 0.0)
    throw std::invalid_argument("carrier and noise_psd must be non-negative");
  const double n = pri * bandwidth;
  if (n < 1.0 - 1e-9 || std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
    throw std::invalid_argument("pri * bandwidth must be a positive integer, got " +
                                std::to_string(n));
}

RadarParams make_params(int pulse_count, double pri, int nyquist_count, double pulse_time,
                        double carrier) {
  RadarParams p;
  p.pulse_count = pulse_count;
  p.pri = pri;
  p.bandwidth = nyquist_count / pri;
  p.pulse_time = pulse_time;
  p.carrier = carrier;
  p.validate();
  return p;
}

double ClutterField::total_power() const {
  double s = 0.0;
  for (const auto& t : scatterers) s += std::norm(t.amplitude);
  return s;
}

namespace {

bool conflicts(const Target& a, const Target& b, double min_delay, double min_doppler,
               double pri) {
  const double dt = std::abs(a.delay - b.delay);
  const double dn = std::abs(wrap_doppler(a.doppler - b.doppler, pri));
  return dt < min_delay && dn < min_doppler;
}

}  // namespace

std::vector<Target> random_scene(const RadarParams& params, int count, std::uint64_t seed,
                                 double amp_db_spread, const SceneSpacing& spacing) {
  params.validate();
  if (count < 1) throw std::invalid_argument("random_scene: L must be >= 1");
  if (amp_db_spread < 0.0) throw std::invalid_argument("random_scene: negative dB spread");
  const double min_delay = spacing.min_delay.value_or(params.delay_bin());
  const double min_doppler = spacing.min_doppler.value_or(params.doppler_bin());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tau = params.pri;
  const double nu_max = kPi / tau;

  std::vector<Target> out;
  out.reserve(count);
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > spacing.max_attempts)
      throw std::invalid_argument("random_scene: cannot place " + std::to_string(count) +
                                  " targets with the requested separation");
    Target t;
    t.delay = unit(rng) * spacing.max_delay_fraction * tau;
    t.doppler = -nu_max + unit(rng) * 2.0 * nu_max;
    const double mag = std::pow(10.0, -amp_db_spread * unit(rng) / 20.0);
    const double phase = kTwoPi * unit(rng);
    t.amplitude = std::polar(mag, phase);
    bool ok = true;
    for (const auto& o : out) {
      if (conflicts(o, t, min_delay, min_doppler, tau)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(t);
  }
  return out;
}

ClutterField make_clutter(const RadarParams& params, int n_scatterers, double scr_db,
                          double ref_power, std::uint64_t seed) {
  params.validate();
  if (n_scatterers < 1) throw std::invalid_argument("make_clutter: n_scatterers must be >= 1");
  if (!(ref_power > 0.0)) throw std::invalid_argument("make_clutter: ref_power must be > 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> power(1.0);

  ClutterField field;
  field.doppler_spread = params.doppler_bin();
  field.scr_db = scr_db;
  field.scatterers.resize(n_scatterers);
  std::vector<double> powers(n_scatterers);
  double sum = 0.0;
  for (int i = 0; i < n_scatterers; ++i) {
    auto& s = field.scatterers[i];
    s.delay = unit(rng) * params.pri;
    s.doppler = (unit(rng) - 0.5) * field.doppler_spread;
    powers[i] = n_scatterers == 1 ? 1.0 : power(rng);
    s.amplitude = std::polar(1.0, kTwoPi * unit(rng));
    sum += powers[i];
  }
  const double total = ref_power * std::pow(10.0, -scr_db / 10.0);
  for (int i = 0; i < n_scatterers; ++i)
    field.scatterers[i].amplitude *= std::sqrt(total * powers[i] / sum);
  return field;
}

double doppler_from_velocity(double radial_velocity, double carrier) {
  return 4.0 * kPi * carrier * radial_velocity / kSpeedOfLight;
}

AssumptionReport check_assumptions(const RadarParams& params, const std::vector<Target>& targets,
                                   const std::vector<Kinematics>& kinematics) {
  AssumptionReport report;
  if (params.carrier <= 0.0) return report;
  report.evaluated = true;
  const double cpi = params.pulse_count * params.pri;
  const double fc = params.carrier;
  const double a2_bound = kTwoPi * fc / (cpi * params.bandwidth);
  const double a3_bound = kSpeedOfLight / (2.0 * fc * cpi * cpi);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const Kinematics k = i < kinematics.size() ? kinematics[i] : Kinematics{};
    AssumptionCheck c;
    const double range = k.range.value_or(kSpeedOfLight * targets[i].delay / 2.0);
    const double nu = k.radial_velocity != 0.0 ? doppler_from_velocity(k.radial_velocity, fc)
                                               : targets[i].doppler;
    const double travel = std::abs(k.radial_velocity) * cpi;
    c.far_ratio = travel == 0.0 ? 0.0 : (range > 0.0 ? travel / range : INFINITY);
    c.narrowband_ratio = std::abs(nu) / a2_bound;
    c.intrapulse_ratio = std::abs(nu) * params.pulse_time / kTwoPi;
    c.acceleration_ratio = std::abs(k.radial_acceleration) / a3_bound;
    c.a1 = c.far_ratio < AssumptionReport::margin;
    c.a2 = c.narrowband_ratio < AssumptionReport::margin &&
           c.intrapulse_ratio < AssumptionReport::margin;
    c.a3 = c.acceleration_ratio < AssumptionReport::margin;
    report.a1 = report.a1 && c.a1;
    report.a2 = report.a2 && c.a2;
    report.a3 = report.a3 && c.a3;
    report.targets.push_back(c);
  }
  return report;
}

bool scene_is_valid(const RadarParams& params, const std::vector<Target>& targets) {
  const double nu_max = kPi / params.pri;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& t = targets[i];
    if (!(t.delay >= 0.0 && t.delay < params.pri)) return false;
    if (!(t.doppler >= -nu_max && t.doppler < nu_max)) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (targets[j].delay == t.delay && targets[j].doppler == t.doppler) return false;
  }
  return true;
}

}  // namespace dopfocus
