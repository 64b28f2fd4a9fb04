#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dopfocus/types.hpp"

namespace dopfocus {

/// Description of one coherent processing interval.
struct RadarParams {
  int pulse_count = 1;      ///< P
  double pri = 0.0;         ///< tau [s]
  double bandwidth = 0.0;   ///< B_h [Hz]
  double carrier = 0.0;     ///< f_c [Hz]; only used by check_assumptions
  double pulse_time = 0.0;  ///< T_p [s]
  double noise_psd = 0.0;   ///< N_0 [W/Hz]; per-sample noise power at rate B_h is N_0 * B_h

  /// Nyquist sample count per frame, N = tau * B_h.
  int nyquist_count() const;
  /// Delay resolution 1 / B_h [s].
  double delay_bin() const { return 1.0 / bandwidth; }
  /// Doppler resolution 2 pi / (P tau) [rad/s].
  double doppler_bin() const { return kTwoPi / (pulse_count * pri); }

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// Builds parameters with B_h = nyquist_count / pri so that N is exactly integral.
RadarParams make_params(int pulse_count, double pri, int nyquist_count, double pulse_time,
                        double carrier = 0.0);

struct Target {
  double delay = 0.0;    ///< tau_l [s], in [0, pri)
  double doppler = 0.0;  ///< nu_l [rad/s], in [-pi/pri, pi/pri)
  cplx amplitude{0.0, 0.0};

  bool operator==(const Target&) const = default;
};

struct ClutterField {
  std::vector<Target> scatterers;
  double doppler_spread = 0.0;  ///< full width of the Doppler band around zero [rad/s]
  double scr_db = 0.0;

  double total_power() const;
  bool operator==(const ClutterField&) const = default;
};

/// Minimum spacing enforced between generated targets. Two targets conflict
/// when they are closer than both limits at once (same resolution cell).
struct SceneSpacing {
  std::optional<double> min_delay;    ///< default: one Nyquist delay bin
  std::optional<double> min_doppler;  ///< default: one Nyquist Doppler bin
  double max_delay_fraction = 0.95;   ///< delays drawn on [0, fraction * pri)
  int max_attempts = 10000;
};

/// Draws L targets uniformly over the unambiguous region. Unit peak
/// amplitude; with amp_db_spread > 0 the magnitudes are uniform in dB on
/// [-amp_db_spread, 0]. Phases uniform on [0, 2 pi).
std::vector<Target> random_scene(const RadarParams& params, int count, std::uint64_t seed,
                                 double amp_db_spread = 0.0, const SceneSpacing& spacing = {});

/// Clutter scatterers spread over all delays and one Doppler bin around zero,
/// scaled so that the summed power equals ref_power * 10^(-scr_db / 10).
ClutterField make_clutter(const RadarParams& params, int n_scatterers, double scr_db,
                          double ref_power, std::uint64_t seed);

/// Optional per-target motion used to evaluate the slow-target assumptions.
struct Kinematics {
  double radial_velocity = 0.0;      ///< [m/s]
  double radial_acceleration = 0.0;  ///< [m/s^2]
  std::optional<double> range;       ///< [m]; defaults to c * delay / 2
};

struct AssumptionCheck {
  // Each ratio is lhs / rhs of a "lhs << rhs" inequality; it passes when
  // the ratio is below AssumptionReport::margin.
  double far_ratio = 0.0;          ///< A1: |rdot| P tau / r
  double narrowband_ratio = 0.0;   ///< A2: |nu| / (2 pi f_c / (P tau B_h))
  double intrapulse_ratio = 0.0;   ///< A2: |nu| T_p / (2 pi)
  double acceleration_ratio = 0.0; ///< A3: |rddot| / (c / (2 f_c (P tau)^2))
  bool a1 = true;
  bool a2 = true;
  bool a3 = true;
};

struct AssumptionReport {
  static constexpr double margin = 0.1;
  bool evaluated = false;  ///< false when the carrier frequency is unknown
  std::vector<AssumptionCheck> targets;
  bool a1 = true;
  bool a2 = true;
  bool a3 = true;
  bool all() const { return a1 && a2 && a3; }
};

/// Advisory check of A1-A3. Kinematics are matched to targets by index.
AssumptionReport check_assumptions(const RadarParams& params, const std::vector<Target>& targets,
                                   const std::vector<Kinematics>& kinematics);

/// True when delay/Doppler of every target lie in the unambiguous region and
/// no two targets share the same (delay, Doppler) pair.
bool scene_is_valid(const RadarParams& params, const std::vector<Target>& targets);

/// Doppler in rad/s produced by a radial velocity at the given carrier.
double doppler_from_velocity(double radial_velocity, double carrier);

}  // namespace dopfocus
