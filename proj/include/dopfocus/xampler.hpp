#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dopfocus/scene.hpp"
#include "dopfocus/waveform.hpp"

namespace dopfocus {

enum class KappaMode { consecutive, random };

std::string to_string(KappaMode mode);
KappaMode kappa_mode_from_string(const std::string& name);

/// Fourier-coefficient index set, sorted ascending.
struct CoefficientSet {
  std::vector<int> kappa;
  KappaMode mode = KappaMode::consecutive;

  int size() const { return static_cast<int>(kappa.size()); }
  bool operator==(const CoefficientSet&) const = default;
};

/// Consecutive mode takes a run centered on DC shifted by offset; random mode
/// draws without replacement over the band. Throws when count exceeds the
/// band capacity or a shifted run leaves the band.
CoefficientSet select_kappa(const RadarParams& params, int count, KappaMode mode,
                            std::uint64_t seed = 0, int offset = 0);

/// Per-pulse Fourier coefficients c_p[k] on kappa.
struct XampleSet {
  CMatrix coeffs;  ///< P x |kappa|
  CoefficientSet kappa;
  RadarParams params;
  double noise_var = 0.0;  ///< per-coefficient noise variance actually injected

  int pulses() const { return static_cast<int>(coeffs.rows()); }
  int width() const { return static_cast<int>(coeffs.cols()); }
};

/// Closed-form coefficients. With noise_sigma2 > 0 adds iid circular Gaussian
/// noise of variance noise_sigma2 / tau to every entry.
XampleSet xample_analytic(const RadarParams& params, const PulseShape& shape,
                          const std::vector<Target>& targets, const ClutterField* clutter,
                          const CoefficientSet& kappa, double noise_sigma2 = 0.0,
                          std::uint64_t seed = 0);

/// Coefficients computed from sampled frames by periodic quadrature of
/// (1/tau) int_0^tau x(t) e^{-j 2 pi k t / tau} dt. The signal must be sampled
/// at or above B_h.
XampleSet xample_numeric(const NyquistSignal& signal, const RadarParams& params,
                         const CoefficientSet& kappa);

/// Adds the kappa columns of a noise realization, scaled by scale.
/// scale^2 times the realization's per-coefficient variance is recorded.
void add_coefficient_noise(XampleSet& x, const NoiseRealization& noise, double scale);

/// sigma^2 such that sigma^2 / tau is the coefficient noise variance that
/// gives ref_target the requested SNR.
double noise_sigma2_for_snr(const RadarParams& params, const PulseShape& shape,
                            const Target& ref_target, double snr_db);

/// Binary dump: "DFXS", u32 version, u32 P, u32 |kappa|, f64 tau, f64 noise_var,
/// int32 kappa[|kappa|], complex64 coefficients row-major. All little-endian.
void write_xamples(const std::filesystem::path& path, const XampleSet& x);
/// Dumps do not carry the bandwidth; params supplies it and must agree with
/// the stored P and tau.
XampleSet read_xamples(const std::filesystem::path& path, const RadarParams& params);

struct XampleHeader {
  int pulses = 0;
  int width = 0;
  double pri = 0.0;
  double noise_var = 0.0;
  std::vector<int> kappa;
};
XampleHeader read_xample_header(const std::filesystem::path& path);

/// One row per (p, k): p,k,re,im.
void write_xamples_csv(const std::filesystem::path& path, const XampleSet& x);

}  // namespace dopfocus
