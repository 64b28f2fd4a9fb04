#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dopfocus/scene.hpp"

namespace dopfocus {

enum class PulseKind {
  flat,                ///< constant |H| over the band
  root_raised_cosine,  ///< flat passband with a root-raised-cosine roll-off to B_h / 2
  gaussian,            ///< Gaussian |H| truncated at the band edge
  lowpass,             ///< flat over a reduced fraction of the band, zero elsewhere
};

std::string to_string(PulseKind kind);
PulseKind pulse_kind_from_string(const std::string& name);

struct PulseOptions {
  PulseKind kind = PulseKind::flat;
  double rolloff = 0.25;          ///< root-raised-cosine excess-bandwidth factor
  double gaussian_sigmas = 3.0;   ///< band edge sits at this many standard deviations
  double lowpass_fraction = 0.1;  ///< passband as a fraction of B_h
  /// Quadratic spectral phase spreading the pulse over T_p (linear FM).
  /// Without it the pulse is zero-phase and compact around t = 0.
  bool dispersive = true;
};

/// Transmit pulse described by its spectrum on the Fourier grid 2 pi k / tau.
/// The time-domain pulse is the tau-periodic Fourier series of that table, so
/// every frame's Fourier-series coefficients are exactly (1/tau) H(2 pi k / tau).
class PulseShape {
 public:
  PulseShape(const RadarParams& params, const PulseOptions& options = {});

  const PulseOptions& options() const { return options_; }
  PulseKind kind() const { return options_.kind; }
  double pri() const { return pri_; }
  double bandwidth() const { return bandwidth_; }
  double duration() const { return duration_; }

  /// Lowest and highest in-band index; the band holds exactly N indices.
  int band_lo() const { return band_lo_; }
  int band_hi() const { return band_hi_; }
  /// Tabulated range is twice the band; outside of it spectrum_at throws.
  int table_lo() const { return table_lo_; }
  int table_hi() const { return table_lo_ + static_cast<int>(table_.size()) - 1; }

  /// H(2 pi k / tau).
  cplx spectrum_at(int k) const;
  bool in_band(int k) const { return k >= band_lo_ && k <= band_hi_; }

  /// Periodized pulse h(t) = (1/tau) sum_k H_k e^{j 2 pi k t / tau}.
  cplx sample(double t) const;
  /// (1/T_p) * integral over one frame of |h(t)|^2; equals 1 after construction.
  double energy_per_time() const;

 private:
  PulseOptions options_;
  double pri_ = 0.0;
  double bandwidth_ = 0.0;
  double duration_ = 0.0;
  int band_lo_ = 0;
  int band_hi_ = -1;
  int table_lo_ = 0;
  std::vector<cplx> table_;
};

/// Complex baseband samples for P frames, frame_len samples each.
struct NyquistSignal {
  std::vector<cplx> samples;  ///< row-major P x frame_len
  double rate = 0.0;          ///< [Hz]
  int frame_len = 0;
  int pulses = 0;

  std::span<cplx> frame(int p) {
    return {samples.data() + static_cast<std::size_t>(p) * frame_len,
            static_cast<std::size_t>(frame_len)};
  }
  std::span<const cplx> frame(int p) const {
    return {samples.data() + static_cast<std::size_t>(p) * frame_len,
            static_cast<std::size_t>(frame_len)};
  }
};

/// Samples the received echo train at rate oversample * B_h. Doppler enters
/// as a constant phase per pulse.
NyquistSignal synthesize(const RadarParams& params, const PulseShape& shape,
                         const std::vector<Target>& targets,
                         const ClutterField* clutter = nullptr, int oversample = 1);

/// Per-sample complex noise variance at rate B_h that gives ref_target the
/// requested SNR_l = |alpha|^2 (1/T_p) int |h|^2 / (N_0 B_h).
double noise_power_for_snr(const PulseShape& shape, const Target& ref_target, double snr_db);

/// Band-limited circular Gaussian noise, described by its in-band Fourier
/// coefficients W_p[k] with E|W_p[k]|^2 = sample_power / N. The same
/// coefficients evaluated in time give per-sample variance sample_power.
struct NoiseRealization {
  CMatrix coeffs;  ///< P x N, column j holds k = band_lo + j
  int band_lo = 0;

  /// Time-domain samples at frame_len points per frame (frame_len >= N).
  NyquistSignal to_signal(double pri, int frame_len) const;
  /// Returns a copy scaled by factor.
  NoiseRealization scaled(double factor) const;
};

/// Unit per-sample-variance noise for one CPI.
NoiseRealization draw_noise(const RadarParams& params, std::uint64_t seed);

/// Adds band-limited noise so that ref_target reaches snr_db. snr_db = +inf
/// returns the input unchanged.
NyquistSignal add_awgn(const NyquistSignal& signal, const RadarParams& params,
                       const PulseShape& shape, double snr_db, const Target& ref_target,
                       std::uint64_t seed);

/// Keeps every factor-th sample of each frame (naive rate reduction).
NyquistSignal decimate(const NyquistSignal& signal, int factor);

NyquistSignal operator+(const NyquistSignal& a, const NyquistSignal& b);

/// Raw dump: little-endian header "DFSG", u32 version, f64 rate, u32 P,
/// u32 frame_len, then P * frame_len interleaved complex64 samples.
void write_signal(const std::filesystem::path& path, const NyquistSignal& s);
NyquistSignal read_signal(const std::filesystem::path& path);

}  // namespace dopfocus
