#include "dopfocus/waveform.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "binary_io.hpp"
#include "dopfocus/fft.hpp"

namespace dopfocus {

std::string to_string(PulseKind kind) {
  switch (kind) {
    case PulseKind::flat: return "flat";
    case PulseKind::root_raised_cosine: return "rrc";
    case PulseKind::gaussian: return "gaussian";
    case PulseKind::lowpass: return "lowpass";
  }
  return "flat";
}

PulseKind pulse_kind_from_string(const std::string& name) {
  if (name == "flat") return PulseKind::flat;
  if (name == "rrc" || name == "root-raised-cosine") return PulseKind::root_raised_cosine;
  if (name == "gaussian") return PulseKind::gaussian;
  if (name == "lowpass") return PulseKind::lowpass;
  throw std::invalid_argument("unknown pulse kind '" + name +
                              "' (valid: flat, rrc, gaussian, lowpass)");
}

namespace {

// |H| as a function of frequency normalized to the band edge, u = f / (B_h / 2).
double magnitude_profile(const PulseOptions& o, double u) {
  const double a = std::abs(u);
  if (a > 1.0) return 0.0;
  switch (o.kind) {
    case PulseKind::flat: return 1.0;
    case PulseKind::root_raised_cosine: {
      // Passband edge chosen so that the roll-off ends exactly at the band edge.
      const double f1 = (1.0 - o.rolloff) / (1.0 + o.rolloff);
      if (a <= f1) return 1.0;
      return std::cos(kPi * (a - f1) / (2.0 * (1.0 - f1)));
    }
    case PulseKind::gaussian: {
      const double z = a * o.gaussian_sigmas;
      return std::exp(-0.5 * z * z);
    }
    case PulseKind::lowpass: return a <= o.lowpass_fraction ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace

PulseShape::PulseShape(const RadarParams& params, const PulseOptions& options)
    : options_(options),
      pri_(params.pri),
      bandwidth_(params.bandwidth),
      duration_(params.pulse_time) {
  params.validate();
  if (options.kind == PulseKind::root_raised_cosine &&
      !(options.rolloff > 0.0 && options.rolloff <= 1.0))
    throw std::invalid_argument("rolloff must be in (0, 1]");
  if (options.kind == PulseKind::lowpass &&
      !(options.lowpass_fraction > 0.0 && options.lowpass_fraction <= 1.0))
    throw std::invalid_argument("lowpass_fraction must be in (0, 1]");
  const int n = params.nyquist_count();
  band_lo_ = -(n / 2);
  band_hi_ = band_lo_ + n - 1;
  table_lo_ = -n;
  table_.assign(2 * static_cast<std::size_t>(n), cplx{0.0, 0.0});

  const double half_band = 0.5 * static_cast<double>(n);
  double energy = 0.0;
  for (int k = band_lo_; k <= band_hi_; ++k) {
    const double mag = magnitude_profile(options_, k / half_band);
    double phase = 0.0;
    if (options_.dispersive) {
      // Linear FM over [0, T_p]: group delay T_p / 2 + f T_p / B_h with f = k / tau.
      const double kk = static_cast<double>(k);
      phase = -kPi * duration_ * kk / pri_ - kPi * kk * kk * duration_ / (pri_ * n);
    }
    table_[k - table_lo_] = std::polar(mag, phase);
    energy += mag * mag;
  }
  if (energy == 0.0) throw std::invalid_argument("pulse spectrum is empty on the Fourier grid");
  // (1/T_p) (1/tau) sum |H_k|^2 = 1
  const double scale = std::sqrt(duration_ * pri_ / energy);
  for (auto& h : table_) h *= scale;
}

cplx PulseShape::spectrum_at(int k) const {
  if (k < table_lo() || k > table_hi())
    throw std::out_of_range("spectrum index " + std::to_string(k) +
                            " outside tabulated range; band edge is k = " +
                            std::to_string(band_hi_) + " (|2 pi k / tau| <= pi B_h)");
  return table_[k - table_lo_];
}

cplx PulseShape::sample(double t) const {
  // Phasor recurrence across k, re-anchored periodically to bound drift.
  const double w = kTwoPi * t / pri_;
  cplx acc{0.0, 0.0};
  cplx z = std::polar(1.0, w * band_lo_);
  const cplx step = std::polar(1.0, w);
  for (int k = band_lo_; k <= band_hi_; ++k) {
    if (((k - band_lo_) & 63) == 0) z = std::polar(1.0, w * k);
    acc += table_[k - table_lo_] * z;
    z *= step;
  }
  return acc / pri_;
}

double PulseShape::energy_per_time() const {
  double e = 0.0;
  for (int k = band_lo_; k <= band_hi_; ++k) e += std::norm(table_[k - table_lo_]);
  return e / (pri_ * duration_);
}

NyquistSignal synthesize(const RadarParams& params, const PulseShape& shape,
                         const std::vector<Target>& targets, const ClutterField* clutter,
                         int oversample) {
  params.validate();
  if (oversample < 1) throw std::invalid_argument("synthesize: oversample must be >= 1");
  NyquistSignal s;
  s.pulses = params.pulse_count;
  s.frame_len = params.nyquist_count() * oversample;
  s.rate = params.bandwidth * oversample;
  s.samples.assign(static_cast<std::size_t>(s.pulses) * s.frame_len, cplx{0.0, 0.0});

  std::vector<cplx> echo(s.frame_len);
  auto add = [&](const Target& t) {
    for (int n = 0; n < s.frame_len; ++n) echo[n] = shape.sample(n / s.rate - t.delay);
    for (int p = 0; p < s.pulses; ++p) {
      const cplx g = t.amplitude * std::polar(1.0, -t.doppler * p * params.pri);
      auto f = s.frame(p);
      for (int n = 0; n < s.frame_len; ++n) f[n] += g * echo[n];
    }
  };
  for (const auto& t : targets) add(t);
  if (clutter)
    for (const auto& t : clutter->scatterers) add(t);
  return s;
}

double noise_power_for_snr(const PulseShape& shape, const Target& ref_target, double snr_db) {
  return std::norm(ref_target.amplitude) * shape.energy_per_time() /
         std::pow(10.0, snr_db / 10.0);
}

NyquistSignal NoiseRealization::to_signal(double pri, int frame_len) const {
  const int p_count = static_cast<int>(coeffs.rows());
  const int n = static_cast<int>(coeffs.cols());
  if (frame_len < n) throw std::invalid_argument("noise frame_len below Nyquist count");
  NyquistSignal s;
  s.pulses = p_count;
  s.frame_len = frame_len;
  s.rate = frame_len / pri;
  s.samples.assign(static_cast<std::size_t>(p_count) * frame_len, cplx{0.0, 0.0});
  for (int p = 0; p < p_count; ++p) {
    auto f = s.frame(p);
    for (int j = 0; j < n; ++j) {
      const int k = band_lo + j;
      f[((k % frame_len) + frame_len) % frame_len] = coeffs(p, j);
    }
    fft::inverse(f);
  }
  return s;
}

NoiseRealization NoiseRealization::scaled(double factor) const {
  NoiseRealization out = *this;
  out.coeffs *= factor;
  return out;
}

NoiseRealization draw_noise(const RadarParams& params, std::uint64_t seed) {
  const int n = params.nyquist_count();
  NoiseRealization w;
  w.band_lo = -(n / 2);
  w.coeffs.resize(params.pulse_count, n);
  std::mt19937_64 rng(seed);
  // E|W|^2 = 1 / N, split evenly over real and imaginary parts.
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 / n));
  for (int p = 0; p < params.pulse_count; ++p)
    for (int j = 0; j < n; ++j) {
      const double re = g(rng);
      const double im = g(rng);
      w.coeffs(p, j) = {re, im};
    }
  return w;
}

NyquistSignal add_awgn(const NyquistSignal& signal, const RadarParams& params,
                       const PulseShape& shape, double snr_db, const Target& ref_target,
                       std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return signal;
  if (signal.pulses != params.pulse_count)
    throw std::invalid_argument("add_awgn: pulse count mismatch");
  const double power = noise_power_for_snr(shape, ref_target, snr_db);
  const auto noise =
      draw_noise(params, seed).scaled(std::sqrt(power)).to_signal(params.pri, signal.frame_len);
  return signal + noise;
}

NyquistSignal decimate(const NyquistSignal& signal, int factor) {
  if (factor < 1 || signal.frame_len % factor != 0)
    throw std::invalid_argument("decimate: factor must divide the frame length");
  NyquistSignal out;
  out.pulses = signal.pulses;
  out.frame_len = signal.frame_len / factor;
  out.rate = signal.rate / factor;
  out.samples.resize(static_cast<std::size_t>(out.pulses) * out.frame_len);
  for (int p = 0; p < out.pulses; ++p) {
    auto src = signal.frame(p);
    auto dst = out.frame(p);
    for (int n = 0; n < out.frame_len; ++n) dst[n] = src[static_cast<std::size_t>(n) * factor];
  }
  return out;
}

NyquistSignal operator+(const NyquistSignal& a, const NyquistSignal& b) {
  if (a.pulses != b.pulses || a.frame_len != b.frame_len)
    throw std::invalid_argument("signal dimensions differ");
  NyquistSignal out = a;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += b.samples[i];
  return out;
}

void write_signal(const std::filesystem::path& path, const NyquistSignal& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write("DFSG", 4);
  binio::put_uint<std::uint32_t>(out, 1);
  binio::put_f64(out, s.rate);
  binio::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(s.pulses));
  binio::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(s.frame_len));
  for (const auto& v : s.samples) {
    binio::put_f32(out, static_cast<float>(v.real()));
    binio::put_f32(out, static_cast<float>(v.imag()));
  }
}

NyquistSignal read_signal(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  binio::expect_magic(in, "DFSG", path.string());
  const auto version = binio::get_uint<std::uint32_t>(in);
  if (version != 1) throw std::runtime_error(path.string() + ": unsupported version");
  NyquistSignal s;
  s.rate = binio::get_f64(in);
  s.pulses = static_cast<int>(binio::get_uint<std::uint32_t>(in));
  s.frame_len = static_cast<int>(binio::get_uint<std::uint32_t>(in));
  s.samples.resize(static_cast<std::size_t>(s.pulses) * s.frame_len);
  for (auto& v : s.samples) {
    const float re = binio::get_f32(in);
    const float im = binio::get_f32(in);
    v = {re, im};
  }
  return s;
}

}  // namespace dopfocus
