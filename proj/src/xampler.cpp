#include "dopfocus/xampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "binary_io.hpp"
#include "dopfocus/fft.hpp"

namespace dopfocus {

std::string to_string(KappaMode mode) {
  return mode == KappaMode::consecutive ? "consecutive" : "random";
}

KappaMode kappa_mode_from_string(const std::string& name) {
  if (name == "consecutive") return KappaMode::consecutive;
  if (name == "random") return KappaMode::random;
  throw std::invalid_argument("unknown kappa mode '" + name + "' (valid: consecutive, random)");
}

CoefficientSet select_kappa(const RadarParams& params, int count, KappaMode mode,
                            std::uint64_t seed, int offset) {
  params.validate();
  const int n = params.nyquist_count();
  const int lo = -(n / 2);
  const int hi = lo + n - 1;
  if (count < 1) throw std::invalid_argument("kappa size must be >= 1");
  if (count > n)
    throw std::invalid_argument("kappa size " + std::to_string(count) +
                                " exceeds band capacity " + std::to_string(n) +
                                " (tau * B_h)");
  CoefficientSet set;
  set.mode = mode;
  if (count == n) {
    set.kappa.resize(n);
    std::iota(set.kappa.begin(), set.kappa.end(), lo);
    return set;
  }
  if (mode == KappaMode::consecutive) {
    const int first = -(count / 2) + offset;
    if (first < lo || first + count - 1 > hi)
      throw std::invalid_argument("consecutive kappa with offset " + std::to_string(offset) +
                                  " leaves the band [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
    set.kappa.resize(count);
    std::iota(set.kappa.begin(), set.kappa.end(), first);
  } else {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), lo);
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates; std::shuffle's draw pattern is implementation-defined.
    for (int i = 0; i < count; ++i) {
      std::uniform_int_distribution<int> pick(i, n - 1);
      std::swap(all[i], all[pick(rng)]);
    }
    set.kappa.assign(all.begin(), all.begin() + count);
    std::sort(set.kappa.begin(), set.kappa.end());
  }
  return set;
}

namespace {

void accumulate_target(CMatrix& c, const RadarParams& params, const std::vector<cplx>& hk,
                       const std::vector<int>& kappa, const Target& t) {
  const int w = static_cast<int>(kappa.size());
  std::vector<cplx> col(w);
  for (int j = 0; j < w; ++j)
    col[j] = hk[j] * std::polar(1.0, -kTwoPi * kappa[j] * t.delay / params.pri);
  for (int p = 0; p < params.pulse_count; ++p) {
    const cplx g = t.amplitude * std::polar(1.0, -t.doppler * p * params.pri);
    cplx* row = c.row(p).data();
    for (int j = 0; j < w; ++j) row[j] += g * col[j];
  }
}

}  // namespace

XampleSet xample_analytic(const RadarParams& params, const PulseShape& shape,
                          const std::vector<Target>& targets, const ClutterField* clutter,
                          const CoefficientSet& kappa, double noise_sigma2, std::uint64_t seed) {
  params.validate();
  if (noise_sigma2 < 0.0) throw std::invalid_argument("noise variance must be >= 0");
  const int w = kappa.size();
  XampleSet x;
  x.kappa = kappa;
  x.params = params;
  x.coeffs = CMatrix::Zero(params.pulse_count, w);

  std::vector<cplx> hk(w);
  for (int j = 0; j < w; ++j) hk[j] = shape.spectrum_at(kappa.kappa[j]) / params.pri;
  for (const auto& t : targets) accumulate_target(x.coeffs, params, hk, kappa.kappa, t);
  if (clutter)
    for (const auto& t : clutter->scatterers) accumulate_target(x.coeffs, params, hk, kappa.kappa, t);

  if (noise_sigma2 > 0.0) {
    x.noise_var = noise_sigma2 / params.pri;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 * x.noise_var));
    for (int p = 0; p < params.pulse_count; ++p)
      for (int j = 0; j < w; ++j) {
        const double re = g(rng);
        const double im = g(rng);
        x.coeffs(p, j) += cplx{re, im};
      }
  }
  return x;
}

XampleSet xample_numeric(const NyquistSignal& signal, const RadarParams& params,
                         const CoefficientSet& kappa) {
  params.validate();
  if (signal.pulses != params.pulse_count)
    throw std::invalid_argument("signal has " + std::to_string(signal.pulses) +
                                " pulses, params expect " + std::to_string(params.pulse_count));
  const int n = params.nyquist_count();
  if (signal.frame_len < n)
    throw std::invalid_argument("quadrature oversampling below 1 (frame of " +
                                std::to_string(signal.frame_len) + " samples, Nyquist needs " +
                                std::to_string(n) + ")");
  const double expected_rate = signal.frame_len / params.pri;
  if (std::abs(signal.rate - expected_rate) > 1e-9 * expected_rate)
    throw std::invalid_argument("signal rate does not match frame_len / pri");

  const int len = signal.frame_len;
  XampleSet x;
  x.kappa = kappa;
  x.params = params;
  x.coeffs.resize(params.pulse_count, kappa.size());
  std::vector<cplx> buf(len);
  for (int p = 0; p < params.pulse_count; ++p) {
    auto f = signal.frame(p);
    std::copy(f.begin(), f.end(), buf.begin());
    fft::forward(buf);
    for (int j = 0; j < kappa.size(); ++j) {
      const int k = kappa.kappa[j];
      x.coeffs(p, j) = buf[((k % len) + len) % len] / static_cast<double>(len);
    }
  }
  return x;
}

void add_coefficient_noise(XampleSet& x, const NoiseRealization& noise, double scale) {
  const int n = static_cast<int>(noise.coeffs.cols());
  if (noise.coeffs.rows() != x.pulses())
    throw std::invalid_argument("noise realization has a different pulse count");
  for (int j = 0; j < x.width(); ++j) {
    const int col = x.kappa.kappa[j] - noise.band_lo;
    if (col < 0 || col >= n) throw std::invalid_argument("kappa index outside noise band");
    for (int p = 0; p < x.pulses(); ++p) x.coeffs(p, j) += scale * noise.coeffs(p, col);
  }
  x.noise_var += scale * scale / n;
}

double noise_sigma2_for_snr(const RadarParams& params, const PulseShape& shape,
                            const Target& ref_target, double snr_db) {
  return noise_power_for_snr(shape, ref_target, snr_db) / params.bandwidth;
}

void write_xamples(const std::filesystem::path& path, const XampleSet& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write("DFXS", 4);
  binio::put_uint<std::uint32_t>(out, 1);
  binio::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(x.pulses()));
  binio::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(x.width()));
  binio::put_f64(out, x.params.pri);
  binio::put_f64(out, x.noise_var);
  for (int k : x.kappa.kappa) binio::put_i32(out, k);
  for (int p = 0; p < x.pulses(); ++p)
    for (int j = 0; j < x.width(); ++j) {
      binio::put_f32(out, static_cast<float>(x.coeffs(p, j).real()));
      binio::put_f32(out, static_cast<float>(x.coeffs(p, j).imag()));
    }
}

namespace {

XampleHeader read_header(std::istream& in, const std::string& name) {
  binio::expect_magic(in, "DFXS", name);
  if (binio::get_uint<std::uint32_t>(in) != 1)
    throw std::runtime_error(name + ": unsupported version");
  XampleHeader h;
  h.pulses = static_cast<int>(binio::get_uint<std::uint32_t>(in));
  h.width = static_cast<int>(binio::get_uint<std::uint32_t>(in));
  h.pri = binio::get_f64(in);
  h.noise_var = binio::get_f64(in);
  h.kappa.resize(h.width);
  for (auto& k : h.kappa) k = binio::get_i32(in);
  return h;
}

}  // namespace

XampleHeader read_xample_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_header(in, path.string());
}

XampleSet read_xamples(const std::filesystem::path& path, const RadarParams& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto h = read_header(in, path.string());
  if (h.pulses != params.pulse_count)
    throw std::invalid_argument(path.string() + ": dump has P = " + std::to_string(h.pulses) +
                                " but configuration has P = " +
                                std::to_string(params.pulse_count));
  if (std::abs(h.pri - params.pri) > 1e-12 * params.pri)
    throw std::invalid_argument(path.string() + ": dump pri differs from configuration");
  const int n = params.nyquist_count();
  for (int k : h.kappa)
    if (k < -(n / 2) || k > -(n / 2) + n - 1)
      throw std::invalid_argument(path.string() + ": kappa index " + std::to_string(k) +
                                  " outside the configured band");
  XampleSet x;
  x.params = params;
  x.noise_var = h.noise_var;
  x.kappa.kappa = h.kappa;
  bool run = true;
  for (std::size_t i = 1; i < h.kappa.size(); ++i) run = run && h.kappa[i] == h.kappa[i - 1] + 1;
  x.kappa.mode = run ? KappaMode::consecutive : KappaMode::random;
  x.coeffs.resize(h.pulses, h.width);
  for (int p = 0; p < h.pulses; ++p)
    for (int j = 0; j < h.width; ++j) {
      const float re = binio::get_f32(in);
      const float im = binio::get_f32(in);
      x.coeffs(p, j) = {re, im};
    }
  return x;
}

void write_xamples_csv(const std::filesystem::path& path, const XampleSet& x) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "p,k,re,im\n";
  for (int p = 0; p < x.pulses(); ++p)
    for (int j = 0; j < x.width(); ++j)
      out << p << ',' << x.kappa.kappa[j] << ',' << x.coeffs(p, j).real() << ','
          << x.coeffs(p, j).imag() << '\n';
}

}  // namespace dopfocus
