#include "dopfocus/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dopfocus/fft.hpp"

namespace dopfocus {

namespace {

int wrap_index(int i, int n) { return ((i % n) + n) % n; }

int centered(int j, int n) { return j >= n - n / 2 ? j - n : j; }

struct BinBest {
  double value = -1.0;
  int n = -1;
  cplx amp{0.0, 0.0};
  std::vector<int> support;
};

SparseSolution solve_bin(const Dictionary& dict, const CVector& y, int order, DelaySolver s) {
  if (s == DelaySolver::iht) return iht_solve(dict, y, IhtOptions{order, 300, 1e-10});
  return omp_solve(dict, y, order);
}

double golden_max(double lo, double hi, const auto& f) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 60; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace

void subtract_target(CMatrix& residual, const Dictionary& dict, double tau, double nu,
                     cplx alpha) {
  const CVector a = dict.atom(tau);
  for (int p = 0; p < residual.rows(); ++p) {
    const cplx g = alpha * std::polar(1.0, -nu * p * dict.pri);
    residual.row(p) -= g * a.transpose();
  }
}

std::vector<Detection> focusing_detect(const XampleSet& x, const Dictionary& dict,
                                       const FocusingOptions& options) {
  const int P = x.pulses();
  const double pri = x.params.pri;
  const int M = options.M > 0 ? options.M : 2 * P;
  if (options.targets < 1) throw std::invalid_argument("target count must be >= 1");
  if (dict.kappa.kappa != x.kappa.kappa)
    throw std::invalid_argument("dictionary and Xamples use different kappa");
  const Window window = options.window.value_or(make_window(WindowKind::rectangular, P));
  if (window.size() != P) throw std::invalid_argument("window length differs from pulse count");
  const double wsum = std::accumulate(window.weights.begin(), window.weights.end(), 0.0);
  const double grid_step = kTwoPi / (pri * M);
  const double nyq_doppler = kTwoPi / (pri * P);

  CMatrix residual = x.coeffs;
  std::vector<char> excluded(M, 0);
  for (int r = 0; r < M; ++r) {
    const double nu = kTwoPi * (r - M / 2) / (pri * M);
    if (options.dc_exclusion_bins >= 0.0 &&
        std::abs(nu) <= (options.dc_exclusion_bins + 1e-9) * nyq_doppler)
      excluded[r] = 1;
  }
  std::vector<std::vector<int>> masked(M);
  std::vector<Detection> out;
  std::vector<BinBest> best(M);

  for (int it = 0; it < options.targets; ++it) {
    Detection det;
    det.iteration = it;
    if (residual.squaredNorm() == 0.0) {
      det.degenerate = true;
      out.push_back(det);
      continue;
    }
    const FocusedGrid grid = focus_grid(residual, pri, M, window, options.exec);

    auto solve_row = [&](int r) {
      best[r] = BinBest{};
      if (excluded[r]) return;
      const CVector y = grid.psi.row(r).transpose() / wsum;
      const SparseSolution sol = solve_bin(dict, y, options.targets, options.solver);
      BinBest b;
      b.support = sol.support;
      for (std::size_t i = 0; i < sol.support.size(); ++i) {
        const int n = sol.support[i];
        if (std::find(masked[r].begin(), masked[r].end(), n) != masked[r].end()) continue;
        const double v = std::abs(sol.amplitudes[i]);
        if (v > b.value || (v == b.value && n < b.n)) {
          b.value = v;
          b.n = n;
          b.amp = sol.amplitudes[i];
        }
      }
      best[r] = std::move(b);
    };
    if (options.exec == Exec::serial) {
      for (int r = 0; r < M; ++r) solve_row(r);
    } else {
#pragma omp parallel for schedule(dynamic, 4)
      for (int r = 0; r < M; ++r) solve_row(r);
    }

    int rb = -1;
    for (int r = 0; r < M; ++r)
      if (best[r].n >= 0 && (rb < 0 || best[r].value > best[rb].value)) rb = r;
    if (rb < 0 || best[rb].value == 0.0) {
      det.degenerate = true;
      det.residual_energy = residual.squaredNorm();
      out.push_back(det);
      continue;
    }
    const int nb = best[rb].n;
    double tau = dict.delay_of(nb);
    double nu = grid.nu(rb);
    cplx alpha = best[rb].amp;
    det.peak_value = best[rb].value;

    if (options.refine) {
      const CVector y = grid.psi.row(rb).transpose() / wsum;
      auto corr = [&](int q) { return std::abs(dict.matrix.col(wrap_index(q, dict.n_tau)).dot(y)); };
      const auto fd = refine_parabolic(corr(nb - 1), corr(nb), corr(nb + 1));
      tau = wrap_delay((nb + fd.offset) * dict.delta_tau, pri);
      const CVector a = dict.atom(tau);
      if (options.gridless) {
        auto f = [&](double v) { return std::abs(a.dot(focus_at(residual, pri, v, window).psi)); };
        nu = golden_max(nu - grid_step, nu + grid_step, f);
      } else {
        auto g = [&](int r) { return std::abs(a.dot(grid.psi.row(wrap_index(r, M)).transpose())); };
        const auto fm = refine_parabolic(g(rb - 1), g(rb), g(rb + 1));
        nu += fm.offset * grid_step;
      }
      nu = wrap_doppler(nu, pri);

      // Joint amplitude fit with the bin's other atoms, skipping those that
      // describe the same target's off-grid spread.
      std::vector<int> others;
      for (int n : best[rb].support) {
        const int dist = std::abs(wrap_index(n - nb + dict.n_tau / 2, dict.n_tau) - dict.n_tau / 2);
        if (dist > 2) others.push_back(n);
      }
      CMatrix atoms(dict.rows(), 1 + static_cast<int>(others.size()));
      atoms.col(0) = a;
      for (std::size_t i = 0; i < others.size(); ++i) atoms.col(i + 1) = dict.matrix.col(others[i]);
      const CVector yv = focus_at(residual, pri, nu, window).psi / wsum;
      alpha = least_squares_amplitudes(atoms, yv)[0];
    }

    det.tau_hat = tau;
    det.nu_hat = nu;
    det.alpha_hat = alpha;
    subtract_target(residual, dict, tau, nu, alpha);
    masked[rb].push_back(nb);
    det.residual_energy = residual.squaredNorm();
    out.push_back(det);
  }
  return out;
}

DelayDopplerMap classic_map(const NyquistSignal& signal, const RadarParams& params,
                            const PulseShape& shape, const ClassicOptions& options) {
  params.validate();
  const int P = params.pulse_count;
  if (signal.pulses != P) throw std::invalid_argument("signal pulse count differs from params");
  const int nf = signal.frame_len;
  const int nt = options.delay_points > 0 ? options.delay_points : 2 * params.nyquist_count();
  const int M = options.M > 0 ? options.M : 2 * P;
  if (nt < nf)
    throw std::invalid_argument("delay grid of " + std::to_string(nt) +
                                " points is coarser than the input frame");

  std::vector<cplx> tmpl(nf);
  for (int n = 0; n < nf; ++n) tmpl[n] = shape.sample(n / signal.rate);
  fft::forward(tmpl);
  double norm = 0.0;
  for (const auto& t : tmpl) norm += std::norm(t);
  if (norm == 0.0) throw std::invalid_argument("pulse template is zero at this sample rate");

  CMatrix y(P, nt);
  auto mf = [&](int p, std::vector<cplx>& a, std::vector<cplx>& b) {
    auto f = signal.frame(p);
    std::copy(f.begin(), f.end(), a.begin());
    fft::forward(a);
    std::fill(b.begin(), b.end(), cplx{0.0, 0.0});
    for (int j = 0; j < nf; ++j)
      b[wrap_index(centered(j, nf), nt)] = a[j] * std::conj(tmpl[j]) / norm;
    fft::inverse(b);
    for (int q = 0; q < nt; ++q) y(p, q) = b[q];
  };
  DelayDopplerMap map;
  map.M = M;
  map.pri = params.pri;
  map.delay_step = params.pri / nt;
  map.values.resize(M, nt);
  auto doppler = [&](int q, std::vector<cplx>& buf) {
    std::fill(buf.begin(), buf.end(), cplx{0.0, 0.0});
    for (int p = 0; p < P; ++p) buf[p % M] += y(p, q);
    fft::inverse(buf);
    for (int r = 0; r < M; ++r) map.values(r, q) = buf[wrap_index(r + map.m_lo(), M)] / double(P);
  };

  if (options.exec == Exec::serial) {
    std::vector<cplx> a(nf), b(nt), c(M);
    for (int p = 0; p < P; ++p) mf(p, a, b);
    for (int q = 0; q < nt; ++q) doppler(q, c);
  } else {
#pragma omp parallel
    {
      std::vector<cplx> a(nf), b(nt), c(M);
#pragma omp for schedule(static)
      for (int p = 0; p < P; ++p) mf(p, a, b);
#pragma omp for schedule(static)
      for (int q = 0; q < nt; ++q) doppler(q, c);
    }
  }
  return map;
}

std::vector<Detection> classic_detect(const NyquistSignal& signal, const RadarParams& params,
                                      const PulseShape& shape, const ClassicOptions& options) {
  if (options.targets < 1) throw std::invalid_argument("target count must be >= 1");
  const DelayDopplerMap map = classic_map(signal, params, shape, options);
  const Eigen::MatrixXd z = map.magnitude();
  const int M = map.M;
  const int nt = static_cast<int>(z.cols());
  const int P = params.pulse_count;
  const int gd = static_cast<int>(std::ceil(options.guard_delay_bins * double(nt) /
                                            params.nyquist_count() - 1e-9));
  const int gm = static_cast<int>(std::ceil(options.guard_doppler_bins * double(M) / P - 1e-9));
  Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic> mask =
      Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic>::Zero(M, nt);

  std::vector<Detection> out;
  for (int it = 0; it < options.targets; ++it) {
    int rb = -1, cb = -1;
    double vb = -1.0;
    for (int r = 0; r < M; ++r)
      for (int c = 0; c < nt; ++c)
        if (!mask(r, c) && z(r, c) > vb) {
          vb = z(r, c);
          rb = r;
          cb = c;
        }
    if (rb < 0) break;
    Detection d;
    d.iteration = it;
    d.peak_value = vb;
    d.alpha_hat = map.values(rb, cb);
    double tau = map.tau(cb);
    double nu = map.nu(rb);
    if (options.refine) {
      const auto fd = refine_parabolic(z(rb, wrap_index(cb - 1, nt)), vb, z(rb, wrap_index(cb + 1, nt)));
      const auto fm = refine_parabolic(z(wrap_index(rb - 1, M), cb), vb, z(wrap_index(rb + 1, M), cb));
      tau += fd.offset * map.delay_step;
      nu += fm.offset * kTwoPi / (params.pri * M);
    }
    d.tau_hat = wrap_delay(tau, params.pri);
    d.nu_hat = wrap_doppler(nu, params.pri);
    d.degenerate = vb == 0.0;
    out.push_back(d);
    for (int dr = -gm; dr <= gm; ++dr)
      for (int dc = -gd; dc <= gd; ++dc) mask(wrap_index(rb + dr, M), wrap_index(cb + dc, nt)) = 1;
  }
  return out;
}

std::vector<Detection> twostage_detect(const XampleSet& x, const Dictionary& dict,
                                       const TwoStageOptions& options) {
  if (options.targets < 1) throw std::invalid_argument("target count must be >= 1");
  if (dict.kappa.kappa != x.kappa.kappa)
    throw std::invalid_argument("dictionary and Xamples use different kappa");
  const int P = x.pulses();
  const double pri = x.params.pri;
  const int M = options.M > 0 ? options.M : 2 * P;
  const Eigen::MatrixXcd c = x.coeffs.transpose();
  const double c_norm = c.norm();

  auto row_norms = [&](const Eigen::MatrixXcd& res) {
    Eigen::VectorXd rn = Eigen::VectorXd::Zero(dict.n_tau);
    for (int p = 0; p < P; ++p) rn += correlate(dict, res.col(p)).cwiseAbs2();
    return rn;
  };

  std::vector<int> support;
  Eigen::MatrixXcd res = c;
  Eigen::MatrixXcd xs;
  Eigen::MatrixXcd atoms(dict.rows(), 0);
  while (static_cast<int>(support.size()) < std::min(options.targets, dict.rows())) {
    if (res.norm() <= options.tolerance * c_norm) break;
    const Eigen::VectorXd rn = row_norms(res);
    int qb = -1;
    for (int q = 0; q < dict.n_tau; ++q)
      if (std::find(support.begin(), support.end(), q) == support.end() && (qb < 0 || rn[q] > rn[qb]))
        qb = q;
    support.push_back(qb);
    atoms.conservativeResize(Eigen::NoChange, support.size());
    atoms.col(support.size() - 1) = dict.matrix.col(qb);
    xs = atoms.colPivHouseholderQr().solve(c);
    res = c - atoms * xs;
  }

  std::vector<Detection> out;
  std::vector<cplx> buf(M);
  for (std::size_t s = 0; s < support.size(); ++s) {
    const int q = support[s];
    double tau = dict.delay_of(q);
    if (options.refine) {
      const Eigen::MatrixXcd own = res + atoms.col(s) * xs.row(s);
      auto f = [&](int i) {
        return (dict.matrix.col(wrap_index(i, dict.n_tau)).adjoint() * own).norm();
      };
      tau = wrap_delay((q + refine_parabolic(f(q - 1), f(q), f(q + 1)).offset) * dict.delta_tau, pri);
    }
    std::fill(buf.begin(), buf.end(), cplx{0.0, 0.0});
    for (int p = 0; p < P; ++p) buf[p % M] += xs(s, p);
    fft::inverse(buf);
    int rb = 0;
    for (int r = 1; r < M; ++r)
      if (std::abs(buf[wrap_index(r - M / 2, M)]) > std::abs(buf[wrap_index(rb - M / 2, M)])) rb = r;
    const int mb = rb - M / 2;
    double nu = kTwoPi * mb / (pri * M);
    if (options.refine) {
      const auto fm = refine_parabolic(std::abs(buf[wrap_index(mb - 1, M)]),
                                       std::abs(buf[wrap_index(mb, M)]),
                                       std::abs(buf[wrap_index(mb + 1, M)]));
      nu += fm.offset * kTwoPi / (pri * M);
    }
    Detection d;
    d.iteration = static_cast<int>(s);
    d.tau_hat = tau;
    d.nu_hat = wrap_doppler(nu, pri);
    d.alpha_hat = buf[wrap_index(mb, M)] / double(P);
    d.peak_value = std::abs(d.alpha_hat);
    d.residual_energy = res.squaredNorm();
    out.push_back(d);
  }
  return out;
}

void write_detections_csv(const std::filesystem::path& path, const std::vector<Detection>& d) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "tau_s,nu_rad_s,re_alpha,im_alpha,iteration,peak\n";
  for (const auto& e : d)
    out << e.tau_hat << ',' << e.nu_hat << ',' << e.alpha_hat.real() << ',' << e.alpha_hat.imag()
        << ',' << e.iteration << ',' << e.peak_value << '\n';
}

std::vector<Detection> read_detections_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<Detection> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream s(line);
    std::string f[6];
    for (auto& v : f)
      if (!std::getline(s, v, ',')) throw std::runtime_error(path.string() + ": short row");
    Detection d;
    d.tau_hat = std::stod(f[0]);
    d.nu_hat = std::stod(f[1]);
    d.alpha_hat = {std::stod(f[2]), std::stod(f[3])};
    d.iteration = std::stoi(f[4]);
    d.peak_value = std::stod(f[5]);
    out.push_back(d);
  }
  return out;
}

void write_map_csv(const std::filesystem::path& path, const DelayDopplerMap& map) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(10);
  out << "nu_rad_s,tau_s,abs_z\n";
  for (int r = 0; r < map.M; ++r)
    for (int c = 0; c < map.values.cols(); ++c)
      out << map.nu(r) << ',' << map.tau(c) << ',' << std::abs(map.values(r, c)) << '\n';
}

}  // namespace dopfocus
