#include "dopfocus/focusing.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dopfocus/fft.hpp"

namespace dopfocus {

std::string to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::rectangular: return "rect";
    case WindowKind::hann: return "hann";
    case WindowKind::blackman: return "blackman";
    case WindowKind::taylor: return "taylor";
  }
  return "rect";
}

std::string Window::describe() const {
  if (kind != WindowKind::taylor) return to_string(kind);
  std::ostringstream s;
  s << "taylor:" << nbar << ':' << sidelobe_db;
  return s.str();
}

namespace {

std::vector<double> taylor_weights(int n, int nbar, double sll_db) {
  const double b = std::pow(10.0, std::abs(sll_db) / 20.0);
  const double a = std::acosh(b) / kPi;
  const double s2 = nbar * nbar / (a * a + (nbar - 0.5) * (nbar - 0.5));
  std::vector<double> fm(nbar > 1 ? nbar - 1 : 0);
  for (int m = 1; m < nbar; ++m) {
    double num = (m % 2 == 1) ? 1.0 : -1.0;
    for (int i = 1; i < nbar; ++i)
      num *= 1.0 - double(m) * m / s2 / (a * a + (i - 0.5) * (i - 0.5));
    double den = 2.0;
    for (int j = 1; j < nbar; ++j)
      if (j != m) den *= 1.0 - double(m) * m / (double(j) * j);
    fm[m - 1] = num / den;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double v = 1.0;
    for (int m = 1; m < nbar; ++m)
      v += 2.0 * fm[m - 1] * std::cos(kTwoPi * m * (i - n / 2.0 + 0.5) / n);
    w[i] = v;
  }
  return w;
}

}  // namespace

Window make_window(WindowKind kind, int pulses, int nbar, double sidelobe_db) {
  if (pulses < 1) throw std::invalid_argument("window length must be >= 1");
  Window w;
  w.kind = kind;
  w.nbar = nbar;
  w.sidelobe_db = sidelobe_db;
  w.weights.assign(pulses, 1.0);
  // Periodic sampling at cell centers keeps every weight strictly positive.
  for (int p = 0; p < pulses; ++p) {
    const double u = (p + 0.5) / pulses;
    switch (kind) {
      case WindowKind::rectangular: break;
      case WindowKind::hann: w.weights[p] = 0.5 - 0.5 * std::cos(kTwoPi * u); break;
      case WindowKind::blackman:
        w.weights[p] = 0.42 - 0.5 * std::cos(kTwoPi * u) + 0.08 * std::cos(2.0 * kTwoPi * u);
        break;
      case WindowKind::taylor: break;
    }
  }
  if (kind == WindowKind::taylor) {
    if (nbar < 1) throw std::invalid_argument("taylor nbar must be >= 1");
    w.weights = taylor_weights(pulses, nbar, sidelobe_db);
  }
  const double sum = std::accumulate(w.weights.begin(), w.weights.end(), 0.0);
  for (auto& v : w.weights) v *= pulses / sum;
  return w;
}

Window parse_window(const std::string& spec, int pulses) {
  if (spec == "rect" || spec == "rectangular") return make_window(WindowKind::rectangular, pulses);
  if (spec == "hann") return make_window(WindowKind::hann, pulses);
  if (spec == "blackman") return make_window(WindowKind::blackman, pulses);
  if (spec.rfind("taylor", 0) == 0) {
    int nbar = 5;
    double sll = -50.0;
    if (spec.size() > 6) {
      char c1 = 0, c2 = 0;
      std::istringstream in(spec.substr(6));
      if (!(in >> c1 >> nbar >> c2 >> sll) || c1 != ':' || c2 != ':')
        throw std::invalid_argument("bad taylor window spec '" + spec +
                                    "' (expected taylor:<nbar>:<sll_db>)");
    }
    return make_window(WindowKind::taylor, pulses, nbar, sll);
  }
  throw std::invalid_argument("unknown window '" + spec +
                              "' (valid: rect, hann, blackman, taylor[:nbar:sll_db])");
}

FocusedVector focus_at(const CMatrix& coeffs, double pri, double nu, const Window& window) {
  const int P = static_cast<int>(coeffs.rows());
  if (window.size() != P) throw std::invalid_argument("window length differs from pulse count");
  FocusedVector out;
  out.nu = nu;
  out.psi = CVector::Zero(coeffs.cols());
  for (int p = 0; p < P; ++p)
    out.psi += (window.weights[p] * std::polar(1.0, nu * p * pri)) * coeffs.row(p).transpose();
  return out;
}

FocusedVector focus_at(const XampleSet& x, double nu, const Window& window) {
  return focus_at(x.coeffs, x.params.pri, nu, window);
}

FocusedGrid focus_grid(const CMatrix& coeffs, double pri, int M, const Window& window,
                       Exec exec) {
  if (M < 1) throw std::invalid_argument("focusing grid size M must be >= 1");
  const int P = static_cast<int>(coeffs.rows());
  const int W = static_cast<int>(coeffs.cols());
  if (window.size() != P) throw std::invalid_argument("window length differs from pulse count");
  FocusedGrid g;
  g.M = M;
  g.pri = pri;
  g.psi.resize(M, W);
  const int m_lo = g.m_lo();

  auto column = [&](int j, std::vector<cplx>& buf) {
    std::fill(buf.begin(), buf.end(), cplx{0.0, 0.0});
    for (int p = 0; p < P; ++p) buf[p % M] += window.weights[p] * coeffs(p, j);
    fft::inverse(buf);
    for (int r = 0; r < M; ++r) {
      const int m = r + m_lo;
      g.psi(r, j) = buf[((m % M) + M) % M];
    }
  };

  if (exec == Exec::serial) {
    std::vector<cplx> buf(M);
    for (int j = 0; j < W; ++j) column(j, buf);
  } else {
#pragma omp parallel
    {
      std::vector<cplx> buf(M);
#pragma omp for schedule(static)
      for (int j = 0; j < W; ++j) column(j, buf);
    }
  }
  return g;
}

FocusedGrid focus_grid(const XampleSet& x, int M, const Window& window, Exec exec) {
  return focus_grid(x.coeffs, x.params.pri, M, window, exec);
}

cplx dirichlet_gain(double nu, double nu_l, double pri, const Window& window) {
  const int P = window.size();
  const double theta = (nu - nu_l) * pri;
  if (window.kind != WindowKind::rectangular) {
    cplx g{0.0, 0.0};
    for (int p = 0; p < P; ++p) g += window.weights[p] * std::polar(1.0, theta * p);
    return g;
  }
  const double half = 0.5 * theta;
  const double s = std::sin(half);
  double ratio;
  if (std::abs(s) < 1e-12)
    ratio = P * std::cos(P * half) / std::cos(half);
  else
    ratio = std::sin(P * half) / s;
  return std::polar(1.0, half * (P - 1)) * ratio;
}

void write_focus_heatmap(const std::filesystem::path& path, const FocusedGrid& grid,
                         const CoefficientSet& kappa) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(10);
  out << "m,nu_rad_s,k,abs_psi\n";
  for (int r = 0; r < grid.M; ++r)
    for (int j = 0; j < grid.psi.cols(); ++j)
      out << r + grid.m_lo() << ',' << grid.nu(r) << ',' << kappa.kappa[j] << ','
          << std::abs(grid.psi(r, j)) << '\n';
}

}  // namespace dopfocus
