#include "dopfocus/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dopfocus/fft.hpp"

namespace dopfocus {

namespace {
// Below this width the direct product is cheaper than an N_tau-point FFT.
constexpr int kFftCorrelationWidth = 64;
}  // namespace

double half_bin_delay(const RadarParams& params) { return 0.5 / params.bandwidth; }

Dictionary build_dictionary(const RadarParams& params, const PulseShape& shape,
                            const CoefficientSet& kappa, double delta_tau) {
  params.validate();
  if (!(delta_tau > 0.0)) throw std::invalid_argument("delay grid step must be positive");
  const double ratio = params.pri / delta_tau;
  const int n_tau = static_cast<int>(std::lround(ratio));
  if (n_tau < 1 || std::abs(ratio - n_tau) > 1e-9 * ratio)
    throw std::invalid_argument("delay grid step does not divide the PRI");
  if (kappa.size() < 1) throw std::invalid_argument("empty kappa");

  Dictionary d;
  d.delta_tau = params.pri / n_tau;
  d.n_tau = n_tau;
  d.pri = params.pri;
  d.kappa = kappa;
  d.h_diag.resize(kappa.size());
  double hmax = 0.0;
  for (int i = 0; i < kappa.size(); ++i) {
    d.h_diag[i] = shape.spectrum_at(kappa.kappa[i]);
    hmax = std::max(hmax, std::abs(d.h_diag[i]));
  }
  for (int i = 0; i < kappa.size(); ++i)
    if (!(std::abs(d.h_diag[i]) > 1e-12 * hmax) || hmax == 0.0)
      throw std::invalid_argument("pulse spectrum vanishes at k = " +
                                  std::to_string(kappa.kappa[i]) +
                                  "; choose kappa inside the pulse passband");

  d.matrix.resize(kappa.size(), n_tau);
  double energy = 0.0;
  for (int i = 0; i < kappa.size(); ++i) {
    const int k = kappa.kappa[i];
    const cplx h = d.h_diag[i] / params.pri;
    energy += std::norm(h);
    for (int q = 0; q < n_tau; ++q) {
      // Reduce k q modulo N_tau in integers so the phase argument stays small.
      const long long kq = ((static_cast<long long>(k) * q) % n_tau + n_tau) % n_tau;
      d.matrix(i, q) = h * std::polar(1.0, -kTwoPi * static_cast<double>(kq) / n_tau);
    }
  }
  d.column_norm = std::sqrt(energy);
  return d;
}

CVector Dictionary::atom(double delay) const {
  CVector a(rows());
  for (int i = 0; i < rows(); ++i)
    a[i] = h_diag[i] / pri * std::polar(1.0, -kTwoPi * kappa.kappa[i] * delay / pri);
  return a;
}

CVector correlate(const Dictionary& dict, const CVector& y) {
  if (y.size() != dict.rows()) throw std::invalid_argument("correlate: length mismatch");
  if (dict.rows() < kFftCorrelationWidth) return dict.matrix.adjoint() * y;
  std::vector<cplx> buf(dict.n_tau, cplx{0.0, 0.0});
  for (int i = 0; i < dict.rows(); ++i) {
    const int k = dict.kappa.kappa[i];
    buf[((k % dict.n_tau) + dict.n_tau) % dict.n_tau] += std::conj(dict.h_diag[i] / dict.pri) * y[i];
  }
  fft::inverse(buf);
  return Eigen::Map<CVector>(buf.data(), dict.n_tau);
}

std::vector<double> correlation_pattern(const Dictionary& dict, int i) {
  if (i < 0 || i >= dict.cols()) throw std::out_of_range("column index outside dictionary");
  const CVector c = dict.matrix.adjoint() * dict.matrix.col(i);
  std::vector<double> mu(dict.cols());
  const double n2 = dict.column_norm * dict.column_norm;
  for (int j = 0; j < dict.cols(); ++j) mu[j] = std::abs(c[j]) / n2;
  return mu;
}

double coherence(const Dictionary& dict) {
  if (dict.cols() < 2) throw std::invalid_argument("coherence needs at least two columns");
  // <a_i, a_j> depends on (j - i) mod N_tau only, so column 0 covers every pair.
  const auto mu = correlation_pattern(dict, 0);
  return *std::max_element(mu.begin() + 1, mu.end());
}

std::vector<cplx> least_squares_amplitudes(const CMatrix& atoms, const CVector& y) {
  const Eigen::MatrixXcd a = atoms;
  const CVector x = a.colPivHouseholderQr().solve(y);
  return {x.data(), x.data() + x.size()};
}

SparseSolution omp_solve(const Dictionary& dict, const CVector& y, const OmpOptions& options) {
  if (options.order < 1) throw std::invalid_argument("OMP order must be >= 1");
  if (y.size() != dict.rows()) throw std::invalid_argument("OMP: measurement length mismatch");
  const int rows = dict.rows();
  const int max_atoms = std::min(options.order, rows);
  SparseSolution sol;
  Eigen::MatrixXcd q(rows, max_atoms);
  Eigen::MatrixXcd r_mat = Eigen::MatrixXcd::Zero(max_atoms, max_atoms);
  CVector res = y;
  const double y_norm = y.norm();
  std::vector<char> used(dict.cols(), 0);

  while (static_cast<int>(sol.support.size()) < max_atoms) {
    if (options.tolerance > 0.0 && res.norm() <= options.tolerance * y_norm) break;
    if (res.squaredNorm() == 0.0) break;
    const CVector c = correlate(dict, res);
    int best = -1;
    double best_val = -1.0;
    for (int j = 0; j < dict.cols(); ++j) {
      if (used[j]) continue;
      const double v = std::norm(c[j]);
      if (v > best_val) {
        best_val = v;
        best = j;
      }
    }
    if (best < 0) break;
    const int s = static_cast<int>(sol.support.size());
    CVector v = dict.matrix.col(best);
    const double a_norm = v.norm();
    // Two Gram-Schmidt passes keep the basis orthogonal to working precision.
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < s; ++i) {
        const cplx proj = q.col(i).dot(v);
        r_mat(i, s) += proj;
        v -= proj * q.col(i);
      }
    const double v_norm = v.norm();
    if (v_norm <= 1e-10 * a_norm) {
      for (int i = 0; i < s; ++i) r_mat(i, s) = 0.0;
      sol.rank_deficient = true;
      break;
    }
    q.col(s) = v / v_norm;
    r_mat(s, s) = v_norm;
    used[best] = 1;
    sol.support.push_back(best);
    res -= q.col(s).dot(res) * q.col(s);
    sol.residual_history.push_back(res.squaredNorm());
  }

  const int s = static_cast<int>(sol.support.size());
  if (s > 0) {
    const CVector z = q.leftCols(s).adjoint() * y;
    const CVector x = r_mat.topLeftCorner(s, s).triangularView<Eigen::Upper>().solve(z);
    sol.amplitudes.assign(x.data(), x.data() + s);
  }
  sol.residual_energy = res.squaredNorm();
  return sol;
}

SparseSolution iht_solve(const Dictionary& dict, const CVector& y, const IhtOptions& options) {
  if (options.order < 1) throw std::invalid_argument("IHT order must be >= 1");
  const int n = dict.cols();
  const int order = std::min(options.order, n);

  // Largest squared singular value by power iteration, fixed start for determinism.
  CVector v = CVector::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    CVector w = correlate(dict, dict.matrix * v);
    const double nw = w.norm();
    if (nw == 0.0) break;
    if (std::abs(nw - lambda) <= 1e-9 * nw) {
      lambda = nw;
      break;
    }
    lambda = nw;
    v = w / nw;
  }
  if (lambda == 0.0) throw std::invalid_argument("IHT: dictionary is zero");
  const double step = 1.0 / lambda;

  CVector x = CVector::Zero(n);
  std::vector<int> idx(n);
  for (int it = 0; it < options.max_iterations; ++it) {
    CVector g = x + step * correlate(dict, y - dict.matrix * x);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + order, idx.end(), [&](int a, int b) {
      const double na = std::norm(g[a]), nb = std::norm(g[b]);
      return na > nb || (na == nb && a < b);
    });
    CVector next = CVector::Zero(n);
    for (int i = 0; i < order; ++i) next[idx[i]] = g[idx[i]];
    const double change = (next - x).norm();
    x = std::move(next);
    if (change <= options.tolerance * std::max(x.norm(), 1e-300)) break;
  }

  SparseSolution sol;
  for (int j = 0; j < n; ++j)
    if (x[j] != cplx{0.0, 0.0}) sol.support.push_back(j);
  CMatrix atoms(dict.rows(), static_cast<int>(sol.support.size()));
  for (std::size_t i = 0; i < sol.support.size(); ++i) atoms.col(i) = dict.matrix.col(sol.support[i]);
  CVector res = y;
  if (!sol.support.empty()) {
    sol.amplitudes = least_squares_amplitudes(atoms, y);
    res -= atoms * Eigen::Map<const CVector>(sol.amplitudes.data(), sol.amplitudes.size());
  }
  sol.residual_energy = res.squaredNorm();
  sol.residual_history.push_back(sol.residual_energy);
  return sol;
}

AnnihilatingResult annihilating_solve(const std::vector<cplx>& samples, int k0, int order,
                                      double pri) {
  AnnihilatingResult out;
  const int K = static_cast<int>(samples.size());
  if (order <= 0) {
    const int cols = (K + 1) / 2;
    const int rows = K - cols + 1;
    if (rows < 1 || cols < 1) {
      out.reason = "no samples";
      return out;
    }
    Eigen::MatrixXcd hankel(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) hankel(r, c) = samples[r + c];
    const auto sv = hankel.jacobiSvd().singularValues();
    order = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > 1e-8 * sv[0]) ++order;
    if (order == 0) {
      out.reason = "all samples are zero";
      return out;
    }
  }
  out.order = order;
  if (K < 2 * order) {
    out.reason = "unrecoverable: " + std::to_string(K) + " consecutive samples, " +
                 std::to_string(2 * order) + " needed for order " + std::to_string(order);
    return out;
  }

  Eigen::MatrixXcd t(K - order, order + 1);
  for (int r = 0; r < K - order; ++r)
    for (int i = 0; i <= order; ++i) t(r, i) = samples[r + order - i];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t, Eigen::ComputeFullV);
  const Eigen::VectorXcd h = svd.matrixV().col(order);
  if (std::abs(h[0]) < 1e-14 * h.norm()) {
    out.reason = "degenerate annihilating filter";
    out.ill_conditioned = true;
    return out;
  }

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(order, order);
  for (int i = 0; i < order; ++i) companion(0, i) = -h[i + 1] / h[0];
  for (int i = 1; i < order; ++i) companion(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(companion, false);
  const auto roots = eig.eigenvalues();

  std::vector<double> delays(order);
  for (int l = 0; l < order; ++l) {
    if (std::abs(std::abs(roots[l]) - 1.0) > 1e-3) out.ill_conditioned = true;
    delays[l] = wrap_delay(-std::arg(roots[l]) / kTwoPi * pri, pri);
  }
  std::sort(delays.begin(), delays.end());

  Eigen::MatrixXcd vand(K, order);
  for (int i = 0; i < K; ++i)
    for (int l = 0; l < order; ++l)
      vand(i, l) = std::polar(1.0, -kTwoPi * (k0 + i) * delays[l] / pri);
  const Eigen::VectorXcd s = Eigen::Map<const Eigen::VectorXcd>(samples.data(), K);
  const Eigen::VectorXcd a = vand.colPivHouseholderQr().solve(s);
  out.delays = delays;
  out.amplitudes.assign(a.data(), a.data() + order);
  out.recovered = !out.ill_conditioned;
  if (out.ill_conditioned) out.reason = "root moduli deviate from the unit circle";
  return out;
}

ParabolicFit refine_parabolic(double left, double mid, double right) {
  ParabolicFit fit;
  fit.peak = mid;
  if (mid < left || mid < right) {
    fit.valid = false;
    return fit;
  }
  const double den = left - 2.0 * mid + right;
  if (den >= 0.0) return fit;  // flat triple
  double off = 0.5 * (left - right) / den;
  off = std::clamp(off, -0.999999, 0.999999);
  fit.offset = off;
  fit.peak = mid - 0.25 * (left - right) * off;
  return fit;
}

}  // namespace dopfocus
