#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dopfocus/waveform.hpp"
#include "dopfocus/xampler.hpp"

namespace dopfocus {

/// A = (1/tau) H V with A_{iq} = (1/tau) H_{k_i} e^{-j 2 pi k_i q / N_tau}.
/// All columns are modulated copies of column 0, so they share one norm.
struct Dictionary {
  CMatrix matrix;  ///< |kappa| x N_tau
  double delta_tau = 0.0;
  int n_tau = 0;
  double pri = 0.0;
  CoefficientSet kappa;
  std::vector<cplx> h_diag;  ///< H(2 pi k_i / tau)
  double column_norm = 0.0;

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return n_tau; }
  /// Delay in seconds of (possibly fractional) grid index q.
  double delay_of(double q) const { return q * delta_tau; }
  /// Column q evaluated at a continuous delay.
  CVector atom(double delay) const;
};

/// Grid step of half a Nyquist delay bin, 1 / (2 B_h).
double half_bin_delay(const RadarParams& params);

/// Throws if delta_tau does not divide tau or if H vanishes on kappa.
Dictionary build_dictionary(const RadarParams& params, const PulseShape& shape,
                            const CoefficientSet& kappa, double delta_tau);

/// A^H y. Uses an N_tau-point FFT for wide kappa, a direct product otherwise.
CVector correlate(const Dictionary& dict, const CVector& y);

/// mu(A) = max_{i != j} |<a_i, a_j>| / (|a_i| |a_j|).
double coherence(const Dictionary& dict);
/// mu_i[j] for all j (entry i equals 1).
std::vector<double> correlation_pattern(const Dictionary& dict, int i);

struct SparseSolution {
  std::vector<int> support;
  std::vector<cplx> amplitudes;
  double residual_energy = 0.0;
  std::vector<double> residual_history;  ///< |r|^2 after each accepted atom
  bool rank_deficient = false;
};

struct OmpOptions {
  int order = 1;
  /// Stop when |r| <= tolerance * |y|; 0 stops on order alone.
  double tolerance = 0.0;
};

/// Orthogonal matching pursuit with modified Gram-Schmidt updates. A selected
/// atom that is numerically dependent on the support is dropped, the solution
/// is flagged and iteration stops.
SparseSolution omp_solve(const Dictionary& dict, const CVector& y, const OmpOptions& options);
inline SparseSolution omp_solve(const Dictionary& dict, const CVector& y, int order) {
  return omp_solve(dict, y, OmpOptions{order, 0.0});
}

struct IhtOptions {
  int order = 1;
  int max_iterations = 300;
  double tolerance = 1e-10;  ///< relative change of the iterate
};

/// Normalized iterative hard thresholding followed by a least-squares refit on
/// the final support.
SparseSolution iht_solve(const Dictionary& dict, const CVector& y, const IhtOptions& options);

/// Least-squares amplitudes of y on the given columns.
std::vector<cplx> least_squares_amplitudes(const CMatrix& atoms, const CVector& y);

struct AnnihilatingResult {
  bool recovered = false;
  bool ill_conditioned = false;
  std::string reason;
  std::vector<double> delays;  ///< [0, tau), ascending
  std::vector<cplx> amplitudes;
  int order = 0;
};

/// Prony solve of s[i] = sum_l a_l e^{-j 2 pi (k0 + i) tau_l / tau} for
/// consecutive samples. order <= 0 estimates L from the numerical rank of the
/// sample Hankel matrix.
AnnihilatingResult annihilating_solve(const std::vector<cplx>& samples, int k0, int order,
                                      double pri);

struct ParabolicFit {
  double offset = 0.0;  ///< vertex position relative to the middle sample
  double peak = 0.0;    ///< interpolated peak value
  bool valid = true;    ///< false when the middle sample is not a local max
};

ParabolicFit refine_parabolic(double left, double mid, double right);

}  // namespace dopfocus
