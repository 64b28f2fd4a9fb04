#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dopfocus/xampler.hpp"

namespace dopfocus {

enum class WindowKind { rectangular, hann, blackman, taylor };

struct Window {
  WindowKind kind = WindowKind::rectangular;
  int nbar = 5;               ///< Taylor only
  double sidelobe_db = -50.0; ///< Taylor only
  std::vector<double> weights;  ///< length P, positive, sum = P

  int size() const { return static_cast<int>(weights.size()); }
  std::string describe() const;
};

/// Builds a P-point window normalized to sum P.
Window make_window(WindowKind kind, int pulses, int nbar = 5, double sidelobe_db = -50.0);
/// Parses "rect", "hann", "blackman", "taylor" or "taylor:<nbar>:<sll_db>".
Window parse_window(const std::string& spec, int pulses);
std::string to_string(WindowKind kind);

struct FocusedVector {
  CVector psi;  ///< over kappa
  double nu = 0.0;
};

/// Psi_m[k] on the grid nu_m = 2 pi m / (tau M), m in [-(M/2), M - M/2).
/// Row r holds m = r - M/2.
struct FocusedGrid {
  CMatrix psi;  ///< M x |kappa|
  int M = 0;
  double pri = 0.0;

  int m_lo() const { return -(M / 2); }
  int row_of(int m) const { return m - m_lo(); }
  double nu(int row) const { return kTwoPi * (row + m_lo()) / (pri * M); }
};

/// Psi_nu[k] = sum_p w[p] c_p[k] e^{j nu p tau}.
FocusedVector focus_at(const XampleSet& x, double nu, const Window& window);
FocusedVector focus_at(const CMatrix& coeffs, double pri, double nu, const Window& window);

/// All M grid frequencies via length-M FFTs along the pulse axis. When M < P
/// the pulse sum wraps modulo M, which is exact on the grid.
FocusedGrid focus_grid(const XampleSet& x, int M, const Window& window, Exec exec = Exec::parallel);
FocusedGrid focus_grid(const CMatrix& coeffs, double pri, int M, const Window& window,
                       Exec exec = Exec::parallel);

/// g(nu | nu_l) = sum_p w[p] e^{j (nu - nu_l) p tau}; closed form for the
/// rectangular window.
cplx dirichlet_gain(double nu, double nu_l, double pri, const Window& window);

/// Long-format heatmap: m,nu_rad_s,k,abs_psi.
void write_focus_heatmap(const std::filesystem::path& path, const FocusedGrid& grid,
                         const CoefficientSet& kappa);

}  // namespace dopfocus
