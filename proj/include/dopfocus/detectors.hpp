#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dopfocus/focusing.hpp"
#include "dopfocus/sparse_recovery.hpp"

namespace dopfocus {

struct Detection {
  double tau_hat = 0.0;  ///< [0, pri)
  double nu_hat = 0.0;   ///< [-pi/pri, pi/pri)
  cplx alpha_hat{0.0, 0.0};
  int iteration = 0;
  double peak_value = 0.0;
  double residual_energy = 0.0;  ///< residual after this detection was removed
  bool degenerate = false;       ///< residual was empty; amplitude is zero
};

enum class DelaySolver { omp, iht };

struct FocusingOptions {
  int targets = 1;  ///< L
  int M = 0;        ///< grid size; 0 means 2P
  std::optional<Window> window;  ///< rectangular when unset
  bool refine = true;
  /// Continuous Doppler argmax by golden-section search within one grid step.
  bool gridless = false;
  DelaySolver solver = DelaySolver::omp;
  /// Rows with |nu| <= dc_exclusion_bins * 2 pi / (P tau) are skipped; < 0 disables.
  double dc_exclusion_bins = -1.0;
  Exec exec = Exec::parallel;
};

/// Iterative Doppler focusing with per-bin sparse delay recovery and exact
/// model subtraction of each detection from the residual coefficients.
std::vector<Detection> focusing_detect(const XampleSet& x, const Dictionary& dict,
                                       const FocusingOptions& options);

/// Removes one target's coefficients from a residual in place.
void subtract_target(CMatrix& residual, const Dictionary& dict, double tau, double nu,
                     cplx alpha);

/// |z| over (Doppler row, delay column) with the complex values kept for
/// amplitude read-out.
struct DelayDopplerMap {
  CMatrix values;  ///< M x delay_points
  int M = 0;
  double pri = 0.0;
  double delay_step = 0.0;

  Eigen::MatrixXd magnitude() const { return values.cwiseAbs(); }
  int m_lo() const { return -(M / 2); }
  double nu(int row) const { return kTwoPi * (row + m_lo()) / (pri * M); }
  double tau(int col) const { return col * delay_step; }
};

struct ClassicOptions {
  int targets = 1;
  int M = 0;              ///< Doppler DFT size; 0 means 2P
  int delay_points = 0;   ///< interpolated delay grid; 0 means 2 tau B_h
  int guard_delay_bins = 3;    ///< in Nyquist delay bins
  int guard_doppler_bins = 3;  ///< in Nyquist Doppler bins
  bool refine = true;
  Exec exec = Exec::parallel;
};

/// Matched filter per frame (frequency domain, template sampled at the
/// signal rate), Doppler DFT across pulses, scaled so a target peak equals
/// its amplitude.
DelayDopplerMap classic_map(const NyquistSignal& signal, const RadarParams& params,
                            const PulseShape& shape, const ClassicOptions& options);
std::vector<Detection> classic_detect(const NyquistSignal& signal, const RadarParams& params,
                                      const PulseShape& shape, const ClassicOptions& options);

struct TwoStageOptions {
  int targets = 1;
  int M = 0;  ///< Doppler DFT size; 0 means 2P
  bool refine = true;
  double tolerance = 1e-9;  ///< stage-1 stop on |residual| <= tolerance * |C|
};

/// Joint-sparse delay support over all pulses, then a Doppler DFT of each
/// recovered delay's amplitude sequence.
std::vector<Detection> twostage_detect(const XampleSet& x, const Dictionary& dict,
                                       const TwoStageOptions& options);

void write_detections_csv(const std::filesystem::path& path, const std::vector<Detection>& d);
std::vector<Detection> read_detections_csv(const std::filesystem::path& path);
void write_map_csv(const std::filesystem::path& path, const DelayDopplerMap& map);

}  // namespace dopfocus
