#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace dopfocus {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
/// Row-major so that a pulse (row) of an XampleSet is contiguous.
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

/// Selects the serial reference path or the OpenMP path of a kernel.
/// Both paths produce bit-identical results.
enum class Exec { serial, parallel };

/// Wraps an angular frequency into [-pi/pri, pi/pri).
double wrap_doppler(double nu, double pri);

/// Wraps a delay into [0, pri).
double wrap_delay(double tau, double pri);

}  // namespace dopfocus
