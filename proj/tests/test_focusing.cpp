#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dopfocus/focusing.hpp"

using namespace dopfocus;

namespace {
const RadarParams kParams = make_params(16, 10e-6, 200, 5e-6);

XampleSet one_target(const Target& t, int width = 8) {
  const PulseShape s(kParams);
  return xample_analytic(kParams, s, {t}, nullptr, select_kappa(kParams, width, KappaMode::random, 1));
}
}  // namespace

TEST_CASE("window normalization and shape") {
  for (auto kind : {WindowKind::rectangular, WindowKind::hann, WindowKind::blackman, WindowKind::taylor}) {
    CAPTURE(to_string(kind));
    const auto w = make_window(kind, 16);
    CHECK(w.size() == 16);
    CHECK(std::accumulate(w.weights.begin(), w.weights.end(), 0.0) == doctest::Approx(16.0));
    for (int i = 0; i < 16; ++i) {
      CHECK(w.weights[i] > 0.0);
      CHECK(w.weights[i] == doctest::Approx(w.weights[15 - i]));
    }
  }
  const auto h = make_window(WindowKind::hann, 4);
  // sin^2 at (p + 0.5) / P, rescaled to sum 4.
  const double raw0 = std::pow(std::sin(kPi * 0.125), 2);
  const double raw1 = std::pow(std::sin(kPi * 0.375), 2);
  CHECK(h.weights[0] / h.weights[1] == doctest::Approx(raw0 / raw1));
}

TEST_CASE("taylor window agrees with the reference implementation") {
  const auto w = make_window(WindowKind::taylor, 16, 5, -50.0);
  // scipy.signal.windows.taylor(16, nbar=5, sll=50), rescaled to sum 16.
  CHECK(w.weights[0] == doctest::Approx(0.12390031).epsilon(1e-6));
  CHECK(w.weights[1] == doctest::Approx(0.25842196).epsilon(1e-6));
  CHECK(w.weights[2] == doctest::Approx(0.49827166).epsilon(1e-6));
  CHECK(w.weights[3] == doctest::Approx(0.80804720).epsilon(1e-6));
}

TEST_CASE("window parsing") {
  CHECK(parse_window("rect", 8).kind == WindowKind::rectangular);
  CHECK(parse_window("hann", 8).kind == WindowKind::hann);
  const auto t = parse_window("taylor:4:-35", 8);
  CHECK(t.kind == WindowKind::taylor);
  CHECK(t.nbar == 4);
  CHECK(t.sidelobe_db == -35.0);
  CHECK_THROWS_AS(parse_window("kaiser", 8), std::invalid_argument);
  CHECK_THROWS_AS(parse_window("taylor:x", 8), std::invalid_argument);
}

TEST_CASE("focus_at matches the direct sum") {
  const Target t{3e-6, 2.0 * kParams.doppler_bin(), cplx{0.5, 0.5}};
  const auto x = one_target(t);
  const auto w = make_window(WindowKind::blackman, 16);
  const double nu = 1.37 * kParams.doppler_bin();
  const auto f = focus_at(x, nu, w);
  CHECK(f.nu == nu);
  for (int j = 0; j < x.width(); ++j) {
    cplx acc{};
    for (int p = 0; p < 16; ++p)
      acc += w.weights[p] * x.coeffs(p, j) * std::polar(1.0, nu * p * kParams.pri);
    CHECK(std::abs(f.psi[j] - acc) < 1e-12 * std::abs(acc) + 1e-300);
  }
}

TEST_CASE("focusing gain follows the Dirichlet kernel") {
  const Target t{3e-6, 0.3 * kParams.doppler_bin(), 1.0};
  const auto x = one_target(t);
  const auto rect = make_window(WindowKind::rectangular, 16);
  const auto hann = make_window(WindowKind::hann, 16);
  for (double nu : {t.doppler, 0.0, 1.7 * kParams.doppler_bin(), -5.2 * kParams.doppler_bin()}) {
    for (const Window* w : {&rect, &hann}) {
      const auto f = focus_at(x, nu, *w);
      const cplx g = dirichlet_gain(nu, t.doppler, kParams.pri, *w);
      for (int j = 0; j < x.width(); ++j)
        CHECK(std::abs(f.psi[j] - g * x.coeffs(0, j)) < 1e-10 * std::abs(x.coeffs(0, j)));
    }
  }
  CHECK(std::abs(dirichlet_gain(0.4, 0.4, kParams.pri, rect)) == doctest::Approx(16.0));
  // Nulls at multiples of the Doppler resolution.
  CHECK(std::abs(dirichlet_gain(kParams.doppler_bin(), 0.0, kParams.pri, rect)) < 1e-9);
  // Closed form agrees with the direct sum for the rectangular window.
  const double d = 0.123 * kParams.doppler_bin();
  cplx direct{};
  for (int p = 0; p < 16; ++p) direct += std::polar(1.0, d * p * kParams.pri);
  CHECK(std::abs(dirichlet_gain(d, 0.0, kParams.pri, rect) - direct) < 1e-12);
}

TEST_CASE("grid equals focus_at at grid frequencies") {
  const auto x = one_target(Target{1e-6, 3.3 * kParams.doppler_bin(), 1.0});
  const auto w = make_window(WindowKind::taylor, 16);
  for (int M : {8, 16, 32, 37}) {
    CAPTURE(M);
    const auto g = focus_grid(x, M, w, Exec::serial);
    CHECK(g.M == M);
    CHECK(g.psi.rows() == M);
    for (int r = 0; r < M; ++r) {
      const auto f = focus_at(x, g.nu(r), w);
      CHECK((g.psi.row(r).transpose() - f.psi).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  const auto g = focus_grid(x, 32, w);
  CHECK(g.m_lo() == -16);
  CHECK(g.row_of(0) == 16);
  CHECK(g.nu(g.row_of(0)) == 0.0);
  CHECK(g.nu(0) == doctest::Approx(-kPi / kParams.pri));
}

TEST_CASE("serial and parallel grids are bit-identical") {
  const PulseShape s(kParams);
  const auto x = xample_analytic(kParams, s, random_scene(kParams, 4, 2), nullptr,
                                 select_kappa(kParams, 40, KappaMode::random, 3), 1e-12, 4);
  const auto w = make_window(WindowKind::hann, 16);
  const auto a = focus_grid(x, 32, w, Exec::serial);
  const auto b = focus_grid(x, 32, w, Exec::parallel);
  CHECK(a.psi == b.psi);
}

TEST_CASE("focused peak sits at the target Doppler") {
  const Target t{2e-6, -4.0 * kParams.doppler_bin(), 1.0};
  const auto x = one_target(t);
  const auto g = focus_grid(x, 32, make_window(WindowKind::rectangular, 16));
  Eigen::Index best = 0;
  g.psi.rowwise().norm().maxCoeff(&best);
  CHECK(g.nu(static_cast<int>(best)) == doctest::Approx(t.doppler));
}
