#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "dopfocus/detectors.hpp"

using namespace dopfocus;

namespace {

struct Setup {
  RadarParams params = make_params(16, 10e-6, 200, 5e-6);
  PulseShape shape{params};
  CoefficientSet kappa = select_kappa(params, 40, KappaMode::random, 11);
  Dictionary dict = build_dictionary(params, shape, kappa, half_bin_delay(params));

  XampleSet xamples(const std::vector<Target>& t, double sigma2 = 0.0) const {
    return xample_analytic(params, shape, t, nullptr, kappa, sigma2, 5);
  }
  double grid_nu(int m) const { return kTwoPi * m / (params.pri * 2 * params.pulse_count); }
};

const Detection* nearest(const std::vector<Detection>& d, const Target& t) {
  const Detection* best = nullptr;
  double bd = 1e300;
  for (const auto& x : d) {
    const double dd = std::abs(x.tau_hat - t.delay) * 1e6 + std::abs(x.nu_hat - t.doppler) * 1e-5;
    if (dd < bd) {
      bd = dd;
      best = &x;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("focusing recovers an on-grid target exactly") {
  Setup s;
  const Target t{s.dict.delay_of(37), s.grid_nu(5), cplx(0.8, -0.6)};
  FocusingOptions o;
  o.targets = 1;
  const auto d = focusing_detect(s.xamples({t}), s.dict, o);
  REQUIRE(d.size() == 1);
  CHECK(d[0].tau_hat == doctest::Approx(t.delay).epsilon(1e-9));
  CHECK(d[0].nu_hat == doctest::Approx(t.doppler).epsilon(1e-9));
  CHECK(std::abs(d[0].alpha_hat - t.amplitude) < 1e-9);
  CHECK(d[0].residual_energy < 1e-20);
  CHECK_FALSE(d[0].degenerate);
}

TEST_CASE("refinement moves an off-grid estimate toward the truth") {
  Setup s;
  const Target t{s.dict.delay_of(60.3), s.grid_nu(-7) + 0.31 * (s.grid_nu(1)), 1.0};
  FocusingOptions coarse;
  coarse.refine = false;
  FocusingOptions fine;
  const auto a = focusing_detect(s.xamples({t}), s.dict, coarse)[0];
  const auto b = focusing_detect(s.xamples({t}), s.dict, fine)[0];
  CHECK(std::abs(b.tau_hat - t.delay) <= std::abs(a.tau_hat - t.delay));
  CHECK(std::abs(b.nu_hat - t.doppler) < std::abs(a.nu_hat - t.doppler));
  FocusingOptions gl;
  gl.gridless = true;
  const auto c = focusing_detect(s.xamples({t}), s.dict, gl)[0];
  CHECK(std::abs(c.nu_hat - t.doppler) < 0.1 * s.grid_nu(1));
}

TEST_CASE("focusing separates several targets") {
  Setup s;
  const std::vector<Target> scene = {{s.dict.delay_of(20), s.grid_nu(3), 1.0},
                                     {s.dict.delay_of(90), s.grid_nu(-9), cplx(0, 0.7)},
                                     {s.dict.delay_of(150), s.grid_nu(12), 0.5}};
  for (auto solver : {DelaySolver::omp, DelaySolver::iht}) {
    FocusingOptions o;
    o.targets = 3;
    o.solver = solver;
    const auto d = focusing_detect(s.xamples(scene), s.dict, o);
    REQUIRE(d.size() == 3);
    for (const auto& t : scene) {
      const auto* n = nearest(d, t);
      CHECK(std::abs(n->tau_hat - t.delay) < s.params.delay_bin());
      CHECK(std::abs(n->nu_hat - t.doppler) < s.params.doppler_bin());
    }
    CHECK(d[0].iteration == 0);
    CHECK(d[2].iteration == 2);
  }
}

TEST_CASE("serial and parallel focusing detections are identical") {
  Setup s;
  const auto scene = random_scene(s.params, 4, 8);
  const auto x = s.xamples(scene, 1e-13);
  FocusingOptions a;
  a.targets = 4;
  a.exec = Exec::serial;
  FocusingOptions b = a;
  b.exec = Exec::parallel;
  const auto da = focusing_detect(x, s.dict, a);
  const auto db = focusing_detect(x, s.dict, b);
  REQUIRE(da.size() == db.size());
  for (std::size_t i = 0; i < da.size(); ++i) {
    CHECK(da[i].tau_hat == db[i].tau_hat);
    CHECK(da[i].nu_hat == db[i].nu_hat);
    CHECK(da[i].alpha_hat == db[i].alpha_hat);
  }
}

TEST_CASE("subtract_target removes the model exactly") {
  Setup s;
  const Target t{3.3e-6, 12345.0, cplx(0.2, 0.4)};
  auto x = s.xamples({t});
  subtract_target(x.coeffs, s.dict, t.delay, t.doppler, t.amplitude);
  CHECK(x.coeffs.norm() < 1e-12);
}

TEST_CASE("DC exclusion skips stationary returns") {
  Setup s;
  const std::vector<Target> scene = {{s.dict.delay_of(40), 0.0, 3.0},
                                     {s.dict.delay_of(120), s.grid_nu(10), 1.0}};
  FocusingOptions o;
  o.dc_exclusion_bins = 1.0;
  const auto d = focusing_detect(s.xamples(scene), s.dict, o);
  // Leakage from the excluded return biases the refinement slightly.
  CHECK(std::abs(d[0].nu_hat - scene[1].doppler) < 0.1 * s.params.doppler_bin());
  CHECK(std::abs(d[0].tau_hat - scene[1].delay) < 0.5 * s.params.delay_bin());
}

TEST_CASE("empty input gives degenerate detections") {
  Setup s;
  FocusingOptions o;
  o.targets = 2;
  const auto d = focusing_detect(s.xamples({}), s.dict, o);
  REQUIRE(d.size() == 2);
  CHECK(d[0].degenerate);
  CHECK(d[1].degenerate);
  CHECK(d[0].alpha_hat == cplx{});
}

TEST_CASE("argument checks") {
  Setup s;
  FocusingOptions o;
  o.targets = 0;
  CHECK_THROWS_AS(focusing_detect(s.xamples({}), s.dict, o), std::invalid_argument);
  o.targets = 1;
  o.window = make_window(WindowKind::hann, 8);
  CHECK_THROWS_AS(focusing_detect(s.xamples({}), s.dict, o), std::invalid_argument);
  const auto other = build_dictionary(s.params, s.shape, select_kappa(s.params, 40, KappaMode::random, 12),
                                      half_bin_delay(s.params));
  CHECK_THROWS_AS(focusing_detect(s.xamples({}), other, FocusingOptions{}), std::invalid_argument);
}

TEST_CASE("classic map peaks at the target with its amplitude") {
  Setup s;
  const Target t{s.params.delay_bin() * 41, s.grid_nu(6), cplx(0.0, 2.0)};
  const auto sig = synthesize(s.params, s.shape, {t});
  ClassicOptions o;
  const auto map = classic_map(sig, s.params, s.shape, o);
  CHECK(map.M == 32);
  CHECK(map.values.cols() == 400);
  Eigen::Index r = 0, c = 0;
  map.magnitude().maxCoeff(&r, &c);
  CHECK(map.tau(static_cast<int>(c)) == doctest::Approx(t.delay));
  CHECK(map.nu(static_cast<int>(r)) == doctest::Approx(t.doppler));
  CHECK(std::abs(map.values(r, c) - t.amplitude) < 1e-6);

  const auto d = classic_detect(sig, s.params, s.shape, o);
  REQUIRE(d.size() == 1);
  CHECK(d[0].tau_hat == doctest::Approx(t.delay).epsilon(1e-6));
  CHECK(d[0].nu_hat == doctest::Approx(t.doppler).epsilon(1e-6));

  ClassicOptions serial = o;
  serial.exec = Exec::serial;
  CHECK(classic_map(sig, s.params, s.shape, serial).values == map.values);
}

TEST_CASE("classic detector respects the guard region") {
  Setup s;
  const std::vector<Target> scene = {{s.params.delay_bin() * 40, s.grid_nu(4), 1.0},
                                     {s.params.delay_bin() * 120, s.grid_nu(-10), 0.6}};
  ClassicOptions o;
  o.targets = 2;
  const auto d = classic_detect(synthesize(s.params, s.shape, scene), s.params, s.shape, o);
  REQUIRE(d.size() == 2);
  for (const auto& t : scene) {
    const auto* n = nearest(d, t);
    CHECK(std::abs(n->tau_hat - t.delay) < 0.5 * s.params.delay_bin());
    CHECK(std::abs(n->nu_hat - t.doppler) < 0.5 * s.params.doppler_bin());
  }
}

TEST_CASE("two-stage detector on separated delays") {
  Setup s;
  const std::vector<Target> scene = {{s.dict.delay_of(30), s.grid_nu(2), 1.0},
                                     {s.dict.delay_of(170), s.grid_nu(-6), cplx(0.5, 0.5)}};
  TwoStageOptions o;
  o.targets = 2;
  const auto d = twostage_detect(s.xamples(scene), s.dict, o);
  REQUIRE(d.size() == 2);
  for (const auto& t : scene) {
    const auto* n = nearest(d, t);
    CHECK(n->tau_hat == doctest::Approx(t.delay));
    CHECK(n->nu_hat == doctest::Approx(t.doppler).epsilon(1e-6));
    CHECK(std::abs(n->alpha_hat - t.amplitude) < 1e-6);
  }
}

TEST_CASE("two-stage cannot split targets sharing a delay") {
  Setup s;
  const double tau = s.dict.delay_of(50);
  const std::vector<Target> scene = {{tau, s.grid_nu(-8), 1.0}, {tau, s.grid_nu(8), 1.0}};
  TwoStageOptions o;
  o.targets = 2;
  const auto d = twostage_detect(s.xamples(scene), s.dict, o);
  int near_nu = 0;
  for (const auto& x : d)
    for (const auto& t : scene)
      if (std::abs(x.tau_hat - tau) < s.params.delay_bin() &&
          std::abs(x.nu_hat - t.doppler) < s.params.doppler_bin())
        ++near_nu;
  CHECK(near_nu <= 1);

  FocusingOptions f;
  f.targets = 2;
  const auto fd = focusing_detect(s.xamples(scene), s.dict, f);
  for (const auto& t : scene) {
    const auto* n = nearest(fd, t);
    CHECK(std::abs(n->nu_hat - t.doppler) < s.params.doppler_bin());
  }
}

TEST_CASE("detection csv round trip") {
  std::vector<Detection> d(2);
  d[0] = Detection{1.25e-6, -314.159, cplx(0.1, -0.2), 0, 3.5, 0.0, false};
  d[1] = Detection{9.875e-6, 27000.5, cplx(-1.0, 0.0), 1, 0.25, 0.0, false};
  const auto path = std::filesystem::temp_directory_path() / "dopfocus_det.csv";
  write_detections_csv(path, d);
  const auto back = read_detections_csv(path);
  REQUIRE(back.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(back[i].tau_hat == doctest::Approx(d[i].tau_hat).epsilon(1e-9));
    CHECK(back[i].nu_hat == doctest::Approx(d[i].nu_hat).epsilon(1e-9));
    CHECK(std::abs(back[i].alpha_hat - d[i].alpha_hat) < 1e-9);
    CHECK(back[i].iteration == d[i].iteration);
  }
  std::filesystem::remove(path);
}
