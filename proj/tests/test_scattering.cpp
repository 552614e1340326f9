#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "coherent/crystal.hpp"
#include "coherent/errors.hpp"
#include "coherent/scattering.hpp"

using namespace coherent;

namespace {

constexpr double kPi = constants::pi;

ScatterScenario make(int n, double l, double alpha_deg) {
  ScatterScenario s;
  s.geometry = {l, equilibrium_positions(n)};
  s.wavenumber = calcium40().wavenumber();
  s.excitation_angle = alpha_deg * kPi / 180.0;
  return s;
}

double complex_oracle(const ScatterScenario& s, double beta) {
  std::complex<double> sum{};
  const double dc = std::cos(s.excitation_angle) - std::cos(beta);
  for (std::size_t j = 0; j < s.geometry.size(); ++j) {
    const double phi = s.phases ? (*s.phases)[j] : 0.0;
    sum += std::polar(1.0, s.wavenumber * s.geometry.z(j) * dc + phi);
  }
  return std::norm(sum);
}

}  // namespace

TEST_CASE("path difference") {
  const auto s = make(2, 1e-6, 45.0);
  const double a = s.excitation_angle;
  CHECK(path_difference(s.geometry, a, 0.0, 1, 0) == doctest::Approx(-3.690e-7).epsilon(1e-3));
  CHECK(path_difference(s.geometry, a, a, 1, 0) == 0.0);
  CHECK(path_difference(s.geometry, a, 0.3, 1, 1) == 0.0);
  CHECK(path_difference(s.geometry, a, 0.3, 0, 1) == -path_difference(s.geometry, a, 0.3, 1, 0));
}

TEST_CASE("single ion and on-axis constructive limits") {
  const auto s1 = make(1, 3e-6, 45.0);
  for (double b : {0.0, 0.5, 1.0, 3.0}) CHECK(intensity(s1, b) == doctest::Approx(1.0));
  for (int n : {2, 5, 9}) {
    const auto s = make(n, 4e-6, 45.0);
    CHECK(intensity(s, s.excitation_angle) == doctest::Approx(double(n * n)).epsilon(1e-12));
  }
}

TEST_CASE("two-ion destructive node on the axis") {
  auto s = make(2, 1.0, 45.0);
  const auto& v = s.geometry.positions;
  s.geometry.length_scale =
      kPi / (s.wavenumber * (v[1] - v[0]) * (1.0 - std::cos(s.excitation_angle)));
  CHECK(std::abs(intensity(s, 0.0)) < 1e-12);
}

TEST_CASE("cosine double sum equals complex-amplitude oracle") {
  const auto s = make(3, 5e-6, 45.0);
  CHECK(std::abs(intensity(s, 10.0 * kPi / 180.0) - complex_oracle(s, 10.0 * kPi / 180.0)) < 1e-10);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    auto sc = make(n, (1.0 + 20.0 * u(rng)) * 1e-6, 5.0 + 85.0 * u(rng));
    if (trial % 2) {
      std::vector<double> ph(n, 0.0);
      for (int j = 1; j < n; ++j) ph[j] = 2.0 * kPi * u(rng);
      sc.phases = ph;
    }
    const double beta = kPi * u(rng);
    CHECK(std::abs(intensity(sc, beta) - complex_oracle(sc, beta)) < 1e-10);
  }
}

TEST_CASE("intensity non-negative and bounded by n squared") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto ca = calcium40();
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 10;
    auto s = make(n, (1.0 + 30.0 * u(rng)) * 1e-6, 1.0 + 89.0 * u(rng));
    if (trial % 3 == 0 && n > 1) {
      const double wz = axial_frequency_for_length_scale(s.geometry.length_scale, ca);
      s.pair_variance = pair_distance_variance(axial_modes(s.geometry, wz), ca, 1e-3 * u(rng));
      s.keff = trial % 2 ? ThermalKeff::scalar : ThermalKeff::axial;
    }
    const double beta = kPi * u(rng);
    const double i = intensity(s, beta);
    CHECK(i >= -1e-9);
    CHECK(i <= n * n + 1e-9);
  }
}

TEST_CASE("phase gauge invariance") {
  auto s = make(6, 3e-6, 60.0);
  std::vector<double> ph = {0.0, 0.3, 1.7, 2.2, 4.0, 5.5};
  s.phases = ph;
  auto shifted = s;
  for (double& p : ph) p += 1.234;
  shifted.phases = ph;
  for (double b = 0.0; b < kPi; b += 0.1)
    CHECK(std::abs(intensity(s, b) - intensity(shifted, b)) < 1e-12);
}

TEST_CASE("thermal damping") {
  const int n = 4;
  auto s = make(n, 3e-6, 45.0);
  Matrix huge(n, n, 1e6);
  for (int i = 0; i < n; ++i) huge(i, i) = 0.0;
  s.pair_variance = huge;
  CHECK(intensity(s, 0.2) == doctest::Approx(double(n)).epsilon(1e-12));
  s.keff = ThermalKeff::scalar;
  CHECK(intensity(s, 0.2) == doctest::Approx(double(n)).epsilon(1e-12));

  // The axial projection vanishes in the excitation direction.
  s.keff = ThermalKeff::axial;
  CHECK(thermal_wavenumber(s, s.excitation_angle) == doctest::Approx(0.0));
  CHECK(intensity(s, s.excitation_angle) == doctest::Approx(double(n * n)).epsilon(1e-12));
  s.keff = ThermalKeff::scalar;
  CHECK(thermal_wavenumber(s, 0.7) ==
        doctest::Approx(2.0 * s.wavenumber * std::sin(s.excitation_angle / 2.0)));
}

TEST_CASE("pattern and scenario validation") {
  const auto s = make(3, 4e-6, 45.0);
  const std::vector<double> grid = {0.0, 0.5, 1.0, kPi};
  const auto p = pattern(s, grid);
  REQUIRE(p.intensity.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(p.intensity[i] == intensity(s, grid[i]));
  CHECK_THROWS_AS(pattern(s, std::vector<double>{0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(pattern(s, std::vector<double>{-0.1, 0.5}), InvalidArgument);

  auto bad = s;
  bad.excitation_angle = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.phases = std::vector<double>{0.0, std::nan(""), 0.0};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad.phases = std::vector<double>{0.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);

  CHECK(thermal_keff_from_string("scalar") == ThermalKeff::scalar);
  CHECK(to_string(ThermalKeff::axial) == "axial");
  CHECK_THROWS_AS(thermal_keff_from_string("radial"), InvalidArgument);
}
