#include <doctest.h>

#include <cmath>

#include "coherent/errors.hpp"
#include "coherent/physical.hpp"

using namespace coherent;

namespace {

TrapHardware reference_trap() {
  TrapHardware hw;
  hw.tip_voltage = 500.0;
  hw.rf_voltage = 800.0;
  hw.rf_angular_frequency = angular_from_mhz(29.9);
  hw.geometric_factor = 0.02;
  hw.tip_half_distance = 0.5e-3;
  hw.radial_distance = 0.4e-3;
  return hw;
}

}  // namespace

TEST_CASE("built-in species carry the tabulated values") {
  const auto ca = calcium40();
  CHECK(ca.name == "Ca40");
  CHECK(ca.wavelength == doctest::Approx(397e-9).epsilon(1e-12));
  CHECK(ca.charge == constants::elementary_charge);
  CHECK(ca.mass == doctest::Approx(39.962590863 * constants::atomic_mass_unit));
  CHECK(ca.linewidth == doctest::Approx(angular_from_mhz(21.6)));
  const auto ba = barium138();
  CHECK(ba.wavelength == doctest::Approx(493e-9).epsilon(1e-12));
  CHECK(ba.linewidth == doctest::Approx(angular_from_mhz(20.1)));
}

TEST_CASE("species validation rejects non-positive fields") {
  auto sp = calcium40();
  sp.mass = 0.0;
  CHECK_THROWS_AS(sp.validate(), InvalidArgument);
  sp = calcium40();
  sp.linewidth = -1.0;
  CHECK_THROWS_AS(sp.validate(), InvalidArgument);
  CHECK_THROWS_AS(IonSpecies::from_amu("X", 40.0, 0, 400e-9, 1.0), InvalidArgument);
}

TEST_CASE("registry round-trips a registered species") {
  auto reg = SpeciesRegistry::empty();
  CHECK_FALSE(reg.contains("Ca40"));
  const auto custom = IonSpecies::from_amu("Ca80", 2 * 39.962590863, 1, 397e-9,
                                           angular_from_mhz(21.6));
  reg.add(custom);
  REQUIRE(reg.contains("Ca80"));
  CHECK(reg.get("Ca80") == custom);
  CHECK_THROWS_AS(reg.get("Sr88"), InvalidArgument);

  SpeciesRegistry builtin;
  CHECK(builtin.get("Ca40") == calcium40());
  CHECK(builtin.get("Ba138") == barium138());
}

TEST_CASE("axial frequency scaling") {
  const auto ca = calcium40();
  auto hw = reference_trap();
  const double w = axial_frequency(hw, ca);
  hw.tip_voltage *= 2.0;
  CHECK(axial_frequency(hw, ca) == doctest::Approx(w * std::sqrt(2.0)));

  hw = reference_trap();
  double prev = 0.0;
  for (double kappa : {1e-6, 1e-4, 1e-2, 1e-1}) {
    hw.geometric_factor = kappa;
    const double now = axial_frequency(hw, ca);
    CHECK(now > prev);
    prev = now;
  }
  hw.geometric_factor = 1e-12;
  CHECK(axial_frequency(hw, ca) < 1e-3 * w);
}

TEST_CASE("axial frequency round-trips through the inverted formula") {
  const auto ca = calcium40();
  auto hw = reference_trap();
  const double target = angular_from_mhz(1.0);
  hw.tip_voltage = target * target * ca.mass * hw.tip_half_distance * hw.tip_half_distance /
                   (2.0 * ca.charge * hw.geometric_factor);
  CHECK(axial_frequency(hw, ca) == doctest::Approx(target).epsilon(1e-12));
}

TEST_CASE("radial frequency scaling and inversion") {
  const auto ca = calcium40();
  auto hw = reference_trap();
  const double w = radial_frequency(hw, ca);
  hw.rf_voltage *= 2.0;
  CHECK(radial_frequency(hw, ca) == doctest::Approx(2.0 * w));
  hw = reference_trap();
  hw.rf_angular_frequency *= 2.0;
  CHECK(radial_frequency(hw, ca) == doctest::Approx(0.5 * w));

  hw = reference_trap();
  const double target = angular_from_mhz(2.2);
  hw.rf_voltage = target * ca.mass * hw.radial_distance * hw.radial_distance *
                  hw.rf_angular_frequency * std::sqrt(2.0) / ca.charge;
  CHECK(radial_frequency(hw, ca) == doctest::Approx(target).epsilon(1e-12));
  const auto both = secular_frequencies(hw, ca);
  CHECK(both.radial == radial_frequency(hw, ca));
  CHECK(both.axial == axial_frequency(hw, ca));
}

TEST_CASE("trap hardware validation") {
  auto hw = reference_trap();
  CHECK_NOTHROW(hw.validate());
  hw.radial_distance = 0.0;
  CHECK_THROWS_AS(hw.validate(), InvalidArgument);
}

TEST_CASE("Doppler temperature") {
  auto sp = calcium40();
  // hbar Gamma / (2 kB) evaluated by hand with the same constants.
  const double expected = 1.054571817e-34 * 2.0 * 3.141592653589793 * 21.6e6 / (2.0 * 1.380649e-23);
  CHECK(doppler_temperature(sp) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(doppler_temperature(sp) == doctest::Approx(0.52e-3).epsilon(0.01));

  sp.linewidth = 2.0 * constants::boltzmann / constants::hbar;
  CHECK(doppler_temperature(sp) == doctest::Approx(1.0).epsilon(1e-14));

  const double t = doppler_temperature(calcium40());
  sp = calcium40();
  sp.linewidth *= 0.5;
  CHECK(doppler_temperature(sp) == doctest::Approx(0.5 * t).epsilon(1e-14));
}
