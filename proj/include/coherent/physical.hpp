#pragma once

#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace coherent {

/// SI constants (CODATA 2018). Every downstream number is derived from
/// this table.
namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double boltzmann = 1.380649e-23;          // J / K
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F / m
inline constexpr double elementary_charge = 1.602176634e-19;     // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27;    // kg
}  // namespace constants

/// Angular frequency from an ordinary frequency in MHz, and back.
inline constexpr double angular_from_mhz(double mhz) {
  return 2.0 * constants::pi * mhz * 1e6;
}
inline constexpr double mhz_from_angular(double omega) {
  return omega / (2.0 * constants::pi * 1e6);
}

struct IonSpecies {
  std::string name;
  double mass = 0.0;        // kg
  double charge = 0.0;      // C
  double wavelength = 0.0;  // m, scattering transition
  double linewidth = 0.0;   // rad/s, natural linewidth of the cooling line

  /// Builds a species from an atomic-mass-unit mass and an integer charge
  /// state. Throws InvalidArgument if any field is non-positive.
  static IonSpecies from_amu(std::string name, double mass_amu,
                             int charge_number, double wavelength,
                             double linewidth);

  double wavenumber() const { return 2.0 * constants::pi / wavelength; }

  void validate() const;

  friend bool operator==(const IonSpecies&, const IonSpecies&) = default;
};

/// 40Ca+ scattering on S1/2 - P1/2 at 397 nm. Linewidth 2pi x 21.6 MHz is a
/// tabulated literature value.
IonSpecies calcium40();

/// 138Ba+ scattering on S1/2 - P1/2 at 493 nm. Linewidth 2pi x 20.1 MHz is a
/// tabulated literature value.
IonSpecies barium138();

/// Name-indexed species table. The default-constructed registry holds the
/// built-in "Ca40" and "Ba138" records; `add` replaces an existing entry.
class SpeciesRegistry {
 public:
  SpeciesRegistry();

  static SpeciesRegistry empty();

  void add(IonSpecies species);
  bool contains(std::string_view name) const;
  const IonSpecies& get(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  struct EmptyTag {};
  explicit SpeciesRegistry(EmptyTag) {}

  std::map<std::string, IonSpecies, std::less<>> species_;
};

struct TrapHardware {
  double tip_voltage = 0.0;           // V, static voltage on the tip electrodes
  double rf_voltage = 0.0;            // V, RF amplitude
  double rf_angular_frequency = 0.0;  // rad/s
  double geometric_factor = 0.0;      // kappa
  double tip_half_distance = 0.0;     // m, z0
  double radial_distance = 0.0;       // m, r0

  void validate() const;
};

struct TrapFrequencies {
  double axial = 0.0;   // rad/s
  double radial = 0.0;  // rad/s
};

/// omega_z = sqrt(2 q U_tip kappa / (m z0^2))
double axial_frequency(const TrapHardware& hw, const IonSpecies& sp);

/// omega_r = q U_rf / (m r0^2 omega_rf sqrt(2))
double radial_frequency(const TrapHardware& hw, const IonSpecies& sp);

TrapFrequencies secular_frequencies(const TrapHardware& hw,
                                    const IonSpecies& sp);

/// Doppler cooling limit hbar Gamma / (2 k_B), in kelvin.
double doppler_temperature(const IonSpecies& sp);

}  // namespace coherent
