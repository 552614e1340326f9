#include "coherent/physical.hpp"

#include <cmath>

#include <fmt/format.h>

#include "coherent/errors.hpp"

namespace coherent {

namespace {

void require_positive(double value, std::string_view what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument(
        fmt::format("{} must be positive and finite, got {}", what, value));
  }
}

}  // namespace

IonSpecies IonSpecies::from_amu(std::string name, double mass_amu,
                                int charge_number, double wavelength,
                                double linewidth) {
  IonSpecies sp;
  sp.name = std::move(name);
  sp.mass = mass_amu * constants::atomic_mass_unit;
  sp.charge = charge_number * constants::elementary_charge;
  sp.wavelength = wavelength;
  sp.linewidth = linewidth;
  sp.validate();
  return sp;
}

void IonSpecies::validate() const {
  require_positive(mass, "species mass");
  require_positive(charge, "species charge");
  require_positive(wavelength, "species wavelength");
  require_positive(linewidth, "species linewidth");
}

IonSpecies calcium40() {
  return IonSpecies::from_amu("Ca40", 39.962590863, 1, 397e-9,
                              angular_from_mhz(21.6));
}

IonSpecies barium138() {
  return IonSpecies::from_amu("Ba138", 137.905247, 1, 493e-9,
                              angular_from_mhz(20.1));
}

SpeciesRegistry::SpeciesRegistry() {
  add(calcium40());
  add(barium138());
}

SpeciesRegistry SpeciesRegistry::empty() { return SpeciesRegistry(EmptyTag{}); }

void SpeciesRegistry::add(IonSpecies species) {
  species.validate();
  if (species.name.empty()) {
    throw InvalidArgument("species name must not be empty");
  }
  auto name = species.name;
  species_.insert_or_assign(std::move(name), std::move(species));
}

bool SpeciesRegistry::contains(std::string_view name) const {
  return species_.find(name) != species_.end();
}

const IonSpecies& SpeciesRegistry::get(std::string_view name) const {
  auto it = species_.find(name);
  if (it == species_.end()) {
    throw InvalidArgument(fmt::format("unknown species '{}'", name));
  }
  return it->second;
}

std::vector<std::string> SpeciesRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(species_.size());
  for (const auto& [name, _] : species_) out.push_back(name);
  return out;
}

void TrapHardware::validate() const {
  require_positive(tip_voltage, "U_tip");
  require_positive(rf_voltage, "U_rf");
  require_positive(rf_angular_frequency, "omega_rf");
  require_positive(geometric_factor, "kappa");
  require_positive(tip_half_distance, "z0");
  require_positive(radial_distance, "r0");
}

double axial_frequency(const TrapHardware& hw, const IonSpecies& sp) {
  hw.validate();
  sp.validate();
  return std::sqrt(2.0 * sp.charge * hw.tip_voltage * hw.geometric_factor /
                   (sp.mass * hw.tip_half_distance * hw.tip_half_distance));
}

double radial_frequency(const TrapHardware& hw, const IonSpecies& sp) {
  hw.validate();
  sp.validate();
  return sp.charge * hw.rf_voltage /
         (sp.mass * hw.radial_distance * hw.radial_distance *
          hw.rf_angular_frequency * std::numbers::sqrt2);
}

TrapFrequencies secular_frequencies(const TrapHardware& hw,
                                    const IonSpecies& sp) {
  return {axial_frequency(hw, sp), radial_frequency(hw, sp)};
}

double doppler_temperature(const IonSpecies& sp) {
  require_positive(sp.linewidth, "species linewidth");
  return constants::hbar * sp.linewidth / (2.0 * constants::boltzmann);
}

}  // namespace coherent
