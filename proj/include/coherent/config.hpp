#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coherent/optimize.hpp"
#include "coherent/physical.hpp"
#include "coherent/scattering.hpp"

namespace coherent {

enum class OutputFormat { csv, json };

struct FitSettings {
  std::string data_path;
  double single_ion_rate = 270.0;  // counts/s
  double background_rate = 24.0;   // counts/s
  std::optional<std::pair<double, double>> window;  // scan-parameter units (SI)
  bool weighted = false;
};

/// Fully validated run configuration. Angles are radians, lengths metres,
/// frequencies rad/s; conversion from the document's degrees, micrometres and
/// MHz happens once in parse_config.
struct RunConfig {
  SpeciesRegistry registry;
  std::string species = "Ca40";
  std::string species_b = "Ba138";

  double radial_freq = angular_from_mhz(5.0);
  std::optional<TrapHardware> trap_hardware;

  int ions = 2;
  std::vector<int> ion_list;  // sweep rows; defaults to {ions}
  double excitation_angle = constants::pi / 4.0;
  double numerical_aperture = 0.07;
  std::vector<double> na_list;  // sweep columns; defaults to {numerical_aperture}

  bool thermal = false;
  ThermalKeff keff = ThermalKeff::axial;
  std::optional<double> temperature;  // K
  ScanMode mode = ScanMode::harmonic_length;

  std::optional<double> length_scale;  // m
  std::optional<double> axial_freq;    // rad/s
  std::optional<std::vector<double>> phases;

  std::optional<std::pair<double, double>> length_range;  // m
  int samples = 2000;
  std::uint64_t seed = 0;
  int phase_starts = 16;
  unsigned threads = 0;

  double beta_start = 0.0;
  double beta_stop = constants::pi;
  int beta_count = 361;

  FitSettings fit;
  std::optional<double> base_abs_efficiency;

  std::string output_path;
  OutputFormat format = OutputFormat::csv;

  const IonSpecies& ion_species() const { return registry.get(species); }

  /// Axial frequency: axial_freq_MHz, else derived from l_um, else from the
  /// trap hardware, else 2 pi x 1 MHz.
  double resolved_axial_freq() const;
  /// Length scale: l_um, else derived from axial_freq_MHz, else from the
  /// trap hardware, else 5 um.
  double resolved_length_scale() const;

  ScanSpec scan_spec() const;
};

/// Dotted key path (e.g. "NA", "output.format") and raw value text. The
/// value is read as JSON when it parses as JSON, otherwise as a string.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Parses a JSON configuration document (comments allowed). An empty or
/// whitespace-only document yields all defaults. Unknown keys are rejected.
/// Overrides are applied on top of the document before validation.
/// Throws ConfigError with line/column for syntax errors and with the
/// offending key for validation errors.
RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});

/// Collects COHERENT_<KEY> environment overrides for the scalar top-level
/// keys (e.g. COHERENT_SEED, COHERENT_NA, COHERENT_ALPHA_DEG).
ConfigOverrides environment_overrides(
    const std::function<const char*(const char*)>& lookup);

}  // namespace coherent
