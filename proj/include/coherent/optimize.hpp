#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coherent/collection.hpp"
#include "coherent/crystal.hpp"
#include "coherent/physical.hpp"
#include "coherent/scattering.hpp"

namespace coherent {

enum class ScanMode {
  harmonic_length,      // "harmonic-l": scan l of the harmonic crystal
  equidistant_spacing,  // "equidistant-d": scan the spacing of a regular string
  phases_at_lmin,       // "phases-at-lmin": optimize per-ion phases at l_min
};

std::string_view to_string(ScanMode mode);
ScanMode scan_mode_from_string(std::string_view text);

struct ScanSpec {
  int ions = 2;
  IonSpecies species = calcium40();
  double excitation_angle = constants::pi / 4.0;  // rad
  double radial_freq = angular_from_mhz(5.0);     // rad/s, sets l_min
  /// Length-scale interval [l_lo, l_hi] in metres; defaults to
  /// length_scale_bounds(ions, radial_freq, species).
  std::optional<std::pair<double, double>> length_range;
  /// Minimum number of coarse samples. The scan uses at least ten samples
  /// per fringe of the on-axis phase, so long ranges get more.
  int samples = 2000;
  bool thermal = false;
  /// Kelvin; defaults to the species' Doppler limit.
  std::optional<double> temperature;
  ThermalKeff keff = ThermalKeff::axial;
  ScanMode mode = ScanMode::harmonic_length;
  std::uint64_t seed = 0;
  int phase_starts = 16;

  void validate() const;
  /// The length-scale interval actually scanned.
  std::pair<double, double> resolved_length_range() const;
  double resolved_temperature() const;
};

struct TracePoint {
  double parameter = 0.0;
  double value = 0.0;
};

struct OptimumRecord {
  double best = 0.0;     // P_D,rel at the optimum
  double argmax = 0.0;   // l (harmonic, phases) or d (equidistant), metres
  std::vector<double> phases;  // phases mode only, in [0, 2 pi)
  double range_lo = 0.0;
  double range_hi = 0.0;
  std::vector<TracePoint> trace;
};

/// P_D,rel of the harmonic crystal of `spec` at length scale l, with
/// optional per-ion phases. Thermal dephasing follows spec.thermal.
double harmonic_enhancement(const ScanSpec& spec, const CollectionAperture& ap,
                            double l,
                            const std::optional<std::vector<double>>& phases = {});

/// Coarse scan over the feasible l interval, then golden-section refinement
/// (relative tolerance 1e-6) around the best local maxima of the trace.
OptimumRecord optimize_length_scale(const ScanSpec& spec, const CollectionAperture& ap);

/// Same machinery for a regular string z_j = d (j - (n-1)/2), with d
/// spanning the mean nearest-neighbour distance of the harmonic crystal
/// between l_lo and l_hi.
OptimumRecord optimize_equidistant(const ScanSpec& spec, const CollectionAperture& ap);

/// Fixes l = l_lo and maximizes over the n-1 free phases with multi-start
/// Nelder-Mead: the on-axis aligned start plus `phase_starts` seeded
/// low-discrepancy starts. Never returns less than the zero-phase value.
OptimumRecord optimize_phases(const ScanSpec& spec, const CollectionAperture& ap);

/// Dispatches on spec.mode.
OptimumRecord optimize(const ScanSpec& spec, const CollectionAperture& ap);

struct SweepCell {
  int ions = 0;
  double numerical_aperture = 0.0;
  std::optional<OptimumRecord> record;
  std::string error;  // empty on success
};

/// One optimization per (n, NA) cell, row-major in (ions, numerical
/// apertures). Cells run concurrently on up to `threads` workers (0: hardware
/// concurrency); results keep input order and are independent of thread
/// count. A failing cell records its error and the sweep continues.
std::vector<SweepCell> sweep(const ScanSpec& base, std::span<const int> ions,
                             std::span<const double> numerical_apertures,
                             unsigned threads = 0);

}  // namespace coherent
