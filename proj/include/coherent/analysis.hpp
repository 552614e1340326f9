#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coherent/collection.hpp"
#include "coherent/optimize.hpp"

namespace coherent {

/// One measured point of an enhancement scan (rates in counts/s).
struct CountRecord {
  int ions = 1;
  double parameter = 0.0;  // l, omega_z or U_tip of the scan point
  double counts = 0.0;
  double single_ion_counts = 0.0;
  double background_counts = 0.0;
  double counts_error = 0.0;

  void validate() const;
};

/// (C - C_bg) / ((C_1 - C_bg) n). Throws DegenerateNormalization when
/// C_1 <= C_bg.
double normalize_counts(const CountRecord& rec);

/// Propagated 1-sigma uncertainty of normalize_counts from counts_error only.
double normalized_counts_error(const CountRecord& rec);

struct FitPoint {
  double parameter = 0.0;  // l (m) or whatever the model takes
  double measured = 0.0;   // P_D,rel^exp
  double weight = 1.0;     // inverse variance when weighted
};

struct FitOptions {
  /// Only points with parameter inside [lo, hi] enter the fit (local fit).
  std::optional<std::pair<double, double>> window;
  bool weighted = false;
};

struct CoherentFit {
  double coherent_fraction = 0.0;    // f_coh in [0, 1]
  double incoherent_fraction = 1.0;  // 1 - f_coh
  double unclamped_fraction = 0.0;   // least-squares value before clamping
  double residual_norm = 0.0;        // sqrt(sum w r^2) over fitted points
  std::vector<double> parameters;    // fitted points only
  std::vector<double> model_values;  // (1 - f) + f P_cal at those points
  std::size_t points = 0;
};

/// Least-squares f_coh for P_exp = (1 - f) + f P_cal(parameter), closed
/// form, clamped to [0, 1]. Needs >= 2 points in the window and a model that
/// varies across them (UnidentifiableFit otherwise).
CoherentFit fit_coherent_fraction(std::span<const FitPoint> data,
                                  const std::function<double(double)>& model,
                                  const FitOptions& options = {});

/// Same, with model values already evaluated at each data point.
CoherentFit fit_coherent_fraction(std::span<const FitPoint> data,
                                  std::span<const double> model_values,
                                  const FitOptions& options = {});

struct SpeciesComparison {
  double ratio = 0.0;  // best(second) / best(first)
  OptimumRecord first;
  OptimumRecord second;
};

/// Runs the harmonic length-scale optimization with thermal dephasing for
/// both species, each within its own feasible bounds (or base.length_range
/// when given). `base.ions`, angle, radial frequency, k_eff and temperature
/// override are shared; each species uses its own Doppler temperature unless
/// base.temperature is set.
SpeciesComparison species_comparison(const ScanSpec& base, const IonSpecies& first,
                                     const IonSpecies& second,
                                     const CollectionAperture& ap,
                                     bool thermal = true);

/// P_D,rel times the single-ion absolute detection efficiency.
double absolute_efficiency(double relative_enhancement, double single_ion_efficiency);

}  // namespace coherent
