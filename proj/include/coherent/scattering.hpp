#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "coherent/crystal.hpp"
#include "coherent/linalg.hpp"

namespace coherent {

/// Which wave-vector magnitude enters the thermal damping factor
/// exp(-k_eff^2 sigma^2 / 2).
enum class ThermalKeff {
  /// Axial projection k (cos beta - cos alpha); exactly zero at beta = alpha.
  axial,
  /// Fixed magnitude |k_out - k_in| for k_out along the +z detector axis,
  /// i.e. 2 k sin(alpha / 2).
  scalar,
};

std::string_view to_string(ThermalKeff keff);
ThermalKeff thermal_keff_from_string(std::string_view text);

/// Elastic scattering off an ion string lying on the z axis. Angles are
/// measured from +z; the excitation beam lies in the z-x plane at angle
/// `excitation_angle`, the detector looks along beta = 0.
struct ScatterScenario {
  CrystalGeometry geometry;
  double wavenumber = 0.0;        // rad/m
  double excitation_angle = 0.0;  // rad, 0 < alpha <= pi/2
  std::optional<std::vector<double>> phases;  // per-ion offsets; only differences matter
  std::optional<Matrix> pair_variance;        // m^2, from pair_distance_variance
  ThermalKeff keff = ThermalKeff::axial;

  void validate() const;
};

/// l (v_a - v_b)(cos alpha - cos beta), in metres.
double path_difference(const CrystalGeometry& geom, double alpha, double beta,
                       std::size_t a, std::size_t b);

/// Damping wavenumber used for the thermal factor at observation angle beta.
double thermal_wavenumber(const ScatterScenario& s, double beta);

/// Precomputed pair table for fast repeated evaluation of the far-field
/// intensity of one scenario.
class IntensityEvaluator {
 public:
  explicit IntensityEvaluator(const ScatterScenario& s);

  /// Intensity at polar angle beta, normalized so one ion gives 1.
  double operator()(double beta) const { return at_cosine(std::cos(beta)); }

  /// Same, parameterized by cos(beta).
  double at_cosine(double cos_beta) const;

  std::size_t ions() const noexcept { return ions_; }

 private:
  struct Pair {
    double separation;  // l (v_a - v_b)
    double phase;       // phi_a - phi_b
    double variance;    // sigma^2_ab
  };

  std::size_t ions_;
  double k_;
  double cos_alpha_;
  double scalar_keff_;
  bool thermal_;
  ThermalKeff keff_;
  std::vector<Pair> pairs_;
};

/// I(beta) = sum_{a,b} D_ab cos(k Delta_ab + phi_a - phi_b), with
/// D_ab = exp(-k_eff^2 sigma_ab^2 / 2) when thermal variances are present.
double intensity(const ScatterScenario& s, double beta);

struct AngularPattern {
  std::vector<double> beta;       // rad
  std::vector<double> intensity;  // one ion gives 1
};

/// Evaluates the intensity on a strictly increasing grid inside [0, pi].
AngularPattern pattern(const ScatterScenario& s, std::span<const double> beta_grid);

}  // namespace coherent
