#pragma once

#include <span>
#include <vector>

#include "coherent/linalg.hpp"
#include "coherent/physical.hpp"

namespace coherent {

/// Ion string in a single harmonic axial well: physical positions are
/// z_i = length_scale * positions[i].
struct CrystalGeometry {
  double length_scale = 0.0;    // m
  std::vector<double> positions;  // dimensionless, ascending

  std::size_t size() const noexcept { return positions.size(); }
  double z(std::size_t i) const { return length_scale * positions[i]; }
  /// v_n - v_1
  double span() const {
    return positions.empty() ? 0.0 : positions.back() - positions.front();
  }

  /// Positive scale, at least one ion, strictly ascending positions. Force
  /// balance is not required: equidistant strings reuse this type.
  void validate() const;
};

/// Ascending dimensionless equilibrium positions of n ions (1 <= n <= 50),
/// i.e. the solution of
///   v_i = sum_{j<i} (v_i - v_j)^-2 - sum_{j>i} (v_j - v_i)^-2.
/// Damped Newton iteration from uniform spacing; converges to a residual
/// max-norm below 1e-12 or throws SolverFailure after 200 iterations.
std::vector<double> equilibrium_positions(int n);

/// Force-balance residual r_i = v_i - sum_{j<i}(...)^-2 + sum_{j>i}(...)^-2,
/// the gradient of the dimensionless potential sum v^2/2 + sum 1/|v_a - v_b|.
std::vector<double> force_residual(std::span<const double> v);

/// Dimensionless axial Hessian:
///   A_ii = 1 + 2 sum_{m != i} |v_i - v_m|^-3,  A_ij = -2 |v_i - v_j|^-3.
Matrix axial_hessian(std::span<const double> v);

/// l = (q^2 / (4 pi eps0 m omega_z^2))^(1/3)
double length_scale(double axial_freq, const IonSpecies& sp);

/// Inverse of length_scale: the axial frequency that produces scale l.
double axial_frequency_for_length_scale(double l, const IonSpecies& sp);

inline constexpr double kStabilityPrefactor = 2.94;
inline constexpr double kStabilityExponent = -1.8;

/// Largest (omega_z / omega_r)^2 that keeps n ions on the axis.
double critical_anisotropy(int n);

/// omega_z^min = (lambda/4)^-2 hbar / (2 m)
double minimum_axial_frequency(const IonSpecies& sp);

struct LengthScaleBounds {
  double l_min = 0.0;           // m, at axial_freq_max
  double l_max = 0.0;           // m, at axial_freq_min
  double axial_freq_max = 0.0;  // rad/s
  double axial_freq_min = 0.0;  // rad/s
};

/// Feasible length-scale interval for n >= 2 ions at radial frequency
/// omega_r. Throws EmptyRange when omega_z^min >= omega_z^max.
LengthScaleBounds length_scale_bounds(int n, double radial_freq,
                                      const IonSpecies& sp);

struct AxialModeSet {
  std::vector<double> eigenvalues;  // mu_p, ascending
  Matrix eigenvectors;              // column p is b^(p)
  std::vector<double> frequencies;  // rad/s, sqrt(mu_p) * omega_z
};

AxialModeSet axial_modes(std::span<const double> positions, double axial_freq);
inline AxialModeSet axial_modes(const CrystalGeometry& geom, double axial_freq) {
  return axial_modes(geom.positions, axial_freq);
}

/// Thermal variance of every pairwise separation z_a - z_b (m^2), summing
/// all axial modes with Bose-Einstein occupation at temperature T:
///   sigma^2_ab = sum_p (b_a - b_b)^2 hbar/(2 m w_p) (2 nbar_p + 1).
Matrix pair_distance_variance(const AxialModeSet& modes, const IonSpecies& sp,
                              double temperature);

}  // namespace coherent
