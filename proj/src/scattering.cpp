#include "coherent/scattering.hpp"

#include <cmath>

#include <fmt/format.h>

#include "coherent/errors.hpp"

namespace coherent {

std::string_view to_string(ThermalKeff keff) {
  return keff == ThermalKeff::axial ? "axial" : "scalar";
}

ThermalKeff thermal_keff_from_string(std::string_view text) {
  if (text == "axial") return ThermalKeff::axial;
  if (text == "scalar") return ThermalKeff::scalar;
  throw InvalidArgument(fmt::format("unknown thermal_keff '{}'", text));
}

void ScatterScenario::validate() const {
  geometry.validate();
  if (!(wavenumber > 0.0)) throw InvalidArgument("wavenumber must be positive");
  if (!(excitation_angle > 0.0 && excitation_angle <= constants::pi / 2.0 + 1e-15))
    throw InvalidArgument("excitation angle must lie in (0, pi/2]");
  const std::size_t n = geometry.size();
  if (phases) {
    if (phases->size() != n)
      throw InvalidArgument(fmt::format("expected {} phases, got {}", n, phases->size()));
    for (double phi : *phases)
      if (!std::isfinite(phi)) throw InvalidArgument("phase offsets must be finite");
  }
  if (pair_variance) {
    if (pair_variance->rows() != n || pair_variance->cols() != n)
      throw InvalidArgument("pair variance matrix must be n x n");
  }
}

double path_difference(const CrystalGeometry& geom, double alpha, double beta,
                       std::size_t a, std::size_t b) {
  if (a >= geom.size() || b >= geom.size())
    throw InvalidArgument("ion index out of range");
  return geom.length_scale * (geom.positions[a] - geom.positions[b]) *
         (std::cos(alpha) - std::cos(beta));
}

double thermal_wavenumber(const ScatterScenario& s, double beta) {
  if (s.keff == ThermalKeff::scalar)
    return 2.0 * s.wavenumber * std::sin(0.5 * s.excitation_angle);
  return s.wavenumber * (std::cos(beta) - std::cos(s.excitation_angle));
}

IntensityEvaluator::IntensityEvaluator(const ScatterScenario& s)
    : ions_(s.geometry.size()),
      k_(s.wavenumber),
      cos_alpha_(std::cos(s.excitation_angle)),
      scalar_keff_(2.0 * s.wavenumber * std::sin(0.5 * s.excitation_angle)),
      thermal_(s.pair_variance.has_value()),
      keff_(s.keff) {
  s.validate();
  pairs_.reserve(ions_ * (ions_ - 1) / 2);
  for (std::size_t a = 0; a < ions_; ++a)
    for (std::size_t b = a + 1; b < ions_; ++b) {
      Pair p;
      p.separation = s.geometry.length_scale *
                     (s.geometry.positions[a] - s.geometry.positions[b]);
      p.phase = s.phases ? (*s.phases)[a] - (*s.phases)[b] : 0.0;
      p.variance = thermal_ ? (*s.pair_variance)(a, b) : 0.0;
      pairs_.push_back(p);
    }
}

double IntensityEvaluator::at_cosine(double cos_beta) const {
  // Diagonal terms contribute n; each unordered pair appears twice.
  const double geometric = cos_alpha_ - cos_beta;
  double keff2 = 0.0;
  if (thermal_) {
    const double keff = keff_ == ThermalKeff::scalar ? scalar_keff_
                                                     : k_ * (cos_beta - cos_alpha_);
    keff2 = keff * keff;
  }
  double off = 0.0;
  for (const Pair& p : pairs_) {
    double term = std::cos(k_ * p.separation * geometric + p.phase);
    if (thermal_) term *= std::exp(-0.5 * keff2 * p.variance);
    off += term;
  }
  return static_cast<double>(ions_) + 2.0 * off;
}

double intensity(const ScatterScenario& s, double beta) {
  return IntensityEvaluator(s)(beta);
}

AngularPattern pattern(const ScatterScenario& s, std::span<const double> beta_grid) {
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    if (beta_grid[i] < 0.0 || beta_grid[i] > constants::pi + 1e-12)
      throw InvalidArgument("observation angles must lie in [0, pi]");
    if (i > 0 && !(beta_grid[i] > beta_grid[i - 1]))
      throw InvalidArgument("observation grid must be strictly increasing");
  }
  const IntensityEvaluator eval(s);
  AngularPattern out;
  out.beta.assign(beta_grid.begin(), beta_grid.end());
  out.intensity.reserve(beta_grid.size());
  for (double beta : beta_grid) out.intensity.push_back(eval(beta));
  return out;
}

}  // namespace coherent
