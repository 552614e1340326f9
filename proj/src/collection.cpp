#include "coherent/collection.hpp"

#include <algorithm>
#include <cmath>

#include "coherent/errors.hpp"

namespace coherent {

CollectionAperture CollectionAperture::from_na(double na) {
  if (!(na > 0.0 && na < 1.0))
    throw InvalidArgument("numerical aperture must lie in (0, 1)");
  return {na, std::asin(na)};
}

CollectionAperture CollectionAperture::from_half_angle(double theta) {
  if (!(theta > 0.0 && theta < constants::pi / 2.0))
    throw InvalidArgument("aperture half-angle must lie in (0, pi/2)");
  return {std::sin(theta), theta};
}

double single_ion_flux(const CollectionAperture& ap) {
  // 1 - cos(theta) = 2 sin^2(theta/2) keeps precision for tiny apertures.
  const double s = std::sin(0.5 * ap.half_angle);
  return 4.0 * constants::pi * s * s;
}

int flux_panels(const ScatterScenario& s, const CollectionAperture& ap) {
  const double s_half = std::sin(0.5 * ap.half_angle);
  const double cos_excursion = 2.0 * s_half * s_half;  // 1 - cos(theta)
  const double phase = s.wavenumber * s.geometry.length_scale *
                       s.geometry.span() * cos_excursion;
  const double fringes = std::ceil(phase / constants::pi);
  return static_cast<int>(std::max(64.0, 8.0 * fringes));
}

double flux(const ScatterScenario& s, const CollectionAperture& ap,
            const QuadratureOptions& options) {
  if (!(ap.half_angle > 0.0)) throw InvalidArgument("aperture must be open");
  const IntensityEvaluator eval(s);
  const double s_half = std::sin(0.5 * ap.half_angle);
  const double lower = 1.0 - 2.0 * s_half * s_half;
  const auto result = adaptive_simpson(
      [&](double c) { return eval.at_cosine(c); }, lower, 1.0,
      flux_panels(s, ap), options);
  return 2.0 * constants::pi * result.value;
}

EnhancementResult relative_enhancement(const ScatterScenario& s,
                                       const CollectionAperture& ap,
                                       const QuadratureOptions& options) {
  EnhancementResult r;
  r.flux = flux(s, ap, options);
  const auto n = static_cast<double>(s.geometry.size());
  r.collection_efficiency = r.flux / (4.0 * constants::pi * n);
  r.relative_enhancement = r.flux / (single_ion_flux(ap) * n);
  r.ions = s.geometry.size();
  r.length_scale = s.geometry.length_scale;
  r.excitation_angle = s.excitation_angle;
  r.numerical_aperture = ap.numerical_aperture;
  r.phased = s.phases.has_value();
  r.thermal = s.pair_variance.has_value();
  return r;
}

}  // namespace coherent
