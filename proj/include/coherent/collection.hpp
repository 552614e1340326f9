#pragma once

#include "coherent/numerics.hpp"
#include "coherent/scattering.hpp"

namespace coherent {

/// Collection cone around +z. NA = sin(theta).
struct CollectionAperture {
  double numerical_aperture = 0.0;
  double half_angle = 0.0;  // rad

  static CollectionAperture from_na(double na);
  static CollectionAperture from_half_angle(double theta);
};

/// Solid-angle flux of a single unit emitter, 2 pi (1 - cos theta).
double single_ion_flux(const CollectionAperture& ap);

/// Number of initial quadrature panels for a scenario: enough to put eight
/// panels on every pi of fringe phase accumulated across the aperture.
int flux_panels(const ScatterScenario& s, const CollectionAperture& ap);

/// Phi_NA = 2 pi int_0^theta I(theta') sin(theta') dtheta', evaluated as
/// 2 pi int_{cos theta}^1 I(c) dc by adaptive Simpson.
double flux(const ScatterScenario& s, const CollectionAperture& ap,
            const QuadratureOptions& options = {});

struct EnhancementResult {
  double flux = 0.0;                   // Phi_NA
  double collection_efficiency = 0.0;  // P_D = Phi_NA / (4 pi n)
  double relative_enhancement = 0.0;   // P_D,rel = Phi_NA / (n Phi_NA(1))

  std::size_t ions = 0;
  double length_scale = 0.0;
  double excitation_angle = 0.0;
  double numerical_aperture = 0.0;
  bool phased = false;
  bool thermal = false;
};

EnhancementResult relative_enhancement(const ScatterScenario& s,
                                       const CollectionAperture& ap,
                                       const QuadratureOptions& options = {});

}  // namespace coherent
