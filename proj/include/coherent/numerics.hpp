#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace coherent {

struct QuadratureOptions {
  double relative_tolerance = 1e-8;
  double absolute_floor = 1e-12;
  int max_depth = 48;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

/// Adaptive Simpson integration of f over [a, b], started from `panels`
/// equal panels. The global tolerance is max(absolute_floor,
/// relative_tolerance * |I|) and is split across panels in proportion to
/// their width. Throws IntegrationError (carrying the achieved estimate) if
/// any panel needs more than `max_depth` bisections.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, int panels,
                                  const QuadratureOptions& options = {});

struct ScalarOptimum {
  double argument = 0.0;
  double value = 0.0;
};

/// Golden-section search for a maximum of f on [a, b]. Stops when the
/// bracket width falls below relative_tolerance * max(|x|, tiny).
ScalarOptimum golden_section_maximize(const std::function<double(double)>& f,
                                      double a, double b,
                                      double relative_tolerance = 1e-6);

struct NelderMeadOptions {
  double initial_step = 0.5;
  double value_tolerance = 1e-12;
  double simplex_tolerance = 1e-9;
  int max_evaluations = 4000;
};

struct VectorOptimum {
  std::vector<double> argument;
  double value = 0.0;
  int evaluations = 0;
};

/// Nelder-Mead downhill simplex minimization (standard coefficients:
/// reflection 1, expansion 2, contraction 1/2, shrink 1/2).
VectorOptimum nelder_mead_minimize(
    const std::function<double(std::span<const double>)>& f,
    std::vector<double> start, const NelderMeadOptions& options = {});

/// Points of the additive-recurrence (generalized golden ratio) sequence in
/// the unit hypercube of dimension `dim`, Cranley-Patterson rotated by a
/// shift drawn from a 64-bit Mersenne Twister seeded with `seed`.
std::vector<std::vector<double>> low_discrepancy_points(std::size_t dim,
                                                        std::size_t count,
                                                        std::uint64_t seed);

}  // namespace coherent
