#include "coherent/crystal.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "coherent/errors.hpp"

namespace coherent {

namespace {

constexpr int kMaxIons = 50;
constexpr int kNewtonCap = 200;
constexpr double kResidualTolerance = 1e-12;

double max_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

bool strictly_increasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

double dimensionless_energy(std::span<const double> v) {
  double e = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a) {
    e += 0.5 * v[a] * v[a];
    for (std::size_t b = a + 1; b < v.size(); ++b) e += 1.0 / std::abs(v[b] - v[a]);
  }
  return e;
}

// Solves A x = rhs for symmetric positive-definite A (Cholesky).
std::vector<double> solve_spd(Matrix a, std::vector<double> rhs) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0)) throw SolverFailure("Hessian is not positive definite", d);
    a(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / a(j, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * rhs[k];
    rhs[i] = s / a(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a(k, i) * rhs[k];
    rhs[i] = s / a(i, i);
  }
  return rhs;
}

}  // namespace

std::vector<double> force_residual(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = v[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double d = v[i] - v[j];
      s -= 1.0 / (d * d);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = v[j] - v[i];
      s += 1.0 / (d * d);
    }
    r[i] = s;
  }
  return r;
}

Matrix axial_hessian(std::span<const double> v) {
  const std::size_t n = v.size();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 1.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (m == i) continue;
      const double d = std::abs(v[i] - v[m]);
      const double c = 2.0 / (d * d * d);
      diag += c;
      a(i, m) = -c;
    }
    a(i, i) = diag;
  }
  return a;
}

std::vector<double> equilibrium_positions(int n) {
  if (n < 1 || n > kMaxIons) {
    throw InvalidArgument(
        fmt::format("ion count must be in [1, {}], got {}", kMaxIons, n));
  }
  const auto count = static_cast<std::size_t>(n);
  std::vector<double> v(count, 0.0);
  if (n == 1) return v;

  const double spacing = 2.0 * std::pow(static_cast<double>(n), -0.559);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = spacing * (static_cast<double>(i) - 0.5 * (n - 1));

  auto residual = force_residual(v);
  double res = max_norm(residual);
  double energy = dimensionless_energy(v);

  int iter = 0;
  while (res >= kResidualTolerance) {
    if (iter++ >= kNewtonCap) {
      throw SolverFailure(
          fmt::format("equilibrium solver did not converge for n = {} "
                      "(residual {})",
                      n, res),
          res);
    }
    std::vector<double> rhs(count);
    for (std::size_t i = 0; i < count; ++i) rhs[i] = -residual[i];
    const auto step = solve_spd(axial_hessian(v), rhs);

    double t = 1.0;
    std::vector<double> trial(count);
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      for (std::size_t i = 0; i < count; ++i) trial[i] = v[i] + t * step[i];
      if (!strictly_increasing(trial)) continue;
      const double e = dimensionless_energy(trial);
      const auto r = force_residual(trial);
      const double rn = max_norm(r);
      if (e <= energy || rn < res) {
        v = trial;
        residual = r;
        res = rn;
        energy = e;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw SolverFailure(
          fmt::format("equilibrium line search stalled for n = {}", n), res);
    }
  }

  // Enforce exact mirror symmetry (the solution is unique and symmetric).
  std::vector<double> sym(count);
  for (std::size_t i = 0; i < count; ++i) sym[i] = 0.5 * (v[i] - v[count - 1 - i]);
  return sym;
}

void CrystalGeometry::validate() const {
  if (!(length_scale > 0.0) || !std::isfinite(length_scale))
    throw InvalidArgument("crystal length scale must be positive");
  if (positions.empty()) throw InvalidArgument("crystal has no ions");
  if (!strictly_increasing(positions))
    throw InvalidArgument("crystal positions must be strictly increasing");
}

double length_scale(double axial_freq, const IonSpecies& sp) {
  if (!(axial_freq > 0.0))
    throw InvalidArgument("axial frequency must be positive");
  sp.validate();
  return std::cbrt(sp.charge * sp.charge /
                   (4.0 * constants::pi * constants::vacuum_permittivity *
                    sp.mass * axial_freq * axial_freq));
}

double axial_frequency_for_length_scale(double l, const IonSpecies& sp) {
  if (!(l > 0.0)) throw InvalidArgument("length scale must be positive");
  sp.validate();
  return std::sqrt(sp.charge * sp.charge /
                   (4.0 * constants::pi * constants::vacuum_permittivity *
                    sp.mass * l * l * l));
}

double critical_anisotropy(int n) {
  if (n < 1) throw InvalidArgument("ion count must be positive");
  return kStabilityPrefactor * std::pow(static_cast<double>(n), kStabilityExponent);
}

double minimum_axial_frequency(const IonSpecies& sp) {
  sp.validate();
  const double quarter = sp.wavelength / 4.0;
  return constants::hbar / (2.0 * sp.mass) / (quarter * quarter);
}

LengthScaleBounds length_scale_bounds(int n, double radial_freq,
                                      const IonSpecies& sp) {
  if (n < 2) throw InvalidArgument("length-scale bounds need n >= 2");
  if (!(radial_freq > 0.0))
    throw InvalidArgument("radial frequency must be positive");

  LengthScaleBounds b;
  b.axial_freq_max = radial_freq * std::sqrt(critical_anisotropy(n));
  b.axial_freq_min = minimum_axial_frequency(sp);
  if (b.axial_freq_min >= b.axial_freq_max) {
    throw EmptyRange(fmt::format(
        "no feasible length scale for n = {}: omega_z^min = 2pi x {} MHz "
        ">= omega_z^max = 2pi x {} MHz",
        n, mhz_from_angular(b.axial_freq_min),
        mhz_from_angular(b.axial_freq_max)));
  }
  b.l_min = length_scale(b.axial_freq_max, sp);
  b.l_max = length_scale(b.axial_freq_min, sp);
  return b;
}

AxialModeSet axial_modes(std::span<const double> positions, double axial_freq) {
  if (positions.empty()) throw InvalidArgument("crystal has no ions");
  if (!strictly_increasing(positions))
    throw InvalidArgument("crystal positions must be strictly increasing");
  if (!(axial_freq > 0.0))
    throw InvalidArgument("axial frequency must be positive");

  auto eig = jacobi_eigen(axial_hessian(positions), 1e-14);
  AxialModeSet modes;
  modes.frequencies.reserve(eig.values.size());
  for (double mu : eig.values) {
    if (!(mu > 0.0)) throw SolverFailure("non-positive axial eigenvalue", mu);
    modes.frequencies.push_back(std::sqrt(mu) * axial_freq);
  }
  modes.eigenvalues = std::move(eig.values);
  modes.eigenvectors = std::move(eig.vectors);
  return modes;
}

Matrix pair_distance_variance(const AxialModeSet& modes, const IonSpecies& sp,
                              double temperature) {
  if (!(temperature >= 0.0))
    throw InvalidArgument("temperature must be non-negative");
  sp.validate();

  const std::size_t n = modes.eigenvectors.rows();
  std::vector<double> weight(modes.frequencies.size());
  for (std::size_t p = 0; p < weight.size(); ++p) {
    const double w = modes.frequencies[p];
    double occupation = 0.0;
    if (temperature > 0.0)
      occupation = 1.0 / std::expm1(constants::hbar * w /
                                    (constants::boltzmann * temperature));
    weight[p] = constants::hbar / (2.0 * sp.mass * w) * (2.0 * occupation + 1.0);
  }

  Matrix var(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      double s = 0.0;
      for (std::size_t p = 0; p < weight.size(); ++p) {
        const double d = modes.eigenvectors(a, p) - modes.eigenvectors(b, p);
        s += d * d * weight[p];
      }
      var(a, b) = s;
      var(b, a) = s;
    }
  return var;
}

}  // namespace coherent
