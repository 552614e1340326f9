// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "coherent/analysis.hpp"
#include "coherent/cli.hpp"
#include "coherent/collection.hpp"
#include "coherent/crystal.hpp"
#include "coherent/optimize.hpp"
#include "coherent/scattering.hpp"

using namespace coherent;

namespace {

constexpr double kPi = constants::pi;
int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  fmt::print("[{}] C{} {}: {}\n", ok ? "PASS" : "FAIL", id, name, detail);
  std::fflush(stdout);
  if (!ok) ++failures;
}

bool within_rel(double x, double target, double tol) { return std::abs(x / target - 1.0) <= tol; }

double best(const ScanSpec& spec, double na) {
  return optimize(spec, CollectionAperture::from_na(na)).best;
}

ScanSpec simulation_spec(int n) {
  ScanSpec s;
  s.ions = n;
  s.radial_freq = angular_from_mhz(5.0);
  return s;
}

// Thermal criteria use the experimental trap and the scalar momentum transfer.
ScanSpec thermal_spec(int n, const IonSpecies& sp) {
  ScanSpec s;
  s.ions = n;
  s.species = sp;
  s.radial_freq = angular_from_mhz(2.2);
  s.keff = ThermalKeff::scalar;
  return s;
}

void length_scale_bounds_criterion() {
  const auto ca = calcium40();
  const double wr = angular_from_mhz(5.0);
  const auto b2 = length_scale_bounds(2, wr, ca);
  const auto b10 = length_scale_bounds(10, wr, ca);
  const bool ok = within_rel(b2.l_min, 1.61e-6, 0.01) && within_rel(b10.l_min, 4.23e-6, 0.01) &&
                  within_rel(b2.l_max, 81.18e-6, 0.01);
  report(1, "length-scale bounds", ok,
         fmt::format("l_min(2)={:.4f} um (1.61), l_min(10)={:.4f} um (4.23), l_max={:.3f} um (81.18), tol 1%",
                     b2.l_min * 1e6, b10.l_min * 1e6, b2.l_max * 1e6));
}

void equidistant_criterion() {
  auto spec = simulation_spec(9);
  const double harm = best(spec, 0.07);
  spec.mode = ScanMode::equidistant_spacing;
  const double eq = best(spec, 0.07);
  const double ratio = eq / harm;
  report(2, "equidistant ratio", within_rel(ratio, 1.48, 0.05),
         fmt::format("P_eq={:.4f} P_harm={:.4f} ratio={:.4f} (1.48 +- 5%)", eq, harm, ratio));
}

void excitation_angle_criterion() {
  auto spec = simulation_spec(9);
  const double p45 = best(spec, 0.07);
  spec.excitation_angle = kPi / 2.0;
  const double p90 = best(spec, 0.07);
  const double ratio = p90 / p45;
  report(3, "excitation-angle ratio", within_rel(ratio, 1.26, 0.05),
         fmt::format("P(90)={:.4f} P(45)={:.4f} ratio={:.4f} (1.26 +- 5%)", p90, p45, ratio));
}

void small_aperture_criterion() {
  bool ok = true;
  double worst = 1e9;
  std::string where;
  for (int n = 1; n <= 5; ++n) {
    for (double na : {0.01, 0.03, 0.05}) {
      auto spec = simulation_spec(n);
      if (n == 1) spec.length_range = std::pair{2e-6, 10e-6};
      const double ratio = best(spec, na) / (0.9 * n);
      if (ratio < worst) {
        worst = ratio;
        where = fmt::format("n={} NA={}", n, na);
      }
      ok = ok && ratio >= 1.0;
    }
  }
  report(4, "near-linear small-NA scaling", ok,
         fmt::format("min P_rel/(0.9 n)={:.4f} at {} (>= 1)", worst, where));
}

void thermal_reduction_criterion() {
  const auto ca = calcium40();
  double sum = 0.0;
  std::string per_n;
  for (int n = 2; n <= 6; ++n) {
    auto spec = thermal_spec(n, ca);
    const double cold = best(spec, 0.07);
    spec.thermal = true;
    const double warm = best(spec, 0.07);
    const double red = 1.0 - warm / cold;
    sum += red;
    per_n += fmt::format(" {}:{:.1f}%", n, 100.0 * red);
  }
  const double avg = 100.0 * sum / 5.0;
  report(5, "thermal reduction", std::abs(avg - 25.0) <= 10.0,
         fmt::format("avg={:.1f}% (25 +- 10 pp);{} [Gamma=2pi x 21.6 MHz, T_D={:.4f} mK, "
                     "omega_r=2pi x 2.2 MHz, k_eff=scalar]",
                     avg, per_n, 1e3 * doppler_temperature(ca)));
}

void species_criterion() {
  const auto ca = calcium40();
  const auto ba = barium138();
  const auto cmp = species_comparison(thermal_spec(5, ca), ca, ba, CollectionAperture::from_na(0.07));
  const bool ok = within_rel(cmp.ratio, 1.45, 0.10) && within_rel(cmp.second.best, 3.93, 0.10);
  report(6, "species prediction", ok,
         fmt::format("P(Ba)={:.4f} (3.93 +- 10%), P(Ca)={:.4f}, ratio={:.4f} (1.45 +- 10%) "
                     "[Gamma_Ba=2pi x 20.1 MHz, omega_r=2pi x 2.2 MHz, k_eff=scalar]",
                     cmp.second.best, cmp.first.best, cmp.ratio));
}

void normalization_criterion() {
  CountRecord two{2, 0.0, 767.0, 270.0, 24.0, 0.0};
  CountRecord nine{9, 0.0, 6777.0, 270.0, 24.0, 0.0};
  const double p2 = normalize_counts(two);
  const double p9 = normalize_counts(nine);
  const bool ok = std::abs(p2 - 1.51) <= 0.005 && std::abs(p9 - 3.05) <= 0.005;
  report(7, "experimental normalization", ok,
         fmt::format("P(2)={:.4f} (1.51), P(9)={:.4f} (3.05), tol 0.005", p2, p9));
}

void absolute_efficiency_criterion() {
  const double pct = 100.0 * absolute_efficiency(3.05, 1.7e-4);
  report(8, "absolute efficiency", std::abs(pct - 0.051) <= 0.001,
         fmt::format("P_abs={:.5f}% (0.051 +- 0.001%)", pct));
}

void property_criterion() {
  std::vector<std::string> bad;

  double worst_residual = 0.0;
  for (int n = 1; n <= 50; ++n)
    for (double r : force_residual(equilibrium_positions(n)))
      worst_residual = std::max(worst_residual, std::abs(r));
  if (!(worst_residual < 1e-10)) bad.push_back("force residual");

  double worst_mode = 0.0;
  for (int n = 2; n <= 10; ++n) {
    const auto m = axial_modes(equilibrium_positions(n), 1.0);
    worst_mode = std::max({worst_mode, std::abs(m.eigenvalues[0] - 1.0), std::abs(m.eigenvalues[1] - 3.0)});
  }
  if (!(worst_mode < 1e-9)) bad.push_back("mode eigenvalues");

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double k = calcium40().wavenumber();
  double worst_oracle = 0.0, worst_gauge = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    ScatterScenario s;
    s.geometry = {(1.0 + 20.0 * u(rng)) * 1e-6, equilibrium_positions(n)};
    s.wavenumber = k;
    s.excitation_angle = 0.1 + 1.4 * u(rng);
    std::vector<double> ph(n, 0.0);
    for (int j = 1; j < n; ++j) ph[j] = 2.0 * kPi * u(rng);
    s.phases = ph;
    const double beta = kPi * u(rng);
    std::complex<double> sum{};
    for (int j = 0; j < n; ++j)
      sum += std::polar(1.0, k * s.geometry.z(j) * (std::cos(s.excitation_angle) - std::cos(beta)) + ph[j]);
    worst_oracle = std::max(worst_oracle, std::abs(intensity(s, beta) - std::norm(sum)));
    auto shifted = s;
    for (double& p : ph) p += 2.5;
    shifted.phases = ph;
    worst_gauge = std::max(worst_gauge, std::abs(intensity(s, beta) - intensity(shifted, beta)));
  }
  if (!(worst_oracle < 1e-10)) bad.push_back("complex oracle");
  if (!(worst_gauge < 1e-12)) bad.push_back("gauge invariance");

  double worst_flux = 0.0;
  for (int n : {2, 5, 9}) {
    ScatterScenario s;
    s.geometry = {4.5e-6, equilibrium_positions(n)};
    s.wavenumber = k;
    s.excitation_angle = kPi / 4.0;
    const auto ap = CollectionAperture::from_na(0.07);
    const IntensityEvaluator eval(s);
    const int nt = 4000, np = 8;
    const double ht = ap.half_angle / nt, hp = 2.0 * kPi / np;
    double cap = 0.0;
    for (int i = 0; i < nt; ++i) {
      const double t = (i + 0.5) * ht;
      for (int j = 0; j < np; ++j) cap += eval(t) * std::sin(t) * ht * hp;
    }
    worst_flux = std::max(worst_flux, std::abs(flux(s, ap) / cap - 1.0));
  }
  if (!(worst_flux < 1e-6)) bad.push_back("flux 2-D oracle");

  RunConfig cfg;
  cfg.ions = 4;
  cfg.numerical_aperture = 0.2;
  cfg.mode = ScanMode::phases_at_lmin;
  cfg.seed = 17;
  const bool deterministic = run_subcommand("optimize-phases", cfg) == run_subcommand("optimize-phases", cfg);
  if (!deterministic) bad.push_back("determinism");

  std::string failed;
  for (const auto& b : bad) failed += " " + b;
  report(9, "property suites", bad.empty(),
         fmt::format("residual={:.1e} (<1e-10), mode dev={:.1e} (<1e-9), oracle={:.1e} (<1e-10), "
                     "gauge={:.1e} (<1e-12), flux 2-D={:.1e} (<1e-6), determinism={}{}",
                     worst_residual, worst_mode, worst_oracle, worst_gauge, worst_flux,
                     deterministic ? "ok" : "differs", failed.empty() ? "" : "; failed:" + failed));
}

}  // namespace

int main() {
  length_scale_bounds_criterion();
  equidistant_criterion();
  excitation_angle_criterion();
  small_aperture_criterion();
  thermal_reduction_criterion();
  species_criterion();
  normalization_criterion();
  absolute_efficiency_criterion();
  property_criterion();
  fmt::print("{} of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
