#include "coherent/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include <fmt/format.h>

#include "coherent/errors.hpp"
#include "coherent/numerics.hpp"

namespace coherent {

std::string_view to_string(ScanMode mode) {
  switch (mode) {
    case ScanMode::harmonic_length: return "harmonic-l";
    case ScanMode::equidistant_spacing: return "equidistant-d";
    case ScanMode::phases_at_lmin: return "phases-at-lmin";
  }
  return "?";
}

ScanMode scan_mode_from_string(std::string_view text) {
  if (text == "harmonic-l") return ScanMode::harmonic_length;
  if (text == "equidistant-d") return ScanMode::equidistant_spacing;
  if (text == "phases-at-lmin") return ScanMode::phases_at_lmin;
  throw InvalidArgument(fmt::format("unknown scan mode '{}'", text));
}

void ScanSpec::validate() const {
  if (ions < 1 || ions > 50) throw InvalidArgument("ion count must be in [1, 50]");
  species.validate();
  if (!(excitation_angle > 0.0 && excitation_angle <= constants::pi / 2.0 + 1e-15))
    throw InvalidArgument("excitation angle must lie in (0, pi/2]");
  if (!(radial_freq > 0.0)) throw InvalidArgument("radial frequency must be positive");
  if (length_range) {
    const auto [lo, hi] = *length_range;
    if (!(lo > 0.0 && lo < hi))
      throw InvalidArgument("length range must satisfy 0 < l_lo < l_hi");
  }
  if (samples < 2) throw InvalidArgument("scan needs at least 2 samples");
  if (temperature && !(*temperature >= 0.0))
    throw InvalidArgument("temperature must be non-negative");
  if (phase_starts < 0) throw InvalidArgument("phase_starts must be non-negative");
  if (mode == ScanMode::equidistant_spacing && ions < 2)
    throw InvalidArgument("equidistant scan needs at least 2 ions");
  if (mode == ScanMode::equidistant_spacing && thermal)
    throw InvalidArgument("thermal dephasing is only modelled for harmonic crystals");
  if (mode == ScanMode::phases_at_lmin && ions < 2)
    throw InvalidArgument("phase optimization needs at least 2 ions");
}

std::pair<double, double> ScanSpec::resolved_length_range() const {
  if (length_range) return *length_range;
  if (ions < 2)
    throw InvalidArgument("a single ion has no stability bound; give an explicit length range");
  const auto b = length_scale_bounds(ions, radial_freq, species);
  return {b.l_min, b.l_max};
}

double ScanSpec::resolved_temperature() const {
  return temperature ? *temperature : doppler_temperature(species);
}

namespace {

// A string of n ions at dimensionless positions scaled by one length
// parameter, with the thermal state of the harmonic crystal when requested.
class StringModel {
 public:
  StringModel(const ScanSpec& spec, std::vector<double> positions, bool harmonic)
      : spec_(spec), positions_(std::move(positions)) {
    if (harmonic && spec.thermal) {
      modes_ = axial_modes(positions_, 1.0);
      temperature_ = spec.resolved_temperature();
    }
  }

  ScatterScenario scenario(double scale,
                           const std::optional<std::vector<double>>& phases) const {
    ScatterScenario s;
    s.geometry = {scale, positions_};
    s.wavenumber = spec_.species.wavenumber();
    s.excitation_angle = spec_.excitation_angle;
    s.phases = phases;
    s.keff = spec_.keff;
    if (modes_) {
      const double wz = axial_frequency_for_length_scale(scale, spec_.species);
      AxialModeSet m = *modes_;
      for (std::size_t p = 0; p < m.frequencies.size(); ++p)
        m.frequencies[p] = std::sqrt(m.eigenvalues[p]) * wz;
      s.pair_variance = pair_distance_variance(m, spec_.species, temperature_);
    }
    return s;
  }

  double enhancement(const CollectionAperture& ap, double scale,
                     const std::optional<std::vector<double>>& phases = {}) const {
    return relative_enhancement(scenario(scale, phases), ap).relative_enhancement;
  }

  std::span<const double> positions() const { return positions_; }
  double span() const { return positions_.back() - positions_.front(); }

 private:
  const ScanSpec& spec_;
  std::vector<double> positions_;
  std::optional<AxialModeSet> modes_;
  double temperature_ = 0.0;
};

constexpr double kTieTolerance = 1e-9;
constexpr double kRefineTolerance = 1e-6;
constexpr std::size_t kRefinedCandidates = 5;

bool better(double value, double param, double best_value, double best_param) {
  if (value > best_value + kTieTolerance) return true;
  return std::abs(value - best_value) <= kTieTolerance && param < best_param;
}

int coarse_samples(const ScanSpec& spec, const CollectionAperture& ap,
                   double span, double lo, double hi) {
  // On-axis and aperture-edge phase rates bound how fast P_rel oscillates.
  const double ca = std::cos(spec.excitation_angle);
  const double rate = std::max(std::abs(ca - 1.0), std::abs(ca - std::cos(ap.half_angle)));
  const double fringes = spec.species.wavenumber() * span * rate * (hi - lo) /
                         (2.0 * constants::pi);
  const double needed = std::ceil(10.0 * fringes) + 1.0;
  return static_cast<int>(std::max<double>(spec.samples, std::min(needed, 1e7)));
}

OptimumRecord scan_and_refine(const std::function<double(double)>& f, double lo,
                              double hi, int samples) {
  OptimumRecord rec;
  rec.range_lo = lo;
  rec.range_hi = hi;
  rec.trace.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double p = (i + 1 == samples) ? hi : lo + (hi - lo) * i / (samples - 1);
    rec.trace.push_back({p, f(p)});
  }

  const auto& t = rec.trace;
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const bool left_ok = i == 0 || t[i].value >= t[i - 1].value;
    const bool right_ok = i + 1 == t.size() || t[i].value >= t[i + 1].value;
    if (left_ok && right_ok) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
    return t[a].value > t[b].value;
  });
  if (peaks.size() > kRefinedCandidates) peaks.resize(kRefinedCandidates);

  double best_param = t[peaks.front()].parameter;
  double best_value = t[peaks.front()].value;
  for (std::size_t idx : peaks) {
    if (better(t[idx].value, t[idx].parameter, best_value, best_param)) {
      best_value = t[idx].value;
      best_param = t[idx].parameter;
    }
    const double a = t[idx == 0 ? 0 : idx - 1].parameter;
    const double b = t[std::min(idx + 1, t.size() - 1)].parameter;
    const auto refined = golden_section_maximize(f, a, b, kRefineTolerance);
    if (better(refined.value, refined.argument, best_value, best_param)) {
      best_value = refined.value;
      best_param = refined.argument;
    }
  }
  rec.best = best_value;
  rec.argmax = best_param;
  return rec;
}

double wrap_phase(double x) {
  const double two_pi = 2.0 * constants::pi;
  double w = x - two_pi * std::floor(x / two_pi);
  if (w >= two_pi) w -= two_pi;
  return w;
}

}  // namespace

double harmonic_enhancement(const ScanSpec& spec, const CollectionAperture& ap,
                            double l, const std::optional<std::vector<double>>& phases) {
  spec.validate();
  const StringModel model(spec, equilibrium_positions(spec.ions), true);
  return model.enhancement(ap, l, phases);
}

OptimumRecord optimize_length_scale(const ScanSpec& spec, const CollectionAperture& ap) {
  spec.validate();
  const auto [lo, hi] = spec.resolved_length_range();
  const StringModel model(spec, equilibrium_positions(spec.ions), true);
  const int samples = coarse_samples(spec, ap, model.span(), lo, hi);
  return scan_and_refine([&](double l) { return model.enhancement(ap, l); }, lo, hi,
                         samples);
}

OptimumRecord optimize_equidistant(const ScanSpec& spec, const CollectionAperture& ap) {
  spec.validate();
  const auto [l_lo, l_hi] = spec.resolved_length_range();
  const auto harmonic = equilibrium_positions(spec.ions);
  const double steps = static_cast<double>(spec.ions - 1);
  const double mean_gap = (harmonic.back() - harmonic.front()) / steps;

  std::vector<double> regular(static_cast<std::size_t>(spec.ions));
  for (std::size_t j = 0; j < regular.size(); ++j)
    regular[j] = static_cast<double>(j) - 0.5 * steps;

  const StringModel model(spec, std::move(regular), false);
  const double lo = l_lo * mean_gap;
  const double hi = l_hi * mean_gap;
  const int samples = coarse_samples(spec, ap, model.span(), lo, hi);
  return scan_and_refine([&](double d) { return model.enhancement(ap, d); }, lo, hi,
                         samples);
}

OptimumRecord optimize_phases(const ScanSpec& spec, const CollectionAperture& ap) {
  spec.validate();
  const auto [l_lo, l_hi] = spec.resolved_length_range();
  const StringModel model(spec, equilibrium_positions(spec.ions), true);
  const double l = l_lo;
  const std::size_t free = static_cast<std::size_t>(spec.ions - 1);

  auto to_phases = [&](std::span<const double> x) {
    std::vector<double> ph(free + 1, 0.0);
    for (std::size_t j = 0; j < free; ++j) ph[j + 1] = wrap_phase(x[j]);
    return ph;
  };
  auto value = [&](std::span<const double> x) {
    return model.enhancement(ap, l, to_phases(x));
  };

  OptimumRecord rec;
  rec.range_lo = l_lo;
  rec.range_hi = l_hi;
  rec.argmax = l;

  std::vector<double> best_x(free, 0.0);
  double best_value = value(best_x);
  rec.trace.push_back({-1.0, best_value});

  // Aligned start: every pair in phase on the detector axis.
  std::vector<std::vector<double>> starts;
  {
    const double k = spec.species.wavenumber();
    const double geometric = std::cos(spec.excitation_angle) - 1.0;
    const auto v = model.positions();
    std::vector<double> aligned(free);
    for (std::size_t j = 0; j < free; ++j)
      aligned[j] = wrap_phase(-k * l * (v[j + 1] - v[0]) * geometric);
    starts.push_back(std::move(aligned));
  }
  for (auto& p : low_discrepancy_points(free, static_cast<std::size_t>(spec.phase_starts),
                                        spec.seed)) {
    for (double& x : p) x *= 2.0 * constants::pi;
    starts.push_back(std::move(p));
  }

  NelderMeadOptions nm;
  nm.initial_step = 0.5;
  nm.max_evaluations = 600 * static_cast<int>(free + 1);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto result = nelder_mead_minimize(
        [&](std::span<const double> x) { return -value(x); }, starts[i], nm);
    const double v = -result.value;
    rec.trace.push_back({static_cast<double>(i), v});
    if (v > best_value + kTieTolerance) {
      best_value = v;
      best_x = result.argument;
    }
  }

  rec.best = best_value;
  rec.phases = to_phases(best_x);
  return rec;
}

OptimumRecord optimize(const ScanSpec& spec, const CollectionAperture& ap) {
  switch (spec.mode) {
    case ScanMode::harmonic_length: return optimize_length_scale(spec, ap);
    case ScanMode::equidistant_spacing: return optimize_equidistant(spec, ap);
    case ScanMode::phases_at_lmin: return optimize_phases(spec, ap);
  }
  throw InvalidArgument("unknown scan mode");
}

std::vector<SweepCell> sweep(const ScanSpec& base, std::span<const int> ions,
                             std::span<const double> numerical_apertures,
                             unsigned threads) {
  std::vector<SweepCell> cells;
  cells.reserve(ions.size() * numerical_apertures.size());
  for (int n : ions)
    for (double na : numerical_apertures) cells.push_back({n, na, std::nullopt, {}});

  auto run_cell = [&](SweepCell& cell) {
    try {
      ScanSpec spec = base;
      spec.ions = cell.ions;
      cell.record = optimize(spec, CollectionAperture::from_na(cell.numerical_aperture));
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells.size()));
  if (threads <= 1) {
    for (auto& c : cells) run_cell(c);
    return cells;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(cells[i]);
    });
  }
  workers.clear();
  return cells;
}

}  // namespace coherent
