#include "coherent/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "coherent/errors.hpp"

namespace coherent {

void CountRecord::validate() const {
  if (ions < 1) throw InvalidArgument("ion count must be positive");
  if (!(counts >= 0.0)) throw InvalidArgument("counts must be non-negative");
  if (!(background_counts >= 0.0))
    throw InvalidArgument("background counts must be non-negative");
  if (!(single_ion_counts > background_counts)) {
    throw DegenerateNormalization(fmt::format(
        "single-ion rate {} does not exceed background {}", single_ion_counts,
        background_counts));
  }
}

double normalize_counts(const CountRecord& rec) {
  rec.validate();
  return (rec.counts - rec.background_counts) /
         ((rec.single_ion_counts - rec.background_counts) * rec.ions);
}

double normalized_counts_error(const CountRecord& rec) {
  rec.validate();
  return rec.counts_error / ((rec.single_ion_counts - rec.background_counts) * rec.ions);
}

CoherentFit fit_coherent_fraction(std::span<const FitPoint> data,
                                  std::span<const double> model_values,
                                  const FitOptions& options) {
  if (model_values.size() != data.size())
    throw InvalidArgument("one model value per data point is required");

  // P_exp - 1 = f (P_cal - 1): regression through the origin.
  CoherentFit fit;
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& p = data[i];
    if (options.window &&
        (p.parameter < options.window->first || p.parameter > options.window->second))
      continue;
    const double weight = options.weighted ? p.weight : 1.0;
    if (!(weight >= 0.0)) throw InvalidArgument("fit weights must be non-negative");
    fit.parameters.push_back(p.parameter);
    x.push_back(model_values[i] - 1.0);
    y.push_back(p.measured - 1.0);
    w.push_back(weight);
  }
  fit.points = x.size();
  if (fit.points < 2)
    throw InvalidArgument(fmt::format("fit needs >= 2 points, got {}", fit.points));

  double wsum = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    wsum += w[i];
    mean += w[i] * x[i];
  }
  if (!(wsum > 0.0)) throw UnidentifiableFit("all fit weights are zero");
  mean /= wsum;
  double variance = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    variance += w[i] * (x[i] - mean) * (x[i] - mean);
    scale = std::max(scale, std::abs(x[i] + 1.0));
  }
  if (!(variance > 1e-24 * wsum * std::max(scale * scale, 1.0)))
    throw UnidentifiableFit("model is constant over the fitted points");

  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += w[i] * x[i] * y[i];
    sxx += w[i] * x[i] * x[i];
  }
  fit.unclamped_fraction = sxy / sxx;
  fit.coherent_fraction = std::clamp(fit.unclamped_fraction, 0.0, 1.0);
  fit.incoherent_fraction = 1.0 - fit.coherent_fraction;

  double rss = 0.0;
  fit.model_values.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = 1.0 + fit.coherent_fraction * x[i];
    fit.model_values.push_back(m);
    const double r = (y[i] + 1.0) - m;
    rss += w[i] * r * r;
  }
  fit.residual_norm = std::sqrt(rss);
  return fit;
}

CoherentFit fit_coherent_fraction(std::span<const FitPoint> data,
                                  const std::function<double(double)>& model,
                                  const FitOptions& options) {
  std::vector<double> values(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const bool inside = !options.window || (data[i].parameter >= options.window->first &&
                                            data[i].parameter <= options.window->second);
    values[i] = inside ? model(data[i].parameter) : 1.0;
  }
  return fit_coherent_fraction(data, values, options);
}

SpeciesComparison species_comparison(const ScanSpec& base, const IonSpecies& first,
                                     const IonSpecies& second,
                                     const CollectionAperture& ap, bool thermal) {
  auto run = [&](const IonSpecies& sp) {
    ScanSpec spec = base;
    spec.species = sp;
    spec.thermal = thermal;
    spec.mode = ScanMode::harmonic_length;
    return optimize_length_scale(spec, ap);
  };
  SpeciesComparison out;
  out.first = run(first);
  out.second = run(second);
  out.ratio = out.second.best / out.first.best;
  return out;
}

double absolute_efficiency(double relative_enhancement, double single_ion_efficiency) {
  if (!(single_ion_efficiency > 0.0))
    throw InvalidArgument("single-ion efficiency must be positive");
  if (!(relative_enhancement >= 0.0))
    throw InvalidArgument("relative enhancement must be non-negative");
  return relative_enhancement * single_ion_efficiency;
}

}  // namespace coherent
