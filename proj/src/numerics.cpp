#include "coherent/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "coherent/errors.hpp"

namespace coherent {

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  int max_depth;
  long evaluations = 0;
  bool exhausted = false;
  double error = 0.0;

  double eval(double x) {
    ++evaluations;
    return f(x);
  }

  double refine(double a, double b, double fa, double fm, double fb,
                double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    if (depth >= max_depth) {
      exhausted = true;
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, int panels,
                                  const QuadratureOptions& options) {
  if (!(b > a)) throw InvalidArgument("integration interval must have b > a");
  panels = std::max(panels, 1);

  SimpsonState state{f, options.max_depth};
  const double h = (b - a) / panels;

  std::vector<double> nodes(2 * panels + 1);
  for (int i = 0; i <= 2 * panels; ++i) {
    const double x = (i == 2 * panels) ? b : a + 0.5 * h * i;
    nodes[i] = state.eval(x);
  }
  std::vector<double> coarse(panels);
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    coarse[p] = h / 6.0 *
                (nodes[2 * p] + 4.0 * nodes[2 * p + 1] + nodes[2 * p + 2]);
    total += coarse[p];
  }

  const double tol = std::max(options.absolute_floor,
                              options.relative_tolerance * std::abs(total));
  const double panel_tol = tol / panels;

  double value = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + h * p;
    const double pb = (p + 1 == panels) ? b : a + h * (p + 1);
    value += state.refine(pa, pb, nodes[2 * p], nodes[2 * p + 1],
                          nodes[2 * p + 2], coarse[p], panel_tol, 0);
  }

  if (state.exhausted) {
    throw IntegrationError(
        fmt::format("adaptive Simpson exceeded depth {} (estimate {}, "
                    "error ~{})",
                    options.max_depth, value, state.error),
        value);
  }
  return {value, state.error, state.evaluations};
}

ScalarOptimum golden_section_maximize(const std::function<double(double)>& f,
                                      double a, double b,
                                      double relative_tolerance) {
  if (a > b) std::swap(a, b);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while ((b - a) > relative_tolerance *
                       std::max({std::abs(a), std::abs(b), 1e-300})) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? ScalarOptimum{c, fc} : ScalarOptimum{d, fd};
}

VectorOptimum nelder_mead_minimize(
    const std::function<double(std::span<const double>)>& f,
    std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0) {
    return {start, f(start), 1};
  }

  std::vector<std::vector<double>> simplex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += options.initial_step;

  int evaluations = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    return f(x);
  };

  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);

  while (evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];

    double size = 0.0;
    for (std::size_t i = 0; i <= dim; ++i)
      for (std::size_t k = 0; k < dim; ++k)
        size = std::max(size, std::abs(simplex[i][k] - simplex[best][k]));
    if (std::abs(values[worst] - values[best]) <= options.value_tolerance &&
        size <= options.simplex_tolerance * 1e3) {
      break;
    }
    if (size <= options.simplex_tolerance) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    for (std::size_t k = 0; k < dim; ++k)
      trial[k] = centroid[k] + (centroid[k] - simplex[worst][k]);
    const double f_reflect = eval(trial);

    if (f_reflect < values[best]) {
      for (std::size_t k = 0; k < dim; ++k)
        trial2[k] = centroid[k] + 2.0 * (centroid[k] - simplex[worst][k]);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }

    const bool outside = f_reflect < values[worst];
    for (std::size_t k = 0; k < dim; ++k) {
      trial2[k] = outside ? centroid[k] + 0.5 * (trial[k] - centroid[k])
                          : centroid[k] + 0.5 * (simplex[worst][k] - centroid[k]);
    }
    const double f_contract = eval(trial2);
    if (f_contract < std::min(f_reflect, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }

    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < dim; ++k)
        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best = static_cast<std::size_t>(best_it - values.begin());
  return {simplex[best], values[best], evaluations};
}

std::vector<std::vector<double>> low_discrepancy_points(std::size_t dim,
                                                        std::size_t count,
                                                        std::uint64_t seed) {
  // phi_d is the unique positive root of x^(d+1) = x + 1.
  double phi = 2.0;
  for (int i = 0; i < 64; ++i)
    phi = std::pow(1.0 + phi, 1.0 / static_cast<double>(dim + 1));

  std::vector<double> alpha(dim);
  for (std::size_t j = 0; j < dim; ++j)
    alpha[j] = std::fmod(std::pow(1.0 / phi, static_cast<double>(j + 1)), 1.0);

  std::mt19937_64 rng(seed);
  std::vector<double> shift(dim);
  for (double& s : shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;

  std::vector<std::vector<double>> points(count, std::vector<double>(dim));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const double x = shift[j] + static_cast<double>(i + 1) * alpha[j];
      points[i][j] = x - std::floor(x);
    }
  return points;
}

}  // namespace coherent
