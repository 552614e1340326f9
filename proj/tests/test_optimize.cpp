#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "coherent/errors.hpp"
#include "coherent/optimize.hpp"

using namespace coherent;

namespace {

constexpr double kPi = constants::pi;

ScanSpec base_spec(int n) {
  ScanSpec s;
  s.ions = n;
  return s;
}

double dense_max(const ScanSpec& spec, const CollectionAperture& ap, int points) {
  const auto [lo, hi] = spec.resolved_length_range();
  double best = 0.0;
  for (int i = 0; i < points; ++i)
    best = std::max(best, harmonic_enhancement(spec, ap, lo + (hi - lo) * i / (points - 1)));
  return best;
}

double trace_max(const OptimumRecord& r) {
  double m = -1.0;
  for (const auto& p : r.trace) m = std::max(m, p.value);
  return m;
}

}  // namespace

TEST_CASE("scan mode strings") {
  CHECK(scan_mode_from_string("harmonic-l") == ScanMode::harmonic_length);
  CHECK(scan_mode_from_string("equidistant-d") == ScanMode::equidistant_spacing);
  CHECK(scan_mode_from_string("phases-at-lmin") == ScanMode::phases_at_lmin);
  CHECK(to_string(ScanMode::phases_at_lmin) == "phases-at-lmin");
  CHECK_THROWS_AS(scan_mode_from_string("random"), InvalidArgument);
}

TEST_CASE("single ion is flat and ties resolve to the smallest l") {
  auto spec = base_spec(1);
  CHECK_THROWS_AS(spec.resolved_length_range(), InvalidArgument);
  spec.length_range = std::pair{2e-6, 20e-6};
  spec.samples = 50;
  const auto r = optimize_length_scale(spec, CollectionAperture::from_na(0.07));
  CHECK(r.best == doctest::Approx(1.0).epsilon(1e-10));
  for (const auto& p : r.trace) CHECK(p.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.argmax == doctest::Approx(2e-6));
}

TEST_CASE("two ions reach the constructive optimum") {
  const auto spec = base_spec(2);
  const auto ap = CollectionAperture::from_na(0.07);
  const auto r = optimize_length_scale(spec, ap);
  CHECK(r.best == doctest::Approx(2.0).epsilon(0.01));
  CHECK(r.best >= trace_max(r));
  CHECK(std::abs(r.best / dense_max(spec, ap, 10000) - 1.0) < 1e-3);
  const auto [lo, hi] = spec.resolved_length_range();
  CHECK(r.argmax >= lo);
  CHECK(r.argmax <= hi);
  CHECK(r.range_lo == lo);
  CHECK(r.range_hi == hi);
}

TEST_CASE("nine ions agree with a dense brute-force scan") {
  const auto spec = base_spec(9);
  const auto ap = CollectionAperture::from_na(0.07);
  const auto r = optimize_length_scale(spec, ap);
  CHECK(r.best >= trace_max(r));
  CHECK(std::abs(r.best / dense_max(spec, ap, 10000) - 1.0) < 5e-3);
}

TEST_CASE("equidistant strings") {
  const auto ap = CollectionAperture::from_na(0.07);
  auto spec = base_spec(2);
  const auto harm = optimize_length_scale(spec, ap);
  spec.mode = ScanMode::equidistant_spacing;
  const auto eq = optimize_equidistant(spec, ap);
  CHECK(eq.best == doctest::Approx(harm.best).epsilon(1e-8));
  CHECK(eq.argmax == doctest::Approx(harm.argmax * 2.0 * std::pow(2.0, -2.0 / 3.0)).epsilon(1e-5));

  spec = base_spec(3);
  const double h3 = optimize_length_scale(spec, ap).best;
  spec.mode = ScanMode::equidistant_spacing;
  CHECK(optimize_equidistant(spec, ap).best / h3 == doctest::Approx(1.0).epsilon(0.02));

  spec.thermal = true;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
}

TEST_CASE("phase optimization") {
  const auto ap = CollectionAperture::from_na(0.07);
  auto spec = base_spec(2);
  spec.mode = ScanMode::phases_at_lmin;
  const auto r = optimize_phases(spec, ap);
  const double lmin = spec.resolved_length_range().first;
  CHECK(r.argmax == lmin);
  CHECK(r.best >= harmonic_enhancement(spec, ap, lmin) - 1e-12);
  REQUIRE(r.phases.size() == 2);
  CHECK(r.phases[0] == 0.0);

  double oracle = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double phi = 2.0 * kPi * i / 10000;
    oracle = std::max(oracle, harmonic_enhancement(spec, ap, lmin, std::vector<double>{0.0, phi}));
  }
  CHECK(r.best >= oracle - 1e-6);
  CHECK(r.best == doctest::Approx(2.0).epsilon(0.01));

  const auto tiny = CollectionAperture::from_half_angle(1e-3);
  for (int n : {3, 6}) {
    auto s = base_spec(n);
    s.mode = ScanMode::phases_at_lmin;
    CHECK(optimize_phases(s, tiny).best == doctest::Approx(double(n)).epsilon(1e-3));
  }
}

TEST_CASE("phase-optimized curve dominates the harmonic curve for five ions") {
  auto spec = base_spec(5);
  for (double na : {0.05, 0.1, 0.2, 0.3}) {
    CAPTURE(na);
    const auto ap = CollectionAperture::from_na(na);
    spec.mode = ScanMode::harmonic_length;
    const double harm = optimize_length_scale(spec, ap).best;
    spec.mode = ScanMode::phases_at_lmin;
    CHECK(optimize_phases(spec, ap).best >= harm - 1e-9);
  }
}

TEST_CASE("small apertures scale almost linearly") {
  for (int n = 2; n <= 5; ++n) {
    for (double na : {0.02, 0.05}) {
      CAPTURE(n);
      CAPTURE(na);
      CHECK(optimize(base_spec(n), CollectionAperture::from_na(na)).best >= 0.9 * n);
    }
  }
}

TEST_CASE("optimization is deterministic for a fixed seed") {
  auto spec = base_spec(4);
  spec.mode = ScanMode::phases_at_lmin;
  spec.seed = 42;
  const auto ap = CollectionAperture::from_na(0.2);
  const auto a = optimize(spec, ap);
  const auto b = optimize(spec, ap);
  CHECK(a.best == b.best);
  CHECK(a.phases == b.phases);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].parameter == b.trace[i].parameter);
    CHECK(a.trace[i].value == b.trace[i].value);
  }
}

TEST_CASE("sweep matches single optimizations and tolerates failing cells") {
  auto spec = base_spec(2);
  const std::vector<int> ions = {2, 3, 50};
  const std::vector<double> nas = {0.05, 0.1};
  spec.radial_freq = angular_from_mhz(0.2);
  const auto one = sweep(spec, ions, nas, 1);
  const auto many = sweep(spec, ions, nas, 3);
  REQUIRE(one.size() == 6);
  REQUIRE(many.size() == 6);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].ions == ions[i / 2]);
    CHECK(one[i].numerical_aperture == nas[i % 2]);
    CHECK(one[i].error == many[i].error);
    CHECK(one[i].record.has_value() == many[i].record.has_value());
    if (one[i].record) CHECK(one[i].record->best == many[i].record->best);
  }
  CHECK_FALSE(one[4].record.has_value());
  CHECK_FALSE(one[4].error.empty());

  auto single = spec;
  single.ions = 3;
  const auto direct = optimize(single, CollectionAperture::from_na(0.1));
  CHECK(one[3].record->best == direct.best);
  CHECK(one[3].record->argmax == direct.argmax);
}

TEST_CASE("optimized enhancement grows with the ion number") {
  const std::vector<int> ions = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> nas = {0.07};
  const auto cells = sweep(base_spec(2), ions, nas);
  for (std::size_t i = 1; i < cells.size(); ++i) {
    REQUIRE(cells[i].record);
    CHECK(cells[i].record->best > cells[i - 1].record->best);
  }
}
