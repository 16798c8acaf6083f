#include "metricspace/distance.hpp"
#include "metricspace/experiments.hpp"
#include "metricspace/fiber.hpp"
#include "metricspace/metrics.hpp"
#include "metricspace/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace metricspace;

namespace {

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> v;
  for (std::size_t i = lo; i < hi; ++i) v.push_back(i);
  return v;
}

}  // namespace

TEST_CASE("path length of simple paths") {
  const MetricField g = generate_fixture(2, 8, 7, 2.0);
  PathPolyline still;
  still.p = 0.5;
  still.times = {0.0, 0.5, 1.0};
  still.fields = {g, g, g};
  CHECK(path_length(0.5, still) == 0.0);

  const double c = std::exp(1.3);
  CHECK(std::abs(path_length(1.0, conformal_ray_path(1.0, g, c, 2000)) - std::sqrt(2.0) * 1.3) < 1e-6);
  CHECK(conformal_ray_length(1.0, g, c) == doctest::Approx(std::sqrt(2.0) * 1.3).epsilon(1e-14));
  for (double p : {0.0, 0.5, 2.0, -1.0}) {
    CHECK(std::abs(path_length(p, conformal_ray_path(p, g, c, 4000)) - conformal_ray_length(p, g, c)) <
          1e-6);
  }
}

TEST_CASE("volume lower bound") {
  const MetricField g = generate_fixture(2, 8, 7, 2.0);
  const double c = std::exp(2.0);
  CHECK(volume_lower_bound(1.0, g, g.scaled(c)) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  const MetricField h = generate_fixture(2, 8, 8, 2.0);
  const double vg = total_volume(g), vh = total_volume(h);
  CHECK(volume_lower_bound(0.0, g, h) ==
        doctest::Approx(4.0 / std::sqrt(2.0) * std::abs(std::sqrt(vh) - std::sqrt(vg))).epsilon(1e-14));
  const double same = total_volume(g);
  const MetricField g2 = conformal_normalize(h, DensityField(densities(g)));
  REQUIRE(total_volume(g2) == doctest::Approx(same));
  CHECK(volume_lower_bound(0.7, g, g2) < 1e-12);
  for (double p : {0.0, 0.5, 1.0, 2.0, -1.0}) {
    CHECK(std::abs(volume_lower_bound(p, g, g.scaled(c)) - conformal_ray_length(p, g, c)) < 1e-12);
  }
}

TEST_CASE("bound constants") {
  CHECK(upper_bound_constant(0.0, 2) == doctest::Approx(4.0 / std::sqrt(2.0)));
  CHECK(upper_bound_constant(-1.0, 4) == doctest::Approx(2.0));
  CHECK(upper_bound_constant(0.5, 2) == doctest::Approx(8.0 / std::sqrt(2.0)));
  CHECK(upper_bound_constant(1.5, 3) == doctest::Approx(upper_bound_constant(0.5, 3)));
  CHECK_THROWS_AS(upper_bound_constant(1.0, 2), InputError);

  CHECK(diameter_bound(0.0, 2, 1.0) == doctest::Approx(2.0 * 4.0 / std::sqrt(2.0)));
  for (double p : {0.9, 0.99, 0.999}) {
    CHECK(diameter_bound(p, 2, 1.0) * (1.0 - p) == doctest::Approx(8.0 / std::sqrt(2.0)));
  }
  CHECK(diameter_bound(2.0, 3, 5.0) == doctest::Approx(diameter_bound(0.0, 3, 0.2)).epsilon(1e-14));
}

TEST_CASE("cutoff path") {
  const MetricField g = generate_fixture(2, 8, 7, 2.0);

  SUBCASE("identical endpoints") {
    const auto ap = cutoff_path(0.0, g, g, CutoffSpec{{}, {}, 1e-3});
    CHECK(ap.total() < 1e-12);
  }
  SUBCASE("one differing point obeys the cutoff bound") {
    const MetricField h = perturbed_field(g, 5, 0.5, {3});
    const auto E = support_of_difference(g, h);
    REQUIRE(E == std::vector<std::size_t>{3});
    const auto ap = cutoff_path(0.0, g, h, default_cutoff(g, h, 1e-3));
    CHECK(ap.total() <= cutoff_upper_bound(0.0, g, h, E));
    const double w = g.manifold().weight(3);
    const double bound = 4.0 / std::sqrt(2.0) *
                         (std::sqrt(w * densities(g)[3]) + std::sqrt(w * densities(h)[3]));
    CHECK(cutoff_upper_bound(0.0, g, h, E) == doctest::Approx(bound));
  }
  SUBCASE("the crossing piece vanishes as s -> 0") {
    const MetricField h = perturbed_field(g, 6, 0.25, range(0, 4));
    double prev = std::numeric_limits<double>::infinity();
    double last_ratio = 1.0;
    for (int e = 1; e <= 6; ++e) {
      const auto ap = cutoff_path(0.0, g, h, default_cutoff(g, h, std::pow(10.0, -e)));
      CHECK(ap.cross_length < prev);
      prev = ap.cross_length;
      last_ratio = ap.cross_length / ap.total();
    }
    CHECK(last_ratio < 1e-4);
  }
  SUBCASE("the total respects the bound for several p") {
    const MetricField h = perturbed_field(g, 7, 0.25, range(2, 6));
    const auto E = support_of_difference(g, h);
    for (double p : {0.0, 0.5, -1.0, 1.5}) {
      const auto ap = cutoff_path(p, g, h, default_cutoff(g, h, 1e-6));
      CHECK(ap.total() <= cutoff_upper_bound(p, g, h, E));
    }
  }
  SUBCASE("paths inside {V <= 1} stay below the diameter bound") {
    const MetricField a = g.scaled(0.8 / total_volume(g));
    const MetricField b = generate_fixture(2, 8, 99, 3.0);
    const MetricField bb = b.scaled(0.9 / total_volume(b));
    CutoffSpec all{range(0, 8), range(0, 8), 1e-6};
    CHECK(cutoff_path(0.0, a, bb, all).total() <= diameter_bound(0.0, 2, 1.0));
  }
  SUBCASE("invalid cutoffs") {
    const MetricField h = perturbed_field(g, 8, 0.25, {0, 1});
    CHECK_THROWS_AS(cutoff_path(0.0, g, h, CutoffSpec{{0}, {0}, 1e-3}), InputError);
    CHECK_THROWS_AS(cutoff_path(0.0, g, h, CutoffSpec{{0, 1}, {2}, 1e-3}), InputError);
    CHECK_THROWS_AS(cutoff_path(0.0, g, h, CutoffSpec{{0, 1}, {0, 1}, 0.0}), InputError);
  }
}

TEST_CASE("fiberwise Ebin distance") {
  const MetricField g = generate_fixture(2, 8, 7, 2.0);
  CHECK(omega2(g, g) < 1e-12);

  auto man = uniform_manifold(1, 1);
  const MetricField a(man, {Mat::Constant(1, 1, 1.0)});
  const MetricField b(man, {Mat::Constant(1, 1, 16.0)});
  CHECK(omega2(a, b) == doctest::Approx(4.0).epsilon(1e-6));

  // independent per-point evaluation
  const MetricField h = perturbed_field(g, 9, 0.5, range(0, 8));
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = fiber_distance(g[i], h[i], g.manifold().reference(i));
    s += g.manifold().weight(i) * d * d;
  }
  CHECK(omega2(g, h) == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
  const double opt = optimize_path(0.0, g, h).length;
  CHECK(std::abs(omega2(g, h) - opt) <= 0.02 * opt);
}

TEST_CASE("distance estimate") {
  const MetricField g = generate_fixture(2, 8, 7, 2.0);
  const MetricField h = perturbed_field(g, 10, 0.4, range(0, 8));
  for (double p : {0.0, 0.5, 1.0, 2.0}) {
    const auto rep = distance_estimate(p, g, h);
    CHECK(rep.lower <= rep.upper + 1e-8);
    CHECK(rep.candidates.size() >= 3u);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : rep.candidates) best = std::min(best, c.length);
    CHECK(rep.upper == best);
  }
  const auto ray = distance_estimate(0.5, g, g.scaled(3.0));
  CHECK(std::abs(ray.upper - ray.lower) < 1e-6);
}

TEST_CASE("completion probes") {
  const MetricField g = generate_fixture(2, 8, 7, 2.0);
  const double v0 = total_volume(g);

  const auto p0 = completion_probe(0.0, ProbeMode::Collapse, g);
  CHECK(p0.verdict == ProbeVerdict::Cauchy);
  for (const auto& r : p0.rows) {
    const double expect = 4.0 / 2.0 * std::sqrt(2.0 * v0) * std::pow(r.factor, 0.5);
    CHECK(r.tail_upper == doctest::Approx(expect).epsilon(1e-12));
  }

  const auto p1 = completion_probe(1.0, ProbeMode::Collapse, g);
  CHECK(p1.verdict == ProbeVerdict::NotCauchy);
  for (const auto& r : p1.rows) {
    CHECK(r.lower >= std::sqrt(2.0) * r.k * std::log(4.0) * (1 - 1e-12));
  }
  CHECK(p1.rows.back().lower > 10.0);
  CHECK(p1.lower_slope == doctest::Approx(std::sqrt(2.0) * std::log(4.0)).epsilon(1e-9));

  const auto p2 = completion_probe(2.0, ProbeMode::Blowup, g);
  CHECK(p2.verdict == ProbeVerdict::Cauchy);
  for (const auto& r : p2.rows) CHECK(r.tail_upper == doctest::Approx(r.tail_dual).epsilon(1e-12));

  CHECK(completion_probe(0.0, ProbeMode::Blowup, g).verdict == ProbeVerdict::NotCauchy);
  CHECK_THROWS_AS(completion_probe(0.0, ProbeMode::Collapse, g, 1), InputError);
}
