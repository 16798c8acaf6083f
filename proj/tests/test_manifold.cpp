#include "metricspace/fields.hpp"
#include "metricspace/manifold.hpp"
#include "metricspace/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace metricspace;

namespace {

Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

ManifoldPtr points(std::vector<double> w, int n = 2) {
  std::vector<QuadPoint> qp;
  for (double x : w) qp.push_back({x, Mat::Identity(n, n)});
  return make_manifold(n, std::move(qp));
}

}  // namespace

TEST_CASE("integrate: identity and scaled fibers") {
  auto man = points({1.0});
  const MetricField id(man, {Mat::Identity(2, 2)});
  CHECK(integrate(*man, DensityField::constant(1, 1.0), id) == doctest::Approx(1.0));
  const MetricField c(man, {3.5 * Mat::Identity(2, 2)});
  CHECK(integrate(*man, DensityField::constant(1, 1.0), c) == doctest::Approx(3.5));
}

TEST_CASE("integrate: two weighted points") {
  auto man = points({0.5, 0.5});
  const MetricField g(man, {diag2(1, 4), diag2(9, 1)});
  CHECK(integrate(*man, DensityField::constant(2, 1.0), g) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("total volume") {
  auto man = points({1.0, 0.5, 1.5});
  const MetricField ref = MetricField::reference(man);
  CHECK(total_volume(ref) == doctest::Approx(3.0));
  CHECK(total_volume(ref.scaled(2.7)) == doctest::Approx(2.7 * 3.0).epsilon(1e-14));

  Rng rng(21);
  for (int n : {1, 2, 3, 5}) {
    const MetricField g = oracle::random_field(rng, n, 17);
    CHECK(total_volume(g) == doctest::Approx(oracle::volume(g)).epsilon(1e-14));
  }
}

TEST_CASE("volume differential") {
  Rng rng(22);
  const MetricField g = oracle::random_field(rng, 3, 9);
  const TangentField gt = TangentField::from_metric(g);
  CHECK(volume_differential(g, gt) == doctest::Approx(1.5 * total_volume(g)).epsilon(1e-14));

  std::vector<Mat> tl;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Mat s = rng.symmetric(3);
    s -= (oracle::inv(g[i]) * s).trace() / 3.0 * g[i];
    tl.push_back(s);
  }
  CHECK(std::abs(volume_differential(g, TangentField(g.manifold_ptr(), tl))) < 1e-14);

  const TangentField h = random_tangent(rng, g.manifold_ptr(), 0.3);
  const double eps = 1e-5;
  const double fd =
      (oracle::volume(displaced(g, h, eps)) - oracle::volume(displaced(g, h, -eps))) / (2 * eps);
  CHECK(std::abs(volume_differential(g, h) - fd) < 1e-8);
}

TEST_CASE("subset volume and densities") {
  auto man = points({0.5, 0.25, 0.25});
  const MetricField g(man, {diag2(1, 1), diag2(4, 1), diag2(1, 9)});
  const std::vector<std::size_t> idx{1, 2};
  CHECK(subset_volume(g, idx) == doctest::Approx(0.25 * 2 + 0.25 * 3));
  const auto rho = densities(g);
  CHECK(rho[2] == doctest::Approx(3.0));
}

TEST_CASE("manifold validation") {
  CHECK_THROWS_AS(make_manifold(2, {}), InputError);
  CHECK_THROWS_AS(make_manifold(0, {{1.0, Mat::Identity(1, 1)}}), InputError);
  CHECK_THROWS_AS(make_manifold(2, {{-1.0, Mat::Identity(2, 2)}}), InputError);
  CHECK_THROWS_AS(make_manifold(2, {{1.0, Mat::Identity(3, 3)}}), InputError);
  CHECK_THROWS_AS(make_manifold(2, {{1.0, diag2(1, -1)}}), InputError);
  CHECK_THROWS_AS(make_manifold(kMaxFiberDim + 1, {{1.0, Mat::Identity(1, 1)}}), InputError);
}

TEST_CASE("metric field validation and manifold mismatch") {
  auto man = points({1.0, 1.0});
  CHECK_THROWS_AS(MetricField(man, {Mat::Identity(2, 2)}), InputError);
  CHECK_THROWS_AS(MetricField(man, {Mat::Identity(2, 2), diag2(1, -2)}), InputError);
  CHECK_THROWS_AS(MetricField(man, {Mat::Identity(2, 2), diag2(1, NAN)}), InputError);
  auto other = points({1.0, 2.0});
  const MetricField g = MetricField::reference(man);
  const TangentField h = TangentField::zeros(other);
  CHECK_THROWS_AS(displaced(g, h, 1.0), InputError);
  CHECK_THROWS_AS(integrate(*man, DensityField::constant(3, 1.0), g), InputError);
}
