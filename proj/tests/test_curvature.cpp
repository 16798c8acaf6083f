#include "metricspace/curvature.hpp"
#include "metricspace/metrics.hpp"
#include "metricspace/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace metricspace;

namespace {

BilinearForm gp(double p, const MetricField& g) {
  return [p, g](const TangentField& a, const TangentField& b) { return oracle::inner(p, g, a, b); };
}

TangentField conformal(Rng& rng, const MetricField& g) {
  std::vector<Mat> m;
  for (std::size_t i = 0; i < g.size(); ++i) m.push_back(rng.normal() * g[i]);
  return TangentField(g.manifold_ptr(), m);
}

}  // namespace

TEST_CASE("Kulkarni-Nomizu product") {
  Rng rng(71);
  const MetricField g = oracle::random_field(rng, 2, 4);
  const auto on = orthonormalize(0.5, g,
                                 {random_tangent(rng, g.manifold_ptr()), random_tangent(rng, g.manifold_ptr())});
  const auto G = gp(0.5, g);
  const TangentField& h = on[0];
  const TangentField& k = on[1];
  CHECK(kn_product(G, G, h, k, k, h) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(kn_product(G, G, h, k, h, k) == doctest::Approx(2.0).epsilon(1e-12));

  const TangentField a = random_tangent(rng, g.manifold_ptr());
  const TangentField b = random_tangent(rng, g.manifold_ptr());
  const TangentField c = random_tangent(rng, g.manifold_ptr());
  const TangentField d = random_tangent(rng, g.manifold_ptr());
  const auto H = gp(2.0, g);
  CHECK(std::abs(kn_product(G, H, a, a, c, d)) < 1e-12);
  const double expect = G(a, c) * H(b, d) + G(b, d) * H(a, c) - G(a, d) * H(b, c) - G(b, c) * H(a, d);
  CHECK(kn_product(G, H, a, b, c, d) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("conformal-change formula: special exponents") {
  Rng rng(72);
  const MetricField g = oracle::random_field(rng, 2, 5).scaled(1.7);
  const double v = total_volume(g);
  const TangentField a = random_tangent(rng, g.manifold_ptr());
  const TangentField b = random_tangent(rng, g.manifold_ptr());
  const double secE = 0.37;
  CHECK(sec_formula(make_plane(0.0, g, a, b), secE) == doctest::Approx(secE).epsilon(1e-14));
  CHECK(sec_formula(make_plane(2.0, g, a, b), secE) == doctest::Approx(secE / (v * v)).epsilon(1e-13));

  // volume-preserving conformal directions with vanishing Ebin curvature
  const TangentField gt = TangentField::from_metric(g);
  auto strip = [&](const TangentField& x) {
    return x - gt * (oracle::inner(1.0, g, x, gt) / oracle::inner(1.0, g, gt, gt));
  };
  const PlaneSpec plane = make_plane(1.0, g, strip(conformal(rng, g)), strip(conformal(rng, g)));
  CHECK(sec_formula(plane, 0.0) == doctest::Approx(2.0 / 16.0).epsilon(1e-12));

  PlaneSpec skew = plane;
  skew.k = skew.k * 2.0;
  CHECK_THROWS_AS(sec_formula(skew, 0.0), InputError);
}

TEST_CASE("numerical curvature") {
  Rng rng(73);
  const MetricField g = oracle::random_field(rng, 2, 6);
  const double n = 2.0;
  const double v = total_volume(g);

  SUBCASE("conformal planes are flat in the Ebin metric") {
    CHECK(std::abs(curvature_numeric(0.0, g, conformal(rng, g), conformal(rng, g)).sectional) < 1e-5);
  }
  SUBCASE("volume-preserving conformal planes have curvature n/16 at p = 1") {
    const TangentField gt = TangentField::from_metric(g);
    auto strip = [&](const TangentField& x) {
      return x - gt * (oracle::inner(1.0, g, x, gt) / oracle::inner(1.0, g, gt, gt));
    };
    const auto c = curvature_numeric(1.0, g, strip(conformal(rng, g)), strip(conformal(rng, g)));
    CHECK(c.sectional == doctest::Approx(n / 16.0).epsilon(1e-4));
  }
  SUBCASE("p = 2 curvature form is the Ebin form over V^2") {
    const TangentField a = random_tangent(rng, g.manifold_ptr());
    const TangentField b = random_tangent(rng, g.manifold_ptr());
    const double f0 = curvature_numeric(0.0, g, a, b).form;
    const double f2 = curvature_numeric(2.0, g, a, b).form;
    CHECK(f2 / f0 == doctest::Approx(1.0 / (v * v)).epsilon(1e-4));
  }
  SUBCASE("formula agrees with finite differences") {
    for (int j = 0; j < 5; ++j) {
      const TangentField a = random_tangent(rng, g.manifold_ptr());
      const TangentField b = random_tangent(rng, g.manifold_ptr());
      for (double p : {-1.0, 0.5, 1.0, 3.0}) {
        const PlaneSpec plane = make_plane(p, g, a, b);
        const double secE = curvature_numeric(0.0, g, plane.h, plane.k).form;
        const double numeric = curvature_numeric(p, g, a, b).sectional;
        CHECK(std::abs(numeric - sec_formula(plane, secE)) < 1e-4);
      }
    }
  }
  SUBCASE("sectional curvature depends only on the plane") {
    const TangentField a = random_tangent(rng, g.manifold_ptr());
    const TangentField b = random_tangent(rng, g.manifold_ptr());
    const double s1 = curvature_numeric(0.7, g, a, b).sectional;
    const double s2 = curvature_numeric(0.7, g, b, a).sectional;
    const double s3 = curvature_numeric(0.7, g, a * 2.0 + b, b * -0.5 + a).sectional;
    CHECK(s2 == doctest::Approx(s1).epsilon(1e-6));
    CHECK(s3 == doctest::Approx(s1).epsilon(1e-6));
  }
  SUBCASE("degenerate planes are refused") {
    const TangentField a = random_tangent(rng, g.manifold_ptr());
    CHECK_THROWS(curvature_numeric(0.0, g, a, a * 3.0));
  }
}
