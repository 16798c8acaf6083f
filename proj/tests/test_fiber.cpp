#include "metricspace/fiber.hpp"
#include "metricspace/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace metricspace;

namespace {

Mat diag(std::initializer_list<double> v) {
  Mat m = Mat::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return m;
}

Mat scalar(double x) { return Mat::Constant(1, 1, x); }

// The fiber over a point is a metric cone: radius (4/sqrt n) det(gt^{-1} a)^{1/4},
// angle (sqrt n / 4) times the affine-invariant distance of the det-normalized parts.
double cone_distance(const Mat& a, const Mat& b, const Mat& gt) {
  const double n = a.rows();
  const double da = oracle::det(oracle::inv(gt) * a);
  const double db = oracle::det(oracle::inv(gt) * b);
  const double ra = 4.0 / std::sqrt(n) * std::pow(da, 0.25);
  const double rb = 4.0 / std::sqrt(n) * std::pow(db, 0.25);
  const Mat a1 = a / std::pow(da, 1.0 / n);
  const Mat b1 = b / std::pow(db, 1.0 / n);
  // eigenvalues of a1^{-1} b1 through the generalized problem
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(b1, a1);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    s += std::pow(std::log(es.eigenvalues()(i)), 2);
  }
  const double theta = std::sqrt(n) / 4.0 * std::sqrt(s);
  REQUIRE(theta < 3.14159);
  return std::sqrt(ra * ra + rb * rb - 2.0 * ra * rb * std::cos(theta));
}

}  // namespace

TEST_CASE("trace split") {
  Rng rng(31);
  const Mat g = rng.spd(3, 3.0);
  auto ts = trace_split(g, g);
  CHECK(ts.trace == doctest::Approx(3.0));
  CHECK(ts.traceless.norm() < 1e-13);

  ts = trace_split(Mat::Identity(2, 2), diag({1, -1}));
  CHECK(ts.trace == 0.0);
  CHECK((ts.traceless - diag({1, -1})).norm() == 0.0);

  const Mat h = rng.symmetric(3);
  ts = trace_split(g, h);
  CHECK((ts.traceless + ts.trace / 3.0 * g - h).norm() < 1e-13);
  CHECK(std::abs((oracle::inv(g) * ts.traceless).trace()) < 1e-13);
}

TEST_CASE("push exponential") {
  Rng rng(32);
  const Mat g = rng.spd(3, 2.0);
  CHECK((push_exponential(g, Mat::Zero(3, 3), 1.0) - g).norm() < 1e-14 * g.norm());

  const Mat e = push_exponential(Mat::Identity(2, 2), diag({1, -1}), 1.0);
  CHECK((e - diag({std::exp(1.0), std::exp(-1.0)})).norm() < 1e-14);

  const Mat s = rng.symmetric(3);
  const double t = 0.7;
  const Mat out = push_exponential(g, s, t);
  CHECK(oracle::det(out) ==
        doctest::Approx(oracle::det(g) * std::exp(t * (oracle::inv(g) * s).trace())).epsilon(1e-10));
  CHECK((out - g * oracle::expm(t * oracle::inv(g) * s)).norm() < 1e-11 * out.norm());
}

TEST_CASE("fiber inner product") {
  const Mat i2 = Mat::Identity(2, 2);
  CHECK(fiber_inner(i2, i2, i2, i2) == doctest::Approx(2.0));
  CHECK(fiber_inner(scalar(2.0), scalar(3.0), scalar(3.0), scalar(1.0)) ==
        doctest::Approx(9.0 * std::pow(2.0, -1.5)));

  Rng rng(33);
  for (int n = 1; n <= 4; ++n) {
    const Mat a = rng.spd(n, 3.0), gt = rng.spd(n, 2.0);
    const Mat b = rng.symmetric(n), c = rng.symmetric(n);
    const Mat ai = oracle::inv(a);
    const double expect = (ai * b * ai * c).trace() * oracle::density(a, gt);
    CHECK(fiber_inner(a, b, c, gt) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("fiber distance: one-dimensional closed form") {
  CHECK(fiber_distance(scalar(1.0), scalar(16.0), scalar(1.0)) == doctest::Approx(4.0).epsilon(1e-6));
  for (auto [a, b] : {std::pair{0.3, 2.5}, std::pair{5.0, 0.01}}) {
    const double expect = 4.0 * std::abs(std::pow(a, 0.25) - std::pow(b, 0.25));
    CHECK(std::abs(fiber_distance(scalar(a), scalar(b), scalar(1.0)) - expect) < 1e-6);
  }
  CHECK(fiber_distance(scalar(2.0), scalar(2.0), scalar(1.0)) < 1e-14);
}

TEST_CASE("fiber distance: cone geometry") {
  Rng rng(34);
  for (int n : {2, 3}) {
    for (int rep = 0; rep < 3; ++rep) {
      const Mat gt = rng.spd(n, 1.5);
      const Mat a = rng.spd(n, 2.0);
      const Mat b = rng.spd(n, 2.0) * std::exp(rng.uniform(-1.0, 1.0));
      const double expect = cone_distance(a, b, gt);
      const double d32 = fiber_distance(a, b, gt, 32);
      const double d128 = fiber_distance(a, b, gt, 128);
      CHECK(std::abs(d32 - expect) <= 1e-3 * expect);
      CHECK(std::abs(d128 - expect) <= std::abs(d32 - expect) + 1e-12);
    }
  }
}

TEST_CASE("fiber distance: symmetry and triangle inequality") {
  Rng rng(35);
  const Mat gt = Mat::Identity(2, 2);
  const Mat a = rng.spd(2, 2.0), b = rng.spd(2, 2.0), c = rng.spd(2, 2.0);
  const double ab = fiber_distance(a, b, gt), ba = fiber_distance(b, a, gt);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-6));
  CHECK(ab <= fiber_distance(a, c, gt) + fiber_distance(c, b, gt) + 1e-6);
}

TEST_CASE("fiber geodesic reports its nodes") {
  const FiberPath fp = fiber_geodesic(Mat::Identity(2, 2), diag({4, 0.5}), Mat::Identity(2, 2));
  REQUIRE(fp.nodes.size() == 33u);
  CHECK((fp.nodes.front() - Mat::Identity(2, 2)).norm() == 0.0);
  CHECK((fp.nodes.back() - diag({4, 0.5})).norm() == 0.0);
  for (const auto& m : fp.nodes) CHECK(is_spd(m));
  CHECK(fp.length * fp.length <= fp.energy * (1 + 1e-9));
}

TEST_CASE("fiber inputs are validated") {
  const Mat bad = diag({1, -1});
  CHECK_THROWS_AS(fiber_distance(bad, Mat::Identity(2, 2), Mat::Identity(2, 2)), InputError);
  CHECK_THROWS_AS(fiber_distance(Mat::Identity(2, 2), Mat::Identity(3, 3), Mat::Identity(2, 2)),
                  InputError);
  CHECK_THROWS_AS(fiber_distance(Mat::Identity(2, 2), Mat::Identity(2, 2), Mat::Identity(2, 2), 0),
                  InputError);
}
