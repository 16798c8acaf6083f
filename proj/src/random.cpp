#include "metricspace/random.hpp"

#include <cmath>
#include <numbers>

namespace metricspace {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

Mat Rng::orthogonal(int n) {
  Mat a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = normal();
  }
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Mat Rng::spd(int n, double spread) {
  if (!(spread >= 1.0)) throw InputError("spread must be >= 1");
  const Mat q = orthogonal(n);
  if (spread == 1.0) return Mat::Identity(n, n);  // exact, without Q Q^T roundoff
  const double ls = std::log(spread);
  Vec lam(n);
  for (int i = 0; i < n; ++i) lam(i) = std::exp(uniform(-ls, ls));
  return symmetrize(q * lam.asDiagonal() * q.transpose());
}

Mat Rng::symmetric(int n) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      a(i, j) = normal();
      a(j, i) = a(i, j);
    }
  }
  return a;
}

MetricField generate_fixture(int n, std::size_t points, std::uint64_t seed, double spread) {
  if (n < 1 || n > kMaxFiberDim) throw InputError("generate_fixture: n out of range");
  if (points < 1) throw InputError("generate_fixture: need at least one point");
  auto man = uniform_manifold(n, points);
  Rng rng(seed);
  std::vector<Mat> mats;
  mats.reserve(points);
  for (std::size_t i = 0; i < points; ++i) mats.push_back(rng.spd(n, spread));
  return MetricField(man, std::move(mats));
}

TangentField random_tangent(Rng& rng, const ManifoldPtr& man, double scale) {
  std::vector<Mat> mats;
  mats.reserve(man->size());
  for (std::size_t i = 0; i < man->size(); ++i) mats.push_back(scale * rng.symmetric(man->dim()));
  return TangentField(man, std::move(mats));
}

}  // namespace metricspace
