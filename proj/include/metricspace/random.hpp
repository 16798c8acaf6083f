#pragma once

// Seeded generators for test fixtures. Draws are built from raw
// std::mt19937_64 output (not std:: distributions) so a seed yields the same
// numbers on every platform and standard library.

#include "metricspace/fields.hpp"

#include <cstdint>
#include <random>

namespace metricspace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller).
  double normal();
  std::uint64_t next() { return engine_(); }

  /// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
  /// sign of R's diagonal fixed).
  Mat orthogonal(int n);
  /// Q diag(lambda) Q^T with log(lambda) uniform in [-log spread, log spread].
  Mat spd(int n, double spread);
  /// Symmetric matrix with standard normal entries on and above the diagonal.
  Mat symmetric(int n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// `points` equal weights summing to one, identity reference metrics, random
/// SPD fibers from Rng(seed).spd(n, spread).
MetricField generate_fixture(int n, std::size_t points, std::uint64_t seed, double spread);

/// Random symmetric tangent field, entries scaled by `scale`.
TangentField random_tangent(Rng& rng, const ManifoldPtr& man, double scale = 1.0);

}  // namespace metricspace
