#pragma once

// Discrete stand-in for a closed n-manifold M.
//
// No operation on the space of metrics takes spatial derivatives of g: every
// formula is pointwise in the fiber plus a global integral. M is therefore a
// finite list of quadrature points, each carrying a reference-measure weight
// and a reference fiber metric (the g-tilde against which densities are
// measured). There is no adjacency or topology.
//
//   integral of phi dV_g  =  sum_i w_i phi_i sqrt(det(gtilde_i^{-1} g_i))

#include "metricspace/linalg.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace metricspace {

struct QuadPoint {
  double weight = 1.0;
  Mat reference_metric;
};

class DiscreteManifold {
 public:
  /// Validates: dim in [1, kMaxFiberDim], at least one point, positive finite
  /// weights, SPD reference metrics of the right size.
  DiscreteManifold(int dim, std::vector<QuadPoint> points);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const QuadPoint& point(std::size_t i) const { return points_[i]; }
  std::span<const QuadPoint> points() const { return points_; }

  double weight(std::size_t i) const { return points_[i].weight; }
  const Mat& reference(std::size_t i) const { return points_[i].reference_metric; }

  /// Sum of the weights: the volume of the reference metric.
  double reference_volume() const;

 private:
  int dim_;
  std::vector<QuadPoint> points_;
};

using ManifoldPtr = std::shared_ptr<const DiscreteManifold>;

ManifoldPtr make_manifold(int dim, std::vector<QuadPoint> points);

/// `count` equal weights summing to one, identity reference metrics.
ManifoldPtr uniform_manifold(int dim, std::size_t count);

/// A scalar function on M, one value per quadrature point.
struct DensityField {
  std::vector<double> values;

  DensityField() = default;
  explicit DensityField(std::vector<double> v) : values(std::move(v)) {}
  static DensityField constant(std::size_t count, double value) {
    return DensityField(std::vector<double>(count, value));
  }
  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

class MetricField;
class TangentField;

/// sum_i w_i phi_i dV_g(x_i)/dV_ref(x_i)
double integrate(const DiscreteManifold& man, const DensityField& phi, const MetricField& g);

/// V_g
double total_volume(const MetricField& g);

/// DV_g(h) = 1/2 int tr(g^{-1} h) dV_g
double volume_differential(const MetricField& g, const TangentField& h);

/// Per-point densities sqrt(det(gtilde^{-1} g)).
std::vector<double> densities(const MetricField& g);

/// Volume of the subset `indices` of M measured with g.
double subset_volume(const MetricField& g, std::span<const std::size_t> indices);

}  // namespace metricspace
