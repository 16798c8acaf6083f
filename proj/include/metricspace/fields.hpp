#pragma once

// Points and tangent vectors of the space of metrics over a DiscreteManifold.

#include "metricspace/linalg.hpp"
#include "metricspace/manifold.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace metricspace {

/// One SPD fiber per quadrature point: an element of the space of metrics.
class MetricField {
 public:
  /// Throws InputError naming the offending point when a fiber is not SPD
  /// (smallest eigenvalue <= spd_eps) or has the wrong shape.
  MetricField(ManifoldPtr man, std::vector<Mat> mats, double spd_eps = kDefaultSpdEps);

  /// The reference metric of `man`.
  static MetricField reference(const ManifoldPtr& man);

  const DiscreteManifold& manifold() const { return *man_; }
  const ManifoldPtr& manifold_ptr() const { return man_; }
  std::size_t size() const { return mats_.size(); }
  int dim() const { return man_->dim(); }

  const Mat& operator[](std::size_t i) const { return mats_[i]; }
  std::span<const Mat> mats() const { return mats_; }

  /// c * g, c > 0.
  MetricField scaled(double c, double spd_eps = 0.0) const;

 private:
  ManifoldPtr man_;
  std::vector<Mat> mats_;
};

/// One symmetric matrix per quadrature point: a tangent vector at any metric.
class TangentField {
 public:
  TangentField(ManifoldPtr man, std::vector<Mat> mats);

  static TangentField zeros(const ManifoldPtr& man);
  /// The tautological direction: h = g.
  static TangentField from_metric(const MetricField& g);

  const DiscreteManifold& manifold() const { return *man_; }
  const ManifoldPtr& manifold_ptr() const { return man_; }
  std::size_t size() const { return mats_.size(); }
  int dim() const { return man_->dim(); }

  const Mat& operator[](std::size_t i) const { return mats_[i]; }
  std::span<const Mat> mats() const { return mats_; }

  TangentField operator+(const TangentField& o) const;
  TangentField operator-(const TangentField& o) const;
  TangentField operator*(double c) const;
  friend TangentField operator*(double c, const TangentField& h) { return h * c; }

  /// Pointwise multiplication by a scalar function.
  TangentField pointwise_scaled(const DensityField& phi) const;

 private:
  ManifoldPtr man_;
  std::vector<Mat> mats_;
};

/// g + t h, checked for positive definiteness.
MetricField displaced(const MetricField& g, const TangentField& h, double t,
                      double spd_eps = 0.0);

/// h - g as a tangent field.
TangentField difference(const MetricField& h, const MetricField& g);

void require_same_manifold(const DiscreteManifold& a, const DiscreteManifold& b,
                           const char* what);

}  // namespace metricspace
