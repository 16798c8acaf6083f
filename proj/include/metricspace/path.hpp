#pragma once

#include "metricspace/fields.hpp"

#include <vector>

namespace metricspace {

/// A time-sampled curve in the space of metrics.
struct PathPolyline {
  double p = 0.0;  // family exponent the path is measured in
  std::vector<double> times;
  std::vector<MetricField> fields;
  /// Velocities at the samples when known (ODE output); may be empty.
  std::vector<TangentField> velocities;

  std::size_t size() const { return fields.size(); }

  /// Throws InputError unless times are strictly increasing, sizes agree and
  /// every sample lives on the same manifold.
  void validate() const;
};

}  // namespace metricspace
