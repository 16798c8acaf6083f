#pragma once

// Levi-Civita connection of g_p on constant vector fields (D_h k = 0):
//
//   Gamma_p(h, k) = -1/2 (h g^{-1} k + k g^{-1} h)
//                 + 1/4 (tr(g^{-1} k) h + tr(g^{-1} h) k - tr(g^{-1} h g^{-1} k) g)
//                 - p/4 N(g, h) k - p/4 N(g, k) h + p/4 N(h, k) g
//
// with N(a, b) = V^{-1} int tr(g^{-1} a g^{-1} b) dV_g. Setting p = 0 gives
// the Ebin connection; the p-terms come from the conformal change by V^{-p}.

#include "metricspace/fields.hpp"
#include "metricspace/path.hpp"

#include <utility>
#include <vector>

namespace metricspace {

/// nabla_h k at g for constant fields h, k.
TangentField connection(double p, const MetricField& g, const TangentField& h,
                        const TangentField& k);

/// nabla_h of the tautological field g -> g; adds D_h g = h to Gamma_p(h, g).
TangentField connection_tautological(double p, const MetricField& g, const TangentField& h);

enum class VolumeFunctional {
  LogVolume,    // log V
  VolumePower,  // V^{1-p}
};

struct HessianSample {
  double t;
  double value;     // second time derivative of the functional
  double expected;  // 0 for log V, n (1-p)^2 / 8 * speed^2 for V^{1-p}
};

/// Second time-derivatives of a volume functional along a geodesic polyline
/// with uniform time steps, by 5-point central differences (interior
/// samples only). Refuses (InputError) paths whose geodesic residual exceeds
/// `residual_tol`.
std::vector<HessianSample> hessian_scalar(double p, VolumeFunctional functional,
                                          const PathPolyline& path, double residual_tol = 1e-3);

}  // namespace metricspace
