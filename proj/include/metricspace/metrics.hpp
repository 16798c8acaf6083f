#pragma once

// The conformal family of L2 metrics on the space of metrics:
//
//   g_p(h, k)|_g = V_g^{-p} int tr(g^{-1} h g^{-1} k) dV_g
//
// p = 0 is the Ebin metric, p = 1 the volume-normalized (Calabi-type) metric.

#include "metricspace/fields.hpp"

#include <vector>

namespace metricspace {

/// V_g^{-p} int tr(g^{-1} h g^{-1} k) dV_g
double inner(double p, const MetricField& g, const TangentField& h, const TangentField& k);

/// sqrt(inner(p, g, h, h))
double norm(double p, const MetricField& g, const TangentField& h);

/// Pointwise integrand tr(g^{-1} h g^{-1} k) at every point.
std::vector<double> pointwise_trace_product(const MetricField& g, const TangentField& h,
                                            const TangentField& k);

/// The metric conformal to g whose volume density (relative to the reference
/// measure) is mu0: (mu0 / rho_g)^{2/n} g pointwise.
MetricField conformal_normalize(const MetricField& g, const DensityField& mu0);

/// F(g) = V_g^{-4/n} g. An involution with V_{F(g)} = 1 / V_g.
MetricField duality_map(const MetricField& g);

/// dF_g(h) = V^{-4/n} h - (2/n) V^{-4/n-1} <g, h>_E g.
TangentField duality_differential(const MetricField& g, const TangentField& h);

/// Modified Gram-Schmidt in the g_p inner product. Throws NumericalError if
/// the inputs are numerically dependent.
std::vector<TangentField> orthonormalize(double p, const MetricField& g,
                                         const std::vector<TangentField>& vs);

}  // namespace metricspace
