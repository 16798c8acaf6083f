#include "metricspace/metrics.hpp"

#include <cmath>
#include <string>

namespace metricspace {

std::vector<double> pointwise_trace_product(const MetricField& g, const TangentField& h,
                                            const TangentField& k) {
  require_same_manifold(g.manifold(), h.manifold(), "inner");
  require_same_manifold(g.manifold(), k.manifold(), "inner");
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Mat gi = spd_inverse(g[i]);
    out[i] = (gi * h[i] * gi * k[i]).trace();
  }
  return out;
}

double inner(double p, const MetricField& g, const TangentField& h, const TangentField& k) {
  const double e = integrate(g.manifold(), DensityField(pointwise_trace_product(g, h, k)), g);
  if (p == 0.0) return e;
  return std::pow(total_volume(g), -p) * e;
}

double norm(double p, const MetricField& g, const TangentField& h) {
  return std::sqrt(std::max(inner(p, g, h, h), 0.0));
}

MetricField conformal_normalize(const MetricField& g, const DensityField& mu0) {
  if (mu0.size() != g.size()) throw InputError("conformal_normalize: size mismatch");
  const auto rho = densities(g);
  const double n = g.dim();
  std::vector<Mat> out(g.mats().begin(), g.mats().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(mu0[i] > 0.0) || !std::isfinite(mu0[i])) {
      throw InputError("conformal_normalize: target density at point " + std::to_string(i) +
                       " must be positive");
    }
    out[i] *= std::pow(mu0[i] / rho[i], 2.0 / n);
  }
  return MetricField(g.manifold_ptr(), std::move(out), 0.0);
}

MetricField duality_map(const MetricField& g) {
  return g.scaled(std::pow(total_volume(g), -4.0 / g.dim()));
}

TangentField duality_differential(const MetricField& g, const TangentField& h) {
  const double n = g.dim();
  const double v = total_volume(g);
  const double c = std::pow(v, -4.0 / n);
  const double geh = inner(0.0, g, TangentField::from_metric(g), h);
  return h * c + TangentField::from_metric(g) * (-(2.0 / n) * c / v * geh);
}

std::vector<TangentField> orthonormalize(double p, const MetricField& g,
                                         const std::vector<TangentField>& vs) {
  std::vector<TangentField> out;
  out.reserve(vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) {
    TangentField u = vs[j];
    const double orig = norm(p, g, u);
    for (const auto& e : out) u = u - e * inner(p, g, u, e);
    const double nu = norm(p, g, u);
    if (!(nu > 1e-10 * std::max(orig, 1e-300))) {
      throw NumericalError("orthonormalize: vector " + std::to_string(j) +
                           " is numerically dependent on its predecessors");
    }
    out.push_back(u * (1.0 / nu));
  }
  return out;
}

}  // namespace metricspace
