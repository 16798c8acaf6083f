#include "metricspace/manifold.hpp"

#include "metricspace/fields.hpp"

#include <cmath>
#include <string>

namespace metricspace {

DiscreteManifold::DiscreteManifold(int dim, std::vector<QuadPoint> points)
    : dim_(dim), points_(std::move(points)) {
  if (dim_ < 1 || dim_ > kMaxFiberDim) {
    throw InputError("manifold dimension " + std::to_string(dim_) + " outside [1, " +
                     std::to_string(kMaxFiberDim) + "]");
  }
  if (points_.empty()) {
    throw InputError("manifold needs at least one quadrature point");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    const std::string where = "point " + std::to_string(i);
    if (!(p.weight > 0.0) || !std::isfinite(p.weight)) {
      throw InputError(where + ": weight must be positive and finite");
    }
    if (p.reference_metric.rows() != dim_ || p.reference_metric.cols() != dim_) {
      throw InputError(where + ": reference metric has wrong shape");
    }
    require_spd(p.reference_metric, where + " reference metric");
  }
}

double DiscreteManifold::reference_volume() const {
  std::vector<double> w;
  w.reserve(points_.size());
  for (const auto& p : points_) w.push_back(p.weight);
  return pairwise_sum(w);
}

ManifoldPtr make_manifold(int dim, std::vector<QuadPoint> points) {
  return std::make_shared<const DiscreteManifold>(dim, std::move(points));
}

ManifoldPtr uniform_manifold(int dim, std::size_t count) {
  if (count == 0) throw InputError("uniform_manifold: count must be positive");
  std::vector<QuadPoint> pts(count);
  for (auto& p : pts) {
    p.weight = 1.0 / static_cast<double>(count);
    p.reference_metric = identity(dim);
  }
  return make_manifold(dim, std::move(pts));
}

std::vector<double> densities(const MetricField& g) {
  const auto& man = g.manifold();
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rho[i] = relative_density(g[i], man.reference(i));
  return rho;
}

double integrate(const DiscreteManifold& man, const DensityField& phi, const MetricField& g) {
  require_same_manifold(man, g.manifold(), "integrate");
  if (phi.size() != man.size()) {
    throw InputError("integrate: density has " + std::to_string(phi.size()) +
                     " values for " + std::to_string(man.size()) + " points");
  }
  std::vector<double> terms(man.size());
  for (std::size_t i = 0; i < man.size(); ++i) {
    terms[i] = man.weight(i) * phi[i] * relative_density(g[i], man.reference(i));
  }
  return pairwise_sum(terms);
}

double total_volume(const MetricField& g) {
  return integrate(g.manifold(), DensityField::constant(g.size(), 1.0), g);
}

double volume_differential(const MetricField& g, const TangentField& h) {
  require_same_manifold(g.manifold(), h.manifold(), "volume_differential");
  std::vector<double> tr(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) tr[i] = trace_with(spd_inverse(g[i]), h[i]);
  return 0.5 * integrate(g.manifold(), DensityField(std::move(tr)), g);
}

double subset_volume(const MetricField& g, std::span<const std::size_t> indices) {
  const auto& man = g.manifold();
  std::vector<double> terms;
  terms.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= man.size()) throw InputError("subset_volume: point index out of range");
    terms.push_back(man.weight(i) * relative_density(g[i], man.reference(i)));
  }
  return pairwise_sum(terms);
}

}  // namespace metricspace
