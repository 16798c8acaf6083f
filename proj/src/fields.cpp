#include "metricspace/fields.hpp"

#include <string>

namespace metricspace {

namespace {

void check_shape(const DiscreteManifold& man, std::span<const Mat> mats, const char* what) {
  if (mats.size() != man.size()) {
    throw InputError(std::string(what) + ": " + std::to_string(mats.size()) +
                     " matrices for " + std::to_string(man.size()) + " points");
  }
  for (std::size_t i = 0; i < mats.size(); ++i) {
    if (mats[i].rows() != man.dim() || mats[i].cols() != man.dim()) {
      throw InputError(std::string(what) + ": point " + std::to_string(i) +
                       " has wrong matrix shape");
    }
  }
}

}  // namespace

void require_same_manifold(const DiscreteManifold& a, const DiscreteManifold& b,
                           const char* what) {
  if (&a == &b) return;
  bool same = a.dim() == b.dim() && a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) {
    same = a.weight(i) == b.weight(i) && a.reference(i) == b.reference(i);
  }
  if (!same) throw InputError(std::string(what) + ": fields live on different manifolds");
}

MetricField::MetricField(ManifoldPtr man, std::vector<Mat> mats, double spd_eps)
    : man_(std::move(man)), mats_(std::move(mats)) {
  if (!man_) throw InputError("MetricField: null manifold");
  check_shape(*man_, mats_, "MetricField");
  for (std::size_t i = 0; i < mats_.size(); ++i) {
    require_spd(mats_[i], "metric at point " + std::to_string(i), spd_eps);
  }
}

MetricField MetricField::reference(const ManifoldPtr& man) {
  std::vector<Mat> mats;
  mats.reserve(man->size());
  for (const auto& p : man->points()) mats.push_back(p.reference_metric);
  return MetricField(man, std::move(mats));
}

MetricField MetricField::scaled(double c, double spd_eps) const {
  if (!(c > 0.0)) throw InputError("MetricField::scaled: factor must be positive");
  std::vector<Mat> out(mats_.begin(), mats_.end());
  for (auto& m : out) m *= c;
  return MetricField(man_, std::move(out), spd_eps);
}

TangentField::TangentField(ManifoldPtr man, std::vector<Mat> mats)
    : man_(std::move(man)), mats_(std::move(mats)) {
  if (!man_) throw InputError("TangentField: null manifold");
  check_shape(*man_, mats_, "TangentField");
  for (std::size_t i = 0; i < mats_.size(); ++i) {
    require_symmetric(mats_[i], "tangent at point " + std::to_string(i));
  }
}

TangentField TangentField::zeros(const ManifoldPtr& man) {
  return TangentField(man, std::vector<Mat>(man->size(), Mat::Zero(man->dim(), man->dim())));
}

TangentField TangentField::from_metric(const MetricField& g) {
  return TangentField(g.manifold_ptr(), std::vector<Mat>(g.mats().begin(), g.mats().end()));
}

TangentField TangentField::operator+(const TangentField& o) const {
  require_same_manifold(*man_, *o.man_, "TangentField::operator+");
  std::vector<Mat> out(mats_.begin(), mats_.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += o.mats_[i];
  return TangentField(man_, std::move(out));
}

TangentField TangentField::operator-(const TangentField& o) const {
  require_same_manifold(*man_, *o.man_, "TangentField::operator-");
  std::vector<Mat> out(mats_.begin(), mats_.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= o.mats_[i];
  return TangentField(man_, std::move(out));
}

TangentField TangentField::operator*(double c) const {
  std::vector<Mat> out(mats_.begin(), mats_.end());
  for (auto& m : out) m *= c;
  return TangentField(man_, std::move(out));
}

TangentField TangentField::pointwise_scaled(const DensityField& phi) const {
  if (phi.size() != mats_.size()) throw InputError("pointwise_scaled: size mismatch");
  std::vector<Mat> out(mats_.begin(), mats_.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= phi[i];
  return TangentField(man_, std::move(out));
}

MetricField displaced(const MetricField& g, const TangentField& h, double t, double spd_eps) {
  require_same_manifold(g.manifold(), h.manifold(), "displaced");
  std::vector<Mat> out(g.mats().begin(), g.mats().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += t * h[i];
  return MetricField(g.manifold_ptr(), std::move(out), spd_eps);
}

TangentField difference(const MetricField& h, const MetricField& g) {
  require_same_manifold(h.manifold(), g.manifold(), "difference");
  std::vector<Mat> out(h.mats().begin(), h.mats().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= g[i];
  return TangentField(h.manifold_ptr(), std::move(out));
}

}  // namespace metricspace
