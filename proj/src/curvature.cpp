#include "metricspace/curvature.hpp"

#include "metricspace/connection.hpp"
#include "metricspace/metrics.hpp"

#include <cmath>
#include <sstream>

namespace metricspace {

double kn_product(const BilinearForm& G, const BilinearForm& H, const TangentField& a,
                  const TangentField& b, const TangentField& c, const TangentField& d) {
  require_same_manifold(a.manifold(), b.manifold(), "kn_product");
  require_same_manifold(a.manifold(), c.manifold(), "kn_product");
  require_same_manifold(a.manifold(), d.manifold(), "kn_product");
  return G(a, c) * H(b, d) + G(b, d) * H(a, c) - G(a, d) * H(b, c) - G(b, c) * H(a, d);
}

PlaneSpec make_plane(double p, const MetricField& g, const TangentField& h,
                     const TangentField& k) {
  const auto basis = orthonormalize(p, g, {h, k});
  return PlaneSpec{p, g, basis[0], basis[1]};
}

double sec_formula(const PlaneSpec& plane, double secE) {
  const double p = plane.p;
  const auto& g = plane.g;
  const double hh = inner(p, g, plane.h, plane.h);
  const double kk = inner(p, g, plane.k, plane.k);
  const double hk = inner(p, g, plane.h, plane.k);
  if (std::abs(hh - 1.0) > 1e-10 || std::abs(kk - 1.0) > 1e-10 || std::abs(hk) > 1e-10) {
    throw InputError("sec_formula: plane basis is not g_p-orthonormal");
  }
  const double v = total_volume(g);
  const double n = g.dim();
  const TangentField gt = TangentField::from_metric(g);
  const double gh = inner(p, g, gt, plane.h);
  const double gk = inner(p, g, gt, plane.k);
  const double w = std::pow(v, 2.0 * p - 2.0);
  return std::pow(v, -p) * secE -
         (2.0 * p - p * p) / 16.0 * (w * gk * gk + w * gh * gh - n * std::pow(v, p - 1.0));
}

namespace {

// R(h,k)k at g with base-point step eps.
TangentField curvature_vector(double p, const MetricField& g, const TangentField& h,
                              const TangentField& k, double eps) {
  const TangentField gkk = connection(p, g, k, k);
  const TangentField ghk = connection(p, g, h, k);
  const TangentField dh = (connection(p, displaced(g, h, eps), k, k) -
                           connection(p, displaced(g, h, -eps), k, k)) *
                          (0.5 / eps);
  const TangentField dk = (connection(p, displaced(g, k, eps), h, k) -
                           connection(p, displaced(g, k, -eps), h, k)) *
                          (0.5 / eps);
  return dh - dk + connection(p, g, h, gkk) - connection(p, g, k, ghk);
}

}  // namespace

CurvatureValue curvature_numeric(double p, const MetricField& g, const TangentField& h,
                                 const TangentField& k, const CurvatureOptions& opt) {
  if (!(opt.eps >= 1e-6 && opt.eps <= 1e-3)) {
    throw InputError("curvature_numeric: eps must lie in [1e-6, 1e-3]");
  }
  const double hh = inner(p, g, h, h);
  const double kk = inner(p, g, k, k);
  const double hk = inner(p, g, h, k);
  CurvatureValue out;
  out.gram = hh * kk - hk * hk;
  if (!(out.gram > 0.0)) throw InputError("curvature_numeric: h and k are dependent");

  const double f1 = inner(p, g, curvature_vector(p, g, h, k, opt.eps), h);
  const double f2 = inner(p, g, curvature_vector(p, g, h, k, 0.5 * opt.eps), h);
  out.form = (4.0 * f2 - f1) / 3.0;
  out.extrapolation_gap = std::abs(f1 - f2);
  out.sectional = out.form / out.gram;
  const double scale = std::max(std::abs(out.form), out.gram * 1e-3);
  if (out.extrapolation_gap > opt.max_relative_gap * scale) {
    std::ostringstream os;
    os << "curvature_numeric: step-size pathology (values " << f1 << " and " << f2
       << " at eps and eps/2)";
    throw NumericalError(os.str());
  }
  return out;
}

}  // namespace metricspace
