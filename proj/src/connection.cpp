#include "metricspace/connection.hpp"

#include "metricspace/geodesics.hpp"
#include "metricspace/metrics.hpp"

#include <cmath>
#include <sstream>

namespace metricspace {

TangentField connection(double p, const MetricField& g, const TangentField& h,
                        const TangentField& k) {
  require_same_manifold(g.manifold(), h.manifold(), "connection");
  require_same_manifold(g.manifold(), k.manifold(), "connection");
  const auto& man = g.manifold();
  const std::size_t count = g.size();

  std::vector<Mat> gi(count);
  std::vector<double> th(count), tk(count), thk(count);
  for (std::size_t i = 0; i < count; ++i) {
    gi[i] = spd_inverse(g[i]);
    th[i] = trace_with(gi[i], h[i]);
    tk[i] = trace_with(gi[i], k[i]);
    thk[i] = (gi[i] * h[i] * gi[i] * k[i]).trace();
  }

  double ngh = 0.0, ngk = 0.0, nhk = 0.0;
  if (p != 0.0) {
    const double v = total_volume(g);
    ngh = integrate(man, DensityField(th), g) / v;
    ngk = integrate(man, DensityField(tk), g) / v;
    nhk = integrate(man, DensityField(thk), g) / v;
  }

  std::vector<Mat> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Mat hk = h[i] * gi[i] * k[i];
    Mat r = -0.5 * (hk + hk.transpose());
    r += 0.25 * (tk[i] * h[i] + th[i] * k[i] - thk[i] * g[i]);
    if (p != 0.0) r += 0.25 * p * (-ngh * k[i] - ngk * h[i] + nhk * g[i]);
    out[i] = symmetrize(r);
  }
  return TangentField(g.manifold_ptr(), std::move(out));
}

TangentField connection_tautological(double p, const MetricField& g, const TangentField& h) {
  return connection(p, g, h, TangentField::from_metric(g)) + h;
}

std::vector<HessianSample> hessian_scalar(double p, VolumeFunctional functional,
                                          const PathPolyline& path, double residual_tol) {
  path.validate();
  const std::size_t m = path.size();
  if (m < 5) throw InputError("hessian_scalar: need at least 5 samples");
  const double dt = path.times[1] - path.times[0];
  for (std::size_t i = 1; i < m; ++i) {
    const double step = path.times[i] - path.times[i - 1];
    if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
      throw InputError("hessian_scalar: time steps must be uniform");
    }
  }
  if (functional == VolumeFunctional::VolumePower && p == 1.0) {
    throw InputError("hessian_scalar: V^{1-p} is constant for p = 1; use log V");
  }
  const double residual = geodesic_residual(p, path);
  if (!(residual <= residual_tol)) {
    std::ostringstream os;
    os << "hessian_scalar: path is not a geodesic of g_" << p << " (relative residual "
       << residual << " > " << residual_tol << ")";
    throw InputError(os.str());
  }

  std::vector<double> phi(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double v = total_volume(path.fields[i]);
    phi[i] = functional == VolumeFunctional::LogVolume ? std::log(v) : std::pow(v, 1.0 - p);
  }
  const double n = path.fields[0].dim();
  std::vector<HessianSample> out;
  for (std::size_t i = 2; i + 2 < m; ++i) {
    const double d2 = (-phi[i - 2] + 16.0 * phi[i - 1] - 30.0 * phi[i] + 16.0 * phi[i + 1] -
                       phi[i + 2]) /
                      (12.0 * dt * dt);
    double expected = 0.0;
    if (functional == VolumeFunctional::VolumePower) {
      const TangentField vel = path.velocities.empty()
                                   ? difference(path.fields[i + 1], path.fields[i - 1]) *
                                         (0.5 / dt)
                                   : path.velocities[i];
      expected = n * (1.0 - p) * (1.0 - p) / 8.0 * inner(p, path.fields[i], vel, vel);
    }
    out.push_back({path.times[i], d2, expected});
  }
  return out;
}

}  // namespace metricspace
