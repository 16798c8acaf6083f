#include "metricspace/geodesics.hpp"

#include "metricspace/connection.hpp"
#include "metricspace/fiber.hpp"
#include "metricspace/metrics.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace metricspace {

namespace {

constexpr double kPi = std::numbers::pi;

// cos u + (q/b0) sin u: square root of the density factor at A = 0 points.
double conformal_factor(double q, double b0, double u) {
  return std::cos(u) + (q / b0) * std::sin(u);
}

double density_factor(const GeodesicNormalForm& nf, std::size_t i, double t) {
  if (nf.b0 == 0.0) return 1.0;
  const double u = 0.5 * nf.b0 * t;
  const double s = conformal_factor(nf.q[i], nf.b0, u);
  const double w = nf.r[i] / nf.b0 * std::sin(u);
  return s * s + w * w;
}

}  // namespace

GeodesicNormalForm normal_form(const MetricField& g0, const TangentField& h0) {
  require_same_manifold(g0.manifold(), h0.manifold(), "normal_form");
  const auto& man = g0.manifold();
  const std::size_t count = g0.size();
  GeodesicNormalForm nf;
  nf.n = g0.dim();
  const double n = nf.n;
  nf.volume0 = total_volume(g0);
  nf.sigma = norm(1.0, g0, h0);
  nf.f.resize(count);
  nf.q.resize(count);
  nf.r.resize(count);
  nf.theta.assign(count, std::numeric_limits<double>::quiet_NaN());
  nf.A.resize(count);
  nf.cases.resize(count);

  for (std::size_t i = 0; i < count; ++i) {
    const auto split = trace_split(g0[i], h0[i]);
    nf.f[i] = split.trace;
    nf.A[i] = split.traceless;
    const Mat e = spd_inverse(g0[i]) * split.traceless;
    nf.r[i] = std::sqrt(std::max(0.0, 0.25 * n * (e * e).trace()));
  }
  nf.a0 = integrate(man, DensityField(nf.f), g0) / nf.volume0;
  std::vector<double> qr2(count);
  for (std::size_t i = 0; i < count; ++i) {
    nf.q[i] = 0.5 * (nf.f[i] - nf.a0);
    qr2[i] = nf.q[i] * nf.q[i] + nf.r[i] * nf.r[i];
  }
  // Equal to (n sigma^2 - a0^2)/4 but free of cancellation.
  const double b02 = integrate(man, DensityField(qr2), g0) / nf.volume0;
  nf.b0 = std::sqrt(std::max(0.0, b02));

  const double scale = std::max({std::abs(nf.a0), nf.sigma, 1e-300});
  if (nf.b0 <= 1e-14 * scale) nf.b0 = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (nf.b0 == 0.0) {
      nf.cases[i] = PointCase::ConformalRay;
      continue;
    }
    nf.cases[i] = nf.r[i] <= kTracelessZeroTol * scale ? PointCase::PureConformal
                                                        : PointCase::Generic;
    const double q2 = nf.q[i] * nf.q[i];
    const double b2 = nf.b0 * nf.b0;
    const double c = std::clamp((q2 - b2) / (q2 + b2), -1.0, 1.0);
    nf.theta[i] = nf.q[i] >= 0.0 ? 2.0 * kPi - std::acos(c) : std::acos(c);
  }
  return nf;
}

double density_ratio(const GeodesicNormalForm& nf, std::size_t i, double t) {
  return density_factor(nf, i, t) * std::exp(0.5 * nf.a0 * t);
}

double unwound_angle(const GeodesicNormalForm& nf, std::size_t i, double t) {
  if (nf.cases[i] != PointCase::Generic) return 0.0;
  const double u = 0.5 * nf.b0 * t;
  const double k = std::floor(u / kPi);
  const double up = u - k * kPi;
  return k * kPi + std::atan2(nf.r[i] * std::sin(up),
                              nf.b0 * std::cos(up) + nf.q[i] * std::sin(up));
}

long branch_index(const GeodesicNormalForm& nf, std::size_t i, double t) {
  if (nf.b0 == 0.0) return 0;
  return static_cast<long>(std::ceil((nf.b0 * t - nf.theta[i]) / (2.0 * kPi)));
}

double zero_time_from_theta(const GeodesicNormalForm& nf, std::size_t i) {
  if (nf.b0 == 0.0) return std::numeric_limits<double>::infinity();
  return nf.theta[i] / nf.b0;
}

double blowup_time(const GeodesicNormalForm& nf) {
  double t0 = std::numeric_limits<double>::infinity();
  if (nf.b0 == 0.0) return t0;
  for (std::size_t i = 0; i < nf.cases.size(); ++i) {
    if (nf.cases[i] != PointCase::PureConformal) continue;
    const double q = nf.q[i];
    const double b0 = nf.b0;
    auto s = [q, b0](double u) { return conformal_factor(q, b0, u); };
    // s(0) = 1 and s(pi) = -1, so [0, pi] always brackets the first zero.
    std::uintmax_t iters = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        s, 0.0, kPi, 1.0, -1.0, boost::math::tools::eps_tolerance<double>(53), iters);
    t0 = std::min(t0, (lo + hi) / b0);  // u = b0 t / 2
  }
  return t0;
}

MetricField geodesic_eval(const GeodesicNormalForm& nf, const MetricField& g0, double t) {
  if (nf.A.size() != g0.size()) throw InputError("geodesic_eval: normal form / field mismatch");
  if (!(t >= 0.0)) throw InputError("geodesic_eval: t must be nonnegative");
  const double t0 = blowup_time(nf);
  if (!(t < t0)) {
    std::ostringstream os;
    os << "geodesic_eval: t = " << t << " outside the domain [0, " << t0 << ")";
    throw InputError(os.str());
  }
  const double n = nf.n;
  std::vector<Mat> out(g0.size());
  for (std::size_t i = 0; i < g0.size(); ++i) {
    const double conf = std::pow(density_factor(nf, i, t), 2.0 / n) * std::exp(nf.a0 * t / n);
    if (nf.cases[i] != PointCase::Generic) {
      out[i] = conf * g0[i];
      continue;
    }
    const double phi = unwound_angle(nf, i, t);
    const long k = branch_index(nf, i, t);
    const double lo = kPi * static_cast<double>(k) - 0.5 * kPi;
    const double hi = lo + kPi;
    const double slack = 1e-9 * std::max(1.0, std::abs(phi));
    if (phi < lo - slack || phi > hi + slack) {
      std::ostringstream os;
      os << "geodesic_eval: branch bookkeeping failed at point " << i << ", t = " << t
         << " (angle " << phi << " outside [" << lo << ", " << hi << "])";
      throw NumericalError(os.str());
    }
    out[i] = conf * push_exponential(g0[i], nf.A[i], 2.0 * phi / nf.r[i]);
  }
  return MetricField(g0.manifold_ptr(), std::move(out), 0.0);
}

TangentField geodesic_rhs(double p, const MetricField& g, const TangentField& gt) {
  return connection(p, g, gt, gt) * -1.0;
}

namespace {

struct State {
  std::vector<Mat> g;
  std::vector<Mat> v;
};

MetricField as_metric(const ManifoldPtr& man, const std::vector<Mat>& g, double t) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    Eigen::LLT<Mat> llt(g[i]);
    if (llt.info() != Eigen::Success || !g[i].allFinite()) {
      std::ostringstream os;
      os << "integrate_geodesic: metric left the SPD cone at t = " << t << ", point " << i;
      throw NumericalError(os.str());
    }
  }
  return MetricField(man, g, 0.0);
}

State axpy(const State& s, double h, const State& k) {
  State out = s;
  for (std::size_t i = 0; i < s.g.size(); ++i) {
    out.g[i] = symmetrize(out.g[i] + h * k.g[i]);
    out.v[i] = symmetrize(out.v[i] + h * k.v[i]);
  }
  return out;
}

// A step moving some fiber by a large fraction of itself means the solution is
// near a zero of the density; RK4 would step across it without noticing.
constexpr double kMaxRelativeStep = 0.5;

void require_resolved(const State& s, double h, double t) {
  for (std::size_t i = 0; i < s.g.size(); ++i) {
    const Mat li = spd_inv_sqrt(s.g[i]);
    const double rel = h * (li * s.v[i] * li).cwiseAbs().rowwise().sum().maxCoeff();
    if (rel > kMaxRelativeStep) {
      std::ostringstream os;
      os << "integrate_geodesic: step no longer resolves the solution at t = " << t << ", point "
         << i << " (relative change " << rel << "); the density is collapsing";
      throw NumericalError(os.str());
    }
  }
}

State derivative(double p, const ManifoldPtr& man, const State& s, double t) {
  const MetricField g = as_metric(man, s.g, t);
  const TangentField v(man, s.v);
  const TangentField a = geodesic_rhs(p, g, v);
  return State{s.v, std::vector<Mat>(a.mats().begin(), a.mats().end())};
}

}  // namespace

PathPolyline integrate_geodesic(double p, const MetricField& g0, const TangentField& h0,
                                double t_max, double dt, int record_every) {
  require_same_manifold(g0.manifold(), h0.manifold(), "integrate_geodesic");
  if (!(dt > 0.0) || !(t_max >= 0.0) || !std::isfinite(t_max)) {
    throw InputError("integrate_geodesic: need dt > 0 and finite t_max >= 0");
  }
  if (record_every < 1) throw InputError("integrate_geodesic: record_every must be >= 1");
  const auto& man = g0.manifold_ptr();
  const long steps = std::max(1L, static_cast<long>(std::ceil(t_max / dt - 1e-9)));
  const double h = t_max / static_cast<double>(steps);

  PathPolyline path;
  path.p = p;
  State s{std::vector<Mat>(g0.mats().begin(), g0.mats().end()),
          std::vector<Mat>(h0.mats().begin(), h0.mats().end())};
  path.times.push_back(0.0);
  path.fields.push_back(g0);
  path.velocities.push_back(h0);
  if (t_max == 0.0) return path;

  for (long j = 0; j < steps; ++j) {
    const double t = h * static_cast<double>(j);
    require_resolved(s, h, t);
    const State k1 = derivative(p, man, s, t);
    const State k2 = derivative(p, man, axpy(s, 0.5 * h, k1), t + 0.5 * h);
    const State k3 = derivative(p, man, axpy(s, 0.5 * h, k2), t + 0.5 * h);
    const State k4 = derivative(p, man, axpy(s, h, k3), t + h);
    for (std::size_t i = 0; i < s.g.size(); ++i) {
      s.g[i] = symmetrize(s.g[i] + (h / 6.0) * (k1.g[i] + 2.0 * k2.g[i] + 2.0 * k3.g[i] + k4.g[i]));
      s.v[i] = symmetrize(s.v[i] + (h / 6.0) * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]));
    }
    const long done = j + 1;
    const double tn = h * static_cast<double>(done);
    const MetricField gn = as_metric(man, s.g, tn);
    if (done % record_every == 0 || done == steps) {
      path.times.push_back(tn);
      path.fields.push_back(gn);
      path.velocities.emplace_back(man, s.v);
    }
  }
  return path;
}

double geodesic_residual(double p, const PathPolyline& path) {
  path.validate();
  const std::size_t m = path.size();
  if (m < 3) throw InputError("geodesic_residual: need at least 3 samples");
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t j = 1; j + 1 < m; ++j) {
    const double hm = path.times[j] - path.times[j - 1];
    const double hp = path.times[j + 1] - path.times[j];
    const auto& g = path.fields[j];
    const TangentField vel = path.velocities.empty()
                                 ? (difference(path.fields[j + 1], path.fields[j - 1]) *
                                    (1.0 / (hm + hp)))
                                 : path.velocities[j];
    const TangentField rhs = geodesic_rhs(p, g, vel);
    // fourth-order stencil where five equally spaced samples are available
    bool wide = j >= 2 && j + 2 < m;
    if (wide) {
      const double h2m = path.times[j - 1] - path.times[j - 2];
      const double h2p = path.times[j + 2] - path.times[j + 1];
      const double tol = 1e-9 * hp;
      wide = std::abs(hm - hp) <= tol && std::abs(h2m - hp) <= tol && std::abs(h2p - hp) <= tol;
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      Mat d2;
      if (wide) {
        const auto& f = path.fields;
        d2 = (-f[j + 2][i] + 16.0 * f[j + 1][i] - 30.0 * g[i] + 16.0 * f[j - 1][i] - f[j - 2][i]) /
             (12.0 * hp * hp);
      } else {
        d2 = 2.0 * ((path.fields[j + 1][i] - g[i]) / hp - (g[i] - path.fields[j - 1][i]) / hm) /
             (hm + hp);
      }
      worst = std::max(worst, (d2 - rhs[i]).norm());
      const Mat gi = spd_inverse(g[i]);
      scale = std::max({scale, rhs[i].norm(), (vel[i] * gi * vel[i]).norm()});
    }
  }
  if (scale == 0.0) return worst == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return worst / scale;
}

QuadraticFit fit_quadratic(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 3) throw InputError("fit_quadratic: need >= 3 points");
  const auto m = static_cast<Eigen::Index>(t.size());
  double tc = 0.0;
  for (double x : t) tc += x;
  tc /= static_cast<double>(m);
  Eigen::MatrixXd a(m, 3);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = t[static_cast<std::size_t>(i)] - tc;
    a(i, 0) = x * x;
    a(i, 1) = x;
    a(i, 2) = 1.0;
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  QuadraticFit fit;
  // expand around t = 0
  fit.c2 = c(0);
  fit.c1 = c(1) - 2.0 * c(0) * tc;
  fit.c0 = c(2) - c(1) * tc + c(0) * tc * tc;
  const Eigen::VectorXd res = a * c - b;
  fit.max_residual = res.cwiseAbs().maxCoeff();
  return fit;
}

MotionReport motion_constants(const PathPolyline& path, double residual_tol) {
  path.validate();
  if (path.velocities.empty()) throw InputError("motion_constants: path has no velocities");
  if (path.size() < 3) throw InputError("motion_constants: need at least 3 samples");
  const double residual = geodesic_residual(path.p, path);
  if (!(residual <= residual_tol)) {
    std::ostringstream os;
    os << "motion_constants: path is not a geodesic of g_" << path.p << " (relative residual "
       << residual << " > " << residual_tol << ")";
    throw InputError(os.str());
  }
  MotionReport rep;
  rep.p = path.p;
  rep.n = path.fields[0].dim();
  const double p = path.p;
  const std::size_t m = path.size();
  std::vector<double> speeds(m), logv(m), vpow(m), cs(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& g = path.fields[j];
    const auto& v = path.velocities[j];
    const double vol = total_volume(g);
    std::vector<double> tr(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) tr[i] = trace_with(spd_inverse(g[i]), v[i]);
    const double c = std::pow(vol, -p) * integrate(g.manifold(), DensityField(std::move(tr)), g);
    rep.samples.push_back({path.times[j], vol, c});
    speeds[j] = inner(p, g, v, v);
    logv[j] = std::log(vol);
    vpow[j] = std::pow(vol, 1.0 - p);
    cs[j] = c;
  }
  double mean = 0.0;
  for (double s : speeds) mean += s;
  mean /= static_cast<double>(m);
  rep.speed2 = mean;
  for (double s : speeds) {
    rep.speed2_drift = std::max(rep.speed2_drift, std::abs(s - mean) / std::max(mean, 1e-300));
  }
  for (std::size_t j = 1; j + 1 < m; ++j) {
    rep.fd_slopes.push_back((cs[j + 1] - cs[j - 1]) / (path.times[j + 1] - path.times[j - 1]));
  }
  {
    double tm = 0.0, cm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      tm += path.times[j];
      cm += cs[j];
    }
    tm /= static_cast<double>(m);
    cm /= static_cast<double>(m);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      num += (path.times[j] - tm) * (cs[j] - cm);
      den += (path.times[j] - tm) * (path.times[j] - tm);
    }
    rep.fitted_slope = num / den;
  }
  rep.expected_slope = rep.n / 4.0 * (1.0 - p) * rep.speed2;
  const double t0 = path.times.front();
  const double t1 = path.times.back();
  for (std::size_t j = 0; j < m; ++j) {
    const double secant =
        logv.front() + (logv.back() - logv.front()) * (path.times[j] - t0) / (t1 - t0);
    rep.log_volume_deviation = std::max(rep.log_volume_deviation, std::abs(logv[j] - secant));
  }
  if (p != 1.0) {
    rep.volume_power = fit_quadratic(path.times, vpow);
    rep.expected_volume_power_c2 = rep.n / 16.0 * (1.0 - p) * (1.0 - p) * rep.speed2;
  }
  return rep;
}

}  // namespace metricspace
