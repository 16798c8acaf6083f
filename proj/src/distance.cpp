#include "metricspace/distance.hpp"

#include "lbfgs.hpp"
#include "metricspace/fiber.hpp"
#include "metricspace/metrics.hpp"
#include "metricspace/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace metricspace {

double path_length(double p, const PathPolyline& path) {
  path.validate();
  if (path.size() < 2) throw InputError("path_length: need at least 2 samples");
  const auto& man = path.fields[0].manifold_ptr();
  const auto rule = detail::gauss_legendre_unit(8);
  std::vector<double> seg(path.size() - 1);
  for (std::size_t j = 0; j + 1 < path.size(); ++j) {
    const auto& a = path.fields[j];
    const auto& b = path.fields[j + 1];
    const TangentField d = difference(b, a);
    double len = 0.0;
    for (const auto& [x, w] : rule) {
      std::vector<Mat> at(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) at[i] = (1.0 - x) * a[i] + x * b[i];
      len += w * norm(p, MetricField(man, std::move(at), 0.0), d);
    }
    seg[j] = len;
  }
  return pairwise_sum(seg);
}

PathPolyline straight_path(double p, const MetricField& g, const MetricField& h, int segments) {
  require_same_manifold(g.manifold(), h.manifold(), "straight_path");
  if (segments < 1) throw InputError("straight_path: need at least one segment");
  PathPolyline path;
  path.p = p;
  for (int j = 0; j <= segments; ++j) {
    const double t = static_cast<double>(j) / segments;
    std::vector<Mat> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = (1.0 - t) * g[i] + t * h[i];
    path.times.push_back(t);
    path.fields.emplace_back(g.manifold_ptr(), std::move(f), 0.0);
  }
  return path;
}

PathPolyline conformal_ray_path(double p, const MetricField& g, double c, int segments) {
  if (!(c > 0.0)) throw InputError("conformal_ray_path: factor must be positive");
  if (segments < 1) throw InputError("conformal_ray_path: need at least one segment");
  PathPolyline path;
  path.p = p;
  for (int j = 0; j <= segments; ++j) {
    const double t = static_cast<double>(j) / segments;
    path.times.push_back(t);
    path.fields.push_back(g.scaled(std::pow(c, t)));
  }
  return path;
}

double conformal_ray_length(double p, const MetricField& g, double c) {
  if (!(c > 0.0)) throw InputError("conformal_ray_length: factor must be positive");
  const double n = g.dim();
  if (p == 1.0) return std::sqrt(n) * std::abs(std::log(c));
  const double v = total_volume(g);
  const double e = 0.5 * (1.0 - p);
  const double vc = std::pow(c, 0.5 * n) * v;
  return 4.0 / (std::abs(1.0 - p) * std::sqrt(n)) * std::abs(std::pow(vc, e) - std::pow(v, e));
}

double volume_lower_bound(double p, const MetricField& g, const MetricField& h) {
  require_same_manifold(g.manifold(), h.manifold(), "volume_lower_bound");
  const double n = g.dim();
  const double vg = total_volume(g);
  const double vh = total_volume(h);
  if (p == 1.0) return 2.0 / std::sqrt(n) * std::abs(std::log(vh / vg));
  const double e = 0.5 * (1.0 - p);
  return 4.0 / (std::abs(1.0 - p) * std::sqrt(n)) * std::abs(std::pow(vh, e) - std::pow(vg, e));
}

double upper_bound_constant(double p, int n) {
  if (p == 1.0) throw InputError("upper_bound_constant: no constant exists for p = 1");
  if (n < 1) throw InputError("upper_bound_constant: n must be positive");
  const double dn = n;
  if (p > 1.0) return upper_bound_constant(2.0 - p, n);
  if (p <= 0.0) return n <= 3 ? 4.0 / std::sqrt(dn) : std::sqrt(dn);
  return 4.0 / ((1.0 - p) * std::sqrt(dn));
}

double cutoff_upper_bound(double p, const MetricField& g, const MetricField& h,
                          const std::vector<std::size_t>& support) {
  const double c = upper_bound_constant(p, g.dim());
  const double vg = total_volume(g);
  const double vh = total_volume(h);
  return c * (std::pow(vg, -0.5 * p) * std::sqrt(subset_volume(g, support)) +
              std::pow(vh, -0.5 * p) * std::sqrt(subset_volume(h, support)));
}

double diameter_bound(double p, int n, double v) {
  if (!(v > 0.0)) throw InputError("diameter_bound: v must be positive");
  return 2.0 * upper_bound_constant(p, n) * std::pow(v, 0.5 * (1.0 - p));
}

std::vector<std::size_t> support_of_difference(const MetricField& g, const MetricField& h) {
  require_same_manifold(g.manifold(), h.manifold(), "support_of_difference");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if ((g[i] - h[i]).cwiseAbs().maxCoeff() > 0.0) out.push_back(i);
  }
  return out;
}

CutoffSpec default_cutoff(const MetricField& g, const MetricField& h, double s) {
  CutoffSpec c;
  c.E = support_of_difference(g, h);
  c.F = c.E;
  c.s = s;
  return c;
}

CutoffPath cutoff_path(double p, const MetricField& g, const MetricField& h,
                           const CutoffSpec& cutoff, int samples) {
  require_same_manifold(g.manifold(), h.manifold(), "cutoff_path");
  if (!(cutoff.s > 0.0 && cutoff.s <= 1.0)) throw InputError("cutoff_path: s must lie in (0, 1]");
  if (samples < 2) throw InputError("cutoff_path: need at least 2 samples");
  const std::size_t count = g.size();
  std::vector<int> role(count, 0);  // 0: outside E, 1: E \ F, 2: F
  for (std::size_t i : cutoff.E) {
    if (i >= count) throw InputError("cutoff_path: cutoff index out of range");
    role[i] = 1;
  }
  for (std::size_t i : cutoff.F) {
    if (i >= count || role[i] == 0) throw InputError("cutoff_path: F must be a subset of E");
    role[i] = 2;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double scale = std::max(g[i].norm(), h[i].norm());
    if (role[i] == 0 && (g[i] - h[i]).norm() > 1e-14 * scale) {
      throw InputError("cutoff_path: g and h differ at point " + std::to_string(i) +
                       " outside E");
    }
  }
  std::vector<double> f(count);
  for (std::size_t i = 0; i < count; ++i) {
    f[i] = role[i] == 2 ? cutoff.s : role[i] == 1 ? std::sqrt(cutoff.s) : 1.0;
  }

  // Times at which the factor on F, 1 - t (1 - s), is geometric in s.
  std::vector<double> ts(static_cast<std::size_t>(samples) + 1);
  for (int j = 0; j <= samples; ++j) {
    const double u = static_cast<double>(j) / samples;
    ts[static_cast<std::size_t>(j)] =
        cutoff.s < 1.0 ? (1.0 - std::pow(cutoff.s, u)) / (1.0 - cutoff.s) : u;
  }
  ts.back() = 1.0;

  auto scaled_path = [&](const MetricField& base, bool reverse) {
    PathPolyline path;
    path.p = p;
    const std::size_t m = ts.size();
    for (std::size_t jj = 0; jj < m; ++jj) {
      const std::size_t j = reverse ? m - 1 - jj : jj;
      const double t = ts[j];
      std::vector<Mat> mats(count);
      for (std::size_t i = 0; i < count; ++i) mats[i] = ((1.0 - t) + t * f[i]) * base[i];
      path.times.push_back(reverse ? 1.0 - t : t);
      path.fields.emplace_back(base.manifold_ptr(), std::move(mats), 0.0);
    }
    return path;
  };

  CutoffPath out;
  out.shrink = scaled_path(g, false);
  out.grow = scaled_path(h, true);
  out.cross.p = p;
  for (int j = 0; j <= samples; ++j) {
    const double t = static_cast<double>(j) / samples;
    std::vector<Mat> mats(count);
    for (std::size_t i = 0; i < count; ++i) mats[i] = f[i] * ((1.0 - t) * g[i] + t * h[i]);
    out.cross.times.push_back(t);
    out.cross.fields.emplace_back(g.manifold_ptr(), std::move(mats), 0.0);
  }
  out.shrink_length = path_length(p, out.shrink);
  out.cross_length = path_length(p, out.cross);
  out.grow_length = path_length(p, out.grow);
  return out;
}

OptimizedPath optimize_path(double p, const MetricField& g, const MetricField& h,
                            const PathOptimizeOptions& opt) {
  require_same_manifold(g.manifold(), h.manifold(), "optimize_path");
  if (opt.segments < 2) throw InputError("optimize_path: need at least 2 segments");
  const auto& man = g.manifold_ptr();
  const std::size_t count = g.size();
  const int n = g.dim();
  const int m = opt.segments;
  const Eigen::Index k = detail::packed_size(n);
  const Eigen::Index per_node = k * static_cast<Eigen::Index>(count);
  const Eigen::Index nvar = per_node * (m - 1);

  // Start from the pointwise affine-invariant geodesic and use its nodes as
  // the per-variable scaling.
  std::vector<double> ref_diag(count);
  std::vector<std::vector<Mat>> scale(static_cast<std::size_t>(m + 1), std::vector<Mat>(count));
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::LLT<Mat> lr(man->reference(i));
    ref_diag[i] = lr.matrixLLT().diagonal().prod();
    const Mat gh = spd_sqrt(g[i]);
    const Mat gih = spd_inv_sqrt(g[i]);
    const Mat rel = symmetrize(gih * h[i] * gih);
    for (int j = 0; j <= m; ++j) {
      const double tau = static_cast<double>(j) / m;
      const Mat pj =
          symmetrize(gh * sym_function(rel, [tau](double x) { return std::pow(x, tau); }) * gh);
      scale[static_cast<std::size_t>(j)][i] = spd_sqrt(pj);
    }
  }

  auto nodes_of = [&](const Eigen::VectorXd& y) {
    std::vector<std::vector<Mat>> x(static_cast<std::size_t>(m + 1), std::vector<Mat>(count));
    for (std::size_t i = 0; i < count; ++i) {
      x.front()[i] = g[i];
      x.back()[i] = h[i];
    }
    for (int j = 1; j < m; ++j) {
      for (std::size_t i = 0; i < count; ++i) {
        const Mat& s = scale[static_cast<std::size_t>(j)][i];
        const Eigen::Index off = per_node * (j - 1) + k * static_cast<Eigen::Index>(i);
        x[static_cast<std::size_t>(j)][i] = symmetrize(s * detail::unpack_sym(y, off, n) * s);
      }
    }
    return x;
  };

  const detail::Objective objective = [&](const Eigen::VectorXd& y, double& f,
                                          Eigen::VectorXd& grad) {
    const auto x = nodes_of(y);
    std::vector<std::vector<Mat>> gx(static_cast<std::size_t>(m + 1),
                                     std::vector<Mat>(count, Mat::Zero(n, n)));
    std::vector<double> seg_energy(static_cast<std::size_t>(m));
    std::vector<Mat> mi(count), pm(count);
    std::vector<double> wr(count), tr(count);
    for (int j = 0; j < m; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      double s_sum = 0.0, v_sum = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        const Mat mid = 0.5 * (x[ju][i] + x[ju + 1][i]);
        const Mat d = x[ju + 1][i] - x[ju][i];
        Eigen::LLT<Mat> llt(mid);
        if (llt.info() != Eigen::Success) return false;
        const double diag = llt.matrixLLT().diagonal().prod();
        if (!(diag > 0.0)) return false;
        wr[i] = man->weight(i) * diag / ref_diag[i];
        mi[i] = llt.solve(Mat::Identity(n, n));
        pm[i] = mi[i] * d * mi[i];
        tr[i] = (pm[i] * d).trace();
        s_sum += wr[i] * tr[i];
        v_sum += wr[i];
      }
      const double vp = p == 0.0 ? 1.0 : std::pow(v_sum, -p);
      seg_energy[ju] = m * vp * s_sum;
      for (std::size_t i = 0; i < count; ++i) {
        const Mat d = x[ju + 1][i] - x[ju][i];
        Mat gm = vp * wr[i] * (-2.0 * pm[i] * d * mi[i] + 0.5 * tr[i] * mi[i]);
        if (p != 0.0) gm -= p * vp / v_sum * s_sum * wr[i] * 0.5 * mi[i];
        const Mat gd = 2.0 * vp * wr[i] * pm[i];
        gx[ju][i] += m * symmetrize(-gd + 0.5 * gm);
        gx[ju + 1][i] += m * symmetrize(gd + 0.5 * gm);
      }
    }
    f = pairwise_sum(seg_energy);
    grad.resize(nvar);
    for (int j = 1; j < m; ++j) {
      for (std::size_t i = 0; i < count; ++i) {
        const Mat& s = scale[static_cast<std::size_t>(j)][i];
        const Eigen::Index off = per_node * (j - 1) + k * static_cast<Eigen::Index>(i);
        detail::pack_sym(symmetrize(s * gx[static_cast<std::size_t>(j)][i] * s), grad, off);
      }
    }
    return std::isfinite(f);
  };

  Eigen::VectorXd y0(nvar);
  for (int j = 1; j < m; ++j) {
    for (std::size_t i = 0; i < count; ++i) {
      detail::pack_sym(identity(n), y0, per_node * (j - 1) + k * static_cast<Eigen::Index>(i));
    }
  }
  detail::LbfgsOptions lo;
  lo.max_iter = opt.max_iter;
  lo.grad_tol = opt.grad_tol;
  const auto res = detail::lbfgs_minimize(objective, y0, lo);
  if (!res.converged) {
    std::ostringstream os;
    os << "optimize_path: optimizer did not converge after " << res.iterations
       << " iterations (gradient norm " << res.grad_norm << ")";
    throw NumericalError(os.str());
  }

  OptimizedPath out;
  out.path.p = p;
  const auto x = nodes_of(res.x);
  for (int j = 0; j <= m; ++j) {
    out.path.times.push_back(static_cast<double>(j) / m);
    out.path.fields.emplace_back(man, x[static_cast<std::size_t>(j)], 0.0);
  }
  out.length = path_length(p, out.path);
  out.energy = res.f;
  out.iterations = res.iterations;
  return out;
}

double omega2(const MetricField& g, const MetricField& h, int segments) {
  require_same_manifold(g.manifold(), h.manifold(), "omega2");
  const auto& man = g.manifold();
  std::vector<double> terms(g.size());
  parallel_for(g.size(), [&](std::size_t i) {
    double d = 0.0;
    try {
      d = fiber_distance(g[i], h[i], man.reference(i), segments);
    } catch (const NumericalError& e) {
      throw NumericalError("omega2: point " + std::to_string(i) + ": " + e.what());
    }
    terms[i] = man.weight(i) * d * d;
  });
  return std::sqrt(pairwise_sum(terms));
}

namespace {

// c with h = c g, if there is one.
bool conformal_factor_between(const MetricField& g, const MetricField& h, double& c) {
  c = trace_with(spd_inverse(g[0]), h[0]) / g.dim();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if ((h[i] - c * g[i]).norm() > 1e-12 * h[i].norm()) return false;
  }
  return c > 0.0;
}

}  // namespace

DistanceReport distance_estimate(double p, const MetricField& g, const MetricField& h,
                                 const DistanceOptions& opt) {
  DistanceReport rep;
  rep.lower = volume_lower_bound(p, g, h);
  rep.candidates.push_back(
      {"straight", path_length(p, straight_path(p, g, h, opt.straight_segments))});
  double c = 0.0;
  if (conformal_factor_between(g, h, c)) {
    rep.candidates.push_back({"conformal_ray", conformal_ray_length(p, g, c)});
  }
  if (opt.use_cutoff && !support_of_difference(g, h).empty()) {
    for (double s : {1e-1, 1e-2, 1e-3}) {
      const auto ap = cutoff_path(p, g, h, default_cutoff(g, h, s), 200);
      std::ostringstream name;
      name << "cutoff_s" << s;
      rep.candidates.push_back({name.str(), ap.total()});
    }
  }
  if (opt.use_optimizer && !support_of_difference(g, h).empty()) {
    rep.candidates.push_back({"optimized", optimize_path(p, g, h, opt.optimizer).length});
  }
  rep.upper = std::numeric_limits<double>::infinity();
  for (const auto& cand : rep.candidates) {
    if (cand.length < rep.upper) {
      rep.upper = cand.length;
      rep.best_method = cand.method;
    }
  }
  return rep;
}

namespace {

// g_p length of the conformal ray from volume v to the limit volume (0 for
// collapse, infinity for blowup); infinite when that ray has infinite length.
double tail_to_limit(double p, int n, double v, bool limit_is_zero) {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  const double e = 0.5 * (1.0 - p);
  const bool finite = limit_is_zero ? e > 0.0 : e < 0.0;
  if (!finite) return std::numeric_limits<double>::infinity();
  return 4.0 / (std::abs(1.0 - p) * std::sqrt(static_cast<double>(n))) * std::pow(v, e);
}

}  // namespace

CompletionProbe completion_probe(double p, ProbeMode mode, const MetricField& g, int K,
                                 double cauchy_tol) {
  if (K < 2) throw InputError("completion_probe: need K >= 2");
  CompletionProbe probe;
  probe.p = p;
  probe.mode = mode;
  const int n = g.dim();
  const bool collapse = mode == ProbeMode::Collapse;
  for (int k = 0; k <= K; ++k) {
    const double c = std::pow(4.0, collapse ? -k : k);
    const MetricField hk = g.scaled(c);
    ProbeRow row;
    row.k = k;
    row.factor = c;
    row.volume = total_volume(hk);
    row.lower = volume_lower_bound(p, g, hk);
    row.upper = conformal_ray_length(p, g, c);
    row.tail_upper = tail_to_limit(p, n, row.volume, collapse);
    // Under F the sequence moves to volume 1/V and the exponent to 2 - p.
    const MetricField dual = duality_map(hk);
    row.tail_dual = tail_to_limit(2.0 - p, n, total_volume(dual), !collapse);
    probe.rows.push_back(row);
  }
  double km = 0.0, lm = 0.0;
  for (const auto& r : probe.rows) {
    km += r.k;
    lm += r.lower;
  }
  km /= static_cast<double>(probe.rows.size());
  lm /= static_cast<double>(probe.rows.size());
  double num = 0.0, den = 0.0;
  for (const auto& r : probe.rows) {
    num += (r.k - km) * (r.lower - lm);
    den += (r.k - km) * (r.k - km);
  }
  probe.lower_slope = num / den;

  const auto& last = probe.rows.back();
  const double first_step = probe.rows[1].lower - probe.rows[0].lower;
  const double last_step = last.lower - probe.rows[probe.rows.size() - 2].lower;
  if (std::isfinite(last.tail_upper) && last.tail_upper < cauchy_tol) {
    probe.verdict = ProbeVerdict::Cauchy;
  } else if (!std::isfinite(last.tail_upper) && first_step > 0.0 &&
             last_step >= 0.5 * first_step) {
    probe.verdict = ProbeVerdict::NotCauchy;
  }
  return probe;
}

const char* to_string(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::Cauchy: return "cauchy";
    case ProbeVerdict::NotCauchy: return "not-cauchy";
    default: return "inconclusive";
  }
}

const char* to_string(ProbeMode m) { return m == ProbeMode::Collapse ? "collapse" : "blowup"; }

}  // namespace metricspace
