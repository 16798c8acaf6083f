#include "metricspace/experiments.hpp"

#include "metricspace/curvature.hpp"
#include "metricspace/distance.hpp"
#include "metricspace/fiber.hpp"
#include "metricspace/geodesics.hpp"
#include "metricspace/io.hpp"
#include "metricspace/metrics.hpp"
#include "metricspace/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace metricspace {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  std::string render(const std::string& format) const {
    std::ostringstream os;
    if (format == "csv") {
      auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
      };
      line(header);
      for (const auto& r : rows) line(r);
      return os.str();
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) {
        width[i] = std::max(width[i], r[i].size());
      }
    }
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        os << (i ? "  " : "") << r[i];
        if (i + 1 < r.size()) os << std::string(width[i] - r[i].size(), ' ');
      }
      os << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
  }
};

struct Suite {
  std::string name;
  std::vector<std::string> statements;
  std::vector<Table> tables;
  std::vector<CheckResult> checks;

  // Passes when value <= threshold.
  void check_le(const std::string& what, double value, double threshold) {
    checks.push_back({what, value <= threshold, value, threshold});
  }
  // Passes when value >= threshold.
  void check_ge(const std::string& what, double value, double threshold) {
    checks.push_back({what, value >= threshold, value, threshold});
  }

  std::string render(const std::string& format) const {
    std::ostringstream os;
    os << "# experiment: " << name << "\n";
    for (const auto& s : statements) os << "# " << s << "\n";
    for (const auto& t : tables) os << t.render(format) << "\n";
    for (const auto& c : checks) {
      os << "# " << (c.pass ? "PASS" : "FAIL") << " " << c.name << " value=" << num(c.value)
         << " threshold=" << num(c.threshold) << "\n";
    }
    return os.str();
  }
};

double tol_or(const ExperimentConfig& cfg, double fallback) {
  return cfg.tol ? *cfg.tol : fallback;
}

MetricField base_field(const ExperimentConfig& cfg) {
  if (!cfg.input.empty()) return read_field_file(cfg.input);
  return generate_fixture(cfg.n, cfg.points, cfg.seed, cfg.spread);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// A tangent vector at g whose size is comparable to g at every point.
TangentField scaled_tangent(Rng& rng, const MetricField& g, double scale) {
  std::vector<Mat> mats(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Mat gh = spd_sqrt(g[i]);
    mats[i] = symmetrize(gh * (scale * rng.symmetric(g.dim())) * gh);
  }
  return TangentField(g.manifold_ptr(), std::move(mats));
}

double max_deviation(const MetricField& a, const MetricField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a[i] - b[i]).norm());
  return worst;
}

// ---------------------------------------------------------------- geodesic

Suite run_geodesic(const ExperimentConfig& cfg) {
  Suite s;
  s.name = "geodesic";
  const double p = cfg.p.value_or(1.0);
  MetricField g0 = base_field(cfg);
  Rng rng(mix(cfg.seed, 101));
  const TangentField h0 = scaled_tangent(rng, g0, 0.4);
  s.statements.push_back("family exponent p = " + num(p));
  s.statements.push_back("c(t) = V^{-p} int tr(g^{-1} g_t) dV has slope (n/4)(1-p)|g_t|_p^2");
  if (p == 1.0) {
    s.statements.push_back("p = 1: log V is affine in t; RK4 matches the closed-form geodesic");
  }

  double t_end = cfg.t_max.value_or(2.0);
  GeodesicNormalForm nf;
  if (p == 1.0) {
    nf = normal_form(g0, h0);
    const double t0 = blowup_time(nf);
    if (!cfg.t_max) t_end = std::min(2.0, 0.9 * t0);
    if (!(t_end < t0)) throw InputError("geodesic: t_max beyond the blow-up time " + num(t0));
  }
  const int every = std::max(1, static_cast<int>(std::lround(0.01 / cfg.dt)));
  const PathPolyline path = integrate_geodesic(p, g0, h0, t_end, cfg.dt, every);
  const MotionReport rep = motion_constants(path);

  Table t;
  t.header = {"t", "V", "logV", "c", "min_density"};
  const auto rho0 = densities(g0);
  double closed_dev = 0.0;
  for (std::size_t j = 0; j < path.size(); ++j) {
    const auto rho = densities(path.fields[j]);
    double md = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rho.size(); ++i) md = std::min(md, rho[i] / rho0[i]);
    t.add({num(path.times[j]), num(rep.samples[j].volume), num(std::log(rep.samples[j].volume)),
           num(rep.samples[j].c), num(md)});
    if (p == 1.0) {
      closed_dev = std::max(closed_dev, max_deviation(geodesic_eval(nf, g0, path.times[j]),
                                                      path.fields[j]));
    }
  }
  s.tables.push_back(std::move(t));

  const double slope_err =
      std::abs(rep.fitted_slope - rep.expected_slope) / std::abs(rep.expected_slope);
  if (p == 1.0) {
    s.check_le("logV_affine_deviation", rep.log_volume_deviation, tol_or(cfg, 1e-8));
    s.check_le("motion_slope_abs_error", std::abs(rep.fitted_slope), 1e-8 * rep.speed2 + 1e-12);
    s.check_le("closed_form_vs_rk4", closed_dev, 1e-6);
  } else {
    s.check_le("motion_slope_rel_error", slope_err, tol_or(cfg, 1e-6));
    const double c2_err = std::abs(rep.volume_power.c2 - rep.expected_volume_power_c2) /
                          std::abs(rep.expected_volume_power_c2);
    s.check_le("volume_power_quadratic_rel_error", c2_err, 1e-6);
  }
  s.check_le("speed_drift", rep.speed2_drift, 1e-8);
  return s;
}

// ---------------------------------------------------------------- ode-compare

Suite run_ode_compare(const ExperimentConfig& cfg) {
  Suite s;
  s.name = "ode-compare";
  s.statements.push_back("closed-form g_1 geodesic vs RK4 on [0, min(t_max, 0.9 t0)]");
  const int count = cfg.count > 0 ? cfg.count : 25;
  const double t_cap = cfg.t_max.value_or(2.0);
  Table t;
  t.header = {"instance", "kind", "a0", "b0", "t0", "t_end", "max_frobenius_dev"};
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const auto inst = make_geodesic_instance(k, cfg.seed, cfg.n, cfg.points);
    const auto nf = normal_form(inst.g0, inst.h0);
    const double t0 = blowup_time(nf);
    const double t_end = std::min(t_cap, 0.9 * t0);
    const PathPolyline path = integrate_geodesic(1.0, inst.g0, inst.h0, t_end, cfg.dt, 10);
    double dev = 0.0;
    for (std::size_t j = 0; j < path.size(); ++j) {
      dev = std::max(dev, max_deviation(geodesic_eval(nf, inst.g0, path.times[j]),
                                        path.fields[j]));
    }
    worst = std::max(worst, dev);
    t.add({std::to_string(k), inst.kind, num(nf.a0), num(nf.b0), num(t0), num(t_end), num(dev)});
  }
  s.tables.push_back(std::move(t));
  s.check_le("max_closed_form_vs_rk4", worst, tol_or(cfg, 1e-6));
  return s;
}

// ---------------------------------------------------------------- curvature

Suite run_curvature(const ExperimentConfig& cfg) {
  Suite s;
  s.name = "curvature";
  s.statements.push_back("sec_p from the conformal-change formula vs finite-difference curvature");
  s.statements.push_back("p = 1 sectional curvature is bounded above by n/16");
  const MetricField g = base_field(cfg);
  const auto& man = g.manifold_ptr();
  const double n = g.dim();
  const double v = total_volume(g);
  const int count = cfg.count > 0 ? cfg.count : 20;
  std::vector<double> ps = cfg.p ? std::vector<double>{*cfg.p}
                                 : std::vector<double>{0.0, 0.5, 1.0, 2.0, 3.0};
  Rng rng(mix(cfg.seed, 202));

  Table t;
  t.header = {"plane", "p", "numeric", "formula", "abs_diff"};
  double worst = 0.0, p1_max = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < count; ++j) {
    const TangentField a = scaled_tangent(rng, g, 1.0);
    const TangentField b = scaled_tangent(rng, g, 1.0);
    for (double p : ps) {
      const PlaneSpec plane = make_plane(p, g, a, b);
      const double secE = curvature_numeric(0.0, g, plane.h, plane.k).form;
      const double numeric = curvature_numeric(p, g, plane.h, plane.k).sectional;
      const double formula = sec_formula(plane, secE);
      worst = std::max(worst, std::abs(numeric - formula));
      if (p == 1.0) p1_max = std::max(p1_max, numeric);
      t.add({std::to_string(j), num(p), num(numeric), num(formula), num(std::abs(numeric - formula))});
    }
    if (std::find(ps.begin(), ps.end(), 1.0) == ps.end()) {
      p1_max = std::max(p1_max, curvature_numeric(1.0, g, a, b).sectional);
    }
  }
  s.tables.push_back(std::move(t));

  // conformal planes
  std::vector<Mat> u1(g.size()), u2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    u1[i] = rng.normal() * g[i];
    u2[i] = rng.normal() * g[i];
  }
  const TangentField c1(man, u1), c2(man, u2);
  const TangentField gt = TangentField::from_metric(g);
  auto strip = [&](const TangentField& x) { return x - gt * (inner(1.0, g, x, gt) / inner(1.0, g, gt, gt)); };
  const double flat = curvature_numeric(0.0, g, c1, c2).sectional;
  const double calabi = curvature_numeric(1.0, g, strip(c1), strip(c2)).sectional;
  const TangentField a = scaled_tangent(rng, g, 1.0);
  const TangentField b = scaled_tangent(rng, g, 1.0);
  const double ratio = curvature_numeric(2.0, g, a, b).form / curvature_numeric(0.0, g, a, b).form;

  Table t2;
  t2.header = {"quantity", "value", "expected"};
  t2.add({"p0_pure_trace_sec", num(flat), "0"});
  t2.add({"p1_volume_preserving_conformal_sec", num(calabi), num(n / 16.0)});
  t2.add({"p2_over_p0_curvature_form", num(ratio), num(1.0 / (v * v))});
  t2.add({"p1_max_sampled_sec", num(p1_max), num(n / 16.0)});
  s.tables.push_back(std::move(t2));

  s.check_le("formula_vs_numeric", worst, tol_or(cfg, 1e-4));
  s.check_le("p0_pure_trace_flat", std::abs(flat), 1e-5);
  s.check_le("p1_conformal_constant_curvature", std::abs(calabi - n / 16.0), 1e-4);
  s.check_le("p2_p0_ratio", std::abs(ratio * v * v - 1.0), 1e-4);
  s.check_le("p1_upper_bound", p1_max, n / 16.0 + 1e-6);
  return s;
}

// ---------------------------------------------------------------- distance

Suite run_distance(const ExperimentConfig& cfg) {
  Suite s;
  s.name = "distance";
  s.statements.push_back("volume lower bound <= best path length; equality on conformal rays");
  s.statements.push_back("p = 0: fiberwise distance Omega_2 equals the optimized whole-field length");
  s.statements.push_back("upper_p1_over_p0: d_1 / d_0 upper-estimate ratio, reported only");
  const MetricField g = base_field(cfg);
  const int count = cfg.count > 0 ? cfg.count : 6;
  std::vector<double> ps = cfg.p ? std::vector<double>{*cfg.p}
                                 : std::vector<double>{0.0, 0.5, 1.0, 2.0};
  std::vector<std::size_t> all(g.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  Table t;
  t.header = {"pair", "p",        "lower",     "upper",    "method",
              "straight", "cutoff", "optimized", "slack"};
  Table ratios;
  ratios.header = {"pair", "V_g", "V_h", "upper_p1_over_p0"};
  double min_slack = std::numeric_limits<double>::infinity();
  double worst_omega = 0.0;
  for (int j = 0; j < count; ++j) {
    const MetricField h = perturbed_field(g, mix(cfg.seed, 300 + static_cast<std::uint64_t>(j)),
                                          0.4, all);
    double upper0 = 0.0, upper1 = 0.0;
    for (double p : ps) {
      DistanceOptions opt;
      const auto rep = distance_estimate(p, g, h, opt);
      const double slack = rep.upper - rep.lower;
      min_slack = std::min(min_slack, slack);
      double straight = 0.0, optimized = 0.0;
      double cutoff = std::numeric_limits<double>::infinity();
      for (const auto& c : rep.candidates) {
        if (c.method == "straight") straight = c.length;
        if (c.method == "optimized") optimized = c.length;
        if (c.method.rfind("cutoff", 0) == 0) cutoff = std::min(cutoff, c.length);
      }
      t.add({std::to_string(j), num(p), num(rep.lower), num(rep.upper), rep.best_method,
             num(straight), num(cutoff), num(optimized), num(slack)});
      if (p == 0.0) upper0 = rep.upper;
      if (p == 1.0) upper1 = rep.upper;
    }
    if (upper0 > 0.0 && upper1 > 0.0) {
      ratios.add({std::to_string(j), num(total_volume(g)), num(total_volume(h)), num(upper1 / upper0)});
    }
    if (j < 3) {
      const double om = omega2(g, h);
      const double opt_len = optimize_path(0.0, g, h).length;
      worst_omega = std::max(worst_omega, std::abs(om - opt_len) / opt_len);
    }
  }
  s.tables.push_back(std::move(t));
  if (!ratios.rows.empty()) s.tables.push_back(std::move(ratios));

  Table rays;
  rays.header = {"p", "c", "ray_length", "lower", "abs_diff"};
  double worst_ray = 0.0;
  Rng rng(mix(cfg.seed, 303));
  for (double p : ps) {
    const double c = std::exp(rng.uniform(-2.0, 2.0));
    const double len = conformal_ray_length(p, g, c);
    const double low = volume_lower_bound(p, g, g.scaled(c));
    const double sampled = path_length(p, conformal_ray_path(p, g, c, 4000));
    worst_ray = std::max({worst_ray, std::abs(len - low), std::abs(sampled - low)});
    rays.add({num(p), num(c), num(len), num(low), num(std::abs(len - low))});
  }
  s.tables.push_back(std::move(rays));

  s.check_ge("sandwich_min_slack", min_slack, -1e-8);
  s.check_le("ray_tightness", worst_ray, 1e-6);
  s.check_le("omega2_vs_optimized_rel", worst_omega, tol_or(cfg, 0.02));
  return s;
}

// ---------------------------------------------------------------- completion

ProbeVerdict expected_verdict(double p, ProbeMode mode) {
  if (p == 1.0) return ProbeVerdict::NotCauchy;
  const bool shrinking_volume_is_close = p < 1.0;
  return (mode == ProbeMode::Collapse) == shrinking_volume_is_close ? ProbeVerdict::Cauchy
                                                                     : ProbeVerdict::NotCauchy;
}

Suite run_completion(const ExperimentConfig& cfg) {
  Suite s;
  s.name = "completion";
  const double p = cfg.p.value_or(1.0);
  ProbeMode mode;
  if (cfg.mode == "collapse") {
    mode = ProbeMode::Collapse;
  } else if (cfg.mode == "blowup") {
    mode = ProbeMode::Blowup;
  } else {
    throw InputError("completion: mode must be collapse or blowup");
  }
  const MetricField g = base_field(cfg);
  const double tol = tol_or(cfg, 1e-5);
  const auto probe = completion_probe(p, mode, g, 20, tol);
  s.statements.push_back("sequence h_k = 4^{" + std::string(mode == ProbeMode::Collapse ? "-k" : "k") +
                         "} g in g_p with p = " + num(p));
  s.statements.push_back("tail_upper: length of the conformal ray from h_k to the limit");
  Table t;
  t.header = {"k", "c_k", "V", "lower", "upper", "tail_upper", "tail_dual"};
  double dual_gap = 0.0;
  for (const auto& r : probe.rows) {
    t.add({std::to_string(r.k), num(r.factor), num(r.volume), num(r.lower), num(r.upper),
           num(r.tail_upper), num(r.tail_dual)});
    if (std::isfinite(r.tail_upper)) {
      dual_gap = std::max(dual_gap, std::abs(r.tail_upper - r.tail_dual) / r.tail_upper);
    } else if (std::isfinite(r.tail_dual)) {
      dual_gap = std::numeric_limits<double>::infinity();
    }
  }
  s.tables.push_back(std::move(t));
  s.statements.push_back(std::string("verdict: ") + to_string(probe.verdict) + " (expected " +
                         to_string(expected_verdict(p, mode)) + ")");
  s.check_le("verdict_matches", probe.verdict == expected_verdict(p, mode) ? 0.0 : 1.0, 0.0);
  s.check_le("duality_tail_agreement", dual_gap, 1e-12);
  return s;
}

// ---------------------------------------------------------------- duality

Suite run_duality(const ExperimentConfig& cfg) {
  Suite s;
  s.name = "duality";
  s.statements.push_back("F(g) = V^{-4/n} g: F(F(g)) = g, V_{F(g)} V_g = 1, F^* g_p = g_{2-p}");
  const int count = cfg.count > 0 ? cfg.count : 100;
  std::vector<double> ps = cfg.p ? std::vector<double>{*cfg.p}
                                 : std::vector<double>{0.0, 0.5, 1.0, 3.0};
  double inv = 0.0, vol = 0.0, pull = 0.0, fd = 0.0;
  for (int j = 0; j < count; ++j) {
    Rng rng(mix(cfg.seed, 400 + static_cast<std::uint64_t>(j)));
    MetricField g = generate_fixture(cfg.n, cfg.points, rng.next(), cfg.spread);
    g = g.scaled(std::exp(rng.uniform(-1.5, 1.5)));
    const TangentField h = scaled_tangent(rng, g, 1.0);
    const TangentField k = scaled_tangent(rng, g, 1.0);
    const MetricField fg = duality_map(g);
    const MetricField ffg = duality_map(fg);
    double scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) scale = std::max(scale, g[i].norm());
    inv = std::max(inv, max_deviation(ffg, g) / scale);
    vol = std::max(vol, std::abs(total_volume(fg) * total_volume(g) - 1.0));
    const TangentField dh = duality_differential(g, h);
    const TangentField dk = duality_differential(g, k);
    for (double p : ps) {
      const double lhs = inner(p, fg, dh, dk);
      const double rhs = inner(2.0 - p, g, h, k);
      const double sc = std::sqrt(inner(2.0 - p, g, h, h) * inner(2.0 - p, g, k, k));
      pull = std::max(pull, std::abs(lhs - rhs) / sc);
    }
    if (j < 10) {
      const double eps = 1e-5;
      const TangentField num_d =
          difference(duality_map(displaced(g, h, eps)), duality_map(displaced(g, h, -eps))) *
          (0.5 / eps);
      double dh_scale = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) dh_scale = std::max(dh_scale, dh[i].norm());
      for (std::size_t i = 0; i < g.size(); ++i) {
        fd = std::max(fd, (num_d[i] - dh[i]).norm() / dh_scale);
      }
    }
  }
  Table t;
  t.header = {"quantity", "max_error"};
  t.add({"F(F(g)) - g (relative)", num(inv)});
  t.add({"V_F(g) * V_g - 1", num(vol)});
  t.add({"pullback identity (relative)", num(pull)});
  t.add({"dF vs central difference (relative)", num(fd)});
  s.tables.push_back(std::move(t));
  s.check_le("involution", inv, 1e-12);
  s.check_le("volume_inversion", vol, 1e-12);
  s.check_le("pullback", pull, tol_or(cfg, 1e-10));
  s.check_le("differential_fd", fd, 1e-8);
  return s;
}

// ---------------------------------------------------------------- verify-all

ExperimentResult run_verify_all(const ExperimentConfig& cfg) {
  std::vector<Suite> suites;
  auto sub = [&](const std::string& name) {
    ExperimentConfig c = cfg;
    c.experiment = name;
    c.tol.reset();
    c.count = 0;
    c.p.reset();
    c.t_max.reset();
    return c;
  };
  {
    auto c = sub("geodesic");
    c.p = 1.0;
    suites.push_back(run_geodesic(c));
    c.p = 0.0;
    c.t_max = 1.0;
    Suite s0 = run_geodesic(c);
    s0.name = "geodesic p=0";
    suites.push_back(std::move(s0));
  }
  {
    auto c = sub("ode-compare");
    c.count = 10;
    suites.push_back(run_ode_compare(c));
  }
  {
    auto c = sub("curvature");
    c.count = 5;
    suites.push_back(run_curvature(c));
  }
  {
    auto c = sub("distance");
    c.count = 3;
    suites.push_back(run_distance(c));
  }
  for (const auto& [p, mode] : std::vector<std::pair<double, std::string>>{
           {0.0, "collapse"}, {1.0, "collapse"}, {2.0, "blowup"}}) {
    auto c = sub("completion");
    c.p = p;
    c.mode = mode;
    Suite s = run_completion(c);
    s.name = "completion p=" + num(p) + " " + mode;
    suites.push_back(std::move(s));
  }
  {
    auto c = sub("duality");
    c.count = 20;
    suites.push_back(run_duality(c));
  }

  ExperimentResult res;
  Table summary;
  summary.header = {"suite", "passed", "total", "status"};
  for (const auto& s : suites) {
    std::size_t ok = 0;
    for (const auto& c : s.checks) {
      ok += c.pass ? 1 : 0;
      res.checks.push_back({s.name + ": " + c.name, c.pass, c.value, c.threshold});
    }
    summary.add({s.name, std::to_string(ok), std::to_string(s.checks.size()),
                 ok == s.checks.size() ? "PASS" : "FAIL"});
  }
  std::ostringstream os;
  os << "# experiment: verify-all\n# seed: " << cfg.seed << "\n";
  os << summary.render(cfg.format) << "\n";
  for (const auto& s : suites) os << s.render(cfg.format) << "\n";
  res.report = os.str();
  return res;
}

ExperimentResult from_suite(const Suite& s, const std::string& format) {
  ExperimentResult r;
  r.report = s.render(format);
  r.checks = s.checks;
  return r;
}

}  // namespace

bool ExperimentResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"geodesic",   "ode-compare", "curvature",
                                                 "distance",   "completion",  "duality",
                                                 "verify-all", "generate-fixture"};
  return names;
}

void ExperimentConfig::validate() const {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end()) {
    throw InputError("unknown experiment '" + experiment + "'");
  }
  if (!(dt > 0.0)) throw InputError("dt must be positive");
  if (tol && !(*tol > 0.0)) throw InputError("tolerance must be positive");
  if (t_max && !(*t_max > 0.0)) throw InputError("t_max must be positive");
  if (p && !std::isfinite(*p)) throw InputError("p must be finite");
  if (format != "csv" && format != "table") throw InputError("format must be csv or table");
  if (n < 1 || n > kMaxFiberDim) throw InputError("n out of range");
  if (points < 1) throw InputError("points must be positive");
  if (!(spread >= 1.0)) throw InputError("spread must be >= 1");
  if (count < 0) throw InputError("count must be nonnegative");
}

ExperimentConfig merge_config_file(ExperimentConfig base, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw InputError("config file must contain a JSON object");
  try {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const std::string& key = it.key();
      const auto& v = it.value();
      if (key == "experiment") base.experiment = v.get<std::string>();
      else if (key == "input") base.input = v.get<std::string>();
      else if (key == "n") base.n = v.get<int>();
      else if (key == "points") base.points = v.get<std::size_t>();
      else if (key == "seed") base.seed = v.get<std::uint64_t>();
      else if (key == "spread") base.spread = v.get<double>();
      else if (key == "p") base.p = v.get<double>();
      else if (key == "t_max") base.t_max = v.get<double>();
      else if (key == "dt") base.dt = v.get<double>();
      else if (key == "tol") base.tol = v.get<double>();
      else if (key == "mode") base.mode = v.get<std::string>();
      else if (key == "count") base.count = v.get<int>();
      else if (key == "output") base.output = v.get<std::string>();
      else if (key == "format") base.format = v.get<std::string>();
      else throw InputError("config file: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::type_error& e) {
    throw InputError(std::string("config file: ") + e.what());
  }
  return base;
}

GeodesicInstance make_geodesic_instance(int index, std::uint64_t seed, int n,
                                        std::size_t points) {
  Rng rng(mix(seed, 1000 + static_cast<std::uint64_t>(index)));
  const auto man = uniform_manifold(n, points);
  std::vector<Mat> g(points), h(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = rng.spd(n, 2.0);
  static const char* kinds[] = {"generic", "conformal", "mixed", "negative-a0", "positive-a0-mixed"};
  const int kind = index % 5;
  for (std::size_t i = 0; i < points; ++i) {
    const bool conformal = kind == 1 || ((kind == 2 || kind == 4) && i % 2 == 0);
    if (conformal) {
      h[i] = 0.5 * rng.normal() * g[i];
    } else {
      const Mat gh = spd_sqrt(g[i]);
      h[i] = symmetrize(gh * (0.4 * rng.symmetric(n)) * gh);
    }
    if (kind == 3) h[i] -= 0.8 * g[i];
    if (kind == 4) h[i] += 0.8 * g[i];
  }
  return {kinds[kind], MetricField(man, std::move(g)), TangentField(man, std::move(h))};
}

MetricField perturbed_field(const MetricField& g, std::uint64_t seed, double amplitude,
                            const std::vector<std::size_t>& where) {
  Rng rng(seed);
  std::vector<Mat> out(g.mats().begin(), g.mats().end());
  for (std::size_t i : where) {
    if (i >= g.size()) throw InputError("perturbed_field: index out of range");
    const Mat gh = spd_sqrt(g[i]);
    const Mat s = amplitude * rng.symmetric(g.dim());
    out[i] = symmetrize(gh * sym_function(s, [](double x) { return std::exp(x); }) * gh);
  }
  return MetricField(g.manifold_ptr(), std::move(out));
}

ExperimentResult run(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string& e = cfg.experiment;
  if (e == "geodesic") return from_suite(run_geodesic(cfg), cfg.format);
  if (e == "ode-compare") return from_suite(run_ode_compare(cfg), cfg.format);
  if (e == "curvature") return from_suite(run_curvature(cfg), cfg.format);
  if (e == "distance") return from_suite(run_distance(cfg), cfg.format);
  if (e == "completion") return from_suite(run_completion(cfg), cfg.format);
  if (e == "duality") return from_suite(run_duality(cfg), cfg.format);
  if (e == "verify-all") return run_verify_all(cfg);
  // generate-fixture
  ExperimentResult r;
  r.report = format_field(generate_fixture(cfg.n, cfg.points, cfg.seed, cfg.spread));
  return r;
}

}  // namespace metricspace
