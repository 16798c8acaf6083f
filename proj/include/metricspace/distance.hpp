#pragma once

// Distances in the g_p family. Exact d_p values are not computable; every
// routine here yields either a lower bound (volume Lipschitz estimate) or the
// length of an explicit path (an upper estimate), and DistanceReport keeps
// both.

#include "metricspace/fields.hpp"
#include "metricspace/path.hpp"

#include <string>
#include <vector>

namespace metricspace {

/// g_p length of the piecewise-linear curve through the samples, each
/// segment integrated with 8-point Gauss-Legendre. This is the length of an
/// actual curve, so it bounds the distance from above.
double path_length(double p, const PathPolyline& path);

/// Straight segment g -> h sampled uniformly with `segments` pieces.
PathPolyline straight_path(double p, const MetricField& g, const MetricField& h,
                           int segments);

/// Conformal ray t -> c(t) g from g to c g, sampled geometrically in c.
PathPolyline conformal_ray_path(double p, const MetricField& g, double c, int segments);

/// Exact g_p length of the conformal ray from g to c g:
///   (4 / (|1-p| sqrt n)) |V_{cg}^{(1-p)/2} - V_g^{(1-p)/2}|  (p != 1),
///   sqrt(n) |log c|                                          (p = 1).
double conformal_ray_length(double p, const MetricField& g, double c);

/// (4 / (|1-p| sqrt n)) |V_h^{(1-p)/2} - V_g^{(1-p)/2}| for p != 1 and
/// (2 / sqrt n) |log(V_h / V_g)| for p = 1. Equal to the ray length when h = c g.
double volume_lower_bound(double p, const MetricField& g, const MetricField& h);

/// C(p, n) of the constructive upper bound: p <= 0: 4/sqrt(n) (n <= 3),
/// sqrt(n) (n >= 4); 0 < p < 1: 4 / ((1-p) sqrt n); p > 1: C(2-p, n).
/// Throws InputError for p = 1.
double upper_bound_constant(double p, int n);

/// C(p, n) (V_g^{-p/2} sqrt(Vol(E, g)) + V_h^{-p/2} sqrt(Vol(E, h))).
double cutoff_upper_bound(double p, const MetricField& g, const MetricField& h,
                          const std::vector<std::size_t>& support);

/// 2 C(p, n) v^{(1-p)/2}: diameter bound of {V <= v} (p < 1) or {V >= v}
/// (p > 1). Throws InputError for p = 1.
double diameter_bound(double p, int n, double v);

/// Points where g and h differ.
std::vector<std::size_t> support_of_difference(const MetricField& g, const MetricField& h);

struct CutoffSpec {
  std::vector<std::size_t> E;  // must contain every point where g != h
  std::vector<std::size_t> F;  // subset of E
  double s = 1e-3;             // cutoff value on F, in (0, 1]
};

/// F = E = support of h - g.
CutoffSpec default_cutoff(const MetricField& g, const MetricField& h, double s);

struct CutoffPath {
  PathPolyline shrink;  // ((1-t) + t f) g
  PathPolyline cross;   // f ((1-t) g + t h)
  PathPolyline grow;    // ((1-t) + t f) h, run backwards so it ends at h
  double shrink_length = 0.0;
  double cross_length = 0.0;
  double grow_length = 0.0;
  double total() const { return shrink_length + cross_length + grow_length; }
};

/// Three-piece path g -> f g -> f h -> h with the cutoff function f equal to
/// s on F, 1 off E and sqrt(s) on E \ F. The scaling pieces are sampled
/// geometrically in the factor on F; the crossing piece uniformly.
CutoffPath cutoff_path(double p, const MetricField& g, const MetricField& h,
                           const CutoffSpec& cutoff, int samples = 400);

struct PathOptimizeOptions {
  int segments = 24;
  int max_iter = 20000;
  double grad_tol = 1e-10;
};

struct OptimizedPath {
  PathPolyline path;
  double length = 0.0;  // path_length of the optimized polyline
  double energy = 0.0;
  int iterations = 0;
};

/// Minimizes the midpoint-rule g_p energy over polylines from g to h with
/// all interior nodes (every point of M) free.
OptimizedPath optimize_path(double p, const MetricField& g, const MetricField& h,
                            const PathOptimizeOptions& opt = {});

/// (sum_i w_i d_i(g_i, h_i)^2)^{1/2} with d_i the fiber distance against the
/// reference metric at point i. Errors name the failing point.
double omega2(const MetricField& g, const MetricField& h, int segments = 32);

struct DistanceCandidate {
  std::string method;
  double length;
};

struct DistanceReport {
  double lower = 0.0;
  double upper = 0.0;
  std::string best_method;
  std::vector<DistanceCandidate> candidates;
};

struct DistanceOptions {
  int straight_segments = 256;
  bool use_cutoff = true;
  bool use_optimizer = true;
  PathOptimizeOptions optimizer;
};

/// Lower bound and the best of: straight segment, cutoff path (several s),
/// optimized polyline, and the exact conformal ray when h is a constant
/// multiple of g.
DistanceReport distance_estimate(double p, const MetricField& g, const MetricField& h,
                                 const DistanceOptions& opt = {});

enum class ProbeMode { Collapse, Blowup };

enum class ProbeVerdict { Cauchy, NotCauchy, Inconclusive };

struct ProbeRow {
  int k;
  double factor;      // c_k
  double volume;      // V of h_k
  double lower;       // volume lower bound on d(h_0, h_k)
  double upper;       // conformal-ray length h_0 -> h_k
  double tail_upper;  // ray length from h_k to the limit (sup over later terms)
  double tail_dual;   // the same quantity computed for F(h_k) in g_{2-p}
};

struct CompletionProbe {
  double p = 0.0;
  ProbeMode mode = ProbeMode::Collapse;
  std::vector<ProbeRow> rows;
  ProbeVerdict verdict = ProbeVerdict::Inconclusive;
  double lower_slope = 0.0;  // least-squares slope of lower in k
};

/// h_k = c_k g with c_k = 4^{-k} (collapse) or 4^{k} (blowup), k = 0..K.
/// Verdict: Cauchy when the tail bound at K is below cauchy_tol, NotCauchy
/// when the lower bounds grow without bound (tail infinite), else
/// Inconclusive.
CompletionProbe completion_probe(double p, ProbeMode mode, const MetricField& g, int K = 20,
                                 double cauchy_tol = 1e-5);

const char* to_string(ProbeVerdict v);
const char* to_string(ProbeMode m);

}  // namespace metricspace
