#pragma once

// Geodesics of the g_p family.
//
// For p = 1 the initial value problem has a closed form. Write the initial
// velocity as h0 = (f/n) g0 + A with A traceless, f = tr(g0^{-1} h0), and set
//
//   a0 = V^{-1} int f dV,   q = (f - a0)/2,   r^2 = (n/4) tr((g0^{-1} A)^2),
//   b0^2 = (n sigma^2 - a0^2)/4   (sigma = |h0| in g_1),   u = b0 t / 2.
//
// Then with P(t) = (cos u + (q/b0) sin u)^2 + (r/b0)^2 sin^2 u,
//
//   dV_{g(t)} / dV_{g0} = P e^{a0 t/2}
//   g(t) = P^{2/n} e^{a0 t/n} g0 exp((2/r) Phi(t) g0^{-1} A)
//
// where Phi is the continuous branch of atan(r sin u / (b0 cos u + q sin u))
// starting at 0. If b0 = 0 the geodesic is the conformal ray e^{a0 t/n} g0.
// The solution ends at the first zero of P among points where A = 0.
//
// Every p (including p = 1) is also integrated numerically with classical
// RK4 on g'' = -Gamma_p(g', g'), which is the independent check on the
// closed form.

#include "metricspace/fields.hpp"
#include "metricspace/path.hpp"

#include <limits>
#include <vector>

namespace metricspace {

enum class PointCase {
  ConformalRay,   // b0 = 0: every point moves along e^{a0 t/n} g0
  PureConformal,  // A(x) = 0: the point stays in its conformal class
  Generic,        // A(x) != 0
};

struct GeodesicNormalForm {
  int n = 0;
  double volume0 = 0.0;
  double sigma = 0.0;
  double a0 = 0.0;
  double b0 = 0.0;
  // per point
  std::vector<double> f;      // tr(g0^{-1} h0)
  std::vector<double> q;
  std::vector<double> r;
  std::vector<double> theta;  // branch angle in (0, 2 pi]; NaN when b0 = 0
  std::vector<Mat> A;         // traceless part of h0, unnormalized
  std::vector<PointCase> cases;
};

/// Points with r below this multiple of max(b0, |a0|, sigma) count as A = 0.
inline constexpr double kTracelessZeroTol = 1e-12;

GeodesicNormalForm normal_form(const MetricField& g0, const TangentField& h0);

/// dV_{g(t)} / dV_{g0} at point i.
double density_ratio(const GeodesicNormalForm& nf, std::size_t i, double t);

/// Continuous branch of the arctangent at point i (0 at t = 0).
double unwound_angle(const GeodesicNormalForm& nf, std::size_t i, double t);

/// The branch interval [pi k - pi/2, pi k + pi/2] assigned to time t by the
/// branch angle theta(x): returns k.
long branch_index(const GeodesicNormalForm& nf, std::size_t i, double t);

/// Closed-form p = 1 geodesic at time t in [0, blowup_time). Throws
/// InputError outside the domain and NumericalError if the unwound angle
/// leaves the interval assigned by branch_index.
MetricField geodesic_eval(const GeodesicNormalForm& nf, const MetricField& g0, double t);

/// Smallest positive zero of the density over points with A = 0, found by
/// root bracketing on the closed form; +infinity if b0 = 0 or A != 0 at
/// every point.
double blowup_time(const GeodesicNormalForm& nf);

/// theta(x)/b0: the zero-time of the density at a point with A = 0 taken
/// from the branch-angle formula.
double zero_time_from_theta(const GeodesicNormalForm& nf, std::size_t i);

/// g_tt = -Gamma_p(g_t, g_t).
TangentField geodesic_rhs(double p, const MetricField& g, const TangentField& gt);

/// RK4 on (g, g_t) with step dt up to t_max; every `record_every`-th step is
/// stored (the final time is always stored). Throws NumericalError naming the
/// time and point index if a fiber leaves the SPD cone.
PathPolyline integrate_geodesic(double p, const MetricField& g0, const TangentField& h0,
                                double t_max, double dt, int record_every = 1);

/// max over interior samples of |second difference - rhs| relative to the
/// path's curvature scale. The second difference is the five-point stencil
/// where samples are equally spaced, else the three-point one. Uses recorded
/// velocities when present.
double geodesic_residual(double p, const PathPolyline& path);

struct QuadraticFit {
  double c2 = 0.0, c1 = 0.0, c0 = 0.0;
  double max_residual = 0.0;
};

/// Least-squares fit y ~ c2 t^2 + c1 t + c0.
QuadraticFit fit_quadratic(const std::vector<double>& t, const std::vector<double>& y);

struct MotionSample {
  double t;
  double volume;
  double c;  // V^{-p} int tr(g^{-1} g_t) dV
};

struct MotionReport {
  double p = 0.0;
  int n = 0;
  double speed2 = 0.0;          // |g_t|^2 in g_p (mean over samples)
  double speed2_drift = 0.0;    // max relative deviation of |g_t|^2 from its mean
  std::vector<MotionSample> samples;
  std::vector<double> fd_slopes;  // central differences of c
  double fitted_slope = 0.0;      // least-squares slope of c(t)
  double expected_slope = 0.0;    // (n/4)(1-p) speed2
  double log_volume_deviation = 0.0;  // max |log V - secant|; meaningful for p = 1
  QuadraticFit volume_power;          // fit of V^{1-p}; unset for p = 1
  double expected_volume_power_c2 = 0.0;  // (n/16)(1-p)^2 speed2
};

/// Constants of motion along a geodesic polyline with recorded velocities.
/// Refuses paths whose geodesic residual exceeds residual_tol.
MotionReport motion_constants(const PathPolyline& path, double residual_tol = 1e-3);

}  // namespace metricspace
