#pragma once

// Pointwise algebra on a single fiber: symmetric n x n matrices (tangent
// vectors) and SPD n x n matrices (metrics at one point of M).

#include "metricspace/linalg.hpp"

#include <vector>

namespace metricspace {

struct TraceSplit {
  Mat traceless;  // h0 with tr(g^{-1} h0) = 0
  double trace;   // f = tr(g^{-1} h)
};

/// h = h0 + (f/n) g.
TraceSplit trace_split(const Mat& g, const Mat& h);

/// g exp(t g^{-1} S), evaluated as g^{1/2} exp(t g^{-1/2} S g^{-1/2}) g^{1/2}
/// so the result is exactly symmetric.
Mat push_exponential(const Mat& g, const Mat& s, double t);

/// <b, c>_a = tr(a^{-1} b a^{-1} c) sqrt(det(gtilde^{-1} a)).
double fiber_inner(const Mat& a, const Mat& b, const Mat& c, const Mat& gtilde);

struct FiberPathOptions {
  int segments = 32;
  int max_iter = 20000;
  double grad_tol = 1e-10;
};

struct FiberPath {
  std::vector<Mat> nodes;  // segments + 1 nodes, endpoints included
  double length = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};

/// Minimizes the energy of an m-segment polyline from a to b in the fiber
/// metric <.,.>_x (interior nodes free, endpoints fixed). Each straight
/// segment is integrated with Gauss-Legendre quadrature. Throws
/// NumericalError with the final gradient norm when the optimizer stalls.
FiberPath fiber_geodesic(const Mat& a, const Mat& b, const Mat& gtilde,
                         const FiberPathOptions& opt = {});

/// Length of the optimized polyline; m >= 8 segments.
double fiber_distance(const Mat& a, const Mat& b, const Mat& gtilde, int segments = 32);

}  // namespace metricspace
