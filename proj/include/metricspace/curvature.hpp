#pragma once

// Sectional curvature of g_p.
//
// Sign convention: R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z -
// nabla_{[X,Y]} Z and sec(h, k) = g_p(R(h, k)k, h) / (|h|^2 |k|^2 - <h,k>^2),
// so round spheres are positive.

#include "metricspace/fields.hpp"

#include <functional>

namespace metricspace {

using BilinearForm = std::function<double(const TangentField&, const TangentField&)>;

/// Kulkarni-Nomizu product (G o H)(a, b, c, d)
///   = G(a,c)H(b,d) + G(b,d)H(a,c) - G(a,d)H(b,c) - G(b,c)H(a,d).
double kn_product(const BilinearForm& G, const BilinearForm& H, const TangentField& a,
                  const TangentField& b, const TangentField& c, const TangentField& d);

/// A tangent plane with a g_p-orthonormal basis.
struct PlaneSpec {
  double p;
  MetricField g;
  TangentField h;
  TangentField k;
};

/// Orthonormalizes (h, k) in g_p by modified Gram-Schmidt.
PlaneSpec make_plane(double p, const MetricField& g, const TangentField& h,
                     const TangentField& k);

/// sec_p = V^{-p} secE - ((2p - p^2)/16) (V^{2p-2} <g,k>_p^2 + V^{2p-2} <g,h>_p^2 - n V^{p-1})
/// where secE = g_E(R^E(h, k)k, h) for the g_p-orthonormal pair of `plane`.
/// Throws InputError if the pair is not orthonormal to 1e-10.
double sec_formula(const PlaneSpec& plane, double secE);

struct CurvatureValue {
  double sectional = 0.0;  // form / gram
  double form = 0.0;       // g_p(R(h, k)k, h)
  double gram = 0.0;       // |h|^2 |k|^2 - <h,k>^2 in g_p
  double extrapolation_gap = 0.0;  // |form(eps) - form(eps/2)| before extrapolation
};

struct CurvatureOptions {
  double eps = 1e-3;
  /// Relative bound on extrapolation_gap; larger gaps raise NumericalError.
  double max_relative_gap = 1e-2;
};

/// Curvature of the plane (h, k) at g from central differences of the
/// connection (constant fields, so [h, k] = 0):
///   R(h,k)k = D_h Gamma(k,k) - D_k Gamma(h,k) + Gamma(h, Gamma(k,k)) - Gamma(k, Gamma(h,k)),
/// Richardson-extrapolated over steps eps and eps/2. eps must lie in [1e-6, 1e-3].
CurvatureValue curvature_numeric(double p, const MetricField& g, const TangentField& h,
                                 const TangentField& k, const CurvatureOptions& opt = {});

}  // namespace metricspace
