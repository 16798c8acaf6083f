#include "metricspace/fiber.hpp"

#include "lbfgs.hpp"

#include <cmath>
#include <sstream>

namespace metricspace {

TraceSplit trace_split(const Mat& g, const Mat& h) {
  require_spd(g, "trace_split");
  require_symmetric(h, "trace_split");
  const double f = trace_with(spd_inverse(g), h);
  return {symmetrize(h - (f / static_cast<double>(g.rows())) * g), f};
}

Mat push_exponential(const Mat& g, const Mat& s, double t) {
  const Mat gh = spd_sqrt(g);
  const Mat gih = spd_inv_sqrt(g);
  const Mat inner = symmetrize(gih * s * gih);
  const Mat e = sym_function(inner, [t](double x) { return std::exp(t * x); });
  return symmetrize(gh * e * gh);
}

double fiber_inner(const Mat& a, const Mat& b, const Mat& c, const Mat& gtilde) {
  const Mat ai = spd_inverse(a);
  return (ai * b * ai * c).trace() * relative_density(a, gtilde);
}

namespace {

struct FiberEnergy {
  const Mat& gtilde;
  double ref_diag_prod;
  const std::vector<std::pair<double, double>>& rule;

  // Integrand tr(M^{-1} D M^{-1} D) sqrt(det(gtilde^{-1} M)) at M. Returns
  // false when M has left the SPD cone.
  bool point(const Mat& m, const Mat& d, double& value, Mat* grad_m, Mat* grad_d) const {
    Eigen::LLT<Mat> llt(m);
    if (llt.info() != Eigen::Success) return false;
    double diag = 1.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double l = llt.matrixLLT()(i, i);
      if (!(l > 0.0)) return false;
      diag *= l;
    }
    const double w = diag / ref_diag_prod;
    const Mat mi = llt.solve(Mat::Identity(m.rows(), m.cols()));
    const Mat p = mi * d * mi;
    const double tr = (p * d).trace();
    value = w * tr;
    if (grad_d) *grad_d = symmetrize(2.0 * w * p);
    if (grad_m) *grad_m = symmetrize(w * (-2.0 * p * d * mi + 0.5 * tr * mi));
    return std::isfinite(value);
  }

  // Quadrature of the integrand over the straight segment x0 -> x1.
  bool segment(const Mat& x0, const Mat& x1, double& value, Mat* g0, Mat* g1) const {
    const Mat d = x1 - x0;
    value = 0.0;
    if (g0) g0->setZero(x0.rows(), x0.cols());
    if (g1) g1->setZero(x0.rows(), x0.cols());
    Mat gm, gd;
    for (const auto& [tau, wq] : rule) {
      double v = 0.0;
      const bool want = g0 != nullptr;
      if (!point(x0 + tau * d, d, v, want ? &gm : nullptr, want ? &gd : nullptr)) return false;
      value += wq * v;
      if (want) {
        *g0 += wq * (-gd + (1.0 - tau) * gm);
        *g1 += wq * (gd + tau * gm);
      }
    }
    return true;
  }

  double segment_length(const Mat& x0, const Mat& x1,
                        const std::vector<std::pair<double, double>>& fine) const {
    const Mat d = x1 - x0;
    double len = 0.0;
    for (const auto& [tau, wq] : fine) {
      double v = 0.0;
      if (!point(x0 + tau * d, d, v, nullptr, nullptr)) {
        throw NumericalError("fiber_geodesic: path left the SPD cone");
      }
      len += wq * std::sqrt(std::max(v, 0.0));
    }
    return len;
  }
};

double chol_diag_product(const Mat& a) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) throw InputError("fiber: reference metric is not SPD");
  double p = 1.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) p *= llt.matrixLLT()(i, i);
  return p;
}

}  // namespace

FiberPath fiber_geodesic(const Mat& a, const Mat& b, const Mat& gtilde,
                         const FiberPathOptions& opt) {
  require_spd(a, "fiber_geodesic start", 0.0);
  require_spd(b, "fiber_geodesic end", 0.0);
  require_spd(gtilde, "fiber_geodesic reference");
  if (a.rows() != b.rows() || a.rows() != gtilde.rows()) {
    throw InputError("fiber_geodesic: dimension mismatch");
  }
  if (opt.segments < 8) throw InputError("fiber_geodesic: need at least 8 segments");

  const int n = static_cast<int>(a.rows());
  const int m = opt.segments;
  const auto rule = detail::gauss_legendre_unit(4);
  const auto fine = detail::gauss_legendre_unit(8);
  const FiberEnergy energy{gtilde, chol_diag_product(gtilde), rule};

  // Initial guess and per-node scaling: the affine-invariant geodesic
  // a^{1/2} (a^{-1/2} b a^{-1/2})^tau a^{1/2}. Interior node j is written as
  // P_j^{1/2} Y_j P_j^{1/2} with Y_j = I at the start.
  const Mat ah = spd_sqrt(a);
  const Mat aih = spd_inv_sqrt(a);
  const Mat rel = symmetrize(aih * b * aih);
  std::vector<Mat> scale(static_cast<std::size_t>(m + 1));
  for (int j = 0; j <= m; ++j) {
    const double tau = static_cast<double>(j) / m;
    const Mat pj = symmetrize(ah * sym_function(rel, [tau](double x) { return std::pow(x, tau); }) * ah);
    scale[static_cast<std::size_t>(j)] = spd_sqrt(pj);
  }

  const Eigen::Index k = detail::packed_size(n);
  const Eigen::Index nvar = k * (m - 1);
  auto nodes_of = [&](const Eigen::VectorXd& y) {
    std::vector<Mat> x(static_cast<std::size_t>(m + 1));
    x.front() = a;
    x.back() = b;
    for (int j = 1; j < m; ++j) {
      const Mat& s = scale[static_cast<std::size_t>(j)];
      x[static_cast<std::size_t>(j)] = symmetrize(s * detail::unpack_sym(y, k * (j - 1), n) * s);
    }
    return x;
  };

  const detail::Objective objective = [&](const Eigen::VectorXd& y, double& f,
                                          Eigen::VectorXd& grad) {
    const auto x = nodes_of(y);
    std::vector<Mat> gx(static_cast<std::size_t>(m + 1), Mat::Zero(n, n));
    f = 0.0;
    Mat g0, g1;
    for (int j = 0; j < m; ++j) {
      double v = 0.0;
      const auto ju = static_cast<std::size_t>(j);
      if (!energy.segment(x[ju], x[ju + 1], v, &g0, &g1)) return false;
      f += m * v;
      gx[ju] += m * g0;
      gx[ju + 1] += m * g1;
    }
    grad.resize(nvar);
    for (int j = 1; j < m; ++j) {
      const Mat& s = scale[static_cast<std::size_t>(j)];
      detail::pack_sym(symmetrize(s * gx[static_cast<std::size_t>(j)] * s), grad, k * (j - 1));
    }
    return std::isfinite(f);
  };

  Eigen::VectorXd y0(nvar);
  for (int j = 1; j < m; ++j) detail::pack_sym(identity(n), y0, k * (j - 1));

  detail::LbfgsOptions lo;
  lo.max_iter = opt.max_iter;
  lo.grad_tol = opt.grad_tol;
  const auto res = detail::lbfgs_minimize(objective, y0, lo);
  if (!res.converged) {
    std::ostringstream os;
    os << "fiber_geodesic: optimizer did not converge after " << res.iterations
       << " iterations (gradient norm " << res.grad_norm << ")";
    throw NumericalError(os.str());
  }

  FiberPath out;
  out.nodes = nodes_of(res.x);
  out.energy = res.f;
  out.grad_norm = res.grad_norm;
  out.iterations = res.iterations;
  for (int j = 0; j < m; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    out.length += energy.segment_length(out.nodes[ju], out.nodes[ju + 1], fine);
  }
  return out;
}

double fiber_distance(const Mat& a, const Mat& b, const Mat& gtilde, int segments) {
  FiberPathOptions opt;
  opt.segments = segments;
  return fiber_geodesic(a, b, gtilde, opt).length;
}

}  // namespace metricspace
