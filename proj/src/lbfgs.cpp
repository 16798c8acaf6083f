#include "lbfgs.hpp"

#include "metricspace/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace metricspace::detail {

LbfgsResult lbfgs_minimize(const Objective& fn, Eigen::VectorXd x0, const LbfgsOptions& opt) {
  LbfgsResult res;
  res.x = std::move(x0);
  Eigen::VectorXd grad(res.x.size());
  if (!fn(res.x, res.f, grad)) {
    throw NumericalError("lbfgs: starting point is infeasible");
  }
  res.grad_norm = grad.norm();

  std::deque<Eigen::VectorXd> s_hist;
  std::deque<Eigen::VectorXd> y_hist;
  std::deque<double> rho_hist;
  Eigen::VectorXd x_new(res.x.size());
  Eigen::VectorXd g_new(res.x.size());
  int stalled = 0;

  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    if (res.grad_norm <= opt.grad_tol * std::max(1.0, std::abs(res.f))) {
      res.converged = true;
      return res;
    }

    // two-loop recursion
    Eigen::VectorXd d = -grad;
    const std::size_t m = s_hist.size();
    std::vector<double> alpha(m);
    for (std::size_t i = m; i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(d);
      d -= alpha[i] * y_hist[i];
    }
    if (m > 0) {
      d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    } else {
      d *= 1.0 / std::max(res.grad_norm, 1e-300);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(d);
      d += (alpha[i] - beta) * s_hist[i];
    }
    double slope = grad.dot(d);
    if (!(slope < 0.0)) {
      d = -grad / std::max(res.grad_norm, 1e-300);
      slope = grad.dot(d);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = 1.0;
    bool accepted = false;
    double f_new = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = res.x + step * d;
      if (fn(x_new, f_new, g_new) && std::isfinite(f_new) &&
          f_new <= res.f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No decrease representable in floating point: treat a tiny gradient
      // as converged, otherwise report failure through the result.
      res.converged = res.grad_norm <= opt.stall_grad_tol * std::max(1.0, std::abs(res.f));
      return res;
    }

    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd y = g_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      if (static_cast<int>(s_hist.size()) == opt.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }

    const double decrease = res.f - f_new;
    stalled = decrease <= 1e-15 * std::max(1.0, std::abs(res.f)) ? stalled + 1 : 0;
    res.x.swap(x_new);
    grad.swap(g_new);
    res.f = f_new;
    res.grad_norm = grad.norm();
    if (stalled >= 20) {
      res.converged = res.grad_norm <= opt.stall_grad_tol * std::max(1.0, std::abs(res.f));
      return res;
    }
  }
  res.converged = res.grad_norm <= opt.grad_tol * std::max(1.0, std::abs(res.f));
  return res;
}

}  // namespace metricspace::detail

#include <boost/math/quadrature/gauss.hpp>

namespace metricspace::detail {

void pack_sym(const Mat& a, Eigen::VectorXd& out, Eigen::Index offset) {
  const double r2 = std::sqrt(2.0);
  Eigen::Index k = offset;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    out(k++) = a(i, i);
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) out(k++) = r2 * a(i, j);
  }
}

Mat unpack_sym(const Eigen::VectorXd& v, Eigen::Index offset, int n) {
  const double r2 = std::sqrt(2.0);
  Mat a(n, n);
  Eigen::Index k = offset;
  for (int i = 0; i < n; ++i) {
    a(i, i) = v(k++);
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = v(k++) / r2;
      a(j, i) = a(i, j);
    }
  }
  return a;
}

namespace {

template <int N>
std::vector<std::pair<double, double>> gl_nodes() {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      out.emplace_back(0.5, 0.5 * w[i]);
    } else {
      out.emplace_back(0.5 * (1.0 - x[i]), 0.5 * w[i]);
      out.emplace_back(0.5 * (1.0 + x[i]), 0.5 * w[i]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::pair<double, double>> gauss_legendre_unit(int points) {
  switch (points) {
    case 3: return gl_nodes<3>();
    case 4: return gl_nodes<4>();
    case 8: return gl_nodes<8>();
    default: throw InputError("gauss_legendre_unit: supported rules are 3, 4 and 8 points");
  }
}

}  // namespace metricspace::detail
