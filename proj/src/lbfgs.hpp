#pragma once

// Limited-memory BFGS with Armijo backtracking, used by the path-energy
// minimizers. The objective may reject a trial point (returns false) when it
// leaves the SPD cone; the line search then shrinks the step.

#include <Eigen/Dense>

#include <functional>

namespace metricspace::detail {

struct LbfgsOptions {
  int max_iter = 5000;
  int history = 12;
  /// Converged when |grad| <= grad_tol * max(1, |f|).
  double grad_tol = 1e-9;
  /// When the line search can no longer decrease f (floating-point floor),
  /// the run still counts as converged if |grad| <= stall_grad_tol * max(1, |f|).
  double stall_grad_tol = 1e-6;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<bool(const Eigen::VectorXd& x, double& f, Eigen::VectorXd& grad)>;

LbfgsResult lbfgs_minimize(const Objective& fn, Eigen::VectorXd x0, const LbfgsOptions& opt);

}  // namespace metricspace::detail

#include "metricspace/linalg.hpp"

#include <utility>
#include <vector>

namespace metricspace::detail {

/// Packs the upper triangle with off-diagonals scaled by sqrt(2), so the
/// Euclidean inner product of packed vectors is the Frobenius product.
void pack_sym(const Mat& a, Eigen::VectorXd& out, Eigen::Index offset);
Mat unpack_sym(const Eigen::VectorXd& v, Eigen::Index offset, int n);
inline Eigen::Index packed_size(int n) { return n * (n + 1) / 2; }

/// Gauss-Legendre nodes and weights mapped to [0, 1].
std::vector<std::pair<double, double>> gauss_legendre_unit(int points);

}  // namespace metricspace::detail
