#pragma once

// Small dense symmetric-matrix toolkit shared by every module. Fibers are
// n x n with n <= kMaxFiberDim, so matrices live on the stack.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace metricspace {

inline constexpr int kMaxFiberDim = 8;

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxFiberDim, kMaxFiberDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxFiberDim, 1>;

/// Default lower bound on the smallest eigenvalue of an SPD fiber.
inline constexpr double kDefaultSpdEps = 1e-12;

/// Relative tolerance used for symmetry checks.
inline constexpr double kSymmetryTol = 1e-12;

/// Thrown for malformed numerical input (dimension mismatch, non-SPD, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure cannot deliver its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Mat identity(int n);
Mat symmetrize(const Mat& a);

bool is_symmetric(const Mat& a, double rel_tol = kSymmetryTol);
bool all_finite(const Mat& a);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Mat& a);

/// True when a is symmetric, finite and its smallest eigenvalue exceeds eps.
bool is_spd(const Mat& a, double eps = kDefaultSpdEps);

/// Throws InputError with `what` prefixed when a is not SPD.
void require_spd(const Mat& a, const std::string& what, double eps = kDefaultSpdEps);
void require_symmetric(const Mat& a, const std::string& what);

/// Applies a scalar function to the spectrum of a symmetric matrix.
Mat sym_function(const Mat& a, const std::function<double(double)>& fn);

Mat spd_inverse(const Mat& a);
Mat spd_sqrt(const Mat& a);
Mat spd_inv_sqrt(const Mat& a);

/// det(reference^{-1} a)^{1/2}: density of a relative to the reference fiber.
double relative_density(const Mat& a, const Mat& reference);

/// tr(a^{-1} b)
double trace_with(const Mat& a_inv, const Mat& b);

/// Pairs the upper triangle of a symmetric matrix into a row-major list.
std::vector<double> upper_triangle(const Mat& a);
Mat from_upper_triangle(std::span<const double> values, int n);

/// Fixed-order pairwise summation: results depend only on the input order.
double pairwise_sum(std::span<const double> values);

}  // namespace metricspace
