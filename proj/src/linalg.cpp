#include "metricspace/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace metricspace {

Mat identity(int n) { return Mat::Identity(n, n); }

Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

bool is_symmetric(const Mat& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool all_finite(const Mat& a) { return a.allFinite(); }

double min_eigenvalue(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed");
  }
  return es.eigenvalues().minCoeff();
}

bool is_spd(const Mat& a, double eps) {
  if (a.rows() == 0 || a.rows() != a.cols() || !all_finite(a) || !is_symmetric(a)) {
    return false;
  }
  return min_eigenvalue(a) > eps;
}

void require_symmetric(const Mat& a, const std::string& what) {
  if (a.rows() != a.cols()) {
    throw InputError(what + ": matrix is not square");
  }
  if (!all_finite(a)) {
    throw InputError(what + ": matrix has non-finite entries");
  }
  if (!is_symmetric(a)) {
    throw InputError(what + ": matrix is not symmetric");
  }
}

void require_spd(const Mat& a, const std::string& what, double eps) {
  require_symmetric(a, what);
  const double lmin = min_eigenvalue(a);
  if (!(lmin > eps)) {
    std::ostringstream os;
    os << what << ": matrix is not positive definite (smallest eigenvalue " << lmin << ")";
    throw InputError(os.str());
  }
}

Mat sym_function(const Mat& a, const std::function<double(double)>& fn) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(a));
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed");
  }
  Vec mapped = es.eigenvalues();
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped(i) = fn(mapped(i));
  const Mat& v = es.eigenvectors();
  return symmetrize(v * mapped.asDiagonal() * v.transpose());
}

Mat spd_inverse(const Mat& a) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Cholesky factorization failed (matrix not SPD)");
  }
  return symmetrize(llt.solve(Mat::Identity(a.rows(), a.cols())));
}

Mat spd_sqrt(const Mat& a) {
  return sym_function(a, [](double x) { return std::sqrt(x); });
}

Mat spd_inv_sqrt(const Mat& a) {
  return sym_function(a, [](double x) { return 1.0 / std::sqrt(x); });
}

double relative_density(const Mat& a, const Mat& reference) {
  Eigen::LLT<Mat> la(a);
  Eigen::LLT<Mat> lr(reference);
  if (la.info() != Eigen::Success || lr.info() != Eigen::Success) {
    throw NumericalError("relative_density: Cholesky factorization failed");
  }
  // sqrt(det a / det ref) = prod(diag La) / prod(diag Lr)
  double ratio = 1.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    ratio *= la.matrixLLT()(i, i) / lr.matrixLLT()(i, i);
  }
  return ratio;
}

double trace_with(const Mat& a_inv, const Mat& b) { return (a_inv * b).trace(); }

std::vector<double> upper_triangle(const Mat& a) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(a.rows() * (a.rows() + 1) / 2));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i; j < a.cols(); ++j) out.push_back(a(i, j));
  }
  return out;
}

Mat from_upper_triangle(std::span<const double> values, int n) {
  const auto expected = static_cast<std::size_t>(n * (n + 1) / 2);
  if (values.size() != expected) {
    throw InputError("upper-triangle list has " + std::to_string(values.size()) +
                     " entries, expected " + std::to_string(expected));
  }
  Mat a(n, n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      a(i, j) = values[k];
      a(j, i) = values[k];
      ++k;
    }
  }
  return a;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace metricspace
