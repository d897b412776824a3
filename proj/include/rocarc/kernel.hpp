#pragma once

#include "rocarc/data.hpp"
#include "rocarc/types.hpp"

#include <string>

namespace rocarc {

enum class KernelType {
  gaussian,  // exp(-|x - x'|^2 / (2 h^2))
  linear,    // <x, x'> + 1, i.e. an affine score with an intercept
};

std::string to_string(KernelType type);
KernelType kernel_type_from_string(const std::string& name);

struct KernelParams {
  KernelType type = KernelType::gaussian;
  double bandwidth = 1.0;  // ignored by the linear kernel

  void validate() const;
};

/// Single kernel evaluation between two points.
template <typename DA, typename DB>
typename DA::Scalar kernel_value(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                                 const KernelParams& params) {
  using Scalar = typename DA::Scalar;
  if (params.type == KernelType::linear) {
    return a.dot(b) + Scalar(1);
  }
  const Scalar sq = (a - b).squaredNorm();
  return std::exp(-sq / (Scalar(2) * Scalar(params.bandwidth) * Scalar(params.bandwidth)));
}

/// Kernel matrix with entry (i, j) = k(A.row(i), B.row(j)).
template <typename DA, typename DB>
Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> gram(
    const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B, const KernelParams& params) {
  params.validate();
  if (A.cols() != B.cols()) {
    throw InvalidArgument("gram: dimension mismatch (" + std::to_string(A.cols()) + " vs " +
                          std::to_string(B.cols()) + ")");
  }
  Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> K(A.rows(), B.rows());
  for (Index j = 0; j < B.rows(); ++j) {
    for (Index i = 0; i < A.rows(); ++i) {
      K(i, j) = kernel_value(A.row(i), B.row(j), params);
    }
  }
  return K;
}

/// Symmetric kernel matrix of one point set; only the upper triangle is
/// computed, so the result is exactly symmetric.
template <typename D>
Eigen::Matrix<typename D::Scalar, Eigen::Dynamic, Eigen::Dynamic> gram(
    const Eigen::MatrixBase<D>& X, const KernelParams& params) {
  params.validate();
  const Index n = X.rows();
  Eigen::Matrix<typename D::Scalar, Eigen::Dynamic, Eigen::Dynamic> K(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      K(i, j) = kernel_value(X.row(i), X.row(j), params);
      K(j, i) = K(i, j);
    }
  }
  return K;
}

/// v(x) = sum_i alpha_i k(s_i, x), optionally clamped into [clip_lo, clip_hi].
struct KernelScoreModel {
  MatrixXd support_points;  // one row per support point
  VectorXd alpha;
  KernelParams params;
  double clip_lo = 0.0;
  double clip_hi = kHalfPi;

  Index dim() const { return support_points.cols(); }
  void validate() const;

  double raw(const ConstVectorRef& x) const;
  /// Scores for every row of X.
  VectorXd evaluate_rows(const ConstMatrixRef& X, bool clip) const;
  double clamp(double value) const;
};

double evaluate(const KernelScoreModel& model, const ConstVectorRef& x, bool clip);

/// Median pairwise Euclidean distance of the pooled sample (deterministically
/// thinned to at most 2000 points).
double median_heuristic(const SampleSet& s);
double median_heuristic(const ConstMatrixRef& points);

}  // namespace rocarc
