#include "rocarc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rocarc {

std::string to_string(KernelType type) {
  switch (type) {
    case KernelType::gaussian:
      return "gaussian";
    case KernelType::linear:
      return "linear";
  }
  return "unknown";
}

KernelType kernel_type_from_string(const std::string& name) {
  if (name == "gaussian" || name == "gauss") {
    return KernelType::gaussian;
  }
  if (name == "linear") {
    return KernelType::linear;
  }
  throw InvalidArgument("unknown kernel '" + name + "' (expected gaussian or linear)");
}

void KernelParams::validate() const {
  if (type == KernelType::gaussian && !(bandwidth > 0.0 && std::isfinite(bandwidth))) {
    throw InvalidArgument("kernel bandwidth must be positive and finite");
  }
}

void KernelScoreModel::validate() const {
  params.validate();
  if (alpha.size() != support_points.rows()) {
    throw InvalidArgument("KernelScoreModel: " + std::to_string(alpha.size()) +
                          " coefficients for " + std::to_string(support_points.rows()) +
                          " support points");
  }
  if (!(clip_lo <= clip_hi)) {
    throw InvalidArgument("KernelScoreModel: empty clip range");
  }
}

double KernelScoreModel::clamp(double value) const { return std::clamp(value, clip_lo, clip_hi); }

double KernelScoreModel::raw(const ConstVectorRef& x) const {
  if (x.size() != dim()) {
    throw InvalidArgument("evaluate: point has dimension " + std::to_string(x.size()) +
                          ", model expects " + std::to_string(dim()));
  }
  double sum = 0.0;
  for (Index i = 0; i < support_points.rows(); ++i) {
    sum += alpha(i) * kernel_value(support_points.row(i).transpose(), x, params);
  }
  return sum;
}

VectorXd KernelScoreModel::evaluate_rows(const ConstMatrixRef& X, bool clip) const {
  if (X.cols() != dim()) {
    throw InvalidArgument("evaluate: points have dimension " + std::to_string(X.cols()) +
                          ", model expects " + std::to_string(dim()));
  }
  VectorXd out(X.rows());
  if (params.type == KernelType::linear) {
    // sum_i alpha_i (<s_i, x> + 1) collapses to one affine map.
    const VectorXd w = support_points.transpose() * alpha;
    const double b = alpha.sum();
    out = (X * w).array() + b;
  } else {
    out = gram(X, support_points, params) * alpha;
  }
  if (clip) {
    out = out.unaryExpr([this](double v) { return clamp(v); });
  }
  return out;
}

double evaluate(const KernelScoreModel& model, const ConstVectorRef& x, bool clip) {
  const double v = model.raw(x);
  return clip ? model.clamp(v) : v;
}

double median_heuristic(const SampleSet& s) { return median_heuristic(s.pooled()); }

double median_heuristic(const ConstMatrixRef& points) {
  constexpr Index kMaxPoints = 2000;
  const Index n_all = points.rows();
  if (n_all < 2) {
    throw InvalidArgument("median_heuristic: need at least 2 samples");
  }
  const Index n = std::min(n_all, kMaxPoints);
  // Evenly strided rows keep the thinning deterministic.
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    rows[static_cast<std::size_t>(i)] = n == n_all ? i : (i * n_all) / n;
  }
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      dist.push_back((points.row(rows[static_cast<std::size_t>(i)]) -
                      points.row(rows[static_cast<std::size_t>(j)]))
                         .norm());
    }
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double median = dist[mid];
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  if (!(median > 0.0)) {
    throw InvalidArgument(
        "median_heuristic: median pairwise distance is 0 (duplicate points); pass an explicit "
        "bandwidth");
  }
  return median;
}

}  // namespace rocarc
