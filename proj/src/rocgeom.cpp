#include "rocarc/rocgeom.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace rocarc {

namespace {

std::vector<double> to_vector(const ConstVectorRef& v) { return {v.data(), v.data() + v.size()}; }

void require_nonempty(const ConstVectorRef& pos, const ConstVectorRef& neg, const char* what) {
  if (pos.size() == 0 || neg.size() == 0) {
    throw InvalidArgument(std::string(what) + ": both classes must be nonempty");
  }
  if (!pos.allFinite() || !neg.allFinite()) {
    throw InvalidArgument(std::string(what) + ": scores must be finite");
  }
}

// Fraction of sorted values strictly greater than t.
double survival(const std::vector<double>& sorted, double t) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

void put_double(std::ostream& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) {
    throw InvalidArgument("ecdf: at least one value is required");
  }
  for (double v : sorted_) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("ecdf: values must be finite");
    }
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double t) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

Ecdf ecdf(const ConstVectorRef& scores) { return Ecdf(to_vector(scores)); }

RocCurve empirical_roc(const ConstVectorRef& scores_pos, const ConstVectorRef& scores_neg) {
  require_nonempty(scores_pos, scores_neg, "empirical_roc");
  std::vector<double> pos = to_vector(scores_pos);
  std::vector<double> neg = to_vector(scores_neg);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  std::vector<double> thresholds;
  thresholds.reserve(pos.size() + neg.size());
  thresholds.insert(thresholds.end(), pos.begin(), pos.end());
  thresholds.insert(thresholds.end(), neg.begin(), neg.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  RocCurve curve;
  curve.points.reserve(thresholds.size() + 2);
  const double inf = std::numeric_limits<double>::infinity();
  curve.points.push_back({0.0, 0.0, inf});
  for (double t : thresholds) {
    const RocPoint p{survival(neg, t), survival(pos, t), t};
    if (p.fpr == 0.0 && p.tpr == 0.0) {
      continue;  // already covered by the +inf sentinel
    }
    curve.points.push_back(p);
  }
  curve.points.push_back({1.0, 1.0, -inf});
  return curve;
}

double auc_wmw(const ConstVectorRef& scores_pos, const ConstVectorRef& scores_neg, TieRule ties) {
  require_nonempty(scores_pos, scores_neg, "auc_wmw");
  std::vector<double> neg = to_vector(scores_neg);
  std::sort(neg.begin(), neg.end());
  double wins = 0.0;
  for (Index i = 0; i < scores_pos.size(); ++i) {
    const double s = scores_pos(i);
    const auto lower = std::lower_bound(neg.begin(), neg.end(), s);
    const auto upper = std::upper_bound(lower, neg.end(), s);
    const double below = static_cast<double>(lower - neg.begin());
    const double equal = static_cast<double>(upper - lower);
    switch (ties) {
      case TieRule::inclusive:
        wins += below + equal;
        break;
      case TieRule::half:
        wins += below + 0.5 * equal;
        break;
      case TieRule::strict:
        wins += below;
        break;
    }
  }
  return wins / (static_cast<double>(scores_pos.size()) * static_cast<double>(neg.size()));
}

double auc_wmw_strict(const ConstVectorRef& scores_pos, const ConstVectorRef& scores_neg) {
  return auc_wmw(scores_pos, scores_neg, TieRule::strict);
}

double polyline_arc_length(const RocCurve& curve) {
  double length = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    length += std::hypot(curve.points[i].fpr - curve.points[i - 1].fpr,
                         curve.points[i].tpr - curve.points[i - 1].tpr);
  }
  return length;
}

std::vector<SurfacePoint> mixture_surface_grid(const ConstVectorRef& scores_pos,
                                               const ConstVectorRef& scores_neg, int n_alpha,
                                               int n_tau) {
  if (n_alpha < 2 || n_tau < 2) {
    throw InvalidArgument("mixture_surface_grid: need at least 2 alpha and 2 tau values");
  }
  require_nonempty(scores_pos, scores_neg, "mixture_surface_grid");
  std::vector<double> pos = to_vector(scores_pos);
  std::vector<double> neg = to_vector(scores_neg);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  std::vector<double> pooled = pos;
  pooled.insert(pooled.end(), neg.begin(), neg.end());
  std::sort(pooled.begin(), pooled.end());

  // tau_j: pooled order statistic at quantile level j / (n_tau - 1).
  std::vector<double> taus(static_cast<std::size_t>(n_tau));
  const double last = static_cast<double>(pooled.size() - 1);
  for (int j = 0; j < n_tau; ++j) {
    const auto idx = static_cast<std::size_t>(
        std::llround(last * static_cast<double>(j) / static_cast<double>(n_tau - 1)));
    taus[static_cast<std::size_t>(j)] = pooled[idx];
  }

  std::vector<SurfacePoint> grid;
  grid.reserve(static_cast<std::size_t>(n_alpha) * static_cast<std::size_t>(n_tau));
  for (int k = 0; k < n_alpha; ++k) {
    const double a = 0.5 * static_cast<double>(k) / static_cast<double>(n_alpha - 1);
    for (double tau : taus) {
      const double fpr_0 = survival(neg, tau);
      const double tpr_0 = survival(pos, tau);
      grid.push_back({a, tau, (1.0 - a) * fpr_0 + a * tpr_0, a * fpr_0 + (1.0 - a) * tpr_0});
    }
  }
  return grid;
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "fpr,tpr,threshold\n";
  for (const RocPoint& p : curve.points) {
    put_double(out, p.fpr);
    out << ',';
    put_double(out, p.tpr);
    out << ',';
    if (std::isinf(p.threshold)) {
      out << (p.threshold > 0 ? "inf" : "-inf");
    } else {
      put_double(out, p.threshold);
    }
    out << '\n';
  }
}

void write_surface_csv(std::ostream& out, const std::vector<SurfacePoint>& grid) {
  out << "alpha,tau,fpr,tpr\n";
  for (const SurfacePoint& p : grid) {
    put_double(out, p.alpha);
    out << ',';
    put_double(out, p.tau);
    out << ',';
    put_double(out, p.fpr);
    out << ',';
    put_double(out, p.tpr);
    out << '\n';
  }
}

}  // namespace rocarc
