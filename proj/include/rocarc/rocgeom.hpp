#pragma once

#include "rocarc/types.hpp"

#include <iosfwd>
#include <vector>

namespace rocarc {

/// Right-continuous empirical CDF, F(t) = #{values <= t} / n.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values);

  double operator()(double t) const;
  const std::vector<double>& sorted_values() const { return sorted_; }
  Index size() const { return static_cast<Index>(sorted_.size()); }

 private:
  std::vector<double> sorted_;
};

Ecdf ecdf(const ConstVectorRef& scores);

struct RocPoint {
  double fpr;
  double tpr;
  double threshold;  // classify positive when score > threshold
};

/// Vertices ordered by fpr ascending (threshold descending), always starting
/// at (0, 0) and ending at (1, 1).
struct RocCurve {
  std::vector<RocPoint> points;
};

RocCurve empirical_roc(const ConstVectorRef& scores_pos, const ConstVectorRef& scores_neg);

enum class TieRule {
  inclusive,  // 1(s+ >= s-)
  half,       // ties count 1/2
  strict,     // 1(s+ > s-)
};

/// Wilcoxon-Mann-Whitney statistic by sort-and-search, O(n log n).
double auc_wmw(const ConstVectorRef& scores_pos, const ConstVectorRef& scores_neg,
               TieRule ties = TieRule::inclusive);
double auc_wmw_strict(const ConstVectorRef& scores_pos, const ConstVectorRef& scores_neg);

double polyline_arc_length(const RocCurve& curve);

struct SurfacePoint {
  double alpha;
  double tau;
  double fpr;
  double tpr;
};

/// r(tau, alpha) = (1 - F-(tau, alpha), 1 - F+(tau, alpha)) with
/// F-(., a) = (1 - a) F- + a F+ and F+(., a) = a F- + (1 - a) F+, for alpha on
/// a uniform grid over [0, 0.5] and tau at pooled empirical quantiles.
/// Rows are alpha-major.
std::vector<SurfacePoint> mixture_surface_grid(const ConstVectorRef& scores_pos,
                                               const ConstVectorRef& scores_neg, int n_alpha,
                                               int n_tau);

void write_roc_csv(std::ostream& out, const RocCurve& curve);
void write_surface_csv(std::ostream& out, const std::vector<SurfacePoint>& grid);

}  // namespace rocarc
