#pragma once

#include "rocarc/data.hpp"
#include "rocarc/estimator.hpp"
#include "rocarc/kernel.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace rocarc {

/// Plug-in arc length: (1/n+) sum sin v(x+) + (1/n-) sum cos v(x-) with clipped
/// scores. Lies in [0, 2].
double arc_length_estimate(const KernelScoreModel& model, const SampleSet& eval_set);

struct QuadratureSpec {
  long intervals = 100000;  // composite Simpson, rounded up to even
  double width_in_std = 10.0;
};

/// Arc length of the optimal ROC for two 1-D Gaussians,
/// integral of sqrt(p+(x)^2 + p-(x)^2) dx.
double arc_length_quadrature(const GaussianSpec& p_pos, const GaussianSpec& p_neg,
                             const QuadratureSpec& grid = {});

struct TvBounds {
  double lower = 0.0;
  double upper = 0.0;
  double argmax_a = 1.0;  // maximizer of the lower-bound expression
  bool in_range = true;   // arc length within [sqrt 2, 2]
};

/// Total-variation bounds from the arc length of the optimal ROC:
///   upper = arc - 1
///   lower = max_{a in (0,1]} (2/pi) [(arc - 2 sqrt(1-a^2))/a + acos a - asin a]
TvBounds tv_bounds(double arc_length);

/// The lower-bound expression at one value of a (series-expanded for small a).
double tv_lower_objective(double arc_length, double a);

struct GaussianDivergences {
  double delta = 0.0;
  double tv = 0.0;
  double js = 0.0;  // natural log
  double w1 = 0.0;
  double kl = 0.0;
  double pinsker_ub = 0.0;
  double bh_ub = 0.0;
  double arc = kSqrt2;
  double roc_div = 0.0;
  TvBounds prop2;
};

/// Divergences between N(0,1) and N(delta,1).
GaussianDivergences gaussian_divergences(double delta, const QuadratureSpec& grid = {});

/// Default rescaling of the ROC divergence onto [0, 1].
inline constexpr double kDefaultRocRescale = 1.0 / (2.0 - kSqrt2);

std::vector<GaussianDivergences> divergence_sweep(double delta_min, double delta_max, int steps,
                                                  int threads = 1);

/// Columns: delta,tv,js,w1,roc_div,roc_div_rescaled,prop2_lower,prop2_upper,pinsker_ub,bh_ub
void write_bounds_csv(std::ostream& out, const std::vector<GaussianDivergences>& rows,
                      double rescale = kDefaultRocRescale);

struct DivergenceReport {
  double arc_length_hat = 0.0;
  double roc_divergence_hat = 0.0;
  double tv_lower = 0.0;
  double tv_upper = 0.0;
  double tv_argmax_a = 1.0;
  bool arc_in_range = true;
  std::optional<double> auc_lower_bound;
  FitDiagnostics diagnostics;
  SolverConfig config_echo;
  Index n_pos = 0;
  Index n_neg = 0;
  Index dim = 0;
  bool holdout = false;
};

struct PipelineOptions {
  /// Fraction of each class held out for evaluating the arc length; unset
  /// evaluates on the training sample.
  std::optional<double> holdout;
  std::uint64_t seed = 0;
  /// Also run the two-step procedure and report its AUC* estimate.
  bool with_auc = false;
};

DivergenceReport estimate_divergence_pipeline(const SampleSet& s, const SolverConfig& cfg,
                                              const PipelineOptions& options = {});

/// Report for an already fitted model evaluated on `eval_set`.
DivergenceReport divergence_report(const KernelScoreModel& model, const SampleSet& eval_set);

}  // namespace rocarc
