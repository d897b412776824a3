#pragma once

#include "rocarc/data.hpp"
#include "rocarc/kernel.hpp"
#include "rocarc/linear_model.hpp"
#include "rocarc/types.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace rocarc {

/// Settings for the constrained arctangent-ratio fit.
///
/// The barrier weight follows barrier_init * barrier_decay^t until it drops
/// below barrier_floor; each stage runs damped Newton until the gradient of
/// the barrier-augmented objective is below grad_tol (or max_newton_iters).
/// Training scores are kept inside [eps_margin, pi/2 - eps_margin].
struct SolverConfig {
  std::optional<double> lambda;     // unset: n_min^{-1/4}
  std::optional<double> bandwidth;  // unset: median heuristic
  KernelType kernel = KernelType::gaussian;
  double barrier_init = 1.0;
  double barrier_decay = 0.5;
  double grad_tol = 1e-6;
  double barrier_floor = 1e-8;
  int max_newton_iters = 200;
  double eps_margin = 1e-6;

  void validate() const;
};

/// Fills in lambda and bandwidth when unset.
SolverConfig resolve(const SolverConfig& cfg, const SampleSet& s);

/// n_min^{-1/4}.
double default_lambda(const SampleSet& s);

struct FitDiagnostics {
  double final_objective = 0.0;  // objective without barrier terms
  double grad_norm = 0.0;        // barrier-augmented gradient, final stage
  int n_active_constraints = 0;  // training scores within 1e-5 of a bound
  int iterations = 0;            // total Newton steps
  int stages = 0;
  bool feasible = false;
  bool converged = false;
  Index rank = 0;                // retained Gram eigen-directions
  std::vector<double> stage_objectives;
};

/// Nonnegative per-sample weights for the weighted objective.
struct SampleWeights {
  VectorXd pos;
  VectorXd neg;
};

/// Factorization K = F F^T of the training Gram matrix restricted to its
/// numerically nonzero spectrum. Scores are u = F theta, the RKHS norm is
/// |theta|^2 and dual coefficients are alpha = to_alpha * theta.
struct KernelBasis {
  MatrixXd features;
  MatrixXd to_alpha;
  KernelParams params;
};

KernelBasis make_basis(const ConstMatrixRef& points, const KernelParams& params);

struct FitResult {
  KernelScoreModel model;
  FitDiagnostics diagnostics;
  VectorXd train_scores;  // v(x) on positives then negatives
  double lambda = 0.0;
  double bandwidth = 0.0;
};

/// Minimizes
///   -(1/n+) sum w+ sin v(x+) - (1/n-) sum w- cos v(x-) + lambda/2 |v|_H^2
/// over v in the RKHS spanned by the pooled sample, with every training score
/// constrained to the box. Unit weights when `weights` is null.
FitResult fit_atan_ratio(const SampleSet& s, const SolverConfig& cfg,
                         const SampleWeights* weights = nullptr);

/// Same fit reusing a basis built from `s.pooled()`; cfg.lambda must be set.
FitResult fit_atan_ratio(const SampleSet& s, const KernelBasis& basis, const SolverConfig& cfg,
                         const SampleWeights* weights = nullptr);

/// Objective (no barrier) and its gradient in alpha:
///   grad = K g + lambda K alpha,  g+ = -(w/n+) cos v,  g- = (w/n-) sin v.
/// cfg must carry lambda and bandwidth (see `resolve`).
std::pair<double, VectorXd> objective_and_gradient(const ConstVectorRef& alpha,
                                                   const SampleSet& s, const SolverConfig& cfg,
                                                   const SampleWeights* weights = nullptr);

/// Variant taking the pooled Gram matrix directly.
std::pair<double, VectorXd> objective_and_gradient(const ConstVectorRef& alpha,
                                                   const MatrixXd& gram_matrix, Index n_pos,
                                                   double lambda,
                                                   const SampleWeights* weights = nullptr);

/// (1/n+) sum sin v + (1/n-) sum cos v for scores already evaluated.
double variational_value(const ConstVectorRef& scores_pos, const ConstVectorRef& scores_neg);

struct CvCell {
  double lambda = 0.0;
  double bandwidth = 0.0;
  double mean_score = 0.0;  // held-out variational value, averaged over folds
  std::vector<double> fold_scores;
};

struct CvResult {
  SolverConfig selected;
  std::vector<CvCell> cells;
};

/// Grid search on held-out variational value with stratified folds. Ties go
/// to the larger lambda, then the larger bandwidth.
CvResult cross_validate(const SampleSet& s, const std::vector<double>& lambda_grid,
                        const std::vector<double>& bandwidth_grid, int k_folds,
                        std::uint64_t seed, const SolverConfig& base = {}, int threads = 1);

/// Default grids: lambda in n_min^{-1/4} * {1, 1e-1, 1e-2, 1e-3},
/// bandwidth in median * {0.25, 0.5, 1, 2}.
std::vector<double> default_lambda_grid(const SampleSet& s);
std::vector<double> default_bandwidth_grid(const SampleSet& s);

struct LogRatioOptions {
  int restarts = 8;
  double init_scale = 0.1;
  std::uint64_t seed = 0;
  int max_iters = 500;
  double grad_tol = 1e-8;
};

struct LogRatioFit {
  LinearModel model;  // estimates log p+(x)/p-(x)
  double objective = 0.0;
  FitDiagnostics diagnostics;
};

/// Maximizes (1/n+) sum sin(atan(exp(z))) + (1/n-) sum cos(atan(exp(z))),
/// z = <v, x> + v0, by multi-start BFGS; the best local optimum wins.
LogRatioFit fit_log_ratio(const SampleSet& s, const LogRatioOptions& options = {});

}  // namespace rocarc
