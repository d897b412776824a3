#pragma once

#include "rocarc/estimator.hpp"
#include "rocarc/kernel.hpp"
#include "rocarc/rocgeom.hpp"

namespace rocarc {

struct TwoStepModel {
  KernelScoreModel step1_model;
  Ecdf ecdf_pos{{0.0}};
  Ecdf ecdf_neg{{0.0}};
  KernelScoreModel step2_model;
  double A_hat = 0.0;
  double auc_star_hat = 0.5;
  bool degenerate = false;  // every step-2 weight was zero
  FitDiagnostics step1_diagnostics;
  FitDiagnostics step2_diagnostics;
};

/// sin(tau + pi/4) |F+(tau) - F-(tau)| with tau clamped into [0, pi/2].
double weight_fn(double tau, const Ecdf& ecdf_pos, const Ecdf& ecdf_neg);

/// Unweighted fit, score ECDFs, weighted refit with the same configuration;
/// AUC* ~ sqrt(2) A / 2 + 1/2 with A the weighted objective at the optimum.
TwoStepModel two_step_fit(const SampleSet& s, const SolverConfig& cfg);

/// Clipped step-2 score.
double score(const TwoStepModel& model, const ConstVectorRef& x);
VectorXd score_rows(const TwoStepModel& model, const ConstMatrixRef& X, bool clip = true);

/// sqrt(2) A / 2 + 1/2.
inline double auc_from_area(double A) { return kSqrt2 * A / 2.0 + 0.5; }

}  // namespace rocarc
