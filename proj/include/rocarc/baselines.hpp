#pragma once

#include "rocarc/data.hpp"
#include "rocarc/linear_model.hpp"

namespace rocarc {

struct PairwiseConfig {
  double grad_tol = 1e-6;
  int max_iters = 10000;
};

struct PairwiseFit {
  LinearModel model;  // intercept is 0: the pairwise objective ignores it
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Maximizes (1/(n+ n-)) sum_ij L(t(x+_j), t(x-_i)), L(a, b) = -(1 - (a - b))^2,
/// over linear t by full-batch conjugate-gradient ascent on the decomposed form.
PairwiseFit auc_max_pairwise(const SampleSet& s, const PairwiseConfig& config = {});

/// Negated pairwise objective in O(n d):
///   1 + Var+<v,x> + Var-<v,x> + 2 <v, mu- - mu+> + <v, mu- - mu+>^2
/// with 1/n variances, which makes it equal to the pairwise double sum.
double pairwise_objective_decomposed(const LinearModel& v, const SampleSet& s);

struct LogisticConfig {
  double grad_tol = 1e-6;
  int max_iters = 100;
  double l2 = 0.0;
};

struct LogisticFit {
  LinearModel model;
  double loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool separated = false;  // training data linearly separated
};

/// Mean logistic loss minimized by damped Newton. Coordinates with zero pooled
/// variance get weight 0.
LogisticFit logistic_regression(const SampleSet& s, const LogisticConfig& config = {});

}  // namespace rocarc
