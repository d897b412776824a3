#pragma once

#include "rocarc/data.hpp"
#include "rocarc/estimator.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace rocarc {

enum class Scenario {
  mean_shift,       // N(shift * 1/sqrt(d), I) vs N(0, I)
  heteroscedastic,  // positives with a different diagonal covariance
  null_case,        // both classes N(0, I)
};

std::string to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& name);

/// Affine kernel without regularization, matching the all-linear comparison.
SolverConfig default_two_step_config();

struct BenchmarkSpec {
  Scenario scenario = Scenario::mean_shift;
  int dim = 5;
  double shift = 1.0;
  std::vector<Index> n_pos_grid{24, 48, 72, 96, 120};
  Index n_neg = 1000;
  int repeats = 20;
  Index test_per_class = 10000;
  std::uint64_t seed = 0;
  SolverConfig two_step = default_two_step_config();
  int threads = 1;
};

/// Class-conditional distributions (positive, negative) of a scenario.
std::pair<GaussianSpec, GaussianSpec> scenario_distributions(const BenchmarkSpec& spec);

struct BenchmarkRow {
  std::string method;
  Index n_pos = 0;
  int repeat = 0;
  double auc = 0.0;
};

struct BenchmarkSummary {
  std::string method;
  Index n_pos = 0;
  double mean_auc = 0.0;
  double std_error = 0.0;
  int repeats = 0;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
  std::vector<BenchmarkSummary> summary;
};

inline constexpr const char* kMethodTwoStep = "two_step";
inline constexpr const char* kMethodPairwise = "auc_max_pairwise";
inline constexpr const char* kMethodLogistic = "logistic";

/// Trains the two-step procedure, the pairwise AUC maximizer and logistic
/// regression on imbalanced draws and scores each on one fixed test set.
BenchmarkResult benchmark_imbalanced(const BenchmarkSpec& spec);

/// Columns: method,n_pos,repeat,auc
void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result);

const BenchmarkSummary& find_summary(const BenchmarkResult& result, const std::string& method,
                                     Index n_pos);

}  // namespace rocarc
