#include "rocarc/benchmark.hpp"

#include "rocarc/baselines.hpp"
#include "rocarc/parallel.hpp"
#include "rocarc/rng.hpp"
#include "rocarc/rocgeom.hpp"
#include "rocarc/twostep.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

namespace rocarc {

namespace {

constexpr std::uint64_t kTestStream = 0xfeedULL;

void put_double(std::ostream& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::mean_shift:
      return "mean_shift";
    case Scenario::heteroscedastic:
      return "heteroscedastic";
    case Scenario::null_case:
      return "null";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "mean_shift" || name == "mean-shift") return Scenario::mean_shift;
  if (name == "heteroscedastic") return Scenario::heteroscedastic;
  if (name == "null" || name == "null_case") return Scenario::null_case;
  throw InvalidArgument("unknown scenario '" + name +
                        "' (expected mean_shift, heteroscedastic or null)");
}

SolverConfig default_two_step_config() {
  SolverConfig cfg;
  cfg.kernel = KernelType::linear;
  cfg.lambda = 0.0;
  return cfg;
}

std::pair<GaussianSpec, GaussianSpec> scenario_distributions(const BenchmarkSpec& spec) {
  if (spec.dim < 1) {
    throw InvalidArgument("benchmark: dim must be positive");
  }
  const Index d = spec.dim;
  GaussianSpec neg = GaussianSpec::isotropic(VectorXd::Zero(d), 1.0);
  GaussianSpec pos = neg;
  switch (spec.scenario) {
    case Scenario::mean_shift:
      pos.mean = VectorXd::Constant(d, spec.shift / std::sqrt(static_cast<double>(d)));
      break;
    case Scenario::heteroscedastic:
      // Signal spread over every coordinate; the first is far noisier among
      // positives, so the ranking-optimal direction discounts it.
      pos.mean = VectorXd::Constant(d, spec.shift / std::sqrt(static_cast<double>(d)));
      pos.std(0) = 3.0;
      break;
    case Scenario::null_case:
      break;
  }
  return {pos, neg};
}

BenchmarkResult benchmark_imbalanced(const BenchmarkSpec& spec) {
  if (spec.repeats < 2) {
    throw InvalidArgument("benchmark: repeats must be at least 2");
  }
  if (spec.n_pos_grid.empty()) {
    throw InvalidArgument("benchmark: n_pos grid is empty");
  }
  for (Index n : spec.n_pos_grid) {
    if (n < 2) throw InvalidArgument("benchmark: every n_pos must be at least 2");
  }
  if (spec.n_neg < 2 || spec.test_per_class < 1) {
    throw InvalidArgument("benchmark: n_neg must be >= 2 and test_per_class >= 1");
  }
  const auto [dist_pos, dist_neg] = scenario_distributions(spec);
  const SampleSet test = gen_gaussian_pair(dist_pos, dist_neg, spec.test_per_class,
                                           spec.test_per_class, derive_seed(spec.seed, kTestStream));

  const std::array<const char*, 3> methods{kMethodTwoStep, kMethodPairwise, kMethodLogistic};
  const std::size_t n_grid = spec.n_pos_grid.size();
  const auto repeats = static_cast<std::size_t>(spec.repeats);
  std::vector<std::array<double, 3>> aucs(n_grid * repeats);

  parallel_for(aucs.size(), spec.threads, [&](std::size_t task) {
    const std::size_t g = task / repeats;
    const Index n_pos = spec.n_pos_grid[g];
    const SampleSet train = gen_gaussian_pair(dist_pos, dist_neg, n_pos, spec.n_neg,
                                              derive_seed(spec.seed, task));
    const auto test_auc = [&](const VectorXd& scores) {
      return auc_wmw(scores.head(test.n_pos()), scores.tail(test.n_neg()));
    };
    const MatrixXd X = test.pooled();
    // Unclipped step-2 scores: clipping would tie every test point beyond
    // the training box and distort the ranking.
    const TwoStepModel two = two_step_fit(train, spec.two_step);
    aucs[task][0] = test_auc(score_rows(two, X, false));
    aucs[task][1] = test_auc(auc_max_pairwise(train).model.evaluate_rows(X));
    aucs[task][2] = test_auc(logistic_regression(train).model.evaluate_rows(X));
  });

  BenchmarkResult result;
  for (std::size_t g = 0; g < n_grid; ++g) {
    for (std::size_t r = 0; r < repeats; ++r) {
      for (std::size_t m = 0; m < methods.size(); ++m) {
        result.rows.push_back(
            {methods[m], spec.n_pos_grid[g], static_cast<int>(r), aucs[g * repeats + r][m]});
      }
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
      double sum = 0.0;
      for (std::size_t r = 0; r < repeats; ++r) sum += aucs[g * repeats + r][m];
      const double mean = sum / static_cast<double>(repeats);
      double ss = 0.0;
      for (std::size_t r = 0; r < repeats; ++r) {
        const double e = aucs[g * repeats + r][m] - mean;
        ss += e * e;
      }
      const double sd = std::sqrt(ss / static_cast<double>(repeats - 1));
      result.summary.push_back({methods[m], spec.n_pos_grid[g], mean,
                                sd / std::sqrt(static_cast<double>(repeats)), spec.repeats});
    }
  }
  return result;
}

void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result) {
  out << "method,n_pos,repeat,auc\n";
  for (const BenchmarkRow& row : result.rows) {
    out << row.method << ',' << row.n_pos << ',' << row.repeat << ',';
    put_double(out, row.auc);
    out << '\n';
  }
}

const BenchmarkSummary& find_summary(const BenchmarkResult& result, const std::string& method,
                                     Index n_pos) {
  for (const BenchmarkSummary& s : result.summary) {
    if (s.method == method && s.n_pos == n_pos) return s;
  }
  throw InvalidArgument("no benchmark summary for " + method + " at n_pos=" +
                        std::to_string(n_pos));
}

}  // namespace rocarc
