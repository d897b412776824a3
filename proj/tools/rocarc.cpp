// rocarc command-line front end.
#include "rocarc/baselines.hpp"
#include "rocarc/benchmark.hpp"
#include "rocarc/divergence.hpp"
#include "rocarc/estimator.hpp"
#include "rocarc/parallel.hpp"
#include "rocarc/report.hpp"
#include "rocarc/rocgeom.hpp"
#include "rocarc/twostep.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace rocarc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct DataArgs {
  std::string input;
  std::string label = "label";
  std::string positive_label;
  bool standardize = false;
  std::string gen;
  std::optional<double> delta;
  int dim = 1;
  std::vector<std::string> means;
  std::vector<std::string> stds;
  Index n = 200;
  std::optional<Index> n_pos;
  std::optional<Index> n_neg;
};

struct SolverArgs {
  std::optional<double> lambda;
  std::string bandwidth = "median";
  std::string kernel = "gaussian";
  std::optional<int> cv;
};

struct Common {
  std::uint64_t seed = 0;
  std::optional<int> threads;
  std::string out;
  bool verbose = false;
};

void add_data_options(CLI::App* cmd, DataArgs& d) {
  cmd->add_option("--input", d.input, "CSV file with a header row");
  cmd->add_option("--label", d.label, "label column name")->capture_default_str();
  cmd->add_option("--positive-label", d.positive_label, "label value of the positive class");
  cmd->add_flag("--standardize", d.standardize, "z-score features with pooled statistics");
  cmd->add_option("--gen", d.gen, "synthetic generator instead of --input")
      ->check(CLI::IsMember({"gauss"}));
  cmd->add_option("--delta", d.delta, "mean separation along the first coordinate");
  cmd->add_option("--dim", d.dim, "generator dimension")->capture_default_str();
  cmd->add_option("--mean", d.means, "class mean as comma list, given twice (positive, negative)");
  cmd->add_option("--std", d.stds, "class std (scalar or comma list), given twice");
  cmd->add_option("--n", d.n, "samples per class")->capture_default_str();
  cmd->add_option("--npos", d.n_pos, "positive sample count");
  cmd->add_option("--nneg", d.n_neg, "negative sample count");
}

void add_solver_options(CLI::App* cmd, SolverArgs& s) {
  cmd->add_option("--lambda", s.lambda, "regularization weight (skips cross-validation)");
  cmd->add_option("--bandwidth", s.bandwidth, "kernel bandwidth or 'median'")
      ->capture_default_str();
  cmd->add_option("--kernel", s.kernel, "gaussian or linear")->capture_default_str();
  cmd->add_option("--cv", s.cv, "cross-validation folds; default 5 without --lambda, 0 disables");
}

void add_common_options(CLI::App* cmd, Common& c, const char* out_help) {
  cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads (default $ROCARC_THREADS or 1)");
  cmd->add_option("--out", c.out, out_help);
  cmd->add_flag("-v,--verbose", c.verbose, "stage timings on stderr");
}

VectorXd parse_vector(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw InvalidArgument(std::string(flag) + ": empty vector");
  return Eigen::Map<VectorXd>(values.data(), static_cast<Index>(values.size()));
}

std::pair<GaussianSpec, GaussianSpec> generator_specs(const DataArgs& d) {
  if (d.dim < 1) throw InvalidArgument("--dim must be positive");
  const Index dim = d.dim;
  GaussianSpec pos = GaussianSpec::isotropic(VectorXd::Zero(dim), 1.0);
  GaussianSpec neg = pos;
  if (!d.means.empty()) {
    if (d.delta) throw InvalidArgument("--delta and --mean are mutually exclusive");
    if (d.means.size() != 2) throw InvalidArgument("--mean must be given twice (positive, negative)");
    pos.mean = parse_vector(d.means[0], "--mean");
    neg.mean = parse_vector(d.means[1], "--mean");
  } else if (d.delta) {
    pos.mean(0) = *d.delta / 2.0;
    neg.mean(0) = -*d.delta / 2.0;
  } else {
    throw InvalidArgument("--gen gauss needs --delta or --mean");
  }
  const auto std_for = [](const std::string& text, Index dim_) {
    const VectorXd v = parse_vector(text, "--std");
    return v.size() == 1 ? VectorXd::Constant(dim_, v(0)) : v;
  };
  if (!d.stds.empty()) {
    if (d.stds.size() != 2) throw InvalidArgument("--std must be given twice (positive, negative)");
    pos.std = std_for(d.stds[0], pos.mean.size());
    neg.std = std_for(d.stds[1], neg.mean.size());
  } else {
    pos.std = VectorXd::Ones(pos.mean.size());
    neg.std = VectorXd::Ones(neg.mean.size());
  }
  if (pos.mean.size() != neg.mean.size() || pos.std.size() != pos.mean.size() ||
      neg.std.size() != neg.mean.size()) {
    throw InvalidArgument("generator means and stds must share one dimension");
  }
  return {pos, neg};
}

json data_echo(const DataArgs& d) {
  json j;
  if (!d.input.empty()) {
    j = {{"input", d.input}, {"label", d.label}, {"standardize", d.standardize}};
    if (!d.positive_label.empty()) j["positive_label"] = d.positive_label;
    return j;
  }
  const auto [pos, neg] = generator_specs(d);
  const auto vec = [](const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"gen", d.gen},
          {"mean_pos", vec(pos.mean)},
          {"mean_neg", vec(neg.mean)},
          {"std_pos", vec(pos.std)},
          {"std_neg", vec(neg.std)},
          {"n_pos", d.n_pos.value_or(d.n)},
          {"n_neg", d.n_neg.value_or(d.n)},
          {"standardize", d.standardize}};
}

SampleSet load_data(const DataArgs& d, std::uint64_t seed) {
  if (!d.input.empty() && !d.gen.empty()) {
    throw InvalidArgument("--input and --gen are mutually exclusive");
  }
  SampleSet s;
  if (!d.input.empty()) {
    CsvOptions opts;
    opts.label_column = d.label;
    if (!d.positive_label.empty()) opts.positive_label = d.positive_label;
    opts.standardize = d.standardize;
    return load_csv(d.input, opts);
  }
  if (d.gen.empty()) {
    throw InvalidArgument("no data: pass --input FILE or --gen gauss");
  }
  const auto [pos, neg] = generator_specs(d);
  s = gen_gaussian_pair(pos, neg, d.n_pos.value_or(d.n), d.n_neg.value_or(d.n), seed);
  return d.standardize ? standardize(s) : s;
}

struct ResolvedSolver {
  SolverConfig config;
  std::optional<CvResult> cv;
};

ResolvedSolver resolve_solver(const SolverArgs& a, const SampleSet& s, std::uint64_t seed,
                              int threads) {
  SolverConfig base;
  base.kernel = kernel_type_from_string(a.kernel);
  if (a.bandwidth != "median") {
    try {
      base.bandwidth = std::stod(a.bandwidth);
    } catch (const std::exception&) {
      throw InvalidArgument("--bandwidth must be a number or 'median'");
    }
  }
  base.lambda = a.lambda;
  const int folds = a.cv.value_or(a.lambda ? 0 : 5);
  ResolvedSolver out;
  if (folds > 0) {
    if (folds < 2) throw InvalidArgument("--cv needs at least 2 folds");
    const std::vector<double> lambdas =
        a.lambda ? std::vector<double>{*a.lambda} : default_lambda_grid(s);
    std::vector<double> bandwidths{1.0};
    if (base.kernel == KernelType::gaussian) {
      bandwidths = base.bandwidth ? std::vector<double>{*base.bandwidth} : default_bandwidth_grid(s);
    }
    out.cv = cross_validate(s, lambdas, bandwidths, folds, seed, base, threads);
    out.config = out.cv->selected;
  } else {
    out.config = resolve(base, s);
  }
  return out;
}

json cv_json(const CvResult& cv) {
  json cells = json::array();
  for (const CvCell& c : cv.cells) {
    cells.push_back({{"lambda", c.lambda}, {"bandwidth", c.bandwidth}, {"mean_score", c.mean_score}});
  }
  return {{"selected_lambda", *cv.selected.lambda},
          {"selected_bandwidth", *cv.selected.bandwidth},
          {"cells", cells}};
}

json solver_echo(const SolverArgs& a) {
  return {{"lambda", a.lambda ? json(*a.lambda) : json(nullptr)},
          {"bandwidth", a.bandwidth},
          {"kernel", a.kernel},
          {"cv", a.cv ? json(*a.cv) : json(nullptr)}};
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
  } else {
    write_file_atomic(path, content);
  }
}

void log_timings(const RunManifest& manifest, bool verbose) {
  if (!verbose) return;
  const json timings = manifest.to_json().at("timings_ms");
  for (const auto& item : timings.items()) {
    std::cerr << "[rocarc] " << item.key() << ": " << item.value().get<double>() << " ms\n";
  }
}

std::string csv_with_manifest(const RunManifest& manifest, const std::string& body) {
  return "# rocarc-manifest " + manifest.to_json_stable().dump() + "\n" + body;
}

KernelScoreModel read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("model file '" + path + "': " + e.what());
  }
  return (j.contains("model") ? j.at("model") : j).get<KernelScoreModel>();
}

// ---- subcommands ----

int cmd_fit(const DataArgs& data, const SolverArgs& solver, const Common& c) {
  const int threads = resolve_threads(c.threads);
  RunManifest manifest("fit", {{"data", data_echo(data)}, {"solver", solver_echo(solver)}}, c.seed);
  const SampleSet s = manifest.timed("load", [&] { return load_data(data, c.seed); });
  const ResolvedSolver rs = manifest.timed("select", [&] { return resolve_solver(solver, s, c.seed, threads); });
  const FitResult fit = manifest.timed("fit", [&] { return fit_atan_ratio(s, rs.config); });

  json out{{"manifest", manifest.to_json()},
           {"data", sample_metadata(s)},
           {"config", rs.config},
           {"model", fit.model},
           {"diagnostics", fit.diagnostics},
           {"train_arc_length_hat",
            arc_length_estimate(fit.model, s)}};
  if (rs.cv) out["cv"] = cv_json(*rs.cv);
  emit(c.out, out.dump(2) + "\n");
  log_timings(manifest, c.verbose);
  if (!fit.diagnostics.converged) {
    std::cerr << "rocarc: solver did not converge (grad_norm " << fit.diagnostics.grad_norm << ")\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_divergence(const DataArgs& data, const SolverArgs& solver, const Common& c,
                   std::optional<double> holdout, const std::string& model_path, bool with_auc) {
  const int threads = resolve_threads(c.threads);
  json config{{"data", data_echo(data)}, {"solver", solver_echo(solver)}, {"with_auc", with_auc}};
  if (holdout) config["holdout"] = *holdout;
  if (!model_path.empty()) config["model"] = model_path;
  RunManifest manifest("divergence", config, c.seed);
  const SampleSet s = manifest.timed("load", [&] { return load_data(data, c.seed); });

  DivergenceReport report;
  std::optional<CvResult> cv;
  if (!model_path.empty()) {
    const KernelScoreModel model = read_model(model_path);
    report = manifest.timed("evaluate", [&] { return divergence_report(model, s); });
    report.diagnostics.converged = true;
    report.diagnostics.feasible = true;
  } else {
    if (holdout && !(*holdout > 0.0 && *holdout < 1.0)) {
      throw InvalidArgument("--holdout must lie in (0, 1)");
    }
    // Hyperparameters are chosen on the training part only.
    SampleSet train = s;
    if (holdout) train = split(s, 1.0 - *holdout, c.seed).first;
    const ResolvedSolver rs =
        manifest.timed("select", [&] { return resolve_solver(solver, train, c.seed, threads); });
    cv = rs.cv;
    PipelineOptions opts;
    opts.holdout = holdout;
    opts.seed = c.seed;
    opts.with_auc = with_auc;
    report = manifest.timed("estimate", [&] { return estimate_divergence_pipeline(s, rs.config, opts); });
  }
  json out = report;
  out["manifest"] = manifest.to_json();
  if (cv) out["cv"] = cv_json(*cv);
  emit(c.out, out.dump(2) + "\n");
  log_timings(manifest, c.verbose);
  if (model_path.empty() && !report.diagnostics.converged) {
    std::cerr << "rocarc: solver did not converge\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_figure_bounds(double delta_min, double delta_max, int steps, double rescale,
                      const Common& c) {
  const int threads = resolve_threads(c.threads);
  RunManifest manifest("figure-bounds",
                       {{"delta_min", delta_min},
                        {"delta_max", delta_max},
                        {"steps", steps},
                        {"rescale", rescale}},
                       c.seed);
  const auto rows =
      manifest.timed("sweep", [&] { return divergence_sweep(delta_min, delta_max, steps, threads); });
  std::ostringstream body;
  write_bounds_csv(body, rows, rescale);
  emit(c.out, csv_with_manifest(manifest, body.str()));
  log_timings(manifest, c.verbose);
  return kExitOk;
}

struct BenchArgs {
  std::string scenario = "mean_shift";
  std::vector<Index> grid{24, 48, 72, 96, 120};
  Index n_neg = 1000;
  int repeats = 20;
  Index test_n = 10000;
  int dim = 5;
  double shift = 1.0;
  std::string summary;
};

int cmd_benchmark(const BenchArgs& b, const Common& c) {
  BenchmarkSpec spec;
  spec.scenario = scenario_from_string(b.scenario);
  spec.n_pos_grid = b.grid;
  spec.n_neg = b.n_neg;
  spec.repeats = b.repeats;
  spec.test_per_class = b.test_n;
  spec.dim = b.dim;
  spec.shift = b.shift;
  spec.seed = c.seed;
  spec.threads = resolve_threads(c.threads);
  // Thread count does not affect results, so it stays out of the manifest.
  RunManifest manifest("benchmark",
                       {{"scenario", to_string(spec.scenario)},
                        {"n_pos_grid", spec.n_pos_grid},
                        {"n_neg", spec.n_neg},
                        {"repeats", spec.repeats},
                        {"test_per_class", spec.test_per_class},
                        {"dim", spec.dim},
                        {"shift", spec.shift},
                        {"two_step", spec.two_step}},
                       c.seed);
  const BenchmarkResult result = manifest.timed("benchmark", [&] { return benchmark_imbalanced(spec); });
  std::ostringstream body;
  write_benchmark_csv(body, result);
  emit(c.out, csv_with_manifest(manifest, body.str()));
  if (!b.summary.empty()) {
    json j{{"manifest", manifest.to_json()}, {"summary", result.summary}};
    write_file_atomic(b.summary, j.dump(2) + "\n");
  } else {
    for (const BenchmarkSummary& s : result.summary) {
      std::cerr << s.method << " n_pos=" << s.n_pos << " auc=" << s.mean_auc << " +- "
                << s.std_error << "\n";
    }
  }
  log_timings(manifest, c.verbose);
  return kExitOk;
}

struct RocArgs {
  std::string scores;
  std::string score_column = "score";
  std::string model;
  bool surface = false;
  int alphas = 6;
  int taus = 50;
};

int cmd_roc(const RocArgs& r, const DataArgs& data, const Common& c) {
  json config{{"surface", r.surface}, {"alphas", r.alphas}, {"taus", r.taus}};
  if (!r.scores.empty()) {
    config["scores"] = r.scores;
    config["score_column"] = r.score_column;
    config["label"] = data.label;
  } else {
    config["model"] = r.model;
    config["data"] = data_echo(data);
  }
  RunManifest manifest("roc", config, c.seed);
  VectorXd pos;
  VectorXd neg;
  if (!r.scores.empty()) {
    if (!r.model.empty()) throw InvalidArgument("--scores and --model are mutually exclusive");
    CsvOptions opts;
    opts.label_column = data.label;
    if (!data.positive_label.empty()) opts.positive_label = data.positive_label;
    const SampleSet s = load_csv(r.scores, opts);
    const auto it = std::find(s.feature_names.begin(), s.feature_names.end(), r.score_column);
    if (it == s.feature_names.end()) {
      throw InvalidArgument("scores file has no column '" + r.score_column + "'");
    }
    const Index col = it - s.feature_names.begin();
    pos = s.positives.col(col);
    neg = s.negatives.col(col);
  } else if (!r.model.empty()) {
    const KernelScoreModel model = read_model(r.model);
    const SampleSet s = load_data(data, c.seed);
    pos = model.evaluate_rows(s.positives, true);
    neg = model.evaluate_rows(s.negatives, true);
  } else {
    throw InvalidArgument("roc needs --scores FILE or --model FILE with data flags");
  }
  std::ostringstream body;
  if (r.surface) {
    write_surface_csv(body, mixture_surface_grid(pos, neg, r.alphas, r.taus));
  } else {
    write_roc_csv(body, empirical_roc(pos, neg));
  }
  emit(c.out, csv_with_manifest(manifest, body.str()));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arc-length ROC divergence estimation and approximate maximal-AUC fitting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  DataArgs fit_data;
  SolverArgs fit_solver;
  Common fit_common;
  auto* fit = app.add_subcommand("fit", "fit the arctangent likelihood ratio; writes model JSON");
  add_data_options(fit, fit_data);
  add_solver_options(fit, fit_solver);
  add_common_options(fit, fit_common, "model JSON path (default stdout)");

  std::optional<double> holdout;
  std::string model_path;
  bool with_auc = false;
  DataArgs div_data;
  SolverArgs div_solver;
  Common div_common;
  auto* div = app.add_subcommand("divergence", "estimate the ROC divergence and TV bounds");
  add_data_options(div, div_data);
  add_solver_options(div, div_solver);
  add_common_options(div, div_common, "report JSON path (default stdout)");
  div->add_option("--holdout", holdout, "fraction held out for evaluation");
  div->add_option("--model", model_path, "evaluate a fitted model instead of fitting");
  div->add_flag("--auc", with_auc, "also run the two-step AUC* lower bound");

  double delta_min = 0.0;
  double delta_max = 5.0;
  int steps = 101;
  double rescale = kDefaultRocRescale;
  auto* fig = app.add_subcommand("figure-bounds", "divergence and TV-bound sweep over delta (CSV)");
  fig->add_option("--delta-min", delta_min)->capture_default_str();
  fig->add_option("--delta-max", delta_max)->capture_default_str();
  fig->add_option("--steps", steps)->capture_default_str();
  fig->add_option("--rescale", rescale, "factor for the roc_div_rescaled column")
      ->capture_default_str();
  Common fig_common;
  add_common_options(fig, fig_common, "CSV path (default stdout)");

  BenchArgs bench;
  auto* bm = app.add_subcommand("benchmark", "imbalanced AUC benchmark (CSV + JSON summary)");
  bm->add_option("--scenario", bench.scenario, "mean_shift, heteroscedastic or null")
      ->capture_default_str();
  bm->add_option("--npos-grid", bench.grid, "positive counts")->delimiter(',')->capture_default_str();
  bm->add_option("--nneg", bench.n_neg)->capture_default_str();
  bm->add_option("--repeats", bench.repeats)->capture_default_str();
  bm->add_option("--test-n", bench.test_n, "test samples per class")->capture_default_str();
  bm->add_option("--dim", bench.dim)->capture_default_str();
  bm->add_option("--shift", bench.shift, "mean shift norm")->capture_default_str();
  bm->add_option("--summary", bench.summary, "summary JSON path");
  Common bm_common;
  add_common_options(bm, bm_common, "per-repeat CSV path (default stdout)");

  RocArgs roc;
  auto* rc = app.add_subcommand("roc", "empirical ROC vertices or mixture surface grid (CSV)");
  rc->add_option("--scores", roc.scores, "CSV with a score column and a label column");
  rc->add_option("--score-column", roc.score_column)->capture_default_str();
  rc->add_option("--model", roc.model, "model JSON from `fit`, scored on the data flags");
  rc->add_flag("--surface", roc.surface, "emit the mixture surface grid instead");
  rc->add_option("--alphas", roc.alphas)->capture_default_str();
  rc->add_option("--taus", roc.taus)->capture_default_str();
  DataArgs rc_data;
  Common rc_common;
  add_data_options(rc, rc_data);
  add_common_options(rc, rc_common, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_data, fit_solver, fit_common);
    if (div->parsed()) {
      return cmd_divergence(div_data, div_solver, div_common, holdout, model_path, with_auc);
    }
    if (fig->parsed()) return cmd_figure_bounds(delta_min, delta_max, steps, rescale, fig_common);
    if (bm->parsed()) return cmd_benchmark(bench, bm_common);
    if (rc->parsed()) return cmd_roc(roc, rc_data, rc_common);
  } catch (const NumericalError& e) {
    std::cerr << "rocarc: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "rocarc: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
