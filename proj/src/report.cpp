#include "rocarc/report.hpp"

#include <fstream>
#include <system_error>

namespace rocarc {

namespace {

json matrix_rows(const MatrixXd& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
}

MatrixXd matrix_from(const json& j, Index cols_if_empty) {
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return MatrixXd(0, cols_if_empty);
  const Index cols = static_cast<Index>(j.at(0).size());
  MatrixXd M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != cols) {
      throw ParseError("model JSON: support_points rows have different lengths");
    }
    for (Index c = 0; c < cols; ++c) M(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return M;
}

}  // namespace

void to_json(json& j, const KernelScoreModel& model) {
  j = json{{"kernel", to_string(model.params.type)},
           {"bandwidth", model.params.bandwidth},
           {"support_points", matrix_rows(model.support_points)},
           {"alpha", vector_json(model.alpha)},
           {"clip_range", {model.clip_lo, model.clip_hi}}};
}

void from_json(const json& j, KernelScoreModel& model) {
  try {
    model.params.type = kernel_type_from_string(j.value("kernel", std::string("gaussian")));
    model.params.bandwidth = j.at("bandwidth").get<double>();
    model.alpha = vector_from(j.at("alpha"));
    model.support_points = matrix_from(j.at("support_points"), 0);
    const auto clip = j.at("clip_range").get<std::vector<double>>();
    if (clip.size() != 2) throw ParseError("model JSON: clip_range must have two entries");
    model.clip_lo = clip[0];
    model.clip_hi = clip[1];
  } catch (const json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
  model.validate();
}

void to_json(json& j, const FitDiagnostics& d) {
  j = json{{"final_objective", d.final_objective},
           {"grad_norm", d.grad_norm},
           {"n_active_constraints", d.n_active_constraints},
           {"iterations", d.iterations},
           {"stages", d.stages},
           {"feasible", d.feasible},
           {"converged", d.converged},
           {"rank", d.rank}};
}

void to_json(json& j, const SolverConfig& cfg) {
  j = json{{"kernel", to_string(cfg.kernel)},
           {"lambda", cfg.lambda ? json(*cfg.lambda) : json(nullptr)},
           {"bandwidth", cfg.bandwidth ? json(*cfg.bandwidth) : json(nullptr)},
           {"barrier_init", cfg.barrier_init},
           {"barrier_decay", cfg.barrier_decay},
           {"grad_tol", cfg.grad_tol},
           {"barrier_floor", cfg.barrier_floor},
           {"max_newton_iters", cfg.max_newton_iters},
           {"eps_margin", cfg.eps_margin}};
}

void to_json(json& j, const LinearModel& m) {
  j = json{{"weights", vector_json(m.weights)}, {"intercept", m.intercept}};
}

void to_json(json& j, const DivergenceReport& r) {
  j = json{{"arc_length_hat", r.arc_length_hat},
           {"roc_divergence_hat", r.roc_divergence_hat},
           {"tv_lower", r.tv_lower},
           {"tv_upper", r.tv_upper},
           {"tv_argmax_a", r.tv_argmax_a},
           {"arc_in_range", r.arc_in_range},
           {"auc_lower_bound", r.auc_lower_bound ? json(*r.auc_lower_bound) : json(nullptr)},
           {"diagnostics", r.diagnostics},
           {"config", r.config_echo},
           {"n_pos", r.n_pos},
           {"n_neg", r.n_neg},
           {"dim", r.dim},
           {"holdout", r.holdout}};
}

void to_json(json& j, const TwoStepModel& m) {
  j = json{{"step1_model", m.step1_model},
           {"step2_model", m.step2_model},
           {"ecdf_pos", m.ecdf_pos.sorted_values()},
           {"ecdf_neg", m.ecdf_neg.sorted_values()},
           {"A_hat", m.A_hat},
           {"auc_star_hat", m.auc_star_hat},
           {"degenerate", m.degenerate},
           {"step1_diagnostics", m.step1_diagnostics},
           {"step2_diagnostics", m.step2_diagnostics}};
}

void from_json(const json& j, TwoStepModel& m) {
  try {
    m.step1_model = j.at("step1_model").get<KernelScoreModel>();
    m.step2_model = j.at("step2_model").get<KernelScoreModel>();
    m.ecdf_pos = Ecdf(j.at("ecdf_pos").get<std::vector<double>>());
    m.ecdf_neg = Ecdf(j.at("ecdf_neg").get<std::vector<double>>());
    m.A_hat = j.at("A_hat").get<double>();
    m.auc_star_hat = j.at("auc_star_hat").get<double>();
    m.degenerate = j.value("degenerate", false);
  } catch (const json::exception& e) {
    throw ParseError(std::string("two-step model JSON: ") + e.what());
  }
}

void to_json(json& j, const BenchmarkSummary& s) {
  j = json{{"method", s.method},
           {"n_pos", s.n_pos},
           {"mean_auc", s.mean_auc},
           {"std_error", s.std_error},
           {"repeats", s.repeats}};
}

json sample_metadata(const SampleSet& s) {
  return json{{"dim", s.dim()}, {"n_pos", s.n_pos()}, {"n_neg", s.n_neg()}};
}

RunManifest::RunManifest(std::string subcommand, json config, std::uint64_t seed)
    : subcommand_(std::move(subcommand)), config_(std::move(config)), seed_(seed) {}

void RunManifest::record(const std::string& stage, std::chrono::steady_clock::time_point start) {
  const auto elapsed = std::chrono::steady_clock::now() - start;
  timings_ms_.emplace_back(stage,
                           std::chrono::duration<double, std::milli>(elapsed).count());
}

json RunManifest::to_json_stable() const {
  return json{{"subcommand", subcommand_}, {"config", config_}, {"seed", seed_},
              {"version", kVersion}};
}

json RunManifest::to_json() const {
  json j = to_json_stable();
  json timings = json::object();
  for (const auto& [stage, ms] : timings_ms_) timings[stage] = ms;
  j["timings_ms"] = std::move(timings);
  return j;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("cannot open '" + tmp.string() + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw Error("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

}  // namespace rocarc
