#pragma once

#include "rocarc/baselines.hpp"
#include "rocarc/benchmark.hpp"
#include "rocarc/divergence.hpp"
#include "rocarc/estimator.hpp"
#include "rocarc/kernel.hpp"
#include "rocarc/twostep.hpp"

#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace rocarc {

using nlohmann::json;

inline constexpr const char* kVersion = "rocarc 0.1.0";

void to_json(json& j, const KernelScoreModel& model);
void from_json(const json& j, KernelScoreModel& model);
void to_json(json& j, const FitDiagnostics& d);
void to_json(json& j, const SolverConfig& cfg);
void to_json(json& j, const LinearModel& m);
void to_json(json& j, const DivergenceReport& r);
void to_json(json& j, const TwoStepModel& m);
void from_json(const json& j, TwoStepModel& m);
void to_json(json& j, const BenchmarkSummary& s);

/// {dim, n_pos, n_neg}
json sample_metadata(const SampleSet& s);

/// Provenance block embedded in every emitted artifact.
class RunManifest {
 public:
  RunManifest(std::string subcommand, json config, std::uint64_t seed);

  /// Times `fn` under `stage` and returns its result.
  template <typename F>
  auto timed(const std::string& stage, F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(stage, start);
    } else {
      auto result = fn();
      record(stage, start);
      return result;
    }
  }

  /// Full manifest including wall-clock timings.
  json to_json() const;
  /// Manifest without timings, so that byte-stable artifacts can embed it.
  json to_json_stable() const;

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point start);

  std::string subcommand_;
  json config_;
  std::uint64_t seed_;
  std::vector<std::pair<std::string, double>> timings_ms_;
};

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace rocarc
