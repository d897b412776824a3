#pragma once

#include "rocarc/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rocarc {

/// Two labeled samples X+ and X- sharing one feature dimension. Rows are
/// samples. Construct through `SampleSet::make`, which checks invariants.
struct SampleSet {
  MatrixXd positives;
  MatrixXd negatives;
  std::vector<std::string> feature_names;  // empty when unnamed

  /// Validates shapes (equal column counts, at least one column) and that
  /// every coordinate is finite.
  static SampleSet make(MatrixXd positives, MatrixXd negatives,
                        std::vector<std::string> feature_names = {});

  Index dim() const { return positives.cols(); }
  Index n_pos() const { return positives.rows(); }
  Index n_neg() const { return negatives.rows(); }
  Index size() const { return n_pos() + n_neg(); }

  /// Positives stacked above negatives.
  MatrixXd pooled() const;
};

/// Isotropic or diagonal Gaussian. `std` holds one entry per coordinate.
struct GaussianSpec {
  VectorXd mean;
  VectorXd std;

  static GaussianSpec isotropic(VectorXd mean, double std);
  Index dim() const { return mean.size(); }
  void validate() const;
};

struct CsvOptions {
  std::string label_column = "label";
  /// Label value mapped to the positive class. When unset, the two observed
  /// values are sorted (numerically if both parse as numbers) and the larger
  /// one is positive.
  std::optional<std::string> positive_label;
  /// z-score every feature with pooled mean and standard deviation.
  bool standardize = false;
};

SampleSet load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
SampleSet read_csv(std::istream& in, const CsvOptions& options = {},
                   const std::string& source = "<stream>");

/// Writes features plus a label column holding 1 (positive) / 0 (negative).
void write_csv(std::ostream& out, const SampleSet& s, const std::string& label_column = "label");

/// Draws n_pos samples from `spec_pos` and n_neg from `spec_neg`; positives
/// are drawn first from one seeded stream.
SampleSet gen_gaussian_pair(const GaussianSpec& spec_pos, const GaussianSpec& spec_neg,
                            Index n_pos, Index n_neg, std::uint64_t seed);

/// Stratified split; returns (train, test). Each class keeps at least one
/// sample on each side.
std::pair<SampleSet, SampleSet> split(const SampleSet& s, double train_fraction,
                                      std::uint64_t seed);

/// Per-coordinate z-scoring with pooled statistics; constant coordinates are
/// only centered.
SampleSet standardize(const SampleSet& s);

/// Random permutation of 0..n-1 (Fisher-Yates on `Rng`).
std::vector<Index> permutation(Index n, std::uint64_t seed);

}  // namespace rocarc
