#include "rocarc/data.hpp"

#include "rocarc/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rocarc {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits one CSV record; double-quoted fields may contain commas and "".
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(trim(field));
  return fields;
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) {
    return std::nullopt;
  }
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (*begin == '+') {
    ++begin;
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    return std::nullopt;
  }
  return value;
}

void check_finite(const MatrixXd& m, const char* which) {
  if (!m.allFinite()) {
    throw InvalidArgument(std::string("SampleSet: non-finite coordinate in ") + which);
  }
}

}  // namespace

SampleSet SampleSet::make(MatrixXd positives, MatrixXd negatives,
                          std::vector<std::string> feature_names) {
  if (positives.cols() != negatives.cols()) {
    throw InvalidArgument("SampleSet: positives have dimension " +
                          std::to_string(positives.cols()) + ", negatives " +
                          std::to_string(negatives.cols()));
  }
  if (positives.cols() < 1) {
    throw InvalidArgument("SampleSet: dimension must be positive");
  }
  if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != positives.cols()) {
    throw InvalidArgument("SampleSet: feature name count does not match dimension");
  }
  check_finite(positives, "positives");
  check_finite(negatives, "negatives");
  return SampleSet{std::move(positives), std::move(negatives), std::move(feature_names)};
}

MatrixXd SampleSet::pooled() const {
  MatrixXd all(size(), dim());
  all.topRows(n_pos()) = positives;
  all.bottomRows(n_neg()) = negatives;
  return all;
}

GaussianSpec GaussianSpec::isotropic(VectorXd mean, double std) {
  GaussianSpec spec{std::move(mean), VectorXd()};
  spec.std = VectorXd::Constant(spec.mean.size(), std);
  spec.validate();
  return spec;
}

void GaussianSpec::validate() const {
  if (mean.size() < 1) {
    throw InvalidArgument("GaussianSpec: empty mean");
  }
  if (std.size() != mean.size()) {
    throw InvalidArgument("GaussianSpec: std has " + std::to_string(std.size()) +
                          " entries, mean has " + std::to_string(mean.size()));
  }
  if (!mean.allFinite() || !std.allFinite() || (std.array() <= 0.0).any()) {
    throw InvalidArgument("GaussianSpec: std must be finite and strictly positive");
  }
}

SampleSet load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path.string() + "'");
  }
  return read_csv(in, options, path.string());
}

SampleSet read_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(source + ": missing header row");
  }
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
  const std::vector<std::string> header = split_record(line);
  const auto label_it = std::find(header.begin(), header.end(), options.label_column);
  if (label_it == header.end()) {
    throw ParseError(source + ": label column '" + options.label_column + "' not found");
  }
  const std::size_t label_idx = static_cast<std::size_t>(label_it - header.begin());
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) {
      feature_names.push_back(header[c]);
    }
  }
  if (feature_names.empty()) {
    throw ParseError(source + ": no feature columns");
  }

  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_record(line);
    if (fields.size() != header.size()) {
      throw ParseError(source + ": row " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(header.size()));
    }
    std::vector<double> row;
    row.reserve(feature_names.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_idx) {
        continue;
      }
      const auto value = parse_double(fields[c]);
      if (!value || !std::isfinite(*value)) {
        throw ParseError(source + ": row " + std::to_string(line_no) + ", column '" + header[c] +
                         "': non-numeric value '" + fields[c] + "'");
      }
      row.push_back(*value);
    }
    labels.push_back(fields[label_idx]);
    rows.push_back(std::move(row));
  }

  std::vector<std::string> distinct = labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() > 2) {
    throw ParseError(source + ": more than two label values in column '" +
                     options.label_column + "'");
  }
  if (distinct.size() < 2) {
    throw ParseError(source + ": need two label values, found " +
                     std::to_string(distinct.size()));
  }

  std::string positive;
  if (options.positive_label) {
    positive = *options.positive_label;
    if (positive != distinct[0] && positive != distinct[1]) {
      throw ParseError(source + ": positive label '" + positive + "' not present");
    }
  } else {
    const auto a = parse_double(distinct[0]);
    const auto b = parse_double(distinct[1]);
    if (a && b) {
      positive = *a > *b ? distinct[0] : distinct[1];
    } else {
      positive = distinct[1];
    }
  }

  const Index n_pos = std::count(labels.begin(), labels.end(), positive);
  const Index n_neg = static_cast<Index>(labels.size()) - n_pos;
  if (n_pos < 2 || n_neg < 2) {
    throw ParseError(source + ": each class needs at least 2 rows (got " +
                     std::to_string(n_pos) + " positive, " + std::to_string(n_neg) +
                     " negative)");
  }
  const Index dim = static_cast<Index>(feature_names.size());
  MatrixXd pos(n_pos, dim);
  MatrixXd neg(n_neg, dim);
  Index ip = 0;
  Index in_ = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& target = labels[r] == positive ? pos : neg;
    Index& k = labels[r] == positive ? ip : in_;
    for (Index c = 0; c < dim; ++c) {
      target(k, c) = rows[r][static_cast<std::size_t>(c)];
    }
    ++k;
  }
  SampleSet s = SampleSet::make(std::move(pos), std::move(neg), std::move(feature_names));
  return options.standardize ? standardize(s) : s;
}

void write_csv(std::ostream& out, const SampleSet& s, const std::string& label_column) {
  for (Index c = 0; c < s.dim(); ++c) {
    out << (s.feature_names.empty() ? "x" + std::to_string(c)
                                    : s.feature_names[static_cast<std::size_t>(c)])
        << ',';
  }
  out << label_column << '\n';
  const auto write_rows = [&](const MatrixXd& m, const char* label) {
    char buf[64];
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), m(r, c));
        out.write(buf, res.ptr - buf);
        out << ',';
      }
      out << label << '\n';
    }
  };
  write_rows(s.positives, "1");
  write_rows(s.negatives, "0");
}

SampleSet gen_gaussian_pair(const GaussianSpec& spec_pos, const GaussianSpec& spec_neg,
                            Index n_pos, Index n_neg, std::uint64_t seed) {
  spec_pos.validate();
  spec_neg.validate();
  if (n_pos < 1 || n_neg < 1) {
    throw InvalidArgument("gen_gaussian_pair: sample counts must be positive");
  }
  if (spec_pos.dim() != spec_neg.dim()) {
    throw InvalidArgument("gen_gaussian_pair: dimension mismatch");
  }
  Rng rng(seed);
  const auto draw = [&rng](const GaussianSpec& spec, Index n) {
    MatrixXd m(n, spec.dim());
    for (Index r = 0; r < n; ++r) {
      for (Index c = 0; c < spec.dim(); ++c) {
        m(r, c) = spec.mean(c) + spec.std(c) * rng.normal();
      }
    }
    return m;
  };
  MatrixXd pos = draw(spec_pos, n_pos);
  MatrixXd neg = draw(spec_neg, n_neg);
  return SampleSet::make(std::move(pos), std::move(neg));
}

std::vector<Index> permutation(Index n, std::uint64_t seed) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    perm[static_cast<std::size_t>(i)] = i;
  }
  Rng rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.index(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

std::pair<SampleSet, SampleSet> split(const SampleSet& s, double train_fraction,
                                      std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("split: train_fraction must lie in (0, 1)");
  }
  const auto split_class = [&](const MatrixXd& m, std::uint64_t stream, const char* name) {
    const Index n = m.rows();
    if (n < 2) {
      throw InvalidArgument(std::string("split: ") + name +
                            " class needs at least 2 samples to split");
    }
    const Index n_train =
        std::clamp<Index>(static_cast<Index>(std::llround(train_fraction * static_cast<double>(n))),
                          1, n - 1);
    const auto perm = permutation(n, derive_seed(seed, stream));
    MatrixXd train(n_train, m.cols());
    MatrixXd test(n - n_train, m.cols());
    for (Index i = 0; i < n; ++i) {
      const Index src = perm[static_cast<std::size_t>(i)];
      if (i < n_train) {
        train.row(i) = m.row(src);
      } else {
        test.row(i - n_train) = m.row(src);
      }
    }
    return std::make_pair(std::move(train), std::move(test));
  };
  auto [pos_train, pos_test] = split_class(s.positives, 0, "positive");
  auto [neg_train, neg_test] = split_class(s.negatives, 1, "negative");
  return {SampleSet::make(std::move(pos_train), std::move(neg_train), s.feature_names),
          SampleSet::make(std::move(pos_test), std::move(neg_test), s.feature_names)};
}

SampleSet standardize(const SampleSet& s) {
  const MatrixXd all = s.pooled();
  const Eigen::RowVectorXd mean = all.colwise().mean();
  Eigen::RowVectorXd sd =
      ((all.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(all.rows()))
          .sqrt();
  for (Index c = 0; c < sd.size(); ++c) {
    if (!(sd(c) > 0.0)) {
      sd(c) = 1.0;
    }
  }
  MatrixXd pos = (s.positives.rowwise() - mean).array().rowwise() / sd.array();
  MatrixXd neg = (s.negatives.rowwise() - mean).array().rowwise() / sd.array();
  return SampleSet::make(std::move(pos), std::move(neg), s.feature_names);
}

}  // namespace rocarc
