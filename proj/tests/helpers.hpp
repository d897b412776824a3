#pragma once

#include "rocarc/data.hpp"

#include <initializer_list>
#include <vector>

namespace testing {

using rocarc::GaussianSpec;
using rocarc::MatrixXd;
using rocarc::SampleSet;
using rocarc::VectorXd;

inline MatrixXd column(std::initializer_list<double> values) {
  MatrixXd m(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) m(i++, 0) = v;
  return m;
}

inline VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// N(mu_pos, 1) vs N(mu_neg, 1) in one dimension.
inline SampleSet gauss_1d(double mu_pos, double mu_neg, Eigen::Index n_pos, Eigen::Index n_neg,
                          std::uint64_t seed) {
  return rocarc::gen_gaussian_pair(GaussianSpec::isotropic(VectorXd::Constant(1, mu_pos), 1.0),
                                   GaussianSpec::isotropic(VectorXd::Constant(1, mu_neg), 1.0),
                                   n_pos, n_neg, seed);
}

}  // namespace testing
