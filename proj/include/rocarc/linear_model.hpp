#pragma once

#include "rocarc/types.hpp"

namespace rocarc {

/// Affine score t(x) = <weights, x> + intercept.
struct LinearModel {
  VectorXd weights;
  double intercept = 0.0;

  double operator()(const ConstVectorRef& x) const { return weights.dot(x) + intercept; }
  VectorXd evaluate_rows(const ConstMatrixRef& X) const {
    return (X * weights).array() + intercept;
  }
};

}  // namespace rocarc
