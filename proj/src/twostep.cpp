#include "rocarc/twostep.hpp"

#include <algorithm>
#include <cmath>

namespace rocarc {

double weight_fn(double tau, const Ecdf& ecdf_pos, const Ecdf& ecdf_neg) {
  if (!std::isfinite(tau)) {
    throw InvalidArgument("weight_fn: tau must be finite");
  }
  const double t = std::clamp(tau, 0.0, kHalfPi);
  return std::sin(t + kQuarterPi) * std::abs(ecdf_pos(t) - ecdf_neg(t));
}

TwoStepModel two_step_fit(const SampleSet& s, const SolverConfig& cfg) {
  if (s.n_pos() < 1 || s.n_neg() < 1) {
    throw InvalidArgument("two_step_fit: both classes must be nonempty");
  }
  const SolverConfig resolved = resolve(cfg, s);
  const KernelBasis basis =
      make_basis(s.pooled(), KernelParams{resolved.kernel, *resolved.bandwidth});

  TwoStepModel out;
  FitResult step1 = fit_atan_ratio(s, basis, resolved);
  const VectorXd t = step1.model.evaluate_rows(s.pooled(), true);
  const VectorXd t_pos = t.head(s.n_pos());
  const VectorXd t_neg = t.tail(s.n_neg());
  out.ecdf_pos = ecdf(t_pos);
  out.ecdf_neg = ecdf(t_neg);
  out.step1_model = std::move(step1.model);
  out.step1_diagnostics = std::move(step1.diagnostics);

  SampleWeights w;
  w.pos = t_pos.unaryExpr([&](double x) { return weight_fn(x, out.ecdf_pos, out.ecdf_neg); });
  w.neg = t_neg.unaryExpr([&](double x) { return weight_fn(x, out.ecdf_pos, out.ecdf_neg); });

  if ((w.pos.array() == 0.0).all() && (w.neg.array() == 0.0).all()) {
    out.degenerate = true;
    out.step2_model = out.step1_model;
    out.step2_model.alpha.setZero();
    out.A_hat = 0.0;
    out.auc_star_hat = auc_from_area(0.0);
    return out;
  }

  FitResult step2 = fit_atan_ratio(s, basis, resolved, &w);
  const VectorXd v = step2.model.evaluate_rows(s.pooled(), true);
  const double n_pos = static_cast<double>(s.n_pos());
  const double n_neg = static_cast<double>(s.n_neg());
  out.A_hat = w.pos.dot(v.head(s.n_pos()).array().sin().matrix()) / n_pos +
              w.neg.dot(v.tail(s.n_neg()).array().cos().matrix()) / n_neg;
  out.auc_star_hat = auc_from_area(out.A_hat);
  out.step2_model = std::move(step2.model);
  out.step2_diagnostics = std::move(step2.diagnostics);
  return out;
}

double score(const TwoStepModel& model, const ConstVectorRef& x) {
  return evaluate(model.step2_model, x, true);
}

VectorXd score_rows(const TwoStepModel& model, const ConstMatrixRef& X, bool clip) {
  return model.step2_model.evaluate_rows(X, clip);
}

}  // namespace rocarc
