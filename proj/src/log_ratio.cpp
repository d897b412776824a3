#include "rocarc/estimator.hpp"
#include "rocarc/rng.hpp"

#include <cmath>
#include <limits>

namespace rocarc {

namespace {

double softplus(double y) { return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }

// sin(atan(exp(z))) and cos(atan(exp(z))) without overflow.
double sin_atan_exp(double z) { return std::exp(-0.5 * softplus(-2.0 * z)); }
double cos_atan_exp(double z) { return std::exp(-0.5 * softplus(2.0 * z)); }

struct Problem {
  MatrixXd H_pos;  // [x 1]
  MatrixXd H_neg;

  // Negated objective and gradient.
  double eval(const VectorXd& p, VectorXd* grad) const {
    const VectorXd z_pos = H_pos * p;
    const VectorXd z_neg = H_neg * p;
    const double np = static_cast<double>(z_pos.size());
    const double nn = static_cast<double>(z_neg.size());
    double value = 0.0;
    VectorXd dz_pos(z_pos.size());
    VectorXd dz_neg(z_neg.size());
    for (Index i = 0; i < z_pos.size(); ++i) {
      const double s = sin_atan_exp(z_pos(i));
      const double c = cos_atan_exp(z_pos(i));
      value += s / np;
      dz_pos(i) = s * c * c / np;
    }
    for (Index i = 0; i < z_neg.size(); ++i) {
      const double s = sin_atan_exp(z_neg(i));
      const double c = cos_atan_exp(z_neg(i));
      value += c / nn;
      dz_neg(i) = -c * s * s / nn;
    }
    if (grad != nullptr) {
      *grad = -(H_pos.transpose() * dz_pos + H_neg.transpose() * dz_neg);
    }
    return -value;
  }
};

struct LocalResult {
  VectorXd p;
  double value = 0.0;  // negated objective
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

LocalResult bfgs(const Problem& problem, VectorXd p, const LogRatioOptions& options) {
  const Index m = p.size();
  MatrixXd Hinv = MatrixXd::Identity(m, m);
  VectorXd g;
  double f = problem.eval(p, &g);
  LocalResult out;
  for (int it = 0; it < options.max_iters; ++it) {
    out.grad_norm = g.norm();
    if (out.grad_norm <= options.grad_tol) {
      out.converged = true;
      break;
    }
    VectorXd d = -Hinv * g;
    if (!(d.dot(g) < 0.0)) {
      Hinv.setIdentity();
      d = -g;
    }
    double t = 1.0;
    VectorXd p_new;
    VectorXd g_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      p_new = p + t * d;
      f_new = problem.eval(p_new, &g_new);
      if (f_new <= f + 1e-4 * t * g.dot(d)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++out.iterations;
    if (!accepted) {
      // No descent at machine precision: treat as stationary.
      out.converged = out.grad_norm <= 1e3 * options.grad_tol;
      break;
    }
    const VectorXd s = p_new - p;
    const VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-14) {
      const double rho = 1.0 / sy;
      const MatrixXd I = MatrixXd::Identity(m, m);
      Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    p = p_new;
    g = g_new;
    f = f_new;
  }
  out.grad_norm = g.norm();
  out.converged = out.converged || out.grad_norm <= options.grad_tol;
  out.p = std::move(p);
  out.value = f;
  return out;
}

}  // namespace

LogRatioFit fit_log_ratio(const SampleSet& s, const LogRatioOptions& options) {
  if (s.n_pos() < 1 || s.n_neg() < 1) {
    throw InvalidArgument("fit_log_ratio: both classes must be nonempty");
  }
  if (options.restarts < 1) {
    throw InvalidArgument("fit_log_ratio: need at least one restart");
  }
  const Index d = s.dim();
  Problem problem;
  problem.H_pos.resize(s.n_pos(), d + 1);
  problem.H_pos << s.positives, VectorXd::Ones(s.n_pos());
  problem.H_neg.resize(s.n_neg(), d + 1);
  problem.H_neg << s.negatives, VectorXd::Ones(s.n_neg());

  LocalResult best;
  bool have_best = false;
  int total_iters = 0;
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    VectorXd p0(d + 1);
    for (Index k = 0; k <= d; ++k) {
      p0(k) = options.init_scale * rng.normal();
    }
    LocalResult local = bfgs(problem, p0, options);
    total_iters += local.iterations;
    if (!local.converged) {
      continue;
    }
    if (!have_best || local.value < best.value) {
      best = std::move(local);
      have_best = true;
    }
  }
  if (!have_best) {
    throw NumericalError("fit_log_ratio: no restart converged");
  }
  LogRatioFit fit;
  fit.model.weights = best.p.head(d);
  fit.model.intercept = best.p(d);
  fit.objective = -best.value;
  fit.diagnostics.final_objective = -best.value;
  fit.diagnostics.grad_norm = best.grad_norm;
  fit.diagnostics.iterations = total_iters;
  fit.diagnostics.stages = options.restarts;
  fit.diagnostics.converged = true;
  fit.diagnostics.feasible = true;
  return fit;
}

}  // namespace rocarc
