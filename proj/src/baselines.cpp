#include "rocarc/baselines.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <vector>

namespace rocarc {

namespace {

void require_classes(const SampleSet& s, const char* what) {
  if (s.n_pos() < 1 || s.n_neg() < 1) {
    throw InvalidArgument(std::string(what) + ": both classes must be nonempty");
  }
}

// 1/n covariance of the rows of X.
MatrixXd covariance(const MatrixXd& X) {
  const MatrixXd centered = X.rowwise() - X.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(X.rows());
}

double log1p_exp(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double pairwise_objective_decomposed(const LinearModel& v, const SampleSet& s) {
  require_classes(s, "pairwise_objective_decomposed");
  if (v.weights.size() != s.dim()) {
    throw InvalidArgument("pairwise_objective_decomposed: model and data dimensions differ");
  }
  const VectorXd a = s.positives * v.weights;
  const VectorXd b = s.negatives * v.weights;
  const double var_pos = (a.array() - a.mean()).square().mean();
  const double var_neg = (b.array() - b.mean()).square().mean();
  const double shift = b.mean() - a.mean();  // <v, mu- - mu+>
  return 1.0 + var_pos + var_neg + 2.0 * shift + shift * shift;
}

PairwiseFit auc_max_pairwise(const SampleSet& s, const PairwiseConfig& config) {
  require_classes(s, "auc_max_pairwise");
  // Negated objective: 1 + v' H v + 2 d' v, H = S+ + S- + d d', d = mu- - mu+.
  const VectorXd d =
      (s.negatives.colwise().mean() - s.positives.colwise().mean()).transpose();
  const MatrixXd H = covariance(s.positives) + covariance(s.negatives) + d * d.transpose();

  const Index dim = s.dim();
  VectorXd v = VectorXd::Zero(dim);
  VectorXd g = 2.0 * (H * v + d);
  VectorXd dir = -g;
  PairwiseFit fit;
  for (int it = 0; it < config.max_iters; ++it) {
    fit.grad_norm = g.norm();
    if (fit.grad_norm < config.grad_tol) {
      fit.converged = true;
      break;
    }
    const VectorXd Hd = 2.0 * (H * dir);
    const double curvature = dir.dot(Hd);
    if (!(curvature > 0.0)) {
      break;  // flat direction with nonzero gradient cannot occur for PSD H
    }
    const double step = -g.dot(dir) / curvature;
    v += step * dir;
    const VectorXd g_new = 2.0 * (H * v + d);
    ++fit.iterations;
    // Fletcher-Reeves, restarted every `dim` steps.
    if (fit.iterations % dim == 0) {
      dir = -g_new;
    } else {
      dir = -g_new + (g_new.squaredNorm() / g.squaredNorm()) * dir;
    }
    g = g_new;
  }
  fit.grad_norm = g.norm();
  fit.converged = fit.converged || fit.grad_norm < config.grad_tol;
  fit.model.weights = v;
  fit.model.intercept = 0.0;
  fit.objective = -pairwise_objective_decomposed(fit.model, s);
  if (!fit.converged) {
    throw NumericalError("auc_max_pairwise: gradient norm " + std::to_string(fit.grad_norm) +
                         " above tolerance after " + std::to_string(fit.iterations) +
                         " iterations");
  }
  return fit;
}

LogisticFit logistic_regression(const SampleSet& s, const LogisticConfig& config) {
  require_classes(s, "logistic_regression");
  const MatrixXd X = s.pooled();
  const Index n = X.rows();
  VectorXd y(n);
  y.head(s.n_pos()).setOnes();
  y.tail(s.n_neg()).setZero();

  // Only coordinates that vary carry information; the rest keep weight 0.
  std::vector<Index> active;
  for (Index j = 0; j < X.cols(); ++j) {
    if ((X.col(j).array() != X(0, j)).any()) {
      active.push_back(j);
    }
  }
  const Index p = static_cast<Index>(active.size()) + 1;
  MatrixXd Z(n, p);
  for (Index k = 0; k + 1 < p; ++k) {
    Z.col(k) = X.col(active[static_cast<std::size_t>(k)]);
  }
  Z.col(p - 1).setOnes();

  const double inv_n = 1.0 / static_cast<double>(n);
  const auto loss_at = [&](const VectorXd& beta) {
    const VectorXd z = Z * beta;
    double loss = 0.0;
    for (Index i = 0; i < n; ++i) {
      loss += log1p_exp(z(i)) - y(i) * z(i);
    }
    return loss * inv_n + 0.5 * config.l2 * beta.head(p - 1).squaredNorm();
  };

  VectorXd beta = VectorXd::Zero(p);
  double loss = loss_at(beta);
  LogisticFit fit;
  for (int it = 0; it < config.max_iters; ++it) {
    const VectorXd z = Z * beta;
    VectorXd r(n);
    VectorXd h(n);
    for (Index i = 0; i < n; ++i) {
      const double q = sigmoid(z(i));
      r(i) = q - y(i);
      h(i) = q * (1.0 - q);
    }
    VectorXd grad = Z.transpose() * r * inv_n;
    grad.head(p - 1) += config.l2 * beta.head(p - 1);
    fit.grad_norm = grad.norm();
    if (fit.grad_norm < config.grad_tol) {
      fit.converged = true;
      break;
    }
    MatrixXd hess = Z.transpose() * h.asDiagonal() * Z * inv_n;
    hess.diagonal().head(p - 1).array() += config.l2;
    hess.diagonal().array() += 1e-12 * (1.0 + hess.diagonal().maxCoeff());
    const VectorXd step = hess.ldlt().solve(-grad);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      const VectorXd candidate = beta + t * step;
      const double cand_loss = loss_at(candidate);
      if (cand_loss <= loss + 1e-4 * t * grad.dot(step)) {
        beta = candidate;
        loss = cand_loss;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++fit.iterations;
    if (!accepted) {
      break;
    }
  }

  const VectorXd z = Z * beta;
  fit.separated = z.head(s.n_pos()).minCoeff() > z.tail(s.n_neg()).maxCoeff();
  fit.model.weights = VectorXd::Zero(X.cols());
  for (Index k = 0; k + 1 < p; ++k) {
    fit.model.weights(active[static_cast<std::size_t>(k)]) = beta(k);
  }
  fit.model.intercept = beta(p - 1);
  fit.loss = loss;
  return fit;
}

}  // namespace rocarc
