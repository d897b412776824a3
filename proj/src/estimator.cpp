#include "rocarc/estimator.hpp"

#include "rocarc/parallel.hpp"
#include "rocarc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rocarc {

namespace {

// Eigen-directions of the Gram matrix below this fraction of the largest
// eigenvalue are treated as numerically zero.
constexpr double kRelativeEigenFloor = 1e-12;
// Training scores this close to a bound count as active constraints.
constexpr double kActiveSlack = 1e-4;

void check_weights(const SampleSet& s, const SampleWeights* weights) {
  if (weights == nullptr) {
    return;
  }
  if (weights->pos.size() != s.n_pos() || weights->neg.size() != s.n_neg()) {
    throw InvalidArgument("weights: lengths must match the class sizes");
  }
  const auto ok = [](const VectorXd& w) { return w.allFinite() && (w.array() >= 0.0).all(); };
  if (!ok(weights->pos) || !ok(weights->neg)) {
    throw InvalidArgument("weights: must be finite and nonnegative");
  }
}

// Per-sample data-term coefficients w/n+ (positives first) and w/n-.
VectorXd data_coefficients(Index n_pos, Index n_neg, const SampleWeights* weights) {
  VectorXd c(n_pos + n_neg);
  if (weights == nullptr) {
    c.head(n_pos).setConstant(1.0 / static_cast<double>(n_pos));
    c.tail(n_neg).setConstant(1.0 / static_cast<double>(n_neg));
  } else {
    c.head(n_pos) = weights->pos / static_cast<double>(n_pos);
    c.tail(n_neg) = weights->neg / static_cast<double>(n_neg);
  }
  return c;
}

double data_value(const VectorXd& u, const VectorXd& c, Index n_pos) {
  const Index n_neg = u.size() - n_pos;
  return -(c.head(n_pos).array() * u.head(n_pos).array().sin()).sum() -
         (c.tail(n_neg).array() * u.tail(n_neg).array().cos()).sum();
}

// Log-barrier Newton solver over theta with u = F theta.
class BarrierSolver {
 public:
  BarrierSolver(const MatrixXd& features, VectorXd coef, Index n_pos, double lambda,
                const SolverConfig& cfg)
      : F_(features),
        c_(std::move(coef)),
        n_pos_(n_pos),
        lambda_(lambda),
        cfg_(cfg),
        lo_(cfg.eps_margin),
        hi_(kHalfPi - cfg.eps_margin) {}

  // Objective without barrier.
  double objective(const VectorXd& u, const VectorXd& theta) const {
    return data_value(u, c_, n_pos_) + 0.5 * lambda_ * theta.squaredNorm();
  }

  double augmented(const VectorXd& u, const VectorXd& theta, double mu) const {
    double barrier = 0.0;
    for (Index k = 0; k < u.size(); ++k) {
      const double a = u(k) - lo_;
      const double b = hi_ - u(k);
      if (!(a > 0.0 && b > 0.0)) {
        return std::numeric_limits<double>::infinity();
      }
      barrier -= std::log(a) + std::log(b);
    }
    return objective(u, theta) + mu * barrier;
  }

  // Gradient and Hessian diagonal of the augmented objective in u.
  void derivatives(const VectorXd& u, double mu, VectorXd& g, VectorXd& h) const {
    const Index n = u.size();
    g.resize(n);
    h.resize(n);
    for (Index k = 0; k < n; ++k) {
      const double s = std::sin(u(k));
      const double co = std::cos(u(k));
      if (k < n_pos_) {
        g(k) = -c_(k) * co;
        h(k) = c_(k) * s;
      } else {
        g(k) = c_(k) * s;
        h(k) = c_(k) * co;
      }
      const double a = u(k) - lo_;
      const double b = hi_ - u(k);
      g(k) += mu * (-1.0 / a + 1.0 / b);
      h(k) += mu * (1.0 / (a * a) + 1.0 / (b * b));
    }
  }

  struct StageResult {
    double grad_norm = 0.0;
    double decrement = 0.0;
    int iterations = 0;
  };

  StageResult minimize(VectorXd& theta, VectorXd& u, double mu) const {
    StageResult out;
    VectorXd g;
    VectorXd h;
    double value = augmented(u, theta, mu);
    for (int it = 0; it < cfg_.max_newton_iters; ++it) {
      derivatives(u, mu, g, h);
      const VectorXd grad = F_.transpose() * g + lambda_ * theta;
      out.grad_norm = grad.norm();
      if (out.grad_norm <= cfg_.grad_tol) {
        out.decrement = 0.0;
        break;
      }
      MatrixXd H = F_.transpose() * h.asDiagonal() * F_;
      H.diagonal().array() += lambda_;
      Eigen::LLT<MatrixXd> llt(H);
      if (llt.info() != Eigen::Success) {
        H.diagonal().array() += 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
        llt.compute(H);
      }
      VectorXd step = -llt.solve(grad);
      out.decrement = -grad.dot(step);
      if (!step.allFinite() || !(out.decrement > 0.0)) {
        step = -grad;
        out.decrement = grad.squaredNorm();
      }
      if (out.decrement <= 1e-15 * (1.0 + std::abs(value))) {
        break;
      }
      const VectorXd du = F_ * step;
      double t_max = std::numeric_limits<double>::infinity();
      for (Index k = 0; k < u.size(); ++k) {
        if (du(k) < 0.0) {
          t_max = std::min(t_max, (u(k) - lo_) / -du(k));
        } else if (du(k) > 0.0) {
          t_max = std::min(t_max, (hi_ - u(k)) / du(k));
        }
      }
      double t = std::min(1.0, 0.99 * t_max);
      bool accepted = false;
      for (int ls = 0; ls < 80; ++ls) {
        const VectorXd u_new = u + t * du;
        const VectorXd theta_new = theta + t * step;
        const double candidate = augmented(u_new, theta_new, mu);
        if (candidate <= value - 1e-4 * t * out.decrement) {
          theta = theta_new;
          u = u_new;
          value = candidate;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      ++out.iterations;
      if (!accepted) {
        break;
      }
    }
    return out;
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  const MatrixXd& F_;
  VectorXd c_;
  Index n_pos_;
  double lambda_;
  const SolverConfig& cfg_;
  double lo_;
  double hi_;
};

}  // namespace

void SolverConfig::validate() const {
  if (lambda && !(*lambda >= 0.0 && std::isfinite(*lambda))) {
    throw InvalidArgument("SolverConfig: lambda must be finite and nonnegative");
  }
  if (bandwidth && !(*bandwidth > 0.0 && std::isfinite(*bandwidth))) {
    throw InvalidArgument("SolverConfig: bandwidth must be positive");
  }
  if (!(barrier_init > 0.0) || !(barrier_floor > 0.0) || !(grad_tol > 0.0)) {
    throw InvalidArgument("SolverConfig: barrier_init, barrier_floor and grad_tol must be positive");
  }
  if (!(barrier_decay > 0.0 && barrier_decay < 1.0)) {
    throw InvalidArgument("SolverConfig: barrier_decay must lie in (0, 1)");
  }
  if (max_newton_iters < 1) {
    throw InvalidArgument("SolverConfig: max_newton_iters must be positive");
  }
  if (!(eps_margin > 0.0 && eps_margin < kQuarterPi)) {
    throw InvalidArgument("SolverConfig: eps_margin must lie in (0, pi/4)");
  }
}

double default_lambda(const SampleSet& s) {
  const double n_min = static_cast<double>(std::min(s.n_pos(), s.n_neg()));
  return std::pow(n_min, -0.25);
}

SolverConfig resolve(const SolverConfig& cfg, const SampleSet& s) {
  SolverConfig out = cfg;
  if (!out.lambda) {
    out.lambda = default_lambda(s);
  }
  if (!out.bandwidth) {
    out.bandwidth = out.kernel == KernelType::gaussian ? median_heuristic(s) : 1.0;
  }
  out.validate();
  return out;
}

KernelBasis make_basis(const ConstMatrixRef& points, const KernelParams& params) {
  params.validate();
  KernelBasis basis;
  basis.params = params;
  const Index n = points.rows();
  if (params.type == KernelType::linear) {
    // K = Z Z^T with Z = [X 1]; a thin SVD of Z gives the factor directly.
    MatrixXd Z(n, points.cols() + 1);
    Z.leftCols(points.cols()) = points;
    Z.col(points.cols()).setOnes();
    Eigen::BDCSVD<MatrixXd> svd(Z, Eigen::ComputeThinU);
    const VectorXd& sv = svd.singularValues();
    const double floor = std::sqrt(kRelativeEigenFloor) * sv(0);
    Index r = 0;
    while (r < sv.size() && sv(r) > floor) {
      ++r;
    }
    basis.features = svd.matrixU().leftCols(r) * sv.head(r).asDiagonal();
    basis.to_alpha = svd.matrixU().leftCols(r) * sv.head(r).cwiseInverse().asDiagonal();
    return basis;
  }
  // Pivoted Cholesky: K ~ L L^T with L = K(:, P) L_PP^{-T}, stopped once
  // every residual diagonal drops below the relative floor. Scores L c are
  // then exactly K alpha for alpha = L_PP^{-T} c on the pivots, and
  // alpha^T K alpha = |c|^2.
  VectorXd residual(n);
  for (Index i = 0; i < n; ++i) {
    residual(i) = kernel_value(points.row(i), points.row(i), params);
  }
  const double floor = kRelativeEigenFloor * residual.maxCoeff();
  MatrixXd L(n, std::min<Index>(n, 64));
  std::vector<Index> pivots;
  while (static_cast<Index>(pivots.size()) < n) {
    Index j = 0;
    const double d = residual.maxCoeff(&j);
    if (!(d > floor)) {
      break;
    }
    const Index k = static_cast<Index>(pivots.size());
    if (k == L.cols()) {
      L.conservativeResize(Eigen::NoChange, std::min<Index>(n, 2 * L.cols()));
    }
    VectorXd col(n);
    for (Index i = 0; i < n; ++i) {
      col(i) = kernel_value(points.row(i), points.row(j), params);
    }
    if (k > 0) {
      col.noalias() -= L.leftCols(k) * L.row(j).head(k).transpose();
    }
    for (Index p : pivots) {
      col(p) = 0.0;
    }
    L.col(k) = col / std::sqrt(d);
    residual -= L.col(k).cwiseAbs2();
    residual(j) = 0.0;
    pivots.push_back(j);
  }
  const Index r = static_cast<Index>(pivots.size());
  if (r == 0) {
    throw NumericalError("make_basis: Gram matrix is numerically zero");
  }
  L.conservativeResize(Eigen::NoChange, r);
  MatrixXd L_pp(r, r);
  for (Index k = 0; k < r; ++k) {
    L_pp.row(k) = L.row(pivots[static_cast<std::size_t>(k)]);
  }
  const MatrixXd inv_t =
      L_pp.transpose().triangularView<Eigen::Upper>().solve(MatrixXd::Identity(r, r));
  basis.to_alpha = MatrixXd::Zero(n, r);
  for (Index k = 0; k < r; ++k) {
    basis.to_alpha.row(pivots[static_cast<std::size_t>(k)]) = inv_t.row(k);
  }
  basis.features = std::move(L);
  return basis;
}

FitResult fit_atan_ratio(const SampleSet& s, const SolverConfig& cfg,
                         const SampleWeights* weights) {
  const SolverConfig resolved = resolve(cfg, s);
  const KernelBasis basis =
      make_basis(s.pooled(), KernelParams{resolved.kernel, *resolved.bandwidth});
  return fit_atan_ratio(s, basis, resolved, weights);
}

FitResult fit_atan_ratio(const SampleSet& s, const KernelBasis& basis, const SolverConfig& cfg,
                         const SampleWeights* weights) {
  cfg.validate();
  if (!cfg.lambda) {
    throw InvalidArgument("fit_atan_ratio: lambda must be resolved before fitting");
  }
  if (s.n_pos() < 1 || s.n_neg() < 1) {
    throw InvalidArgument("fit_atan_ratio: both classes must be nonempty");
  }
  if (basis.features.rows() != s.size()) {
    throw InvalidArgument("fit_atan_ratio: basis does not match the sample");
  }
  check_weights(s, weights);
  const double lambda = *cfg.lambda;
  const MatrixXd& F = basis.features;

  BarrierSolver solver(F, data_coefficients(s.n_pos(), s.n_neg(), weights), s.n_pos(), lambda,
                       cfg);

  // Least-squares theta placing every training score near the box center.
  const VectorXd center = VectorXd::Constant(s.size(), kQuarterPi);
  VectorXd theta = F.colPivHouseholderQr().solve(center);
  VectorXd u = F * theta;
  if (!((u.array() > solver.lo()).all() && (u.array() < solver.hi()).all())) {
    throw NumericalError(
        "fit_atan_ratio: could not build a strictly feasible start from the Gram factorization");
  }

  FitDiagnostics diag;
  diag.rank = F.cols();
  double mu = cfg.barrier_init;
  BarrierSolver::StageResult last;
  while (true) {
    last = solver.minimize(theta, u, mu);
    diag.iterations += last.iterations;
    ++diag.stages;
    diag.stage_objectives.push_back(solver.objective(u, theta));
    if (mu <= cfg.barrier_floor) {
      break;
    }
    mu *= cfg.barrier_decay;
  }

  FitResult result;
  result.lambda = lambda;
  result.bandwidth = basis.params.bandwidth;
  result.model.support_points = s.pooled();
  result.model.alpha = basis.to_alpha * theta;
  result.model.params = basis.params;
  result.train_scores = result.model.evaluate_rows(result.model.support_points, false);

  diag.final_objective = solver.objective(u, theta);
  diag.grad_norm = last.grad_norm;
  diag.converged = last.grad_norm <= cfg.grad_tol ||
                   last.decrement <= 1e-15 * (1.0 + std::abs(diag.final_objective));
  const auto& v = result.train_scores;
  diag.feasible = v.allFinite() && (v.array() >= -1e-9).all() && (v.array() <= kHalfPi + 1e-9).all();
  diag.n_active_constraints = static_cast<int>(
      ((v.array() <= kActiveSlack) || (v.array() >= kHalfPi - kActiveSlack)).count());
  result.diagnostics = std::move(diag);
  return result;
}

std::pair<double, VectorXd> objective_and_gradient(const ConstVectorRef& alpha,
                                                   const MatrixXd& gram_matrix, Index n_pos,
                                                   double lambda, const SampleWeights* weights) {
  const Index n = gram_matrix.rows();
  if (alpha.size() != n || gram_matrix.cols() != n) {
    throw InvalidArgument("objective_and_gradient: alpha has " + std::to_string(alpha.size()) +
                          " entries for " + std::to_string(n) + " training points");
  }
  if (n_pos < 1 || n_pos >= n) {
    throw InvalidArgument("objective_and_gradient: both classes must be nonempty");
  }
  const VectorXd c = data_coefficients(n_pos, n - n_pos, weights);
  const VectorXd Ka = gram_matrix * alpha;
  VectorXd g(n);
  for (Index k = 0; k < n; ++k) {
    g(k) = k < n_pos ? -c(k) * std::cos(Ka(k)) : c(k) * std::sin(Ka(k));
  }
  const double value = data_value(Ka, c, n_pos) + 0.5 * lambda * alpha.dot(Ka);
  VectorXd grad = gram_matrix.transpose() * g + lambda * Ka;
  return {value, std::move(grad)};
}

std::pair<double, VectorXd> objective_and_gradient(const ConstVectorRef& alpha,
                                                   const SampleSet& s, const SolverConfig& cfg,
                                                   const SampleWeights* weights) {
  if (!cfg.lambda || (!cfg.bandwidth && cfg.kernel == KernelType::gaussian)) {
    throw InvalidArgument("objective_and_gradient: lambda and bandwidth must be resolved");
  }
  if (alpha.size() != s.size()) {
    throw InvalidArgument("objective_and_gradient: alpha has " + std::to_string(alpha.size()) +
                          " entries for " + std::to_string(s.size()) + " training points");
  }
  check_weights(s, weights);
  const MatrixXd K = gram(s.pooled(), KernelParams{cfg.kernel, cfg.bandwidth.value_or(1.0)});
  return objective_and_gradient(alpha, K, s.n_pos(), *cfg.lambda, weights);
}

double variational_value(const ConstVectorRef& scores_pos, const ConstVectorRef& scores_neg) {
  if (scores_pos.size() == 0 || scores_neg.size() == 0) {
    throw InvalidArgument("variational_value: empty class");
  }
  return scores_pos.array().sin().mean() + scores_neg.array().cos().mean();
}

std::vector<double> default_lambda_grid(const SampleSet& s) {
  const double base = default_lambda(s);
  return {base, base * 1e-1, base * 1e-2, base * 1e-3};
}

std::vector<double> default_bandwidth_grid(const SampleSet& s) {
  const double m = median_heuristic(s);
  return {0.25 * m, 0.5 * m, m, 2.0 * m};
}

CvResult cross_validate(const SampleSet& s, const std::vector<double>& lambda_grid,
                        const std::vector<double>& bandwidth_grid, int k_folds,
                        std::uint64_t seed, const SolverConfig& base, int threads) {
  if (lambda_grid.empty() || bandwidth_grid.empty()) {
    throw InvalidArgument("cross_validate: empty hyperparameter grid");
  }
  if (k_folds < 2) {
    throw InvalidArgument("cross_validate: need at least 2 folds");
  }
  if (s.n_pos() < k_folds || s.n_neg() < k_folds) {
    throw InvalidArgument("cross_validate: each class needs at least k_folds samples");
  }
  for (double l : lambda_grid) {
    if (!(l >= 0.0)) throw InvalidArgument("cross_validate: negative lambda in grid");
  }
  for (double b : bandwidth_grid) {
    if (!(b > 0.0)) throw InvalidArgument("cross_validate: nonpositive bandwidth in grid");
  }
  const std::vector<double> bandwidths =
      base.kernel == KernelType::gaussian ? bandwidth_grid : std::vector<double>{1.0};

  // Stratified fold assignment from one permutation per class.
  const auto assign = [&](Index n, std::uint64_t stream) {
    const auto perm = permutation(n, derive_seed(seed, stream));
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      fold[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = static_cast<int>(i % k_folds);
    }
    return fold;
  };
  const std::vector<int> fold_pos = assign(s.n_pos(), 0);
  const std::vector<int> fold_neg = assign(s.n_neg(), 1);
  const auto subset = [](const MatrixXd& m, const std::vector<int>& fold, int f, bool in_fold) {
    std::vector<Index> rows;
    for (Index i = 0; i < m.rows(); ++i) {
      if ((fold[static_cast<std::size_t>(i)] == f) == in_fold) rows.push_back(i);
    }
    MatrixXd out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = m.row(rows[r]);
    return out;
  };

  const std::size_t n_bw = bandwidths.size();
  const std::size_t n_l = lambda_grid.size();
  const auto kf = static_cast<std::size_t>(k_folds);
  // scores[(b * n_l + l) * k + f]
  std::vector<double> scores(n_bw * n_l * kf, -std::numeric_limits<double>::infinity());
  parallel_for(n_bw * kf, threads, [&](std::size_t task) {
    const std::size_t b = task / kf;
    const int f = static_cast<int>(task % kf);
    const SampleSet train = SampleSet::make(subset(s.positives, fold_pos, f, false),
                                            subset(s.negatives, fold_neg, f, false));
    const MatrixXd val_pos = subset(s.positives, fold_pos, f, true);
    const MatrixXd val_neg = subset(s.negatives, fold_neg, f, true);
    const KernelBasis basis = make_basis(train.pooled(), KernelParams{base.kernel, bandwidths[b]});
    for (std::size_t l = 0; l < n_l; ++l) {
      SolverConfig cfg = base;
      cfg.lambda = lambda_grid[l];
      cfg.bandwidth = bandwidths[b];
      try {
        const FitResult fit = fit_atan_ratio(train, basis, cfg);
        scores[(b * n_l + l) * kf + static_cast<std::size_t>(f)] =
            variational_value(fit.model.evaluate_rows(val_pos, true),
                              fit.model.evaluate_rows(val_neg, true));
      } catch (const NumericalError&) {
        // leaves -inf: this cell can never be selected
      }
    }
  });

  CvResult result;
  const CvCell* best = nullptr;
  for (std::size_t b = 0; b < n_bw; ++b) {
    for (std::size_t l = 0; l < n_l; ++l) {
      CvCell cell;
      cell.lambda = lambda_grid[l];
      cell.bandwidth = bandwidths[b];
      double sum = 0.0;
      for (std::size_t f = 0; f < kf; ++f) {
        const double v = scores[(b * n_l + l) * kf + f];
        cell.fold_scores.push_back(v);
        sum += v;
      }
      cell.mean_score = sum / static_cast<double>(kf);
      result.cells.push_back(std::move(cell));
    }
  }
  for (const CvCell& cell : result.cells) {
    if (!std::isfinite(cell.mean_score)) continue;
    if (best == nullptr || cell.mean_score > best->mean_score ||
        (cell.mean_score == best->mean_score &&
         (cell.lambda > best->lambda ||
          (cell.lambda == best->lambda && cell.bandwidth > best->bandwidth)))) {
      best = &cell;
    }
  }
  if (best == nullptr) {
    throw NumericalError("cross_validate: every grid point failed to fit");
  }
  result.selected = base;
  result.selected.lambda = best->lambda;
  result.selected.bandwidth = best->bandwidth;
  return result;
}

}  // namespace rocarc
