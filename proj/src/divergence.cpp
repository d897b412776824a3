#include "rocarc/divergence.hpp"

#include "rocarc/parallel.hpp"
#include "rocarc/rng.hpp"
#include "rocarc/twostep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace rocarc {

namespace {

constexpr double kLog2 = 0.69314718055994530942;

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * kPi);
}

double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

struct Interval {
  double lo;
  double hi;
  long n;  // even
};

Interval integration_interval(const GaussianSpec& p, const GaussianSpec& q,
                              const QuadratureSpec& grid) {
  const double sd = std::max(p.std(0), q.std(0));
  const double lo = std::min(p.mean(0), q.mean(0)) - grid.width_in_std * sd;
  const double hi = std::max(p.mean(0), q.mean(0)) + grid.width_in_std * sd;
  long n = std::max<long>(grid.intervals, 2);
  if (n % 2 != 0) {
    ++n;
  }
  return {lo, hi, n};
}

// Composite Simpson's rule.
template <typename F>
double simpson(F&& f, const Interval& iv) {
  const double h = (iv.hi - iv.lo) / static_cast<double>(iv.n);
  double odd = 0.0;
  double even = 0.0;
  for (long i = 1; i < iv.n; ++i) {
    const double v = f(iv.lo + h * static_cast<double>(i));
    (i % 2 == 1 ? odd : even) += v;
  }
  return h / 3.0 * (f(iv.lo) + f(iv.hi) + 4.0 * odd + 2.0 * even);
}

void require_1d(const GaussianSpec& p, const GaussianSpec& q) {
  p.validate();
  q.validate();
  if (p.dim() != 1 || q.dim() != 1) {
    throw InvalidArgument("arc_length_quadrature: only 1-D Gaussians are supported");
  }
}

void put_double(std::ostream& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

double js_quadrature(const GaussianSpec& p, const GaussianSpec& q, const QuadratureSpec& grid) {
  const Interval iv = integration_interval(p, q, grid);
  const auto integrand = [&](double x) {
    const double lp = log_normal_pdf(x, p.mean(0), p.std(0));
    const double lq = log_normal_pdf(x, q.mean(0), q.std(0));
    const double lm = log_add_exp(lp, lq) - kLog2;
    return 0.5 * (std::exp(lp) * (lp - lm) + std::exp(lq) * (lq - lm));
  };
  return simpson(integrand, iv);
}

}  // namespace

double arc_length_estimate(const KernelScoreModel& model, const SampleSet& eval_set) {
  if (eval_set.n_pos() < 1 || eval_set.n_neg() < 1) {
    throw InvalidArgument("arc_length_estimate: both classes must be nonempty");
  }
  if (eval_set.dim() != model.dim()) {
    throw InvalidArgument("arc_length_estimate: model and data dimensions differ");
  }
  return variational_value(model.evaluate_rows(eval_set.positives, true),
                           model.evaluate_rows(eval_set.negatives, true));
}

double arc_length_quadrature(const GaussianSpec& p_pos, const GaussianSpec& p_neg,
                             const QuadratureSpec& grid) {
  require_1d(p_pos, p_neg);
  const Interval iv = integration_interval(p_pos, p_neg, grid);
  const auto integrand = [&](double x) {
    return std::hypot(std::exp(log_normal_pdf(x, p_pos.mean(0), p_pos.std(0))),
                      std::exp(log_normal_pdf(x, p_neg.mean(0), p_neg.std(0))));
  };
  return simpson(integrand, iv);
}

double tv_lower_objective(double arc_length, double a) {
  if (a <= 0.0) {
    // a -> 0+: (arc - 2 sqrt(1 - a^2)) / a diverges unless arc == 2.
    if (arc_length == 2.0) return 1.0;
    return arc_length < 2.0 ? -std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::infinity();
  }
  double ratio;
  if (a < 1e-4) {
    // 2 sqrt(1 - a^2) = 2 - a^2 - a^4/4 - a^6/8 - ...
    ratio = (arc_length - 2.0) / a + a + a * a * a / 4.0 + std::pow(a, 5) / 8.0;
  } else {
    ratio = (arc_length - 2.0 * std::sqrt(1.0 - a * a)) / a;
  }
  return 2.0 / kPi * (ratio + std::acos(a) - std::asin(a));
}

TvBounds tv_bounds(double arc_length) {
  if (std::isnan(arc_length)) {
    throw InvalidArgument("tv_bounds: arc length is NaN");
  }
  TvBounds out;
  out.upper = arc_length - 1.0;
  out.in_range = arc_length >= kSqrt2 - 1e-12 && arc_length <= 2.0 + 1e-12;

  constexpr int kGrid = 10000;
  int best_k = kGrid;
  double best = tv_lower_objective(arc_length, 1.0);
  for (int k = 1; k < kGrid; ++k) {
    const double v = tv_lower_objective(arc_length, static_cast<double>(k) / kGrid);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  // Golden-section refinement on the bracketing grid cells.
  double lo = static_cast<double>(best_k - 1) / kGrid;
  double hi = std::min(1.0, static_cast<double>(best_k + 1) / kGrid);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = tv_lower_objective(arc_length, std::max(x1, 1e-300));
  double f2 = tv_lower_objective(arc_length, x2);
  for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = tv_lower_objective(arc_length, std::max(x1, 1e-300));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = tv_lower_objective(arc_length, x2);
    }
  }
  double a_best = static_cast<double>(best_k) / kGrid;
  for (const auto& [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
    if (f > best) {
      best = f;
      a_best = x;
    }
  }
  const double limit = tv_lower_objective(arc_length, 0.0);
  if (limit > best && std::isfinite(limit)) {
    best = limit;
    a_best = 0.0;
  }
  out.lower = best;
  out.argmax_a = a_best;
  return out;
}

GaussianDivergences gaussian_divergences(double delta, const QuadratureSpec& grid) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw InvalidArgument("gaussian_divergences: delta must be finite and nonnegative");
  }
  GaussianDivergences d;
  d.delta = delta;
  if (delta == 0.0) {
    // Identical distributions: every divergence vanishes exactly.
    d.prop2 = tv_bounds(kSqrt2);
    return d;
  }
  const GaussianSpec p = GaussianSpec::isotropic(VectorXd::Constant(1, 0.0), 1.0);
  const GaussianSpec q = GaussianSpec::isotropic(VectorXd::Constant(1, delta), 1.0);
  d.tv = 2.0 * normal_cdf(delta / 2.0) - 1.0;
  d.kl = delta * delta / 2.0;
  d.js = js_quadrature(p, q, grid);
  d.w1 = delta;
  d.pinsker_ub = std::sqrt(d.kl / 2.0);
  d.bh_ub = std::sqrt(-std::expm1(-d.kl));
  d.arc = arc_length_quadrature(p, q, grid);
  d.roc_div = d.arc - kSqrt2;
  d.prop2 = tv_bounds(d.arc);
  return d;
}

std::vector<GaussianDivergences> divergence_sweep(double delta_min, double delta_max, int steps,
                                                  int threads) {
  if (steps < 2) {
    throw InvalidArgument("divergence_sweep: need at least 2 steps");
  }
  if (!(delta_min >= 0.0) || !(delta_max > delta_min) || !std::isfinite(delta_max)) {
    throw InvalidArgument("divergence_sweep: need 0 <= delta_min < delta_max");
  }
  std::vector<GaussianDivergences> rows(static_cast<std::size_t>(steps));
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const double delta =
        delta_min + (delta_max - delta_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
    rows[i] = gaussian_divergences(delta);
  });
  return rows;
}

void write_bounds_csv(std::ostream& out, const std::vector<GaussianDivergences>& rows,
                      double rescale) {
  out << "delta,tv,js,w1,roc_div,roc_div_rescaled,prop2_lower,prop2_upper,pinsker_ub,bh_ub\n";
  for (const auto& r : rows) {
    for (double v : {r.delta, r.tv, r.js, r.w1, r.roc_div, r.roc_div * rescale, r.prop2.lower,
                     r.prop2.upper, r.pinsker_ub}) {
      put_double(out, v);
      out << ',';
    }
    put_double(out, r.bh_ub);
    out << '\n';
  }
}

DivergenceReport divergence_report(const KernelScoreModel& model, const SampleSet& eval_set) {
  DivergenceReport report;
  report.arc_length_hat = arc_length_estimate(model, eval_set);
  report.roc_divergence_hat = report.arc_length_hat - kSqrt2;
  const TvBounds tv = tv_bounds(report.arc_length_hat);
  report.tv_lower = tv.lower;
  report.tv_upper = tv.upper;
  report.tv_argmax_a = tv.argmax_a;
  report.arc_in_range = tv.in_range;
  report.n_pos = eval_set.n_pos();
  report.n_neg = eval_set.n_neg();
  report.dim = eval_set.dim();
  return report;
}

DivergenceReport estimate_divergence_pipeline(const SampleSet& s, const SolverConfig& cfg,
                                              const PipelineOptions& options) {
  SampleSet train = s;
  SampleSet eval = s;
  if (options.holdout) {
    auto parts = split(s, 1.0 - *options.holdout, options.seed);
    train = std::move(parts.first);
    eval = std::move(parts.second);
  }
  const SolverConfig resolved = resolve(cfg, train);
  const FitResult fit = fit_atan_ratio(train, resolved);
  DivergenceReport report = divergence_report(fit.model, eval);
  report.diagnostics = fit.diagnostics;
  report.config_echo = resolved;
  report.holdout = options.holdout.has_value();
  report.n_pos = s.n_pos();
  report.n_neg = s.n_neg();
  if (options.with_auc) {
    report.auc_lower_bound = two_step_fit(train, resolved).auc_star_hat;
  }
  return report;
}

}  // namespace rocarc
