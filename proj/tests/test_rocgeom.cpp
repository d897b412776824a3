#include "doctest.h"
#include "helpers.hpp"

#include "rocarc/rng.hpp"
#include "rocarc/rocgeom.hpp"

#include <cmath>
#include <sstream>

using namespace rocarc;

namespace {

VectorXd rounded_normals(Index n, double mean, std::uint64_t seed) {
  Rng rng(seed);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = std::round(4.0 * (mean + rng.normal())) / 4.0;
  return v;
}

// O(n^2) Mann-Whitney count.
double brute_auc(const VectorXd& pos, const VectorXd& neg, double tie_credit) {
  double wins = 0.0;
  for (Index i = 0; i < pos.size(); ++i)
    for (Index j = 0; j < neg.size(); ++j)
      wins += pos(i) > neg(j) ? 1.0 : (pos(i) == neg(j) ? tie_credit : 0.0);
  return wins / static_cast<double>(pos.size() * neg.size());
}

// Trapezoid area under the vertex list.
double trapezoid(const RocCurve& c) {
  double area = 0.0;
  for (std::size_t i = 1; i < c.points.size(); ++i)
    area += (c.points[i].fpr - c.points[i - 1].fpr) * (c.points[i].tpr + c.points[i - 1].tpr) / 2;
  return area;
}

}  // namespace

TEST_CASE("ecdf examples") {
  const Ecdf f({3.0, 1.0, 2.0, 2.0});
  CHECK(f(0.5) == 0.0);
  CHECK(f(1.0) == 0.25);
  CHECK(f(2.0) == 0.75);
  CHECK(f(2.5) == 0.75);
  CHECK(f(3.0) == 1.0);
  CHECK(f.size() == 4);
  CHECK(f.sorted_values() == std::vector<double>{1, 2, 2, 3});
  CHECK(ecdf(testing::vec({5.0}))(5.0) == 1.0);
  CHECK(ecdf(testing::vec({1, 2, 3}))(2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(ecdf(testing::vec({1, 1, 2}))(1.0) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(Ecdf(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(Ecdf(std::vector<double>{std::nan("")}), InvalidArgument);
}

TEST_CASE("roc of perfectly separated scores passes through (0, 1)") {
  const RocCurve c = empirical_roc(testing::vec({2, 3}), testing::vec({0, 1}));
  REQUIRE(c.points.size() == 5);
  CHECK(c.points.front().fpr == 0.0);
  CHECK(c.points.front().tpr == 0.0);
  CHECK(c.points[1].fpr == 0.0);
  CHECK(c.points[1].tpr == 0.5);
  CHECK(c.points[2].fpr == 0.0);
  CHECK(c.points[2].tpr == 1.0);
  CHECK(c.points[3].fpr == 0.5);
  CHECK(c.points.back().fpr == 1.0);
  CHECK(c.points.back().tpr == 1.0);
  CHECK(polyline_arc_length(c) == doctest::Approx(2.0));
  CHECK(auc_wmw(testing::vec({2, 3}), testing::vec({0, 1})) == 1.0);
}

TEST_CASE("roc of identical scores is the diagonal") {
  const RocCurve c = empirical_roc(testing::vec({5}), testing::vec({5}));
  REQUIRE(c.points.size() == 2);
  CHECK(polyline_arc_length(c) == doctest::Approx(kSqrt2));
  CHECK(auc_wmw(testing::vec({5}), testing::vec({5})) == 1.0);
  CHECK(auc_wmw(testing::vec({5}), testing::vec({5}), TieRule::half) == 0.5);
  CHECK(auc_wmw_strict(testing::vec({5}), testing::vec({5})) == 0.0);
}

TEST_CASE("roc with a split positive class") {
  const VectorXd pos = testing::vec({1, 3});
  const VectorXd neg = testing::vec({2});
  CHECK(auc_wmw(pos, neg) == 0.5);
  const RocCurve c = empirical_roc(pos, neg);
  CHECK(polyline_arc_length(c) == doctest::Approx(2.0));
  CHECK(trapezoid(c) == doctest::Approx(0.5));
}

TEST_CASE("roc with a negative on each side of the positive") {
  const RocCurve c = empirical_roc(testing::vec({1}), testing::vec({0, 2}));
  bool found = false;
  for (const RocPoint& p : c.points) {
    if (p.fpr == 0.5 && p.tpr == 1.0) {
      found = true;
      CHECK(p.threshold < 1.0);
    }
  }
  CHECK(found);
}

TEST_CASE("roc vertices are monotone and area matches the half-tie statistic") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const VectorXd pos = rounded_normals(37, 0.8, 2 * seed);
    const VectorXd neg = rounded_normals(23, 0.0, 2 * seed + 1);
    const RocCurve c = empirical_roc(pos, neg);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      REQUIRE(c.points[i].fpr >= c.points[i - 1].fpr);
      REQUIRE(c.points[i].tpr >= c.points[i - 1].tpr);
      REQUIRE(c.points[i].threshold < c.points[i - 1].threshold);
    }
    CHECK(trapezoid(c) == doctest::Approx(auc_wmw(pos, neg, TieRule::half)).epsilon(1e-12));
    const double arc = polyline_arc_length(c);
    CHECK(arc >= kSqrt2 - 1e-12);
    CHECK(arc <= 2.0 + 1e-12);
  }
}

TEST_CASE("auc agrees with the quadratic count under every tie rule") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const VectorXd pos = rounded_normals(31, 0.5, 100 + seed);
    const VectorXd neg = rounded_normals(44, 0.0, 200 + seed);
    const double inc = auc_wmw(pos, neg);
    const double strict = auc_wmw_strict(pos, neg);
    CHECK(inc == doctest::Approx(brute_auc(pos, neg, 1.0)).epsilon(1e-14));
    CHECK(strict == doctest::Approx(brute_auc(pos, neg, 0.0)).epsilon(1e-14));
    CHECK(auc_wmw(pos, neg, TieRule::half) ==
          doctest::Approx(brute_auc(pos, neg, 0.5)).epsilon(1e-14));
    // Swapping the classes turns >= into <=.
    CHECK(inc + auc_wmw_strict(neg, pos) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(strict <= inc);
  }
}

TEST_CASE("auc and arc length are invariant to increasing transforms") {
  const VectorXd pos = rounded_normals(40, 1.0, 7);
  const VectorXd neg = rounded_normals(40, 0.0, 8);
  const VectorXd tpos = (pos.array() * 0.3).exp() + 2.0;
  const VectorXd tneg = (neg.array() * 0.3).exp() + 2.0;
  CHECK(auc_wmw(pos, neg) == auc_wmw(tpos, tneg));
  CHECK(polyline_arc_length(empirical_roc(pos, neg)) ==
        doctest::Approx(polyline_arc_length(empirical_roc(tpos, tneg))).epsilon(1e-14));
}

TEST_CASE("roc errors") {
  CHECK_THROWS_AS(empirical_roc(VectorXd(), testing::vec({1})), InvalidArgument);
  CHECK_THROWS_AS(auc_wmw(testing::vec({1}), VectorXd()), InvalidArgument);
  CHECK_THROWS_AS(auc_wmw(testing::vec({std::nan("")}), testing::vec({1})), InvalidArgument);
  CHECK_THROWS_AS(mixture_surface_grid(testing::vec({1}), testing::vec({0}), 1, 5),
                  InvalidArgument);
}

TEST_CASE("mixture surface grid") {
  const VectorXd pos = rounded_normals(50, 1.0, 21);
  const VectorXd neg = rounded_normals(60, 0.0, 22);
  const auto grid = mixture_surface_grid(pos, neg, 6, 50);
  REQUIRE(grid.size() == 300);
  CHECK(grid.front().alpha == 0.0);
  CHECK(grid.back().alpha == 0.5);

  const Ecdf fp = ecdf(pos);
  const Ecdf fn = ecdf(neg);
  for (const SurfacePoint& p : grid) {
    if (p.alpha == 0.0) {
      CHECK(p.fpr == doctest::Approx(1.0 - fn(p.tau)));
      CHECK(p.tpr == doctest::Approx(1.0 - fp(p.tau)));
    }
    if (p.alpha == 0.5) CHECK(p.fpr == doctest::Approx(p.tpr));
  }

  // At fixed tau the points move along one segment as alpha varies.
  for (int j = 0; j < 50; ++j) {
    const SurfacePoint& a = grid[static_cast<std::size_t>(j)];
    const SurfacePoint& b = grid[static_cast<std::size_t>(5 * 50 + j)];
    for (int k = 1; k < 5; ++k) {
      const SurfacePoint& m = grid[static_cast<std::size_t>(k * 50 + j)];
      CHECK(m.tau == a.tau);
      const double cross = (b.fpr - a.fpr) * (m.tpr - a.tpr) - (b.tpr - a.tpr) * (m.fpr - a.fpr);
      CHECK(std::abs(cross) < 1e-12);
    }
  }
}

TEST_CASE("roc and surface csv") {
  std::ostringstream roc;
  write_roc_csv(roc, empirical_roc(testing::vec({1}), testing::vec({0})));
  CHECK(roc.str() == "fpr,tpr,threshold\n0,0,inf\n0,1,0\n1,1,-inf\n");
  std::ostringstream surf;
  write_surface_csv(surf, mixture_surface_grid(testing::vec({1}), testing::vec({0}), 2, 2));
  CHECK(surf.str().rfind("alpha,tau,fpr,tpr\n", 0) == 0);
}
