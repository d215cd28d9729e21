#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "carleson/estimate.hpp"
#include "carleson/fixtures.hpp"
#include "support.hpp"

using namespace carleson;
using carleson::testing::Rng;
using carleson::testing::uniform_int;

namespace {

ESet whole_interval(int K, DyadicInterval I, double xi) {
  ESet P{tile_at(I, Poly::constant(xi), 1), {}};
  const int per = 1 << (K - I.level);
  for (int i = 0; i < per; ++i) P.samples.push_back(static_cast<int>(I.index) * per + i);
  return P;
}

std::vector<ESet> random_subpool(const ChoiceFunction& choice, int kmax, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ESet> pool;
  for (auto& P : tile_sets(choice, kmax))
    if (uniform_int(rng, 0, 2) == 0) pool.push_back(std::move(P));
  return pool;
}

double l2(const Eigen::VectorXd& v, int K) { return std::sqrt(std::ldexp(v.squaredNorm(), -K)); }

double lp(const Eigen::VectorXd& v, int K, double p) {
  return std::pow(std::ldexp(v.array().abs().pow(p).sum(), -K), 1.0 / p);
}

}  // namespace

TEST_SUITE("estimate") {

TEST_CASE("zero operator has norm zero") {
  const auto choice = constant_choice(9, Poly({0.0, 3.0}), 1);
  CHECK(op_norm_l2(TileOperator(choice, {})).norm == 0.0);
  ESet empty{tile_at({2, 1}, Poly::constant(3.0), 1), {}};
  CHECK(op_norm_l2(TileOperator(choice, {empty})).norm == 0.0);
  NormConfig power;
  power.dense_below_K = 0;
  CHECK(op_norm_l2(TileOperator(choice, {empty}), power).norm == 0.0);
}

TEST_CASE("single tile with zero phase against the dense SVD") {
  const int K = 8;
  const auto choice = constant_choice(K, Poly({0.0, 0.0}), 1);
  const Bump psi;
  for (int k = 2; k <= finest_resolved_scale(K); ++k) {
    const TileOperator T(choice, {whole_interval(K, {k, 1}, 0.0)}, psi);
    NormConfig power;
    power.dense_below_K = 0;
    const double dense = dense_norm(T);
    const auto est = op_norm_l2(T, power);
    CHECK(est.iterations > 0);
    CHECK(est.residual <= 1e-6);
    CHECK(std::abs(est.norm - dense) <= 1e-4 * dense);
    CHECK(dense <= psi.l1_norm());
    // Below K = 9 the default path is the dense one.
    const auto fallback = op_norm_l2(T);
    CHECK(fallback.iterations == 0);
    CHECK(fallback.norm == dense);
  }
}

TEST_CASE("norm equals the norm of the adjoint") {
  const auto choice = block_choice(9, 1, 3, 40.0, 0.01, 5);
  const TileOperator T(choice, random_subpool(choice, 4, 5));
  const auto a = op_norm_l2(T);
  const auto b = op_norm_l2([&](const GridFunction& g) { return T.apply_adjoint(g); },
                            [&](const GridFunction& f) { return T.apply(f); }, T.K());
  CHECK(a.norm > 0.0);
  CHECK(std::abs(a.norm - b.norm) <= 1e-6 * a.norm);
  CHECK(a.seed >= 1);
  CHECK(a.seed <= 3);  // the restart that won
}

TEST_CASE("power iteration reports non-convergence") {
  const auto choice = block_choice(9, 1, 2, 40.0, 0.01, 8);
  const TileOperator T(choice, random_subpool(choice, 4, 8));
  NormConfig cfg;
  cfg.max_iterations = 2;
  cfg.residual_bound = 1e-12;
  CHECK_THROWS_AS(op_norm_l2(T, cfg), NormConvergenceError);
}

TEST_CASE("small instances agree with the dense oracle") {
  NormConfig power;
  power.dense_below_K = 0;
  for (std::uint64_t s = 0; s < 4; ++s) {
    const int d = 1 + static_cast<int>(s % 2);
    const auto choice = block_choice(7, d, 2, 20.0, 0.05, 40 + s);
    const TileOperator T(choice, random_subpool(choice, 2, s));
    const double dense = dense_norm(T);
    CHECK(std::abs(op_norm_l2(T, power).norm - dense) <= 1e-4 * dense);
  }
}

TEST_CASE("tree bound at delta = 1 is the norm") {
  const auto fx = comb_tree(9, 3, 0);
  REQUIRE(is_tree(fx.tree.members, fx.tree.top));
  const auto b = tree_bound_check(fx.tiles, fx.choice, 1.0);
  CHECK(b.max_density == 1.0);
  CHECK(b.ratio == b.norm);
  CHECK(std::isfinite(b.norm));
  CHECK_THROWS_AS(tree_bound_check(fx.tiles, fx.choice, 0.5), std::invalid_argument);
}

TEST_CASE("comb trees have the prescribed density") {
  for (int j = 0; j <= 3; ++j) {
    const auto fx = comb_tree(9, 3, j);
    CHECK(fx.tiles.size() == 15);  // 1 + 2 + 4 + 8 intervals
    CHECK(is_tree(fx.tree.members, fx.tree.top));
    for (const auto& P : fx.tiles) CHECK(P.density(9) == std::ldexp(1.0, -j));
  }
  CHECK_THROWS_AS(comb_tree(9, 3, 7), std::invalid_argument);
}

TEST_CASE("tree norms scale like delta^{1/p}") {
  const std::vector<int> js = {1, 2, 3};
  const auto s2 = tree_delta_sweep(9, js);
  CHECK(std::abs(s2.slope - 0.5) <= 0.15);
  const auto s4 = tree_delta_sweep(9, js, 4.0);
  CHECK(std::abs(s4.slope - 0.25) <= 0.15);
  for (const auto& p : s2.points) CHECK(p.max_density <= p.delta);
}

TEST_CASE("v operators: trivial cases") {
  const int K = 9;
  const auto choice = block_choice(K, 1, 3, 40.0, 0.01, 2);
  const auto pool = random_subpool(choice, 4, 2);
  const auto zero = v_operators(pool, v_threshold(2, 1), GridFunction(K));
  CHECK(zero.a.values.isZero(0.0));
  CHECK(zero.b.values.isZero(0.0));

  const auto f = random_gaussian(K, 3);
  const ESet& P = pool.front();
  const auto one = v_operators(std::span(&P, 1), v_threshold(2, 1), f);
  Complex integral(0.0);
  for (int x : P.samples) integral += f.values(x) * f.h();
  GridFunction expect(K);
  for (int x : P.samples) expect.values(x) = integral / P.tile.time.length();
  CHECK((one.a.values - expect.values).norm() <= 1e-12 * (1.0 + expect.values.norm()));
  CHECK(one.b.values.isZero(0.0));
  CHECK(one.a_pairs == 1);
  CHECK(one.b_pairs == 0);
}

TEST_CASE("v operators: the split is a partition of the pairs") {
  const int K = 9;
  const auto choice = block_choice(K, 2, 3, 40.0, 0.01, 4);
  const auto pool = random_subpool(choice, 4, 4);
  const auto f = random_gaussian(K, 5);
  const auto split = v_operators(pool, v_threshold(3, 2), f);
  const auto whole = v_operators(pool, std::numeric_limits<double>::infinity(), f);
  CHECK(whole.b_pairs == 0);
  CHECK(split.a_pairs + split.b_pairs == whole.a_pairs);
  CHECK((split.a.values + split.b.values - whole.a.values).norm() <= 1e-10 * whole.a.values.norm());
  CHECK(v_threshold(4, 1) == doctest::Approx(2.0));
  // Measured L^2 constant on a random pool; finite, reported.
  const double c = split.a.l2_norm() / f.l2_norm();
  MESSAGE("||V_a f|| / ||f|| = " << c);
  CHECK(std::isfinite(c));
}

TEST_CASE("v maximal operator") {
  const int K = 8;
  const auto choice = block_choice(K, 1, 2, 30.0, 0.01, 6);
  const auto E = interval_sets(tile_sets(choice, 3));
  GridFunction one(K, Eigen::VectorXcd::Ones(1 << K));
  const auto V = v_maximal(E, one, 1.5);
  // At most one I per scale holds x, and |I* cap [0,1)| <= 4|I|.
  for (Eigen::Index i = 0; i < V.size(); ++i) CHECK(V.values(i).real() <= 4.0 * std::pow(4.0, 1.0 / 1.5));
  CHECK(V.values.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("carleson packing") {
  const int K = 8;
  const auto choice = block_choice(K, 1, 2, 30.0, 0.01, 9);
  // One scale: the E(I) are disjoint and lie in I.
  const auto single = interval_sets(tile_sets(choice, std::vector<int>{3}));
  for (const auto& [J, s] : single) {
    const auto c = carleson_packing_check(single, J, 1.0, K, 1.0);
    CHECK(c.lhs <= c.length);
    CHECK(c.ok);
  }
  CHECK(carleson_packing_check(single, {0, 0}, 1.0, K).lhs == doctest::Approx(1.0));

  const auto nested = interval_sets(tile_sets(choice, 4));
  const double c1 = packing_constant(nested, 1.0, K);
  const double c2 = packing_constant(nested, 2.0, K);
  const double c4 = packing_constant(nested, 4.0, K);
  CHECK(c1 <= c2);
  CHECK(c2 <= c4);
  // Every x lies in E(I) for one I per scale: the stack height is the scale count.
  CHECK(c1 == doctest::Approx(5.0));
  CHECK(c4 == doctest::Approx(625.0));
  CHECK(carleson_packing_check(nested, {0, 0}, 1.0, K, c1).ok);
  CHECK_FALSE(carleson_packing_check(nested, {0, 0}, 1.0, K, 2.0).ok);
}

TEST_CASE("maximal functions") {
  const int K = 8;
  GridFunction one(K, Eigen::VectorXcd::Ones(1 << K));
  CHECK((maximal_function(one).array() == 1.0).all());

  const auto f = random_gaussian(K, 11);
  const auto M = maximal_function(f);
  CHECK((M.array() >= f.values.cwiseAbs().array() * (1 - 1e-15)).all());
  CHECK((M.array() >= f.values.cwiseAbs().mean() * (1 - 1e-12)).all());
  for (double r : {1.5, 2.0, 3.0}) {
    GridFunction g(K, f.values.cwiseAbs().array().pow(r).matrix().cast<Complex>());
    const Eigen::VectorXd expect = maximal_function(g).array().pow(1.0 / r).matrix();
    CHECK(maximal_function_r(f, r) == expect);
  }
}

TEST_CASE("sparse maximal function") {
  const int K = 9;
  const auto f = random_gaussian(K, 12);
  const auto fam = comb_family(K, 4, 2);
  const auto Md = maximal_delta(f, fam, 0.25);
  const auto M = maximal_function(f);
  int support = 0;
  for (Eigen::Index i = 0; i < Md.size(); ++i) {
    if (Md(i) == 0.0) continue;
    ++support;
    CHECK(Md(i) <= M(i) * (1 + 1e-12));
  }
  CHECK(support == (1 << K) / 4);

  CHECK_THROWS_AS(maximal_delta(f, fam, 0.2), std::invalid_argument);
  auto overlap = fam;
  overlap.intervals[1] = overlap.intervals[0].parent();
  CHECK_THROWS_AS(maximal_delta(f, overlap, 0.25), std::invalid_argument);
  auto outside = fam;
  outside.sets[0].back() = 1 << (K - 4);
  CHECK_THROWS_AS(maximal_delta(f, outside, 0.25), std::invalid_argument);

  // ||M_delta f||_p / ||f||_p against delta: slope near 1/p.
  for (double p : {2.0, 4.0}) {
    std::vector<double> xs, ys;
    for (int j = 1; j <= 5; ++j) {
      double best = 0.0;
      for (std::uint64_t s = 0; s < 8; ++s) {
        const auto g = random_gaussian(K, 100 + s);
        best = std::max(best, lp(maximal_delta(g, comb_family(K, 3, j), std::ldexp(1.0, -j)), K, p) /
                                  g.lp_norm(p));
      }
      xs.push_back(-j);
      ys.push_back(std::log2(best));
    }
    CHECK(std::abs(fit_slope(xs, ys) - 1.0 / p) <= 0.15);
  }
  CHECK(l2(maximal_delta(f, SparseFamily{}, 0.1), K) == 0.0);
}

TEST_CASE("row check: one row") {
  const std::vector<int> scales = {5, 6, 7};
  const auto fx = cluster_forest(12, 1, 1, 12, 1, scales, 1e5, 1);
  REQUIRE(fx.trees.size() == 2);
  const auto rows = rows_of(fx.trees);
  REQUIRE(rows.size() == 1);
  const std::vector<GridFunction> fs = {random_gaussian(12, 1)};
  const auto rc = row_orthogonality_check(rows, fx.tiles, fx.choice, fs);
  CHECK(rc.ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rc.cross_zero);
  CHECK(rc.cross_adjoint_norm == 0.0);
}

TEST_CASE("row check: cluster forests") {
  const std::vector<int> scales = {5, 6, 7};
  const auto fx = cluster_forest(12, 1, 2, 7, 0, scales, 1e5, 3);
  REQUIRE(fx.trees.size() == 2);
  for (const auto& t : fx.trees) {
    CHECK(is_tree(t.members, t.top));
    CHECK(is_normal_tree(t));
  }
  CHECK(is_linf_forest(fx.trees, 1));
  CHECK(is_separated(fx.trees[0], fx.trees[1], 1.0 / 256));
  const auto rows = rows_of(fx.trees);
  REQUIRE(rows.size() == 2);
  const std::vector<GridFunction> fs = {random_gaussian(12, 1), random_gaussian(12, 2)};
  const auto rc = row_orthogonality_check(rows, fx.tiles, fx.choice, fs, NormConfig(), Bump(), 10);
  CHECK(rc.overlapping_pairs == 0);
  CHECK(rc.cross_zero);
  CHECK(rc.ratio <= 4.0);
  MESSAGE("cross-adjoint norm " << rc.cross_adjoint_norm);
}

TEST_CASE("decay table rows and fit") {
  const int K = 9;
  const auto choice = block_choice(K, 1, 2, 40.0, 0.01, 21);
  std::vector<int> scales;
  for (int k = 2; k <= finest_resolved_scale(K); ++k) scales.push_back(k);
  const auto sets = tile_sets(choice, scales);
  auto r = build_partition(measure_tiles(sets, K));
  DecayConfig cfg;
  cfg.ps = {4.0};
  cfg.ensemble = 4;
  const auto table = main_decay_experiment(r, sets, choice, cfg);
  REQUIRE(!table.rows.empty());
  std::size_t total = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    CHECK(table.rows[i].n == static_cast<int>(i) + 1);
    CHECK(table.rows[i].lp.size() == 1);
    total += table.rows[i].tiles;
  }
  CHECK(total == sets.size() - r.null_tiles.size());
  CHECK(table.eta_fit == -table.slope);

  // Moving every tile of generation 2 away leaves an empty row with norm 0.
  for (auto& a : r.assignment)
    if (a.n == 2) a.n = 1;
  const auto gap = main_decay_experiment(r, sets, choice, cfg);
  REQUIRE(gap.rows.size() >= 2);
  CHECK(gap.rows[1].tiles == 0);
  CHECK(gap.rows[1].norm == 0.0);
}

TEST_CASE("triangle inequality and the density bound") {
  const int K = 9;
  const auto choice = block_choice(K, 1, 3, 40.0, 0.01, 31);
  const auto pool = random_subpool(choice, 4, 31);
  const std::vector<ESet> few(pool.begin(), pool.begin() + std::min<std::size_t>(pool.size(), 12));
  const auto t = triangle_check(few, choice);
  CHECK(t.ok());
  const Bump psi;
  for (const auto& P : few) {
    if (P.scale() < 2) continue;
    CHECK(density_ratio(P, choice) <= psi.l1_norm());
  }
}

}  // TEST_SUITE
