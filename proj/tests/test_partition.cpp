#include <doctest.h>

#include <algorithm>
#include <set>

#include "carleson/fixtures.hpp"
#include "carleson/partition.hpp"
#include "support.hpp"

using namespace carleson;
using carleson::testing::Rng;
using carleson::testing::uniform;
using carleson::testing::uniform_int;

namespace {

MeasuredTile flat(DyadicInterval I, double xi, double density) {
  return {tile_at(I, Poly(Poly::Coeffs::Constant(1, xi)), 1), density};
}

struct Pool {
  ChoiceFunction choice;
  std::vector<ESet> sets;
  std::vector<MeasuredTile> tiles;
};

Pool random_pool(std::uint64_t seed, int K, int d, int kmax) {
  Rng rng(seed);
  Pool p;
  p.choice = block_choice(K, d, uniform_int(rng, 0, 3), 60.0, 0.003, seed);
  p.sets = tile_sets(p.choice, kmax);
  p.tiles = measure_tiles(p.sets, K);
  return p;
}

std::vector<MeasuredTile> nested_stack() { return nested_chain(); }

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("maximal tiles on small examples") {
  const std::vector<MeasuredTile> one{flat({0, 0}, 0.5, 0.6)};
  CHECK(maximal_tiles(one, 0.5, DyadicUnion::unit()) == std::vector<std::size_t>{0});
  CHECK(maximal_tiles(one, 1.1, DyadicUnion::unit()).empty());
  CHECK(maximal_tiles(one, 0.5, DyadicUnion({{1, 0}})).empty());

  // A chain P_child <= P_parent keeps only the parent.
  const std::vector<MeasuredTile> chain{flat({2, 1}, 2.5, 0.9), flat({1, 0}, 0.5, 0.9),
                                        flat({0, 0}, 0.5, 0.9)};
  REQUIRE(leq(chain[0].tile, chain[1].tile));
  REQUIRE(leq(chain[1].tile, chain[2].tile));
  CHECK(maximal_tiles(chain, 0.5, DyadicUnion::unit()) == std::vector<std::size_t>{2});
  // Below the threshold the parent no longer counts.
  auto sparse_top = chain;
  sparse_top[2].density = 0.1;
  CHECK(maximal_tiles(sparse_top, 0.5, DyadicUnion::unit()) == std::vector<std::size_t>{1});
  // Outside A the parent is invisible.
  CHECK(maximal_tiles(chain, 0.5, DyadicUnion({{1, 0}})) == std::vector<std::size_t>{1});

  // Same interval, different frequency: incomparable, both maximal.
  const std::vector<MeasuredTile> twins{flat({0, 0}, 0.5, 1.0), flat({0, 0}, 7.5, 1.0)};
  CHECK(maximal_tiles(twins, 0.5, DyadicUnion::unit()).size() == 2);
}

TEST_CASE("maximal tiles are maximal and cover the dense ones") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto p = random_pool(seed, 8, 1 + static_cast<int>(seed % 2), 4);
    const double theta = 0.25;
    const auto max = maximal_tiles(p.tiles, theta, DyadicUnion::unit());
    const std::set<std::size_t> M(max.begin(), max.end());
    for (std::size_t i = 0; i < p.tiles.size(); ++i) {
      if (p.tiles[i].density < theta) {
        CHECK(M.count(i) == 0);
        continue;
      }
      bool dominated = false;
      bool covered = M.count(i) > 0;
      for (std::size_t j = 0; j < p.tiles.size(); ++j) {
        if (j == i || p.tiles[j].density < theta) continue;
        const bool up = leq(p.tiles[i].tile, p.tiles[j].tile);
        if (up && !leq(p.tiles[j].tile, p.tiles[i].tile)) dominated = true;
        if (up && M.count(j)) covered = true;
      }
      CHECK(dominated == (M.count(i) == 0));
      CHECK(covered);
    }
  }
}

TEST_CASE("empty pool gives an empty partition") {
  const auto r = build_partition({});
  CHECK(r.generations.empty());
  CHECK(r.null_tiles.empty());
}

TEST_CASE("single full tile lands in the first generation") {
  const auto r = build_partition({flat({0, 0}, 0.5, 1.0)});
  REQUIRE(r.generations.size() == 1);
  CHECK(r.assignment[0].n == 1);
  CHECK(r.assignment[0].k == 0);
  CHECK(r.assignment[0].mass == doctest::Approx(1.0));
}

TEST_CASE("separated tiles land in generations by their density") {
  const auto r = build_partition({flat({0, 0}, 0.5, 1.0), flat({0, 0}, 1e5, std::ldexp(1.0, -5))});
  CHECK(r.assignment[0].n == 1);
  CHECK(r.assignment[1].n == 5);
  CHECK(r.assignment[1].mass == doctest::Approx(std::ldexp(1.0, -5)));
  // Generations 2..4 have nothing to receive and are skipped.
  CHECK(r.generation(3) == nullptr);
  CHECK(r.generation(5) != nullptr);
}

TEST_CASE("a zero-density tile dominated by nothing is null") {
  const auto r = build_partition({flat({0, 0}, 0.5, 1.0), flat({1, 1}, 1e5, 0.0)});
  CHECK(r.assignment[0].n == 1);
  CHECK(r.assignment[1].n == 0);
  CHECK(r.null_tiles == std::vector<std::size_t>{1});
}

TEST_CASE("mass of a tile inherits from dense tiles above it") {
  // Child with no density of its own under a dense parent of the same frequency.
  const auto r = build_partition({flat({0, 0}, 0.5, 1.0), flat({3, 2}, 0.5, 0.0)});
  CHECK(r.assignment[1].n >= 1);
  CHECK(r.assignment[1].mass > 0.0);
  CHECK(r.assignment[1].mass <= 1.0);
}

TEST_CASE("nested stack advances through the layers") {
  PartitionConfig cfg;
  cfg.c = 1.0;
  const auto r = build_partition(nested_stack(), cfg);
  REQUIRE(r.generations.size() == 1);
  const auto& g = r.generations[0];
  REQUIRE(g.layers.size() >= 2);
  // N = sum of indicators of [0, 2^-k); its BMO norm is attained on [0,1).
  const double bmo0 = 2.0 - std::ldexp(1.0, -7);
  CHECK(g.layers[0].bmo == doctest::Approx(bmo0));
  CHECK(g.layers[0].gamma == doctest::Approx(bmo0));
  CHECK(g.layers[0].maximal.size() == 8);
  CHECK(g.layers[1].region.pieces() == std::vector<DyadicInterval>{{1, 0}});
  for (std::size_t k = 0; k + 1 < g.layers.size(); ++k)
    CHECK(g.layers[k + 1].region.subset_of(g.layers[k].region));
  // Each tile sits in the last layer whose region contains it.
  CHECK(r.assignment[0].k == 0);
  for (std::size_t i = 0; i < r.tiles.size(); ++i) {
    const auto& L = g.layers[r.assignment[i].k];
    CHECK(L.region.contains(r.tiles[i].tile.time));
  }
  const auto rep = verify_generation(r, 1, cfg);
  CHECK(rep.ok());
  CHECK(rep.max_local_sup <= 2.0 * g.layers[0].gamma + 1.0);
}

TEST_CASE("gamma threshold") {
  PartitionConfig cfg;
  CHECK(gamma_threshold(1, 2.0, cfg) == doctest::Approx(20.0));
  CHECK(gamma_threshold(3, 2.0, cfg) == doctest::Approx(60.0));
}

TEST_CASE("sup on a difference against sampling") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    std::vector<DyadicInterval> m;
    for (int i = 0; i < 12; ++i) m.push_back(carleson::testing::random_interval(rng, 5));
    const CountingFunction c(m);
    const DyadicUnion A({carleson::testing::random_interval(rng, 2)});
    const DyadicUnion B({carleson::testing::random_interval(rng, 4)});
    int best = 0;
    for (int s = 0; s < 4096; ++s) {
      const double x = (s + 0.5) / 4096;
      if (A.contains(x) && !B.contains(x)) best = std::max(best, c(x));
    }
    CHECK(sup_on_difference(c, A, B) == best);
  }
}

TEST_CASE("random pools: bijection, nesting, mass ranges and BMO bounds") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    CAPTURE(seed);
    const int d = 1 + static_cast<int>(seed % 2);
    const auto p = random_pool(seed, 8, d, 5);
    const auto r = build_partition(p.tiles);

    // Every tile appears in exactly one layer or in the null list.
    std::vector<int> seen(p.tiles.size(), 0);
    for (const auto& g : r.generations)
      for (const auto& L : g.layers)
        for (std::size_t i : L.tiles) {
          ++seen[i];
          CHECK(r.assignment[i].n == g.n);
          CHECK(r.assignment[i].k == L.k);
        }
    for (std::size_t i : r.null_tiles) ++seen[i];
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));

    for (std::size_t i = 0; i < p.tiles.size(); ++i) {
      const auto& a = r.assignment[i];
      if (a.n == 0) continue;
      CHECK(a.mass >= p.tiles[i].density - 1e-12);
      CHECK(a.mass <= 1.0 + 1e-12);
    }
    for (const auto& g : r.generations) {
      CHECK(g.overshoot == 0);
      CHECK_FALSE(g.stalled);
      const auto rep = verify_generation(r, g.n);
      CHECK(rep.nesting);
      CHECK(rep.bmo_ok());
      CHECK(rep.mass_violations == 0);
      CHECK(rep.layer_violations == 0);
    }
  }
}

TEST_CASE("maximal tiles have disjoint E-sets") {
  for (std::uint64_t seed = 21; seed <= 24; ++seed) {
    const auto p = random_pool(seed, 8, 1 + static_cast<int>(seed % 2), 5);
    const auto r = build_partition(p.tiles);
    for (const auto& g : r.generations)
      for (const auto& L : g.layers) {
        std::vector<int> used;
        for (std::size_t i : L.maximal)
          used.insert(used.end(), p.sets[i].samples.begin(), p.sets[i].samples.end());
        std::sort(used.begin(), used.end());
        CHECK(std::adjacent_find(used.begin(), used.end()) == used.end());
      }
  }
}

}  // TEST_SUITE
