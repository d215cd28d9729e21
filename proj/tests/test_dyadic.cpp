#include <doctest.h>

#include <set>

#include "carleson/dyadic.hpp"
#include "support.hpp"

using namespace carleson;
using carleson::testing::Rng;

TEST_SUITE("dyadic") {

TEST_CASE("center is the exact midpoint") {
  CHECK(center({0, 0}) == DyadicRational::make(1, 1));
  CHECK(center({2, 0}) == DyadicRational::make(1, 3));
  // [3/8, 1/2) is level 3, index 3
  CHECK(center({3, 3}) == DyadicRational::make(7, 4));
  CHECK(center({3, 3}).value() == 7.0 / 16.0);
}

TEST_CASE("brothers shift by one length") {
  auto b = brothers({1, 1});
  CHECK(b.left == DyadicInterval{1, 0});
  CHECK(b.right == DyadicInterval{1, 2});
  CHECK(b.right.lo() == 1.0);
  CHECK(b.right.hi() == 1.5);
  b = brothers({2, 0});
  CHECK(b.left.lo() == -0.25);
  CHECK(b.left.hi() == 0.0);
  CHECK(b.right.lo() == 0.25);
  b = brothers({2, 1});
  CHECK(b.left == DyadicInterval{2, 0});
  CHECK(b.right == DyadicInterval{2, 2});
}

TEST_CASE("dilate keeps the center") {
  CHECK(dilate(DyadicInterval{0, 0}, 13) == RealInterval{-6, 7});
  CHECK(dilate(DyadicInterval{0, 0}, 1) == RealInterval{0, 1});
  CHECK(dilate(DyadicInterval{2, 1}, 2) == RealInterval{0.125, 0.625});
  CHECK_THROWS(dilate(DyadicInterval{0, 0}, 0));
}

TEST_CASE("star pieces") {
  auto s = star({0, 0});
  CHECK(s.right == RealInterval{4, 6});
  CHECK(s.left == RealInterval{-5, -3});
  s = star({2, 0});
  CHECK(s.right == RealInterval{1, 1.5});

  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    const auto I = carleson::testing::random_interval(rng, 20);
    const auto st = star(I);
    for (const auto& piece : {st.left, st.right}) {
      CHECK(piece.length() == doctest::Approx(2 * I.length()));
      const double dist = distance(piece, I.real());
      CHECK(dist >= 3 * I.length());
      CHECK(dist <= 5 * I.length());
    }
  }
}

TEST_CASE("node vectors") {
  CHECK(node_vector({0, 0}, 5) == std::vector<double>{0, 1, 0.5, 0.25, 0.75});
  CHECK(node_vector({0, 0}, 2) == std::vector<double>{0, 1});
  CHECK(node_vector({0, 0}, 9, NodeRule::BreadthFirst, 9) ==
        std::vector<double>{0, 1, 0.5, 0.25, 0.75, 0.125, 0.375, 0.625, 0.875});
  CHECK(node_vector({3, 2}, 1) == std::vector<double>{0.25});
  CHECK_THROWS(node_vector({0, 0}, 9));
  CHECK(node_vector({0, 0}, 4, NodeRule::Equispaced) ==
        std::vector<double>{0, 1.0 / 3, 2.0 / 3, 1});
}

TEST_CASE("node vectors are distinct and inside the closure") {
  Rng rng(3);
  for (int t = 0; t < 10000; ++t) {
    const auto I = carleson::testing::random_interval(rng, 30);
    const int d = carleson::testing::uniform_int(rng, 1, 8);
    const auto x = node_vector(I, d);
    REQUIRE(static_cast<int>(x.size()) == d);
    std::set<double> distinct(x.begin(), x.end());
    CHECK(distinct.size() == x.size());
    for (double v : x) {
      CHECK(v >= I.lo());
      CHECK(v <= I.hi());
    }
  }
}

TEST_CASE("nesting trichotomy") {
  Rng rng(5);
  for (int t = 0; t < 10000; ++t) {
    const auto a = carleson::testing::random_interval(rng, 6);
    const auto b = carleson::testing::random_interval(rng, 6);
    const bool sub = a.within(b);
    const bool sup = b.within(a);
    const bool dis = a.hi() <= b.lo() || b.hi() <= a.lo();
    CHECK(static_cast<int>(sub || sup) + static_cast<int>(dis) == 1);
    CHECK(dis == a.disjoint(b));
    if (sub && sup) CHECK(a == b);
  }
}

TEST_CASE("negative levels are frequency intervals") {
  const DyadicInterval a{-3, 1};
  CHECK(a.lo() == 8.0);
  CHECK(a.length() == 8.0);
  CHECK(dyadic_at(-0.5, -2) == DyadicInterval{-2, -1});
  CHECK(DyadicInterval{0, 5}.within(DyadicInterval{-2, 1}));
}

TEST_CASE("dyadic union normalizes to maximal pieces") {
  DyadicUnion u({{2, 0}, {2, 1}, {3, 1}, {1, 1}});
  REQUIRE(u.pieces().size() == 1);
  CHECK(u.pieces()[0] == DyadicInterval{0, 0});
  DyadicUnion v({{2, 1}, {3, 4}});
  CHECK(v.pieces().size() == 2);
  CHECK(v.contains(DyadicInterval{4, 5}));
  CHECK(!v.contains(DyadicInterval{4, 0}));
  CHECK(!v.contains(DyadicInterval{1, 0}));
  CHECK(v.measure() == 0.375);
  CHECK(v.subset_of(DyadicUnion::unit()));
}

TEST_CASE("bmo_c_norm examples") {
  CHECK(bmo_c_norm(CountingFunction()) == 0.0);
  CHECK(bmo_c_norm(CountingFunction({{0, 0}})) == 1.0);
  CHECK(bmo_c_norm(CountingFunction({{0, 0}, {1, 0}, {1, 1}})) == 2.0);
  CHECK(bmo_c_norm(CountingFunction({{2, 0}, {2, 0}, {2, 0}, {2, 0}})) == 4.0);
  CHECK_THROWS(bmo_c_norm(CountingFunction({{0, 1}})));
}

TEST_CASE("bmo_c_norm against brute force over all dyadic J") {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    CountingFunction c;
    const int n = carleson::testing::uniform_int(rng, 1, 30);
    for (int i = 0; i < n; ++i) c.add(carleson::testing::random_interval(rng, 6));
    double brute = 0.0;
    for (int k = 0; k <= 6; ++k) {
      for (std::int64_t m = 0; m < (std::int64_t{1} << k); ++m) {
        const DyadicInterval J{k, m};
        double s = 0.0;
        for (const auto& I : c.members())
          if (I.within(J)) s += I.length();
        brute = std::max(brute, s / J.length());
      }
    }
    CHECK(bmo_c_norm(c) == doctest::Approx(brute).epsilon(1e-14));
    CHECK(bmo_c_norm(c) <= c.sup());
  }
  CountingFunction same({{3, 2}, {3, 2}, {3, 2}});
  CHECK(bmo_c_norm(same) == same.sup());
}

TEST_CASE("level_set examples") {
  CHECK(level_set(CountingFunction({{0, 0}}), 2).empty());
  const auto A = level_set(CountingFunction({{0, 0}, {1, 0}}), 1);
  REQUIRE(A.pieces().size() == 1);
  CHECK(A.pieces()[0] == DyadicInterval{1, 0});
}

TEST_CASE("level_set is exactly the superlevel set on the grid") {
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    CountingFunction c;
    const int n = carleson::testing::uniform_int(rng, 1, 40);
    for (int i = 0; i < n; ++i) c.add(carleson::testing::random_interval(rng, 7));
    const double gamma = carleson::testing::uniform(rng, 0.0, 4.0);
    const auto A = level_set(c, gamma);
    double measure = 0.0;
    for (std::size_t i = 0; i < A.pieces().size(); ++i) {
      measure += A.pieces()[i].length();
      if (i > 0) CHECK(A.pieces()[i - 1].hi() <= A.pieces()[i].lo());
    }
    CHECK(measure == A.measure());
    for (int i = 0; i < 256; ++i) {
      const double x = (i + 0.5) / 256;
      CHECK(A.contains(x) == (c(x) > gamma));
    }
  }
}

TEST_CASE("counting function sup on a region") {
  CountingFunction c({{0, 0}, {1, 0}, {2, 0}});
  CHECK(c.sup() == 3);
  CHECK(c.sup_on(DyadicUnion({{1, 1}})) == 1);
  CHECK(c.sup_on(DyadicUnion({{2, 1}})) == 2);
  CHECK(c(0.1) == 3);
}

TEST_CASE("whitney") {
  const RealInterval dom{0, 1};
  const RealInterval all[] = {dom};
  CHECK(whitney(dom, all).empty());

  const RealInterval origin[] = {{0, 0}};
  const auto W = whitney(dom, origin, 20);
  CHECK(W.size() == 20);
  for (const auto& J : W) {
    CHECK(J.lo() == J.length());
    CHECK(J.hi() == 2 * J.length());
  }

  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    std::vector<RealInterval> obs;
    const int n = carleson::testing::uniform_int(rng, 1, 4);
    for (int i = 0; i < n; ++i) {
      const double a = carleson::testing::uniform(rng, 0, 1);
      const double b = std::min(1.0, a + carleson::testing::uniform(rng, 0, 0.1));
      obs.push_back({a, b});
    }
    std::sort(obs.begin(), obs.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
    std::vector<RealInterval> merged;
    for (const auto& o : obs) {
      if (!merged.empty() && o.lo <= merged.back().hi)
        merged.back().hi = std::max(merged.back().hi, o.hi);
      else
        merged.push_back(o);
    }
    double covered = 0.0;
    for (const auto& o : merged) covered += o.length();
    const int finest = 30;
    const auto out = whitney(dom, merged, finest);
    double total = 0.0;
    std::vector<DyadicInterval> sorted = out;
    std::sort(sorted.begin(), sorted.end(),
              [](auto& a, auto& b) { return a.lo() < b.lo(); });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const auto& J = sorted[i];
      total += J.length();
      if (i > 0) CHECK(sorted[i - 1].hi() <= J.lo());
      double dist = 1e9;
      for (const auto& o : merged) dist = std::min(dist, distance(J.real(), o));
      CHECK(dist >= J.length());
      CHECK(dist <= 4 * J.length());
    }
    // Pieces below the finest level are dropped, at most two per obstacle edge.
    CHECK(std::abs(total - (1.0 - covered)) <= 8.0 * merged.size() * std::ldexp(1.0, -finest));
  }
}

}
