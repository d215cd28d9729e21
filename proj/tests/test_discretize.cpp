#include <doctest.h>

#include <numbers>

#include "carleson/discretize.hpp"
#include "support.hpp"

using namespace carleson;
using carleson::testing::Rng;

namespace {

// Telescoped kernel for scales 0..kmax: (chi(y/2) - chi(2^kmax y)) / y.
double telescoped_kernel(double y, int kmax) {
  if (y == 0.0) return 0.0;
  return (cutoff_chi(y / 2.0) - cutoff_chi(std::ldexp(y, kmax))) / y;
}

// All E-sets at scales 0..kmax.
std::vector<ESet> all_e_sets(const ChoiceFunction& c, int kmax) {
  std::vector<ESet> out;
  for (int k = 0; k <= kmax; ++k) {
    auto s = e_sets(c, k);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

double rel_l2(const GridFunction& a, const GridFunction& b) {
  return (a.values - b.values).norm() / std::max(b.values.norm(), 1e-300);
}

}  // namespace

TEST_SUITE("discretize") {

TEST_CASE("telescoping bump") {
  const Bump psi = build_psi();
  CHECK(psi(1.0) == 0.0);
  CHECK(psi(9.0) == 0.0);
  CHECK(psi(2.0) == 0.0);
  CHECK(psi(8.0) == 0.0);
  CHECK(psi(5.0) != 0.0);
  for (int i = 0; i < 1000; ++i) {
    const double y = 10.0 * (i + 0.5) / 1000;
    CHECK(psi(-y) == -psi(y));
  }
  double s = 0.0;
  for (int k = 0; k <= 20; ++k) s += psi.at_scale(k, 0.3);
  CHECK(std::abs(s - 1.0 / 0.3) <= 1e-9);

  Rng rng(21);
  for (int t = 0; t < 2000; ++t) {
    const double y = std::ldexp(carleson::testing::uniform(rng, 1.0, 2.0), -carleson::testing::uniform_int(rng, 1, 25));
    double sum = 0.0;
    for (int k = 0; k <= 30; ++k) sum += psi.at_scale(k, y) + psi.at_scale(k, -y);
    CHECK(std::abs(sum) <= 1e-9 / y);
    sum = 0.0;
    for (int k = 0; k <= 30; ++k) sum += psi.at_scale(k, y);
    CHECK(std::abs(sum - 1.0 / y) <= 1e-9 / y);
  }
}

TEST_CASE("narrow bump") {
  const Bump psi = narrow_psi();
  CHECK(psi(4.5) != 0.0);
  CHECK(psi(3.9) == 0.0);
  CHECK(psi(5.1) == 0.0);
  for (int i = 0; i < 1000; ++i) {
    const double y = 6.0 * (i + 0.5) / 1000;
    CHECK(psi(-y) == -psi(y));
  }
  CHECK(psi.l1_norm() > 0.0);
  CHECK(psi.l1_norm() < build_psi().l1_norm());
}

TEST_CASE("smooth step and cutoff") {
  CHECK(smooth_step(-1) == 0.0);
  CHECK(smooth_step(2) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  CHECK(cutoff_chi(1.9) == 1.0);
  CHECK(cutoff_chi(-4.1) == 0.0);
  for (int i = 0; i < 100; ++i) {
    const double t = 2.0 + 2.0 * i / 100;
    CHECK(cutoff_chi(t) >= cutoff_chi(t + 0.02));
  }
}

TEST_CASE("scale separation") {
  CHECK(scale_separation(1) == 3);
  CHECK(scale_separation(2) == 9);
  CHECK(scale_separation(3) == 16);
  CHECK(residue_class(1, 2, 10) == std::vector<int>{2, 5, 8});
  CHECK(residue_class(2, 0, 20) == std::vector<int>{0, 9, 18});
  CHECK_THROWS(residue_class(1, 3, 10));
}

TEST_CASE("e_sets with a constant choice give one tile per interval") {
  const ChoiceFunction c = constant_choice(8, Poly({0.0, 3.0, -2.0}), 2);
  for (int k = 0; k <= 8; ++k) {
    const auto sets = e_sets(c, k);
    CHECK(sets.size() == (std::size_t{1} << k));
    for (const auto& E : sets) CHECK(E.samples.size() == (std::size_t{1} << (8 - k)));
  }
}

TEST_CASE("e_sets partition the grid at every scale") {
  for (int d = 1; d <= 3; ++d) {
    const ChoiceFunction c = random_choice(9, d, 200.0, 40 + d);
    for (int k = 0; k <= 9; ++k) {
      const auto sets = e_sets(c, k);
      std::vector<int> hits(c.size(), 0);
      double total = 0.0;
      for (const auto& E : sets) {
        CHECK(!E.samples.empty());
        CHECK(E.scale() == k);
        CHECK(E.tile.valid());
        total += E.measure(c.K);
        for (int i : E.samples) {
          ++hits[i];
          CHECK(E.tile.time.contains(grid_point(c.K, i)));
          CHECK(contains_poly(E.tile, c.frequency(i)));
        }
      }
      CHECK(total == 1.0);
      for (int h : hits) CHECK(h == 1);
    }
  }
}

TEST_CASE("T_P matches a direct convolution for the zero phase") {
  const int K = 10;
  const ChoiceFunction c = constant_choice(K, Poly({0.0, 0.0}), 1);
  const auto sets = e_sets(c, 0);
  REQUIRE(sets.size() == 1);
  const auto f = random_gaussian(K, 3);
  const auto out = apply_T_P(f, sets[0], c);
  const Bump psi;
  const double h = f.h();
  double err = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    Complex s(0.0);
    for (Eigen::Index j = 0; j < f.size(); ++j) s += psi(f.x(i) - f.x(j)) * h * f.values(j);
    err = std::max(err, std::abs(s - out.values(i)));
  }
  CHECK(err <= 1e-8);
  CHECK(apply_T_P(GridFunction(K), sets[0], c).values.norm() == 0.0);
}

TEST_CASE("T_P is supported in E(P) and T_P* in I*") {
  const int K = 10;
  Rng rng(17);
  for (int d = 1; d <= 2; ++d) {
    const ChoiceFunction c = random_choice(K, d, 300.0, 70 + d);
    for (const Bump& psi : {build_psi(), narrow_psi()}) {
      int tested = 0;
      for (int k = 0; k <= finest_resolved_scale(K) && tested < 100; ++k) {
        for (const auto& E : e_sets(c, k)) {
          if (carleson::testing::uniform(rng, 0, 1) > 0.3) continue;
          ++tested;
          const auto f = random_gaussian(K, 1000 + tested);
          const auto out = apply_T_P(f, E, c, psi);
          std::vector<bool> in(c.size(), false);
          for (int i : E.samples) in[i] = true;
          for (Eigen::Index i = 0; i < out.size(); ++i)
            if (!in[i]) CHECK(out.values(i) == Complex(0.0));
          if (psi.kind() != BumpKind::Narrow) continue;
          const auto back = apply_T_P_star(f, E, c, psi);
          const double L = E.tile.time.length();
          for (Eigen::Index i = 0; i < back.size(); ++i) {
            if (back.values(i) == Complex(0.0)) continue;
            const double dist = distance(RealInterval{f.x(i), f.x(i)}, E.tile.time.real());
            CHECK(dist >= 3 * L - 1e-12);
            CHECK(dist <= 5 * L + 1e-12);
          }
        }
      }
      CHECK(tested > 20);
    }
  }
}

TEST_CASE("under-resolved scales are rejected") {
  const int K = 8;
  const ChoiceFunction c = constant_choice(K, Poly({0.0, 1.0}), 1);
  CHECK_THROWS_AS(TileOperator(c, e_sets(c, finest_resolved_scale(K) + 1)), std::domain_error);
  CHECK_NOTHROW(TileOperator(c, e_sets(c, finest_resolved_scale(K))));
}

TEST_CASE("adjoint consistency on random pools") {
  const int K = 9;
  Rng rng(5);
  for (int t = 0; t < 12; ++t) {
    const int d = 1 + t % 3;
    const ChoiceFunction c = random_choice(K, d, 150.0, 300 + t);
    std::vector<ESet> pool;
    for (const auto& E : all_e_sets(c, finest_resolved_scale(K)))
      if (pool.size() < 100 && carleson::testing::uniform(rng, 0, 1) < 0.4) pool.push_back(E);
    const TileOperator T(c, pool, t % 2 ? narrow_psi() : build_psi());
    const auto f = random_gaussian(K, 10 + t);
    const auto g = random_gaussian(K, 20 + t);
    const Complex lhs = T.apply(f).inner(g);
    const Complex rhs = f.inner(T.apply_adjoint(g));
    CHECK(std::abs(lhs - rhs) <= 1e-8 * f.l2_norm() * g.l2_norm());

    const Eigen::MatrixXcd M = T.dense();
    CHECK((M * f.values - T.apply(f).values).norm() <= 1e-10 * f.values.norm() * (1 + M.norm()));
    CHECK((M.adjoint() * g.values - T.apply_adjoint(g).values).norm() <=
          1e-10 * g.values.norm() * (1 + M.norm()));
  }
}

TEST_CASE("collection of one tile equals T_P") {
  const int K = 8;
  const ChoiceFunction c = random_choice(K, 2, 50.0, 9);
  const auto sets = e_sets(c, 2);
  const auto f = random_gaussian(K, 1);
  const std::vector<ESet> one{sets.front()};
  CHECK(apply_T_collection(f, one, c).values == apply_T_P(f, sets.front(), c).values);
}

TEST_CASE("tiles at one scale have pointwise disjoint contributions") {
  const int K = 8;
  const ChoiceFunction c = random_choice(K, 1, 80.0, 12);
  const auto sets = e_sets(c, 2);
  const auto f = random_gaussian(K, 2);
  const auto total = apply_T_collection(f, sets, c);
  Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(f.size());
  Eigen::VectorXi count = Eigen::VectorXi::Zero(f.size());
  for (const auto& E : sets) {
    const auto part = apply_T_P(f, E, c);
    sum += part.values;
    for (Eigen::Index i = 0; i < f.size(); ++i) count(i) += part.values(i) != Complex(0.0);
  }
  CHECK(count.maxCoeff() <= 1);
  CHECK((sum - total.values).norm() <= 1e-12 * total.values.norm());
}

TEST_CASE("tile decomposition re-sums to the linearized kernel") {
  for (int d = 1; d <= 2; ++d) {
    const int K = 10;
    const int kmax = finest_resolved_scale(K);
    const ChoiceFunction c = random_choice(K, d, 100.0, 90 + d);
    const auto f = random_trigonometric(K, 6, 40.0, 91);
    const auto Tf = apply_T_collection(f, all_e_sets(c, kmax), c);
    GridFunction direct(K);
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const Poly Q = c.phase(i);
      Complex s(0.0);
      for (Eigen::Index j = 0; j < f.size(); ++j)
        s += std::polar(1.0, Q(f.x(i)) - Q(f.x(j))) * telescoped_kernel(f.x(i) - f.x(j), kmax) *
             f.h() * f.values(j);
      direct.values(i) = s;
    }
    CHECK(rel_l2(Tf, direct) <= 1e-6);
  }
}

TEST_CASE("coefficient grid") {
  const CoefficientRange r[] = {{-1, 1, 3}, {0, 2, 2}};
  const auto g = coefficient_grid(r);
  REQUIRE(g.size() == 6);
  CHECK(g[0].coeff(1) == -1);
  CHECK(g[0].coeff(2) == 0);
  CHECK(g[1].coeff(2) == 2);
  CHECK(g[5].coeff(1) == 1);
  CHECK(g[5].coeff(0) == 0);
}

TEST_CASE("carleson_direct") {
  const int K = 7;
  const Poly zero({0.0, 0.0});
  const std::vector<Poly> only{zero};
  CHECK(carleson_direct(GridFunction(K), only).norm() == 0.0);

  const auto f = random_gaussian(K, 4);
  const auto H = carleson_direct(f, only);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    Complex s(0.0);
    for (Eigen::Index j = 0; j < f.size(); ++j)
      if (std::abs(f.x(i) - f.x(j)) >= 2 * f.h() - 1e-15) s += f.h() * f.values(j) / (f.x(i) - f.x(j));
    CHECK(H(i) == doctest::Approx(std::abs(s)).epsilon(1e-10));
  }

  const CoefficientRange r[] = {{-60, 60, 25}, {-30, 30, 7}};
  const auto grid = coefficient_grid(r);
  const auto C = carleson_direct(f, grid);
  const auto choice = argmax_choice(f, grid, 2);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const Poly Q = choice.phase(i);
    Complex s(0.0);
    for (Eigen::Index j = 0; j < f.size(); ++j)
      if (std::abs(i - j) >= 2) s += std::polar(1.0, Q(f.x(i)) - Q(f.x(j))) * f.values(j) / double(i - j);
    CHECK(std::abs(s) == doctest::Approx(C(i)).epsilon(1e-10));
    CHECK(C(i) >= H(i) * (1 - 1e-12));
  }
}

TEST_CASE("argmax choice") {
  const int K = 7;
  const auto f = random_gaussian(K, 6);
  const std::vector<Poly> one{Poly({0.0, 7.5})};
  const auto c = argmax_choice(f, one, 1);
  CHECK((c.coeffs.array() == 7.5).all());

  const CoefficientRange r[] = {{-40, 40, 17}};
  const auto grid = coefficient_grid(r);
  CHECK(argmax_choice(f, grid, 1).coeffs == argmax_choice(f, grid, 1).coeffs);

  // Duplicated grid: the first copy wins and the choice is unchanged.
  std::vector<Poly> twice = grid;
  twice.insert(twice.end(), grid.begin(), grid.end());
  CHECK(argmax_choice(f, twice, 1).coeffs == argmax_choice(f, grid, 1).coeffs);
}

TEST_CASE("argmax for a pure mode avoids the mode frequency") {
  // With f = e^{iay}, |T_Q f| at Q' = a is the truncated Hilbert transform of a constant,
  // small away from the ends of [0,1], while offsets of a few multiples of pi reach about pi.
  const int K = 9;
  const double a = 40.0 * std::numbers::pi;
  GridFunction f(K);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.values(i) = std::polar(1.0, a * f.x(i));
  const CoefficientRange r[] = {{a - 64 * std::numbers::pi, a + 64 * std::numbers::pi, 65}};
  const auto grid = coefficient_grid(r);
  const auto c = argmax_choice(f, grid, 1);
  const auto C = carleson_direct(f, grid);
  int far = 0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    far += std::abs(c.coeffs(i, 0) - a) > 1.0;
    CHECK(C(i) >= 0.9 * std::numbers::pi);
  }
  CHECK(far >= 3 * f.size() / 4);
}

}
