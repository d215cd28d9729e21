#include "carleson/fixtures.hpp"

#include <algorithm>
#include <numbers>
#include <random>
#include <stdexcept>

namespace carleson {

ChoiceFunction block_choice(int K, int d, int block_bits, double scale, double jitter,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ChoiceFunction c(K, d);
  const Eigen::Index block = Eigen::Index{1} << block_bits;
  for (Eigen::Index i = 0; i < c.size(); i += block) {
    Eigen::VectorXd a(d);
    for (int j = 0; j < d; ++j) a(j) = scale * u(rng);
    for (Eigen::Index s = i; s < std::min(i + block, c.size()); ++s)
      for (int j = 0; j < d; ++j) c.coeffs(s, j) = a(j) + jitter * scale * u(rng);
  }
  return c;
}

ChoiceFunction smooth_choice(int K, int d, double amplitude, int modes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ChoiceFunction c(K, d);
  for (int j = 0; j < d; ++j) {
    for (int m = 1; m <= modes; ++m) {
      const double r = amplitude * u(rng) / m;
      const double phi = std::numbers::pi * u(rng);
      for (Eigen::Index i = 0; i < c.size(); ++i)
        c.coeffs(i, j) += r * std::sin(2.0 * std::numbers::pi * m * grid_point(K, i) + phi);
    }
  }
  return c;
}

std::vector<ESet> tile_sets(const ChoiceFunction& choice, int kmax) {
  std::vector<int> scales;
  for (int k = 0; k <= kmax; ++k) scales.push_back(k);
  return tile_sets(choice, scales);
}

std::vector<ESet> tile_sets(const ChoiceFunction& choice, std::span<const int> scales) {
  std::vector<ESet> out;
  for (int k : scales) {
    auto s = e_sets(choice, k);
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return out;
}

TreeFixture comb_tree(int K, int kmax, int j, double freq) {
  if (j < 0 || j > K - kmax) throw std::invalid_argument("comb_tree: spacing wider than the finest interval");
  const double far = std::ldexp(1.0, K + 4);
  TreeFixture fx;
  fx.choice = ChoiceFunction(K, 1);
  for (Eigen::Index i = 0; i < fx.choice.size(); ++i)
    fx.choice.coeffs(i, 0) = i % (Eigen::Index{1} << j) == 0 ? freq : far;
  const Poly nu = Poly::constant(freq);
  for (auto& P : tile_sets(fx.choice, kmax))
    if (contains_poly(P.tile, nu)) fx.tiles.push_back(std::move(P));
  fx.tree.top = tile_at({0, 0}, nu, 1);
  for (const auto& P : fx.tiles) fx.tree.members.push_back(P.tile);
  std::sort(fx.tree.members.begin(), fx.tree.members.end());
  return fx;
}

ForestFixture cluster_forest(int K, int d, int clusters, int block_bits, int top_level,
                             std::span<const int> scales, double spacing, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, clusters - 1);
  std::vector<double> nu;
  for (int c = 0; c < clusters; ++c) nu.push_back(10.5 + spacing * c);
  ForestFixture fx;
  fx.choice = ChoiceFunction(K, d);
  const Eigen::Index block = Eigen::Index{1} << block_bits;
  for (Eigen::Index i = 0; i < fx.choice.size(); i += block) {
    const double a = nu[pick(rng)];
    for (Eigen::Index s = i; s < std::min(i + block, fx.choice.size()); ++s) fx.choice.coeffs(s, 0) = a;
  }
  fx.tiles = tile_sets(fx.choice, scales);
  for (int c = 0; c < clusters; ++c) {
    const Poly q = Poly::constant(nu[c]);
    for (std::int64_t m = 0; m < (std::int64_t{1} << top_level); ++m) {
      const DyadicInterval J{top_level, m};
      Tree t;
      t.top = tile_at(J, q, d);
      for (const auto& P : fx.tiles) {
        const auto w = dilate(P.tile.time, 20.0);
        if (w.lo >= J.lo() && w.hi <= J.hi() && contains_poly(P.tile, q)) t.members.push_back(P.tile);
      }
      if (t.members.empty()) continue;
      std::sort(t.members.begin(), t.members.end());
      fx.trees.push_back(std::move(t));
    }
  }
  return fx;
}

std::vector<MeasuredTile> nested_chain() {
  std::vector<MeasuredTile> out;
  for (int k = 0; k < 8; ++k)
    out.push_back({tile_at({k, 0}, Poly::constant(1e4 * (k + 1)), 1), 1.0});
  return out;
}

}  // namespace carleson
