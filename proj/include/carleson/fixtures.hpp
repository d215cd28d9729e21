#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "carleson/discretize.hpp"
#include "carleson/forest.hpp"

namespace carleson {

// Coefficients drawn per block of 2^block_bits samples from [-scale, scale],
// plus a per-sample jitter of relative size `jitter`.
ChoiceFunction block_choice(int K, int d, int block_bits, double scale, double jitter,
                            std::uint64_t seed);

// a_j(x) = sum over m = 1..modes of r_m sin(2 pi m x + phi_m) with |r_m| <= amplitude / m.
ChoiceFunction smooth_choice(int K, int d, double amplitude, int modes, std::uint64_t seed);

// Nonempty E-sets over scales 0..kmax.
std::vector<ESet> tile_sets(const ChoiceFunction& choice, int kmax);
std::vector<ESet> tile_sets(const ChoiceFunction& choice, std::span<const int> scales);

struct TreeFixture {
  ChoiceFunction choice;
  std::vector<ESet> tiles;  // the tree members with their E-sets
  Tree tree;
};

// Samples i = 0 mod 2^j carry the linear phase `freq` y; the others sit far away in
// frequency. The tree is every tile over scales 0..kmax containing `freq`, so each
// member has density 2^{-j} when 2^j divides 2^{K-kmax}.
TreeFixture comb_tree(int K, int kmax, int j, double freq = 0.5);

struct ForestFixture {
  ChoiceFunction choice;
  std::vector<ESet> tiles;  // every tile of the choice function over the scales
  std::vector<Tree> trees;
};

// Blocks of 2^block_bits samples each take one of `clusters` constant frequencies
// spaced `spacing` apart. One normal tree per cluster and top interval at top_level,
// holding the tiles of that cluster with 20I inside the top interval.
ForestFixture cluster_forest(int K, int d, int clusters, int block_bits, int top_level,
                             std::span<const int> scales, double spacing, std::uint64_t seed);

// [0, 2^-k) for k = 0..7 at full density, frequencies 1e4 (k + 1): no two comparable.
std::vector<MeasuredTile> nested_chain();

}  // namespace carleson
