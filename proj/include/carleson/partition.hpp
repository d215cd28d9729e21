#pragma once

#include <span>
#include <vector>

#include "carleson/discretize.hpp"
#include "carleson/dyadic.hpp"
#include "carleson/tiles.hpp"

namespace carleson {

struct PartitionConfig {
  double c = 10.0;  // John-Nirenberg constant in the level thresholds
  int N = kMassExponent;
  int samples = kSamplesPerLength;
  int max_levels = 64;  // guard on k within one generation
};

std::vector<MeasuredTile> measure_tiles(std::span<const ESet> sets, int K);

// Indices (into tiles) of the members of `candidates` with density >= theta and
// time interval inside A that are maximal for <= among those.
std::vector<std::size_t> maximal_tiles(std::span<const MeasuredTile> tiles,
                                       std::span<const std::size_t> candidates, double theta,
                                       const DyadicUnion& A);
std::vector<std::size_t> maximal_tiles(std::span<const MeasuredTile> tiles, double theta,
                                       const DyadicUnion& A);

struct PartitionLayer {
  int n = 0;
  int k = 0;
  DyadicUnion region;                 // A_n^k
  std::vector<std::size_t> maximal;   // p_n^{k,max}
  CountingFunction counting;          // N_n^k over the distinct maximal time intervals
  double bmo = 0.0;
  double gamma = 0.0;                 // threshold producing A_n^{k+1}
  std::vector<std::size_t> tiles;     // p_n^k
};

struct Generation {
  int n = 0;
  std::vector<PartitionLayer> layers;
  DyadicUnion tail;  // region after the last layer
  bool stalled = false;  // level set equal to its region; the layers were closed there
  int overshoot = 0;     // tiles placed here with mass >= 2^{-n+1}
};

struct Assignment {
  int n = 0;  // 0 for the null generation
  int k = 0;
  double mass = 0.0;
};

struct PartitionResult {
  std::vector<MeasuredTile> tiles;
  std::vector<Generation> generations;
  std::vector<Assignment> assignment;  // parallel to tiles
  std::vector<std::size_t> null_tiles;

  const Generation* generation(int n) const;
  // Tiles still present when generation n was formed.
  std::vector<std::size_t> pool_at(int n) const;
  CountingFunction global_counting(int n) const;
};

// [2^{-n}, 2^{-n+1}), closed at 1 for n = 1.
bool mass_in_range(double m, int n);

double gamma_threshold(int n, double bmo, const PartitionConfig& cfg);

// Peels P_1, P_2, ... off the pool; tiles of mass 0 go to the null generation.
PartitionResult build_partition(std::vector<MeasuredTile> tiles,
                                const PartitionConfig& cfg = PartitionConfig());

struct GenerationReport {
  int n = 0;
  bool nesting = true;
  double max_bmo = 0.0;        // sup_k ||N_n^k||_{BMO_C}
  double bmo_bound = 0.0;      // 2^n
  double max_local_sup = 0.0;  // sup_k ||N_n^k||_{L^inf(A^k \ A^{k+1})}
  double global_bmo = 0.0;     // ||N_n||_{BMO_C}
  std::vector<double> measures;  // |A_n^k|, k = 0, 1, ...
  int mass_violations = 0;     // recomputed mass outside [2^{-n}, 2^{-n+1})
  int layer_violations = 0;    // I not in A^k or inside A^{k+1}
  bool bmo_ok() const { return max_bmo <= bmo_bound; }
  bool ok() const { return nesting && bmo_ok() && mass_violations == 0 && layer_violations == 0; }
};

GenerationReport verify_generation(const PartitionResult& result, int n,
                                   const PartitionConfig& cfg = PartitionConfig());

// sup of c over A \ B.
double sup_on_difference(const CountingFunction& c, const DyadicUnion& A, const DyadicUnion& B);

}  // namespace carleson
