#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "carleson/partition.hpp"
#include "carleson/tiles.hpp"

namespace carleson {

// Members sorted by Tile order, i.e. by (scale, time index, frequency).
struct Tree {
  Tile top;
  std::vector<Tile> members;

  std::size_t size() const { return members.size(); }
};

struct ForestLayer {
  int k = 0;  // partition layer the trees come from
  std::vector<Tree> trees;
};

struct Forest {
  int n = 0;
  std::vector<ForestLayer> layers;

  std::size_t tile_count() const;
};

struct Row {
  std::vector<Tree> trees;
};

struct TreeCheck {
  bool inside_top = true;  // (3/2)P <= 10 P_0
  bool neighbor_closed = true;
  bool convex = true;
  bool ok() const { return inside_top && neighbor_closed && convex; }
};

// Closure conditions are checked against the tiles of `universe`.
TreeCheck check_tree(const std::vector<Tile>& members, const Tile& top,
                     const std::vector<Tile>& universe);
bool is_tree(const std::vector<Tile>& members, const Tile& top,
             const std::vector<Tile>& universe = {});
// sum of |I_P'| over members with I_P' inside I_P, the largest ratio to |I_P|.
double sparseness(const std::vector<Tile>& members);
bool is_sparse_tree(const std::vector<Tile>& members, const Tile& top, double C,
                    const std::vector<Tile>& universe = {});

// 2P not <= 10P_k across distinct trees.
bool is_well_separated(const std::vector<Tree>& trees);
// Counting function of the tops.
CountingFunction top_counting(const std::vector<Tree>& trees);
bool is_linf_forest(const std::vector<Tree>& trees, int n, double factor = 4.0);
// Scale condition across layers: I meets I' with j < k forces |I'| <= 2^{j-k}|I|.
bool layers_scaled(const Forest& f);
bool is_bmo_forest(const Forest& f, double factor = 4.0);

// 20I inside I_0 for every member.
bool is_normal_tree(const Tree& t);
bool is_row(const std::vector<Tree>& trees);
// ceil(Delta(P, P_other)) < delta for members lying under the other top.
bool is_separated(const Tree& t1, const Tree& t2, double delta);

std::vector<Row> rows_of(const std::vector<Tree>& trees);

struct ForestConfig {
  int closure_bound = 0;    // |k hat|; 0 means 3^d d
  int antichain_bound = 0;  // families per removal set; 0 means 4d
  double linf_factor = 4.0;
  bool strict = true;       // throw on a failure of (A)-(D)
};

struct AntichainFamily {
  std::string source;  // "D", "not-close", "top-scale", "minimal"
  int band = -1;       // -1 for the D_n families
  std::vector<Tile> tiles;
};

struct BandForest {
  int j = 0;  // 2^j <= B(P) < 2^{j+1}
  std::vector<Tile> tops;   // P^r
  std::vector<Tree> trees;  // the hat S_k
  int max_class = 0;        // largest |k hat|
  int propto_violations = 0;  // S_k propto S_l without I^k = I^l
};

struct PropertyCounts {
  int A = 0;
  int B = 0;
  int C = 0;
  int D = 0;
  bool ok() const { return A == 0 && B == 0 && C == 0 && D == 0; }
};

struct ForestReduction {
  int n = 0;
  std::vector<BandForest> bands;
  std::vector<AntichainFamily> discarded;
  PropertyCounts properties;
  int d_chain = 0;          // longest chain inside D_n
  int max_removed_families = 0;
  int max_class = 0;
};

class ForestPropertyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Splits one p_n^k into bands of trees and antichain families.
ForestReduction reduce_to_forests(const std::vector<Tile>& tiles, const std::vector<Tile>& maxima,
                                  int n, const ForestConfig& cfg = ForestConfig());

struct GenerationForests {
  int n = 0;
  std::vector<ForestReduction> per_layer;  // parallel to the generation's layers
  std::vector<Forest> forests;              // forest s gathers band s over all layers
  std::size_t discarded_tiles = 0;
};

GenerationForests reduce_generation(const PartitionResult& r, int n,
                                    const ForestConfig& cfg = ForestConfig());

struct ForestSplit {
  Forest normal;
  Forest boundary;
};

// Boundary: 20I leaves the tree top or a maximal tile above P, or P is outside the
// layer's good family (mass range, or 20I crossing a larger piece of A_n^{k+1}).
ForestSplit split_normal_boundary(const Forest& f, const PartitionResult& r);

}  // namespace carleson
