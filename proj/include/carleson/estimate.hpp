#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "carleson/discretize.hpp"
#include "carleson/dyadic.hpp"
#include "carleson/forest.hpp"
#include "carleson/partition.hpp"

namespace carleson {

struct NormConfig {
  int restarts = 3;
  int max_iterations = 500;
  double tol = 1e-10;            // stopping threshold on the relative change
  double residual_bound = 1e-6;  // worse than this after max_iterations is an error
  int dense_below_K = 9;         // dense SVD when K < dense_below_K
  std::uint64_t seed = 1;
};

class NormConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Largest singular value; the best of the restarts, or the dense SVD on small grids.
NormEstimate op_norm_l2(const TileOperator& T, const NormConfig& cfg = NormConfig());
NormEstimate op_norm_l2(const GridMap& apply, const GridMap& adjoint, int K,
                        const NormConfig& cfg = NormConfig());
double dense_norm(const TileOperator& T);
Eigen::MatrixXcd dense_matrix(const GridMap& apply, int K);

// max ||A f||_p / ||f||_p over a seeded ensemble (Gaussian and trigonometric,
// alternating). A lower bound on ||A||_p.
double lp_ratio(const GridMap& apply, int K, double p, int ensemble = 64, std::uint64_t seed = 1);
inline double lp_ratio(const TileOperator& T, double p, int ensemble = 64, std::uint64_t seed = 1) {
  return lp_ratio([&](const GridFunction& f) { return T.apply(f); }, T.K(), p, ensemble, seed);
}

// Least-squares slope of ys against xs.
double fit_slope(std::span<const double> xs, std::span<const double> ys);

// ESets of the given tiles, in the order of `tiles`; throws if one is missing.
std::vector<ESet> sets_of(const std::vector<Tile>& tiles, std::span<const ESet> pool);

struct TreeBound {
  double delta = 0.0;
  double max_density = 0.0;  // sup A_0(P) over the tree
  double norm = 0.0;         // ||T^tree||_2, or the L^p ratio for p != 2
  double ratio = 0.0;        // norm / delta^{1/p}
};

// Requires A_0(P) <= delta on the tree.
TreeBound tree_bound_check(std::span<const ESet> tree, const ChoiceFunction& choice, double delta,
                           double p = 2.0, const NormConfig& cfg = NormConfig(),
                           const Bump& bump = Bump());

struct TreeSweep {
  double p = 2.0;
  std::vector<TreeBound> points;
  double slope = 0.0;  // of log2 norm against log2 delta
};

// Comb trees of density 2^{-j}, j in exponents, at grid size K.
TreeSweep tree_delta_sweep(int K, std::span<const int> exponents, double p = 2.0,
                           const NormConfig& cfg = NormConfig());

// 2^{2 n eps} with eps = 1/(8d).
double v_threshold(int n, int d);

struct VSplit {
  GridFunction a;
  GridFunction b;
  int a_pairs = 0;
  int b_pairs = 0;
};

// V_a f and V_b f, with P in a(P') when |I| <= |I'|, I* meets I'*, and
// Delta(P, P') <= threshold; b(P') takes Delta > threshold.
VSplit v_operators(std::span<const ESet> pool, double threshold, const GridFunction& f,
                   int samples = kSamplesPerLength);

// E(I) as sorted sample indices, for each time interval of the pool.
using IntervalSets = std::map<DyadicInterval, std::vector<int>>;
IntervalSets interval_sets(std::span<const ESet> pool);

// sum over I of chi_{E(I)} (int_{I*} |f|^r / |I|)^{1/r}.
GridFunction v_maximal(const IntervalSets& E, const GridFunction& f, double r);

struct PackingCheck {
  double lhs = 0.0;  // || sum_{I in J} chi_{E(I)} ||_q^q
  double length = 0.0;
  bool ok = true;    // lhs <= constant |J|
};
PackingCheck carleson_packing_check(const IntervalSets& E, const DyadicInterval& J, double q,
                                    int K, double constant = 2.0);
// sup over J of lhs / |J|; attained on the intervals of E and [0,1).
double packing_constant(const IntervalSets& E, double q, int K);

// Dyadic maximal function, sup over dyadic I containing x of the mean of |f|.
Eigen::VectorXd maximal_function(const GridFunction& f);
// (M |f|^r)^{1/r}
Eigen::VectorXd maximal_function_r(const GridFunction& f, double r);

struct SparseFamily {
  std::vector<DyadicInterval> intervals;  // pairwise disjoint I_j
  std::vector<std::vector<int>> sets;     // E_j inside I_j, sample indices
};

// sup over dyadic I containing I_j of the mean of |f| on E_j, 0 elsewhere.
// Throws when the intervals overlap, E_j leaves I_j, or |E_j| > delta |I_j|.
Eigen::VectorXd maximal_delta(const GridFunction& f, const SparseFamily& family, double delta);

// Every finest interval at `level` with the first 2^{-j} of its samples.
SparseFamily comb_family(int K, int level, int j);

struct RowCheck {
  std::size_t rows = 0;
  double ratio = 0.0;            // max over f of ||T^p f||^2 / sum_j ||T^{r_j} f||^2
  bool cross_zero = true;        // (T^{r_k})^* T^{r_j} f == 0 bitwise for k != j
  int overlapping_pairs = 0;     // row pairs whose output supports meet
  double cross_adjoint_norm = 0.0;  // max ||T^{r_k} (T^{r_j})^*||_2 after a capped run
};

RowCheck row_orthogonality_check(const std::vector<Row>& rows, std::span<const ESet> pool,
                                 const ChoiceFunction& choice, std::span<const GridFunction> fs,
                                 const NormConfig& cfg = NormConfig(), const Bump& bump = Bump(),
                                 int cross_iterations = 50);

struct DecayRow {
  int n = 0;
  std::size_t tiles = 0;
  double norm = 0.0;  // ||T^{P_n}||_2
  std::vector<double> lp;  // L^p ratios, parallel to DecayConfig::ps
};

struct DecayConfig {
  std::vector<double> ps = {1.5, 4.0};
  int ensemble = 64;
  NormConfig norm;
};

struct DecayTable {
  std::vector<DecayRow> rows;  // nonempty generations, n ascending
  double slope = 0.0;          // log2 norm against n over n >= 2
  double eta_fit = 0.0;        // -slope
  bool decreasing = false;     // strictly, over n >= 2
  double tail_share = 0.0;     // last norm over the partial sum
};

DecayTable main_decay_experiment(const PartitionResult& r, std::span<const ESet> pool,
                                 const ChoiceFunction& choice,
                                 const DecayConfig& cfg = DecayConfig(), const Bump& bump = Bump());

// ||T^p|| <= sum_P ||T_P||
struct TriangleCheck {
  double norm = 0.0;
  double sum = 0.0;
  bool ok() const { return norm <= sum * (1.0 + 1e-9); }
};
TriangleCheck triangle_check(std::span<const ESet> tiles, const ChoiceFunction& choice,
                             const NormConfig& cfg = NormConfig(), const Bump& bump = Bump());

// ||T_P||_2 / A_0(P)^{1/2}
double density_ratio(const ESet& P, const ChoiceFunction& choice,
                     const NormConfig& cfg = NormConfig(), const Bump& bump = Bump());

}  // namespace carleson
