#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "carleson/dyadic.hpp"
#include "carleson/poly.hpp"
#include "carleson/tiles.hpp"

namespace carleson {

using Complex = std::complex<double>;

// Samples at x_i = (i + 1/2) 2^-K on [0,1).
struct GridFunction {
  int K = 0;
  Eigen::VectorXcd values;

  GridFunction() = default;
  explicit GridFunction(int K);
  GridFunction(int K, Eigen::VectorXcd values);

  Eigen::Index size() const { return values.size(); }
  double h() const { return std::ldexp(1.0, -K); }
  double x(Eigen::Index i) const { return (static_cast<double>(i) + 0.5) * h(); }
  double l2_norm() const { return std::sqrt(h()) * values.norm(); }
  double lp_norm(double p) const;
  // h sum f conj(g)
  Complex inner(const GridFunction& g) const;
};

inline double grid_point(int K, Eigen::Index i) {
  return (static_cast<double>(i) + 0.5) * std::ldexp(1.0, -K);
}

GridFunction random_trigonometric(int K, int modes, double max_frequency, std::uint64_t seed);
GridFunction random_gaussian(int K, std::uint64_t seed);

// Per-sample phase polynomial Q_x(y) = sum_j a_j(x) y^j, j = 1..d.
struct ChoiceFunction {
  int K = 0;
  int d = 1;
  Eigen::MatrixXd coeffs;  // row i holds a_1..a_d at x_i

  ChoiceFunction() = default;
  ChoiceFunction(int K, int d);

  Eigen::Index size() const { return coeffs.rows(); }
  Poly phase(Eigen::Index i) const;
  Poly frequency(Eigen::Index i) const { return phase(i).derivative(); }
};

ChoiceFunction constant_choice(int K, const Poly& Q, int d);
// a_j(x) uniform in [-scale, scale], independent per sample.
ChoiceFunction random_choice(int K, int d, double scale, std::uint64_t seed);

enum class BumpKind { Telescoping, Narrow };

// Odd bump psi and its dilates psi_k(y) = 2^k psi(2^k y).
class Bump {
 public:
  explicit Bump(BumpKind kind = BumpKind::Telescoping);

  BumpKind kind() const { return kind_; }
  double operator()(double y) const;
  double at_scale(int k, double y) const {
    const double s = std::ldexp(1.0, k);
    return s * (*this)(s * y);
  }
  double inner_radius() const { return kind_ == BumpKind::Telescoping ? 2.0 : 4.0; }
  double outer_radius() const { return kind_ == BumpKind::Telescoping ? 8.0 : 5.0; }
  double l1_norm() const { return l1_; }

 private:
  BumpKind kind_;
  double l1_ = 0.0;
};

Bump build_psi();
Bump narrow_psi();

// 0 for t <= 0, 1 for t >= 1, smooth in between.
double smooth_step(double t);
// Even cutoff, 1 on |t| <= 2 and 0 on |t| >= 4.
double cutoff_chi(double t);

// Smallest integer larger than 2d log2(2d).
int scale_separation(int d);
// Scales k in [0, max_scale] with k = j mod D.
std::vector<int> residue_class(int d, int j, int max_scale);

// Scales k <= K - margin have at least 32 samples across the kernel band.
inline constexpr int kResolveMargin = 5;
inline int finest_resolved_scale(int K) { return K - kResolveMargin; }

struct ESet {
  Tile tile;
  std::vector<int> samples;  // grid indices x_i in E(P), ascending

  int scale() const { return tile.time.level; }
  double measure(int K) const { return std::ldexp(static_cast<double>(samples.size()), -K); }
  double density(int K) const { return measure(K) / tile.time.length(); }
};

// All tiles at scale k with nonempty E(P), ordered by (time, frequency).
std::vector<ESet> e_sets(const ChoiceFunction& choice, int k);

// Sum over P of T_P for tiles of one choice function.
class TileOperator {
 public:
  TileOperator(ChoiceFunction choice, std::vector<ESet> tiles, Bump bump = Bump());

  int K() const { return choice_.K; }
  Eigen::Index dim() const { return choice_.size(); }
  const std::vector<ESet>& tiles() const { return tiles_; }
  const ChoiceFunction& choice() const { return choice_; }
  const Bump& bump() const { return bump_; }

  GridFunction apply(const GridFunction& f) const;
  GridFunction apply_adjoint(const GridFunction& g) const;
  Eigen::MatrixXcd dense() const;

  template <typename Visit>
  void for_each_entry(Visit&& visit) const;

 private:
  struct ScaleRows {
    int k = 0;
    int inner = 0;  // first nonzero offset
    int outer = 0;  // last nonzero offset
    Eigen::VectorXd kernel;  // psi_k(m h) h for m = 0..outer
    std::vector<int> rows;
  };

  ChoiceFunction choice_;
  std::vector<ESet> tiles_;
  Bump bump_;
  std::vector<ScaleRows> scales_;
};

GridFunction apply_T_P(const GridFunction& f, const ESet& P, const ChoiceFunction& choice,
                       const Bump& bump = Bump());
GridFunction apply_T_P_star(const GridFunction& g, const ESet& P, const ChoiceFunction& choice,
                            const Bump& bump = Bump());
GridFunction apply_T_collection(const GridFunction& f, std::span<const ESet> tiles,
                                const ChoiceFunction& choice, const Bump& bump = Bump());

using GridMap = std::function<GridFunction(const GridFunction&)>;

struct NormEstimate {
  double norm = 0.0;
  int iterations = 0;
  double residual = 0.0;  // relative change of the estimate at the last step
  std::uint64_t seed = 0;
  bool converged = false;
};

// ||A||_2 by power iteration on A*A from a seeded Gaussian start.
NormEstimate power_norm(const GridMap& apply, const GridMap& adjoint, int K, std::uint64_t seed,
                        int max_iterations = 500, double tol = 1e-10);
inline NormEstimate power_norm(const TileOperator& T, std::uint64_t seed = 1) {
  return power_norm([&](const GridFunction& f) { return T.apply(f); },
                    [&](const GridFunction& g) { return T.apply_adjoint(g); }, T.K(), seed);
}

// Lexicographic grid of phases sum_j a_j y^j with a_j from ranges[j-1].
struct CoefficientRange {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;
};
std::vector<Poly> coefficient_grid(std::span<const CoefficientRange> ranges);

// |h sum_{|i-j|>=2} e^{i(Q(x_i)-Q(x_j))} f_j / (x_i - x_j)| maximized over the grid.
Eigen::VectorXd carleson_direct(const GridFunction& f, std::span<const Poly> grid);
// Per-sample maximizer of the above; ties go to the lowest grid index.
ChoiceFunction argmax_choice(const GridFunction& f, std::span<const Poly> grid, int d);

template <typename Visit>
void TileOperator::for_each_entry(Visit&& visit) const {
  const Eigen::Index N = dim();
  const double h = std::ldexp(1.0, -K());
  const bool linear = choice_.d == 1;
  for (const auto& sc : scales_) {
    for (int i : sc.rows) {
      const Poly Q = choice_.phase(i);
      const double xi = grid_point(K(), i);
      const double base = Q(xi);
      const double a = linear ? choice_.coeffs(i, 0) : 0.0;
      const Complex step_up = linear ? std::polar(1.0, -a * h) : Complex(1.0);
      // Two runs of offsets: j = i - m (m > 0) and j = i + m.
      for (int side : {-1, 1}) {
        const Eigen::Index j_first = i - side * sc.inner;
        const Eigen::Index j_last = i - side * sc.outer;
        const Eigen::Index lo = std::max<Eigen::Index>(0, std::min(j_first, j_last));
        const Eigen::Index hi = std::min<Eigen::Index>(N - 1, std::max(j_first, j_last));
        if (lo > hi) continue;
        Complex phase = std::polar(1.0, base - Q(grid_point(K(), lo)));
        for (Eigen::Index j = lo; j <= hi; ++j) {
          if (!linear) phase = std::polar(1.0, base - Q(grid_point(K(), j)));
          const Eigen::Index m = i - j;
          const double w = m > 0 ? sc.kernel(m) : -sc.kernel(-m);
          visit(static_cast<Eigen::Index>(i), j, w * phase);
          if (linear) phase *= step_up;
        }
      }
    }
  }
}

}  // namespace carleson
