#include "carleson/discretize.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

namespace carleson {

GridFunction::GridFunction(int K)
    : K(K), values(Eigen::VectorXcd::Zero(Eigen::Index{1} << K)) {}

GridFunction::GridFunction(int K, Eigen::VectorXcd v) : K(K), values(std::move(v)) {
  if (values.size() != (Eigen::Index{1} << K))
    throw std::invalid_argument("GridFunction: sample count must be 2^K");
}

double GridFunction::lp_norm(double p) const {
  return std::pow(h() * values.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

Complex GridFunction::inner(const GridFunction& g) const {
  // Eigen's dot conjugates its first argument.
  return h() * g.values.dot(values);
}

GridFunction random_trigonometric(int K, int modes, double max_frequency, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(-max_frequency, max_frequency);
  std::normal_distribution<double> amp(0.0, 1.0);
  GridFunction f(K);
  const double norm = 1.0 / std::sqrt(static_cast<double>(std::max(modes, 1)));
  for (int m = 0; m < modes; ++m) {
    const double xi = std::round(freq(rng));
    const Complex c(amp(rng) * norm, amp(rng) * norm);
    for (Eigen::Index i = 0; i < f.size(); ++i)
      f.values(i) += c * std::polar(1.0, 2.0 * std::numbers::pi * xi * f.x(i));
  }
  return f;
}

GridFunction random_gaussian(int K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  GridFunction f(K);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.values(i) = Complex(n(rng), n(rng));
  return f;
}

ChoiceFunction::ChoiceFunction(int K, int d)
    : K(K), d(d), coeffs(Eigen::MatrixXd::Zero(Eigen::Index{1} << K, d)) {}

Poly ChoiceFunction::phase(Eigen::Index i) const {
  Poly::Coeffs c = Poly::Coeffs::Zero(d + 1);
  c.tail(d) = coeffs.row(i).transpose();
  return Poly(std::move(c));
}

ChoiceFunction constant_choice(int K, const Poly& Q, int d) {
  ChoiceFunction c(K, d);
  for (int j = 1; j <= d; ++j) c.coeffs.col(j - 1).setConstant(Q.coeff(j));
  return c;
}

ChoiceFunction random_choice(int K, int d, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  ChoiceFunction c(K, d);
  for (Eigen::Index i = 0; i < c.coeffs.rows(); ++i)
    for (int j = 0; j < d; ++j) c.coeffs(i, j) = u(rng);
  return c;
}

double smooth_step(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double cutoff_chi(double t) { return smooth_step((4.0 - std::abs(t)) / 2.0); }

Bump::Bump(BumpKind kind) : kind_(kind) {
  const int n = 200000;
  const double a = inner_radius();
  const double b = outer_radius();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::abs((*this)(a + (b - a) * (i + 0.5) / n));
  l1_ = 2.0 * sum * (b - a) / n;
}

double Bump::operator()(double y) const {
  const double a = std::abs(y);
  if (kind_ == BumpKind::Telescoping) {
    if (a <= 2.0 || a >= 8.0) return 0.0;
    return (cutoff_chi(y / 2.0) - cutoff_chi(y)) / y;
  }
  if (a <= 4.0 || a >= 5.0) return 0.0;
  const double s = 2.0 * (a - 4.5);
  const double v = std::exp(1.0 - 1.0 / (1.0 - s * s)) / a;
  return y > 0 ? v : -v;
}

Bump build_psi() { return Bump(BumpKind::Telescoping); }
Bump narrow_psi() { return Bump(BumpKind::Narrow); }

int scale_separation(int d) {
  const double v = 2.0 * d * std::log2(2.0 * d);
  return static_cast<int>(std::floor(v)) + 1;
}

std::vector<int> residue_class(int d, int j, int max_scale) {
  const int D = scale_separation(d);
  if (j < 0 || j >= D) throw std::invalid_argument("residue_class: residue out of range");
  std::vector<int> out;
  for (int k = j; k <= max_scale; k += D) out.push_back(k);
  return out;
}

std::vector<ESet> e_sets(const ChoiceFunction& choice, int k) {
  if (k < 0 || k > choice.K) throw std::invalid_argument("e_sets: scale outside the grid");
  const int per = 1 << (choice.K - k);
  std::vector<ESet> out;
  for (std::int64_t m = 0; m < (std::int64_t{1} << k); ++m) {
    const DyadicInterval I{k, m};
    std::map<Tile, std::vector<int>> groups;
    for (int i = static_cast<int>(m) * per; i < static_cast<int>(m + 1) * per; ++i)
      groups[tile_at(I, choice.frequency(i), choice.d)].push_back(i);
    for (auto& [P, s] : groups) out.push_back({P, std::move(s)});
  }
  return out;
}

TileOperator::TileOperator(ChoiceFunction choice, std::vector<ESet> tiles, Bump bump)
    : choice_(std::move(choice)), tiles_(std::move(tiles)), bump_(bump) {
  const int K = choice_.K;
  const double h = std::ldexp(1.0, -K);
  const auto N = static_cast<int>(choice_.size());
  std::map<int, std::vector<int>> rows;
  for (const auto& P : tiles_) {
    if (P.scale() > finest_resolved_scale(K))
      throw std::domain_error("TileOperator: under-resolved scale");
    auto& r = rows[P.scale()];
    r.insert(r.end(), P.samples.begin(), P.samples.end());
  }
  for (auto& [k, r] : rows) {
    ScaleRows sc;
    sc.k = k;
    const double band = std::ldexp(1.0, K - k);
    sc.inner = std::max(1, static_cast<int>(std::floor(bump_.inner_radius() * band)));
    sc.outer = std::min(N - 1, static_cast<int>(std::ceil(bump_.outer_radius() * band)));
    if (sc.inner > sc.outer) continue;
    sc.kernel = Eigen::VectorXd::Zero(sc.outer + 1);
    for (int m = sc.inner; m <= sc.outer; ++m) sc.kernel(m) = bump_.at_scale(k, m * h) * h;
    std::sort(r.begin(), r.end());
    sc.rows = std::move(r);
    scales_.push_back(std::move(sc));
  }
}

GridFunction TileOperator::apply(const GridFunction& f) const {
  if (f.K != K()) throw std::invalid_argument("TileOperator: resolution mismatch");
  GridFunction out(K());
  for_each_entry([&](Eigen::Index i, Eigen::Index j, Complex w) { out.values(i) += w * f.values(j); });
  return out;
}

GridFunction TileOperator::apply_adjoint(const GridFunction& g) const {
  if (g.K != K()) throw std::invalid_argument("TileOperator: resolution mismatch");
  GridFunction out(K());
  for_each_entry(
      [&](Eigen::Index i, Eigen::Index j, Complex w) { out.values(j) += std::conj(w) * g.values(i); });
  return out;
}

Eigen::MatrixXcd TileOperator::dense() const {
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim(), dim());
  for_each_entry([&](Eigen::Index i, Eigen::Index j, Complex w) { M(i, j) += w; });
  return M;
}

GridFunction apply_T_P(const GridFunction& f, const ESet& P, const ChoiceFunction& choice,
                       const Bump& bump) {
  return TileOperator(choice, {P}, bump).apply(f);
}

GridFunction apply_T_P_star(const GridFunction& g, const ESet& P, const ChoiceFunction& choice,
                            const Bump& bump) {
  return TileOperator(choice, {P}, bump).apply_adjoint(g);
}

GridFunction apply_T_collection(const GridFunction& f, std::span<const ESet> tiles,
                                const ChoiceFunction& choice, const Bump& bump) {
  return TileOperator(choice, {tiles.begin(), tiles.end()}, bump).apply(f);
}

NormEstimate power_norm(const GridMap& apply, const GridMap& adjoint, int K, std::uint64_t seed,
                        int max_iterations, double tol) {
  GridFunction v = random_gaussian(K, seed);
  NormEstimate est;
  est.seed = seed;
  est.residual = 1.0;
  double prev = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const double nv = v.values.norm();
    if (nv == 0.0) break;
    v.values /= nv;
    const GridFunction Av = apply(v);
    est.norm = Av.values.norm();
    est.iterations = it;
    est.residual = est.norm == 0.0 ? 0.0 : std::abs(est.norm - prev) / est.norm;
    if (est.residual <= tol) {
      est.converged = true;
      break;
    }
    prev = est.norm;
    v = adjoint(Av);
  }
  return est;
}

std::vector<Poly> coefficient_grid(std::span<const CoefficientRange> ranges) {
  const int d = static_cast<int>(ranges.size());
  std::vector<Poly> out;
  std::vector<int> idx(d, 0);
  while (true) {
    Poly::Coeffs c = Poly::Coeffs::Zero(d + 1);
    for (int j = 0; j < d; ++j) {
      const auto& r = ranges[j];
      c(j + 1) = r.count <= 1 ? r.lo : r.lo + (r.hi - r.lo) * idx[j] / (r.count - 1);
    }
    out.emplace_back(std::move(c));
    // Last coefficient varies fastest.
    int j = d - 1;
    while (j >= 0 && ++idx[j] >= std::max(ranges[j].count, 1)) idx[j--] = 0;
    if (j < 0) break;
  }
  return out;
}

namespace {

// |T_Q f(x_i)| for every sample; the grid spacing cancels against 1/(x_i - x_j).
Eigen::VectorXd truncated_magnitude(const GridFunction& f, const Poly& Q) {
  const Eigen::Index N = f.size();
  Eigen::VectorXcd g(N);
  for (Eigen::Index j = 0; j < N; ++j) g(j) = std::polar(1.0, -Q(f.x(j))) * f.values(j);
  Eigen::VectorXd inv(N);
  inv(0) = 0.0;
  for (Eigen::Index m = 1; m < N; ++m) inv(m) = 1.0 / static_cast<double>(m);
  Eigen::VectorXd out(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    Complex s(0.0);
    for (Eigen::Index j = 0; j + 1 < i; ++j) s += g(j) * inv(i - j);
    for (Eigen::Index j = i + 2; j < N; ++j) s -= g(j) * inv(j - i);
    out(i) = std::abs(s);
  }
  return out;
}

}  // namespace

Eigen::VectorXd carleson_direct(const GridFunction& f, std::span<const Poly> grid) {
  Eigen::VectorXd best = Eigen::VectorXd::Zero(f.size());
  for (const auto& Q : grid) best = best.cwiseMax(truncated_magnitude(f, Q));
  return best;
}

ChoiceFunction argmax_choice(const GridFunction& f, std::span<const Poly> grid, int d) {
  if (grid.empty()) throw std::invalid_argument("argmax_choice: empty coefficient grid");
  ChoiceFunction choice(f.K, d);
  Eigen::VectorXd best = Eigen::VectorXd::Constant(f.size(), -1.0);
  for (const auto& Q : grid) {
    const Eigen::VectorXd v = truncated_magnitude(f, Q);
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      if (v(i) > best(i)) {
        best(i) = v(i);
        for (int j = 1; j <= d; ++j) choice.coeffs(i, j - 1) = Q.coeff(j);
      }
    }
  }
  return choice;
}

}  // namespace carleson
