#include "carleson/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "carleson/fixtures.hpp"

namespace carleson {

namespace {

GridMap forward(const TileOperator& T) {
  return [&T](const GridFunction& f) { return T.apply(f); };
}

GridMap backward(const TileOperator& T) {
  return [&T](const GridFunction& g) { return T.apply_adjoint(g); };
}

double largest_singular_value(const Eigen::MatrixXcd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
  return svd.singularValues()(0);
}

NormEstimate dense_estimate(double value, std::uint64_t seed) {
  NormEstimate est;
  est.norm = value;
  est.seed = seed;
  est.converged = true;
  return est;
}

// Index range [lo, hi) of the samples in I.
std::pair<int, int> sample_range(const DyadicInterval& I, int K) {
  if (I.level > K || I.level < 0) throw std::invalid_argument("interval finer than the grid");
  const int per = 1 << (K - I.level);
  return {static_cast<int>(I.index) * per, static_cast<int>(I.index + 1) * per};
}

// Means of |f| over every dyadic block, finest level K first.
std::vector<Eigen::VectorXd> block_means(const Eigen::VectorXd& a, int K) {
  std::vector<Eigen::VectorXd> out(K + 1);
  out[K] = a;
  for (int l = K - 1; l >= 0; --l) {
    const Eigen::VectorXd& c = out[l + 1];
    out[l].resize(c.size() / 2);
    for (Eigen::Index m = 0; m < out[l].size(); ++m) out[l](m) = 0.5 * (c(2 * m) + c(2 * m + 1));
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd dense_matrix(const GridMap& apply, int K) {
  const Eigen::Index N = Eigen::Index{1} << K;
  Eigen::MatrixXcd M(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    GridFunction e(K);
    e.values(j) = 1.0;
    M.col(j) = apply(e).values;
  }
  return M;
}

double dense_norm(const TileOperator& T) { return largest_singular_value(T.dense()); }

NormEstimate op_norm_l2(const GridMap& apply, const GridMap& adjoint, int K, const NormConfig& cfg) {
  if (K < cfg.dense_below_K) return dense_estimate(largest_singular_value(dense_matrix(apply, K)), cfg.seed);
  NormEstimate best;
  for (int r = 0; r < std::max(cfg.restarts, 1); ++r) {
    const auto est = power_norm(apply, adjoint, K, cfg.seed + r, cfg.max_iterations, cfg.tol);
    if (r == 0 || est.norm > best.norm) best = est;
  }
  if (best.residual > cfg.residual_bound) {
    std::ostringstream msg;
    msg << "op_norm_l2: residual " << best.residual << " after " << best.iterations << " iterations";
    throw NormConvergenceError(msg.str());
  }
  best.converged = true;
  return best;
}

NormEstimate op_norm_l2(const TileOperator& T, const NormConfig& cfg) {
  if (T.tiles().empty()) return dense_estimate(0.0, cfg.seed);
  if (T.K() < cfg.dense_below_K) return dense_estimate(dense_norm(T), cfg.seed);
  return op_norm_l2(forward(T), backward(T), T.K(), cfg);
}

double lp_ratio(const GridMap& apply, int K, double p, int ensemble, std::uint64_t seed) {
  double best = 0.0;
  const double top = std::ldexp(1.0, std::max(K - 3, 1));
  for (int e = 0; e < ensemble; ++e) {
    const GridFunction f = e % 2 == 0 ? random_gaussian(K, seed + e)
                                      : random_trigonometric(K, 8, top, seed + e);
    const double nf = f.lp_norm(p);
    if (nf > 0) best = std::max(best, apply(f).lp_norm(p) / nf);
  }
  return best;
}

double fit_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("fit_slope: need two points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
  return sxy / sxx;
}

std::vector<ESet> sets_of(const std::vector<Tile>& tiles, std::span<const ESet> pool) {
  std::map<Tile, const ESet*> index;
  for (const auto& P : pool) index.emplace(P.tile, &P);
  std::vector<ESet> out;
  out.reserve(tiles.size());
  for (const auto& P : tiles) {
    auto it = index.find(P);
    if (it == index.end()) throw std::invalid_argument("sets_of: tile without an E-set");
    out.push_back(*it->second);
  }
  return out;
}

TreeBound tree_bound_check(std::span<const ESet> tree, const ChoiceFunction& choice, double delta,
                           double p, const NormConfig& cfg, const Bump& bump) {
  TreeBound out;
  out.delta = delta;
  for (const auto& P : tree) out.max_density = std::max(out.max_density, P.density(choice.K));
  if (out.max_density > delta * (1.0 + 1e-12))
    throw std::invalid_argument("tree_bound_check: a tile is denser than delta");
  const TileOperator T(choice, {tree.begin(), tree.end()}, bump);
  out.norm = p == 2.0 ? op_norm_l2(T, cfg).norm : lp_ratio(T, p, 64, cfg.seed);
  out.ratio = out.norm / std::pow(delta, 1.0 / p);
  return out;
}

TreeSweep tree_delta_sweep(int K, std::span<const int> exponents, double p, const NormConfig& cfg) {
  TreeSweep s;
  s.p = p;
  const int kmax = K - 6;
  std::vector<double> xs;
  std::vector<double> ys;
  for (int j : exponents) {
    const auto fx = comb_tree(K, kmax, j);
    s.points.push_back(tree_bound_check(fx.tiles, fx.choice, std::ldexp(1.0, -j), p, cfg));
    xs.push_back(-j);
    ys.push_back(std::log2(s.points.back().norm));
  }
  if (xs.size() >= 2) s.slope = fit_slope(xs, ys);
  return s;
}

double v_threshold(int n, int d) { return std::exp2(2.0 * n / (8.0 * d)); }

VSplit v_operators(std::span<const ESet> pool, double threshold, const GridFunction& f, int samples) {
  const int K = f.K;
  VSplit out{GridFunction(K), GridFunction(K)};
  std::vector<Complex> integral(pool.size());
  std::vector<DilatedTile> boxes;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    Complex s(0.0);
    for (int x : pool[i].samples) s += f.values(x);
    integral[i] = s * f.h();
    boxes.push_back(box(pool[i].tile));
  }
  for (std::size_t q = 0; q < pool.size(); ++q) {
    const auto& Iq = pool[q].tile.time;
    Complex a(0.0);
    Complex b(0.0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto& I = pool[i].tile.time;
      if (I.length() > Iq.length() || !stars_meet(I, Iq)) continue;
      const double delta = i == q ? 0.0 : delta_pair(boxes[i], boxes[q], samples);
      if (delta <= threshold) {
        a += integral[i];
        ++out.a_pairs;
      } else {
        b += integral[i];
        ++out.b_pairs;
      }
    }
    for (int x : pool[q].samples) {
      out.a.values(x) += a / Iq.length();
      out.b.values(x) += b / Iq.length();
    }
  }
  return out;
}

IntervalSets interval_sets(std::span<const ESet> pool) {
  IntervalSets E;
  for (const auto& P : pool) {
    auto& s = E[P.tile.time];
    s.insert(s.end(), P.samples.begin(), P.samples.end());
  }
  for (auto& [I, s] : E) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return E;
}

GridFunction v_maximal(const IntervalSets& E, const GridFunction& f, double r) {
  GridFunction out(f.K);
  const Eigen::VectorXd a = f.values.cwiseAbs().array().pow(r).matrix();
  for (const auto& [I, s] : E) {
    const Star st = star(I);
    double sum = 0.0;
    for (const auto& piece : {st.left, st.right}) {
      const auto lo = static_cast<Eigen::Index>(std::max(0.0, std::ceil(piece.lo / f.h() - 0.5)));
      for (Eigen::Index i = lo; i < f.size() && f.x(i) < piece.hi; ++i) sum += a(i);
    }
    const double v = std::pow(sum * f.h() / I.length(), 1.0 / r);
    for (int x : s) out.values(x) += v;
  }
  return out;
}

PackingCheck carleson_packing_check(const IntervalSets& E, const DyadicInterval& J, double q, int K,
                                    double constant) {
  std::vector<int> count(std::size_t{1} << K, 0);
  for (const auto& [I, s] : E)
    if (I.within(J))
      for (int x : s) ++count[x];
  PackingCheck out;
  for (int c : count)
    if (c > 0) out.lhs += std::pow(static_cast<double>(c), q);
  out.lhs = std::ldexp(out.lhs, -K);
  out.length = J.length();
  out.ok = out.lhs <= constant * out.length;
  return out;
}

double packing_constant(const IntervalSets& E, double q, int K) {
  double best = carleson_packing_check(E, {0, 0}, q, K).lhs;
  for (const auto& [J, s] : E) {
    const auto c = carleson_packing_check(E, J, q, K);
    best = std::max(best, c.lhs / c.length);
  }
  return best;
}

Eigen::VectorXd maximal_function(const GridFunction& f) {
  const auto means = block_means(f.values.cwiseAbs(), f.K);
  Eigen::VectorXd out = means[f.K];
  for (int l = f.K - 1; l >= 0; --l) {
    const int shift = f.K - l;
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = std::max(out(i), means[l](i >> shift));
  }
  return out;
}

Eigen::VectorXd maximal_function_r(const GridFunction& f, double r) {
  GridFunction g(f.K, f.values.cwiseAbs().array().pow(r).matrix().cast<Complex>());
  return maximal_function(g).array().pow(1.0 / r).matrix();
}

Eigen::VectorXd maximal_delta(const GridFunction& f, const SparseFamily& family, double delta) {
  if (family.intervals.size() != family.sets.size())
    throw std::invalid_argument("maximal_delta: intervals and sets differ in number");
  std::vector<DyadicInterval> sorted = family.intervals;
  std::sort(sorted.begin(), sorted.end(),
            [](const DyadicInterval& a, const DyadicInterval& b) { return a.lo() < b.lo(); });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (!sorted[i - 1].disjoint(sorted[i])) throw std::invalid_argument("maximal_delta: intervals overlap");
  const auto means = block_means(f.values.cwiseAbs(), f.K);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  for (std::size_t j = 0; j < family.intervals.size(); ++j) {
    const auto& I = family.intervals[j];
    const auto [lo, hi] = sample_range(I, f.K);
    const auto& E = family.sets[j];
    for (int x : E)
      if (x < lo || x >= hi) throw std::invalid_argument("maximal_delta: E_j leaves I_j");
    if (std::ldexp(static_cast<double>(E.size()), -f.K) > delta * I.length() * (1.0 + 1e-12))
      throw std::invalid_argument("maximal_delta: |E_j| exceeds delta |I_j|");
    double v = 0.0;
    for (int l = I.level; l >= 0; --l) v = std::max(v, means[l](I.index >> (I.level - l)));
    for (int x : E) out(x) = v;
  }
  return out;
}

SparseFamily comb_family(int K, int level, int j) {
  SparseFamily fam;
  const int per = 1 << (K - level);
  const int keep = std::max(1, per >> j);
  for (std::int64_t m = 0; m < (std::int64_t{1} << level); ++m) {
    fam.intervals.push_back({level, m});
    std::vector<int> s(keep);
    std::iota(s.begin(), s.end(), static_cast<int>(m) * per);
    fam.sets.push_back(std::move(s));
  }
  return fam;
}

RowCheck row_orthogonality_check(const std::vector<Row>& rows, std::span<const ESet> pool,
                                 const ChoiceFunction& choice, std::span<const GridFunction> fs,
                                 const NormConfig& cfg, const Bump& bump, int cross_iterations) {
  RowCheck out;
  out.rows = rows.size();
  std::vector<TileOperator> ops;
  std::vector<Tile> all;
  std::vector<std::vector<char>> support;
  for (const auto& row : rows) {
    std::vector<Tile> tiles;
    for (const auto& t : row.trees) tiles.insert(tiles.end(), t.members.begin(), t.members.end());
    all.insert(all.end(), tiles.begin(), tiles.end());
    ops.emplace_back(choice, sets_of(tiles, pool), bump);
    std::vector<char> s(choice.size(), 0);
    for (const auto& P : ops.back().tiles())
      for (int x : P.samples) s[x] = 1;
    support.push_back(std::move(s));
  }
  const TileOperator full(choice, sets_of(all, pool), bump);

  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t j = k + 1; j < rows.size(); ++j)
      for (std::size_t x = 0; x < support[k].size(); ++x)
        if (support[k][x] && support[j][x]) {
          ++out.overlapping_pairs;
          break;
        }

  for (std::size_t e = 0; e < fs.size(); ++e) {
    const auto& f = fs[e];
    const double whole = std::pow(full.apply(f).l2_norm(), 2);
    double parts = 0.0;
    std::vector<GridFunction> images;
    for (const auto& T : ops) {
      images.push_back(T.apply(f));
      parts += std::pow(images.back().l2_norm(), 2);
    }
    if (parts > 0.0) out.ratio = std::max(out.ratio, whole / parts);
    else if (whole > 0.0) out.ratio = std::numeric_limits<double>::infinity();
    if (e > 0) continue;
    for (std::size_t k = 0; k < ops.size(); ++k)
      for (std::size_t j = 0; j < ops.size(); ++j)
        if (k != j && ops[k].apply_adjoint(images[j]).values.cwiseAbs().maxCoeff() != 0.0)
          out.cross_zero = false;
  }

  // ||A B*|| = ||B A*||, so unordered pairs suffice. One capped run each; reported only.
  for (std::size_t k = 0; k < ops.size(); ++k)
    for (std::size_t j = k + 1; j < ops.size(); ++j) {
      const auto& A = ops[k];
      const auto& B = ops[j];
      const auto est = power_norm([&](const GridFunction& f) { return A.apply(B.apply_adjoint(f)); },
                                  [&](const GridFunction& g) { return B.apply(A.apply_adjoint(g)); },
                                  choice.K, cfg.seed, cross_iterations, cfg.tol);
      out.cross_adjoint_norm = std::max(out.cross_adjoint_norm, est.norm);
    }
  return out;
}

DecayTable main_decay_experiment(const PartitionResult& r, std::span<const ESet> pool,
                                 const ChoiceFunction& choice, const DecayConfig& cfg,
                                 const Bump& bump) {
  std::map<int, std::vector<Tile>> by_n;
  for (std::size_t i = 0; i < r.tiles.size(); ++i)
    if (r.assignment[i].n > 0) by_n[r.assignment[i].n].push_back(r.tiles[i].tile);
  DecayTable table;
  const int last = by_n.empty() ? 0 : by_n.rbegin()->first;
  for (int n = 1; n <= last; ++n) {
    DecayRow row;
    row.n = n;
    row.lp.assign(cfg.ps.size(), 0.0);
    auto it = by_n.find(n);
    if (it != by_n.end()) {
      const TileOperator T(choice, sets_of(it->second, pool), bump);
      row.tiles = it->second.size();
      row.norm = op_norm_l2(T, cfg.norm).norm;
      for (std::size_t i = 0; i < cfg.ps.size(); ++i)
        row.lp[i] = lp_ratio(T, cfg.ps[i], cfg.ensemble, cfg.norm.seed);
    }
    table.rows.push_back(std::move(row));
  }

  std::vector<double> xs;
  std::vector<double> ys;
  double sum = 0.0;
  double prev = -1.0;
  table.decreasing = true;
  for (const auto& row : table.rows) {
    sum += row.norm;
    if (row.n < 2) continue;
    if (prev >= 0.0 && !(row.norm < prev)) table.decreasing = false;
    prev = row.norm;
    if (row.norm <= 0.0) {
      table.decreasing = false;
      continue;
    }
    xs.push_back(row.n);
    ys.push_back(std::log2(row.norm));
  }
  if (xs.size() >= 2) {
    table.slope = fit_slope(xs, ys);
    table.eta_fit = -table.slope;
  } else {
    table.decreasing = false;
  }
  if (sum > 0.0 && !table.rows.empty()) table.tail_share = table.rows.back().norm / sum;
  return table;
}

TriangleCheck triangle_check(std::span<const ESet> tiles, const ChoiceFunction& choice,
                             const NormConfig& cfg, const Bump& bump) {
  TriangleCheck out;
  out.norm = op_norm_l2(TileOperator(choice, {tiles.begin(), tiles.end()}, bump), cfg).norm;
  for (const auto& P : tiles) out.sum += op_norm_l2(TileOperator(choice, {P}, bump), cfg).norm;
  return out;
}

double density_ratio(const ESet& P, const ChoiceFunction& choice, const NormConfig& cfg,
                     const Bump& bump) {
  const double a0 = P.density(choice.K);
  if (a0 <= 0.0) return 0.0;
  return op_norm_l2(TileOperator(choice, {P}, bump), cfg).norm / std::sqrt(a0);
}

}  // namespace carleson
