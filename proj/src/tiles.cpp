#include "carleson/tiles.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "lp.hpp"

namespace carleson {

bool Tile::valid() const {
  return !freq.empty() && std::all_of(freq.begin(), freq.end(), [&](const DyadicInterval& a) {
    return a.level == -time.level;
  });
}

std::size_t TileHash::operator()(const Tile& P) const {
  std::size_t h = DyadicIntervalHash()(P.time);
  for (const auto& a : P.freq) h = h * 1000003u ^ DyadicIntervalHash()(a);
  return h;
}

DilatedTile dilate_tile(const Tile& P, double a) {
  DilatedTile D{P.time, {}};
  D.freq.reserve(P.freq.size());
  for (const auto& alpha : P.freq) D.freq.push_back(dilate(alpha, a));
  return D;
}

Tile tile_at(const DyadicInterval& I, const Poly& q, int d) {
  Tile P{I, {}};
  P.freq.reserve(d);
  for (double x : node_vector(I, d)) P.freq.push_back(dyadic_at(q(x), -I.level));
  return P;
}

bool contains_poly(const DilatedTile& P, const Poly& q) {
  const auto x = P.nodes();
  for (std::size_t j = 0; j < x.size(); ++j)
    if (!P.freq[j].contains(q(x[j]))) return false;
  return true;
}

Poly central_polynomial(const Tile& P) {
  const auto x = P.nodes();
  std::vector<double> c;
  c.reserve(P.freq.size());
  for (const auto& a : P.freq) c.push_back(center(a).value());
  return lagrange<double>(x, c);
}

namespace {

RealInterval box_range(const Eigen::VectorXd& L, const std::vector<RealInterval>& box) {
  double lo = 0.0;
  double hi = 0.0;
  for (Eigen::Index j = 0; j < L.size(); ++j) {
    const auto& a = box[j];
    if (L(j) >= 0) {
      lo += L(j) * a.lo;
      hi += L(j) * a.hi;
    } else {
      lo += L(j) * a.hi;
      hi += L(j) * a.lo;
    }
  }
  return {lo, hi};
}

double min_width(const DilatedTile& P) {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& a : P.freq) w = std::min(w, a.length());
  return w;
}

// Largest t such that some q has q(x1_j) in [lo+t, hi-t] for P1 and likewise
// for P2 at its own nodes. Positive iff the two open boxes share a polynomial.
double common_slack(const DilatedTile& P1, const DilatedTile& P2) {
  const auto x1 = P1.nodes();
  const auto x2 = P2.nodes();
  const auto d = static_cast<Eigen::Index>(x1.size());
  Eigen::MatrixXd M(d, d);
  for (Eigen::Index i = 0; i < d; ++i) M.row(i) = lagrange_basis(x1, x2[i]).transpose();
  Eigen::VectorXd lo1(d), w1(d), lo2(d), hi2(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    lo1(j) = P1.freq[j].lo;
    w1(j) = P1.freq[j].length();
    lo2(j) = P2.freq[j].lo;
    hi2(j) = P2.freq[j].hi;
  }
  const Eigen::VectorXd Mlo = M * lo1;
  // Variables (u, s): node values lo1 + u, slack t = s - T.
  const Eigen::Index rows = 4 * d;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, d + 1);
  Eigen::VectorXd b0(rows);
  A.topLeftCorner(d, d).setIdentity();
  b0.head(d) = w1;
  A.block(d, 0, d, d) = -Eigen::MatrixXd::Identity(d, d);
  b0.segment(d, d).setZero();
  A.block(2 * d, 0, d, d) = M;
  b0.segment(2 * d, d) = hi2 - Mlo;
  A.block(3 * d, 0, d, d) = -M;
  b0.segment(3 * d, d) = Mlo - lo2;
  A.col(d).setOnes();
  const double T = std::max(0.0, -b0.minCoeff()) + 1.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d + 1);
  c(d) = 1.0;
  const auto sol = detail::maximize_from_origin(A, b0.array() + T, c);
  return sol.value - T;
}

}  // namespace

RealInterval value_interval(const DilatedTile& P, double y) {
  return box_range(lagrange_basis(P.nodes(), y), P.freq);
}

std::vector<Tile> neighbors(const Tile& P) {
  std::vector<Tile> out{Tile{P.time, {}}};
  for (const auto& a : P.freq) {
    std::vector<Tile> next;
    next.reserve(out.size() * 3);
    for (const auto& partial : out) {
      for (std::int64_t shift : {-1, 0, 1}) {
        Tile t = partial;
        t.freq.push_back({a.level, a.index + shift});
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool leq(const DilatedTile& P1, const DilatedTile& P2) {
  if (!P1.time.within(P2.time)) return false;
  if (P1.degree() != P2.degree()) throw std::invalid_argument("leq: degree mismatch");
  if (P1.degree() == 1) {
    return std::max(P1.freq[0].lo, P2.freq[0].lo) < std::min(P1.freq[0].hi, P2.freq[0].hi);
  }
  const double tol = 1e-9 * std::min(min_width(P1), min_width(P2));
  // A common member takes values in P2's range at P1's nodes.
  const auto x1 = P1.nodes();
  for (std::size_t j = 0; j < x1.size(); ++j) {
    const auto v = value_interval(P2, x1[j]);
    if (std::min(v.hi, P1.freq[j].hi) - std::max(v.lo, P1.freq[j].lo) <= tol) return false;
  }
  return common_slack(P1, P2) > tol;
}

bool trianglelefteq(const DilatedTile& P1, const DilatedTile& P2) {
  if (!P1.time.within(P2.time)) return false;
  if (P1.degree() != P2.degree()) throw std::invalid_argument("trianglelefteq: degree mismatch");
  const auto x1 = P1.nodes();
  const double tol = 1e-12 * std::max(1.0, P2.freq[0].length());
  for (std::size_t j = 0; j < x1.size(); ++j) {
    const auto v = value_interval(P2, x1[j]);
    if (v.lo < P1.freq[j].lo - tol || v.hi > P1.freq[j].hi + tol) return false;
  }
  return true;
}

double delta_q_P(const Poly& q, const DilatedTile& P, int samples) {
  const auto x = P.nodes();
  const auto d = static_cast<Eigen::Index>(x.size());
  const Eigen::Index S = samples + 1;
  const double lo = P.time.lo();
  const double len = P.time.length();
  Eigen::MatrixXd L(S, d);
  Eigen::VectorXd r(S);
  Eigen::VectorXd lo_nodes(d), widths(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    lo_nodes(j) = P.freq[j].lo;
    widths(j) = P.freq[j].length();
  }
  for (Eigen::Index s = 0; s < S; ++s) {
    const double y = lo + len * static_cast<double>(s) / samples;
    L.row(s) = lagrange_basis(x, y).transpose();
    r(s) = q(y) - L.row(s).dot(lo_nodes);
  }
  const double Z0 = r.cwiseAbs().maxCoeff();
  // Variables (u, s): node values lo + u, deviation bound Z0 - s.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * S + d, d + 1);
  Eigen::VectorXd b(2 * S + d);
  A.topLeftCorner(S, d) = -L;
  A.block(0, d, S, 1).setOnes();
  b.head(S) = Z0 - r.array();
  A.block(S, 0, S, d) = L;
  A.block(S, d, S, 1).setOnes();
  b.segment(S, S) = Z0 + r.array();
  A.bottomLeftCorner(d, d).setIdentity();
  b.tail(d) = widths;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d + 1);
  c(d) = 1.0;
  const auto sol = detail::maximize_from_origin(A, b.cwiseMax(0.0), c);
  return len * std::max(0.0, Z0 - sol.value);
}

namespace {

// Range of the box at y; the same arithmetic as box_range(lagrange_basis(x, y), box).
RealInterval range_at(const std::vector<double>& x, const std::vector<RealInterval>& box, double y) {
  const std::size_t d = x.size();
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double v = 1.0;
    for (std::size_t k = 0; k < d; ++k)
      if (k != j) v *= (y - x[k]) / (x[j] - x[k]);
    const auto& a = box[j];
    if (v >= 0) {
      lo += v * a.lo;
      hi += v * a.hi;
    } else {
      lo += v * a.hi;
      hi += v * a.lo;
    }
  }
  return {lo, hi};
}

double gap_sup(const DilatedTile& P1, const DilatedTile& P2, const DyadicInterval& J,
               int samples, int stride = 1) {
  const auto x1 = P1.nodes();
  const auto x2 = P2.nodes();
  double best = 0.0;
  for (int s = 0; s <= samples; s += stride) {
    const double y = J.lo() + J.length() * s / samples;
    const auto v1 = range_at(x1, P1.freq, y);
    const auto v2 = range_at(x2, P2.freq, y);
    best = std::max({best, v1.lo - v2.hi, v2.lo - v1.hi});
  }
  return J.length() * best;
}

}  // namespace

double delta_pair(const DilatedTile& P1, const DilatedTile& P2, int samples) {
  if (P1.time.level > P2.time.level) return gap_sup(P1, P2, P1.time, samples);
  if (P2.time.level > P1.time.level) return gap_sup(P1, P2, P2.time, samples);
  if (P1.time == P2.time) return gap_sup(P1, P2, P1.time, samples);
  return std::max(gap_sup(P1, P2, P1.time, samples), gap_sup(P1, P2, P2.time, samples));
}

double delta_pair_lower(const DilatedTile& P1, const DilatedTile& P2, int samples, int stride) {
  if (P1.time.level > P2.time.level) return gap_sup(P1, P2, P1.time, samples, stride);
  if (P2.time.level > P1.time.level) return gap_sup(P1, P2, P2.time, samples, stride);
  if (P1.time == P2.time) return gap_sup(P1, P2, P1.time, samples, stride);
  return std::max(gap_sup(P1, P2, P1.time, samples, stride), gap_sup(P1, P2, P2.time, samples, stride));
}

double delta_pair_surrogate(const Tile& P1, const Tile& P2, int samples) {
  return std::max(ceil_bracket(delta_q_P(central_polynomial(P1), P2, samples)),
                  ceil_bracket(delta_q_P(central_polynomial(P2), P1, samples)));
}

InequalityCheck lemma_c_check(const Tile& P, const Poly& q, double dilation, double c) {
  const auto host = dilate(P.time, dilation);
  return {sup_norm(q - central_polynomial(P), host), c / P.time.length()};
}

TilePool::TilePool(std::vector<MeasuredTile> tiles) : tiles_(std::move(tiles)) {
  doubled_.reserve(tiles_.size());
  for (std::size_t i = 0; i < tiles_.size(); ++i) {
    doubled_.push_back(dilate_tile(tiles_[i].tile, 2.0));
    by_time_[tiles_[i].tile.time].push_back(i);
  }
  for (auto& [I, idx] : by_time_) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return tiles_[a].density > tiles_[b].density;
    });
  }
}

std::span<const std::size_t> TilePool::at_time(const DyadicInterval& I) const {
  auto it = by_time_.find(I);
  if (it == by_time_.end()) return {};
  return it->second;
}

double mass(const Tile& P, const TilePool& pool, const DyadicUnion& A, int N, int samples) {
  if (!A.contains(P.time)) throw std::invalid_argument("mass: tile time interval not inside region");
  const auto P2 = dilate_tile(P, 2.0);
  double best = 0.0;
  for (DyadicInterval J = P.time;; J = J.parent()) {
    if (!A.contains(J)) break;
    for (std::size_t i : pool.at_time(J)) {
      const double a0 = pool[i].density;
      if (a0 <= best) break;
      const double v = a0 * std::pow(ceil_bracket(delta_pair(P2, pool.doubled(i), samples)), N);
      best = std::max(best, v);
    }
    if (J.level <= 0) break;
  }
  return best;
}

}  // namespace carleson
