#include "carleson/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace carleson {

IntervalUnion::IntervalUnion(std::vector<RealInterval> pieces) {
  std::erase_if(pieces, [](const RealInterval& a) { return !(a.lo <= a.hi); });
  std::sort(pieces.begin(), pieces.end(),
            [](const RealInterval& a, const RealInterval& b) { return a.lo < b.lo; });
  for (const auto& a : pieces) {
    if (!pieces_.empty() && a.lo <= pieces_.back().hi)
      pieces_.back().hi = std::max(pieces_.back().hi, a.hi);
    else
      pieces_.push_back(a);
  }
}

double IntervalUnion::measure() const {
  double m = 0.0;
  for (const auto& a : pieces_) m += a.length();
  return m;
}

bool IntervalUnion::contains(double x, double tol) const {
  return std::any_of(pieces_.begin(), pieces_.end(),
                     [&](const RealInterval& a) { return a.lo - tol <= x && x <= a.hi + tol; });
}

bool IntervalUnion::subset_of(const IntervalUnion& other, double tol) const {
  return std::all_of(pieces_.begin(), pieces_.end(), [&](const RealInterval& a) {
    return std::any_of(other.pieces_.begin(), other.pieces_.end(), [&](const RealInterval& o) {
      return o.lo - tol <= a.lo && a.hi <= o.hi + tol;
    });
  });
}

IntervalUnion IntervalUnion::intersect(const RealInterval& A) const {
  std::vector<RealInterval> out;
  for (const auto& a : pieces_) {
    const RealInterval c{std::max(a.lo, A.lo), std::min(a.hi, A.hi)};
    if (c.lo <= c.hi) out.push_back(c);
  }
  return IntervalUnion(std::move(out));
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const {
  std::vector<RealInterval> all = pieces_;
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return IntervalUnion(std::move(all));
}

double IntervalUnion::distance_to(const RealInterval& A) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : pieces_) best = std::min(best, distance(a, A));
  return best;
}

CriticalParams CriticalParams::defaults(int d) {
  CriticalParams p;
  p.d = d;
  p.c = proof_constant(d);
  p.eps0 = 1.0 / (4.0 * d);
  return p;
}

std::optional<DyadicInterval> largest_dyadic_inside(const RealInterval& A) {
  if (!(A.hi > A.lo)) return std::nullopt;
  const int l0 = static_cast<int>(std::floor(-std::log2(A.length())));
  for (int l = l0; l <= l0 + 2; ++l) {
    const double s = std::ldexp(1.0, l);
    const auto m = static_cast<std::int64_t>(std::ceil(A.lo * s));
    const DyadicInterval I{l, m};
    if (I.lo() >= A.lo && I.hi() <= A.hi) return I;
  }
  return std::nullopt;
}

HostScales host_scales(const Poly& q, const RealInterval& host, const CriticalParams& p) {
  const auto J = largest_dyadic_inside(host);
  if (!J) throw std::invalid_argument("host_scales: degenerate host interval");
  HostScales s;
  s.J = *J;
  s.delta = delta_q_J(q, J->real());
  const double b = ceil_bracket(s.delta);
  s.w = p.c * J->length() * std::pow(b, 1.0 / p.d - p.eps0);
  s.v = p.c * std::pow(b, -2.0 * p.eps0);
  s.eta = p.c * s.v / s.w;
  return s;
}

namespace {

bool covers(const DyadicInterval& I, const RealInterval& host) {
  return I.lo() <= host.lo && I.hi() >= host.hi;
}

}  // namespace

StationarySet stationary_set(double eta, double v, const Poly& q, const RealInterval& host,
                             const CriticalParams& p) {
  StationarySet out;
  if (q.is_constant()) return out;
  const double threshold = p.c * v;
  std::vector<RealInterval> pieces;
  for (double x : local_minima_below(q, host, eta)) {
    const Poly qt = q - Poly::constant(q(x));
    auto exceeds = [&](const DyadicInterval& I) { return delta_q_J(qt, I.real()) > threshold; };

    // Containing interval: ascend from the resolution floor.
    DyadicInterval I1 = dyadic_at(x, p.finest_level);
    while (!exceeds(I1)) {
      if (covers(I1, host)) {
        out.clipped = true;
        break;
      }
      I1 = I1.parent();
    }
    const int shift = p.finest_level - I1.level;

    // Right neighbour: intervals whose left endpoint is I1.hi.
    DyadicInterval I2{p.finest_level, (I1.index + 1) << shift};
    while (!exceeds(I2)) {
      if (I2.hi() >= host.hi || (I2.index & 1) != 0) {
        out.clipped = out.clipped || I2.hi() < host.hi;
        break;
      }
      I2 = I2.parent();
    }

    // Left neighbour: intervals whose right endpoint is I1.lo.
    DyadicInterval I3{p.finest_level, (I1.index << shift) - 1};
    while (!exceeds(I3)) {
      if (I3.lo() <= host.lo || (I3.index & 1) == 0) {
        out.clipped = out.clipped || I3.lo() > host.lo;
        break;
      }
      I3 = I3.parent();
    }

    for (const auto& I : {I1, I2, I3}) {
      const RealInterval c{std::max(I.lo(), host.lo), std::min(I.hi(), host.hi)};
      if (c.hi > c.lo) pieces.push_back(c);
      if (I.lo() < host.lo || I.hi() > host.hi) out.clipped = true;
    }
  }
  out.set = IntervalUnion(std::move(pieces));
  return out;
}

IntervalUnion core_set(double eta, double w, const Poly& q, const RealInterval& host) {
  if (q.is_constant()) return {};
  std::vector<RealInterval> pieces;
  for (double x : local_minima_below(q, host, eta))
    pieces.push_back({std::max(x - w, host.lo), std::min(x + w, host.hi)});
  return IntervalUnion(std::move(pieces));
}

IntervalUnion regularize(const RealInterval& host, const IntervalUnion& A) {
  const auto clipped = A.intersect(host);
  const auto& a = clipped.pieces();
  if (a.empty()) return {};
  const double tol = 1e-12 * host.length();
  std::vector<RealInterval> out = a;
  const std::size_t l = a.size();
  for (std::size_t j = 0; j <= l; ++j) {
    const double lo = j == 0 ? host.lo : a[j - 1].hi;
    const double hi = j == l ? host.hi : a[j].lo;
    const double prev = j == 0 ? 0.0 : a[j - 1].length();
    const double next = j == l ? 0.0 : a[j].length();
    const double gap = hi - lo;
    if (gap < prev - tol || gap < next - tol) out.push_back({lo, hi});
  }
  return IntervalUnion(std::move(out));
}

StationarySet separation_set_at(double eta, double v, const Poly& q, const RealInterval& host,
                                const CriticalParams& p) {
  auto s = stationary_set(eta, v, q, host, p);
  s.set = regularize(host, s.set);
  return s;
}

IntervalUnion critical_set_at(double eta, double w, const Poly& q, const RealInterval& host) {
  return regularize(host, core_set(eta, w, q, host));
}

StationarySet separation_set(const Poly& q12, double delta, const RealInterval& host,
                             const CriticalParams& p) {
  if (!(delta > 0)) throw std::invalid_argument("separation_set: delta must be positive");
  if (q12.is_constant()) return {};
  const auto hs = host_scales(q12, host, p);
  return separation_set_at(hs.eta, p.c / delta, q12, host, p);
}

std::optional<RealInterval> common_host(const Tile& P1, const Tile& P2) {
  const auto a = dilate(P1.time, 13.0);
  const auto b = dilate(P2.time, 13.0);
  const RealInterval c{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (!(c.hi > c.lo)) return std::nullopt;
  return c;
}

Poly interaction_polynomial(const Tile& P1, const Tile& P2) {
  return central_polynomial(P1) - central_polynomial(P2);
}

IntervalUnion critical_intersection(const Tile& P1, const Tile& P2, const CriticalParams& p) {
  const auto host = common_host(P1, P2);
  if (!host) return {};
  const Poly q = interaction_polynomial(P1, P2);
  if (q.is_constant()) return {};
  const auto hs = host_scales(q, *host, p);
  return critical_set_at(hs.eta, hs.w, q, *host);
}

double smooth_complement(const IntervalUnion& A, double width, double y) {
  double v = 1.0;
  for (const auto& a : A.pieces()) {
    const double dist = y < a.lo ? a.lo - y : (y > a.hi ? y - a.hi : 0.0);
    v *= smooth_step(dist / width);
  }
  return v;
}

double cutoff_width(const IntervalUnion& A) {
  double m = std::numeric_limits<double>::infinity();
  const auto& a = A.pieces();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].length() > 0) m = std::min(m, a[i].length());
    if (i > 0) m = std::min(m, a[i].lo - a[i - 1].hi);
  }
  return std::isfinite(m) ? 0.1 * m : 0.0;
}

Lemma0Report lemma0_check(const ESet& P1, const ESet& P2, const ChoiceFunction& choice,
                          const GridFunction& f, const GridFunction& g, int n,
                          const CriticalParams& p, const Bump& bump) {
  const int K = choice.K;
  const double h = std::ldexp(1.0, -K);
  const TileOperator T1(choice, {P1}, bump);
  const TileOperator T2(choice, {P2}, bump);
  const auto a = T1.apply_adjoint(f);
  const auto b = T2.apply_adjoint(g);
  const auto crit = critical_intersection(P1.tile, P2.tile, p);
  const double width = cutoff_width(crit);

  Complex off(0.0), on(0.0);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Complex prod = a.values(i) * std::conj(b.values(i));
    if (prod == Complex(0.0)) continue;
    const double x = grid_point(K, i);
    off += (crit.empty() ? 1.0 : smooth_complement(crit, width, x)) * prod;
    if (crit.contains(x)) on += prod;
  }

  Lemma0Report r;
  r.n = n;
  r.delta = delta_pair(P1.tile, P2.tile);
  r.off_critical = std::abs(off) * h;
  r.on_critical = std::abs(on) * h;
  const auto est = power_norm(
      [&](const GridFunction& v) { return T1.apply(T2.apply_adjoint(v)); },
      [&](const GridFunction& v) { return T2.apply(T1.apply_adjoint(v)); }, K, 7);
  r.composed_norm_sq = est.norm * est.norm;

  double mf = 0.0, mg = 0.0;
  for (int i : P1.samples) mf += std::abs(f.values(i));
  for (int i : P2.samples) mg += std::abs(g.values(i));
  const double L1 = P1.tile.time.length();
  const double L2 = P2.tile.time.length();
  r.base = mf * h * mg * h / std::max(L1, L2);

  const double br = ceil_bracket(r.delta);
  if (r.base > 0) {
    r.ratio_v15 = r.off_critical / (std::pow(br, n) * r.base);
    r.ratio_v16 = r.on_critical / (std::pow(br, 1.0 / p.d - p.eps0) * r.base);
  }
  const double rhs17 =
      std::min(L1 / L2, L2 / L1) * std::pow(br, 2.0 / p.d) * P1.density(K) * P2.density(K);
  if (rhs17 > 0) r.ratio_v17 = r.composed_norm_sq / rhs17;
  return r;
}

}  // namespace carleson
