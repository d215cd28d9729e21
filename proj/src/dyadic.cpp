#include "carleson/dyadic.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace carleson {

DyadicRational DyadicRational::make(std::int64_t num, int exp) {
  if (num == 0) return {0, 0};
  while (num % 2 == 0) {
    num /= 2;
    --exp;
  }
  return {num, exp};
}

double distance(const RealInterval& a, const RealInterval& b) {
  return std::max({0.0, b.lo - a.hi, a.lo - b.hi});
}

DyadicRational DyadicInterval::lo_exact() const { return DyadicRational::make(index, level); }
DyadicRational DyadicInterval::hi_exact() const { return DyadicRational::make(index + 1, level); }

DyadicInterval DyadicInterval::ancestor(int coarser_level) const {
  if (coarser_level > level) throw std::invalid_argument("ancestor: level is finer than interval");
  return {coarser_level, index >> (level - coarser_level)};
}

bool DyadicInterval::within(const DyadicInterval& other) const {
  if (other.level > level) return false;
  return (index >> (level - other.level)) == other.index;
}

bool DyadicInterval::disjoint(const DyadicInterval& other) const {
  return !within(other) && !other.within(*this);
}

DyadicInterval dyadic_at(double x, int level) {
  return {level, static_cast<std::int64_t>(std::floor(std::ldexp(x, level)))};
}

DyadicRational center(const DyadicInterval& I) {
  return DyadicRational::make(2 * I.index + 1, I.level + 1);
}

Brothers brothers(const DyadicInterval& I) {
  return {{I.level, I.index - 1}, {I.level, I.index + 1}};
}

RealInterval dilate(const DyadicInterval& I, double a) { return dilate(I.real(), a); }

RealInterval dilate(const RealInterval& I, double a) {
  if (!(a > 0)) throw std::invalid_argument("dilate: factor must be positive");
  const double c = I.center();
  const double h = 0.5 * a * I.length();
  return {c - h, c + h};
}

Star star(const DyadicInterval& I) {
  const double c = center(I).value();
  const double L = I.length();
  return {{c - 5.5 * L, c - 3.5 * L}, {c + 3.5 * L, c + 5.5 * L}};
}

bool stars_meet(const DyadicInterval& I, const DyadicInterval& J) {
  const Star a = star(I);
  const Star b = star(J);
  for (const auto& x : {a.left, a.right})
    for (const auto& y : {b.left, b.right})
      if (x.lo < y.hi && y.lo < x.hi) return true;
  return false;
}

std::vector<double> unit_nodes(int d, NodeRule rule, int max_degree) {
  if (d < 1) throw std::invalid_argument("node_vector: degree must be positive");
  if (d > max_degree) throw std::invalid_argument("node_vector: degree exceeds configured maximum");
  if (d == 1) return {0.0};
  std::vector<double> nodes;
  nodes.reserve(d);
  if (rule == NodeRule::Equispaced) {
    for (int j = 0; j < d; ++j) nodes.push_back(static_cast<double>(j) / (d - 1));
    return nodes;
  }
  nodes = {0.0, 1.0};
  for (int level = 1; static_cast<int>(nodes.size()) < d; ++level) {
    const std::int64_t denom = std::int64_t{1} << level;
    for (std::int64_t i = 1; i < denom && static_cast<int>(nodes.size()) < d; i += 2)
      nodes.push_back(static_cast<double>(i) / static_cast<double>(denom));
  }
  return nodes;
}

std::vector<double> node_vector(const DyadicInterval& I, int d, NodeRule rule, int max_degree) {
  auto nodes = unit_nodes(d, rule, max_degree);
  const double lo = I.lo();
  const double L = I.length();
  for (auto& x : nodes) x = lo + L * x;
  return nodes;
}

namespace {

bool lo_less(const DyadicInterval& a, const DyadicInterval& b) {
  if (a.lo() != b.lo()) return a.lo() < b.lo();
  return a.level < b.level;
}

}  // namespace

DyadicUnion::DyadicUnion(std::vector<DyadicInterval> pieces) {
  std::sort(pieces.begin(), pieces.end(), lo_less);
  std::vector<DyadicInterval> kept;
  for (const auto& p : pieces) {
    if (!kept.empty() && p.within(kept.back())) continue;
    kept.push_back(p);
  }
  // Merge sibling pairs until every piece is maximal.
  bool merged = true;
  while (merged) {
    merged = false;
    std::vector<DyadicInterval> next;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (i + 1 < kept.size() && kept[i].level == kept[i + 1].level && kept[i].index % 2 == 0 &&
          kept[i + 1].index == kept[i].index + 1) {
        next.push_back(kept[i].parent());
        ++i;
        merged = true;
      } else {
        next.push_back(kept[i]);
      }
    }
    std::vector<DyadicInterval> dedup;
    for (const auto& p : next) {
      while (!dedup.empty() && dedup.back().within(p)) dedup.pop_back();
      if (!dedup.empty() && p.within(dedup.back())) continue;
      dedup.push_back(p);
    }
    kept = std::move(dedup);
  }
  pieces_ = std::move(kept);
}

bool DyadicUnion::contains(const DyadicInterval& I) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), I.lo(),
                             [](double x, const DyadicInterval& p) { return x < p.lo(); });
  if (it == pieces_.begin()) return false;
  return I.within(*std::prev(it));
}

bool DyadicUnion::contains(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const DyadicInterval& p) { return v < p.lo(); });
  if (it == pieces_.begin()) return false;
  return std::prev(it)->contains(x);
}

bool DyadicUnion::subset_of(const DyadicUnion& other) const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [&](const DyadicInterval& p) { return other.contains(p); });
}

double DyadicUnion::measure() const {
  double m = 0.0;
  for (const auto& p : pieces_) m += p.length();
  return m;
}

namespace {

void whitney_split(const DyadicInterval& J, std::span<const RealInterval> obstacle,
                   int finest_level, std::vector<DyadicInterval>& out) {
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& o : obstacle) {
    if (o.lo <= J.lo() && J.hi() <= o.hi) return;
    dist = std::min(dist, distance(J.real(), o));
  }
  if (dist >= J.length()) {
    out.push_back(J);
    return;
  }
  if (J.level >= finest_level) return;
  whitney_split(J.left_child(), obstacle, finest_level, out);
  whitney_split(J.right_child(), obstacle, finest_level, out);
}

}  // namespace

std::vector<DyadicInterval> whitney(const RealInterval& domain,
                                    std::span<const RealInterval> obstacle, int finest_level) {
  std::vector<DyadicInterval> out;
  const RealInterval runs[] = {domain};
  const auto seeds = dyadic_cover(runs, finest_level);
  for (const auto& J : seeds.pieces()) whitney_split(J, obstacle, finest_level, out);
  return out;
}

int CountingFunction::operator()(double x) const {
  return static_cast<int>(std::count_if(members_.begin(), members_.end(),
                                        [x](const DyadicInterval& I) { return I.contains(x); }));
}

namespace {

struct Event {
  double x;
  int delta;
};

std::vector<Event> sweep_events(const std::vector<DyadicInterval>& members) {
  std::vector<Event> ev;
  ev.reserve(2 * members.size());
  for (const auto& I : members) {
    ev.push_back({I.lo(), +1});
    ev.push_back({I.hi(), -1});
  }
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) {
    return a.x != b.x ? a.x < b.x : a.delta < b.delta;
  });
  return ev;
}

// Constant runs [x_i, x_{i+1}) with their counts.
template <typename Visit>
void for_each_run(const std::vector<DyadicInterval>& members, Visit&& visit) {
  const auto ev = sweep_events(members);
  int count = 0;
  for (std::size_t i = 0; i < ev.size();) {
    const double x = ev[i].x;
    while (i < ev.size() && ev[i].x == x) count += ev[i++].delta;
    if (i < ev.size() && count > 0) visit(RealInterval{x, ev[i].x}, count);
  }
}

}  // namespace

int CountingFunction::sup() const {
  int best = 0;
  for_each_run(members_, [&](const RealInterval&, int c) { best = std::max(best, c); });
  return best;
}

int CountingFunction::sup_on(const DyadicUnion& A) const {
  int best = 0;
  for_each_run(members_, [&](const RealInterval& run, int c) {
    if (c <= best) return;
    for (const auto& p : A.pieces()) {
      if (p.lo() < run.hi && run.lo < p.hi()) {
        best = c;
        return;
      }
    }
  });
  return best;
}

double bmo_c_norm(const CountingFunction& c) {
  std::unordered_map<DyadicInterval, double, DyadicIntervalHash> packed;
  for (const auto& I : c.members()) {
    if (I.level < 0 || I.index < 0 || I.index >= (std::int64_t{1} << I.level))
      throw std::invalid_argument("bmo_c_norm: member not inside [0,1)");
    const double L = I.length();
    for (DyadicInterval J = I;; J = J.parent()) {
      packed[J] += L;
      if (J.level == 0) break;
    }
  }
  double best = 0.0;
  for (const auto& [J, sum] : packed) best = std::max(best, sum / J.length());
  return best;
}

DyadicUnion level_set(const CountingFunction& c, double gamma) {
  if (gamma < 0) throw std::invalid_argument("level_set: threshold must be nonnegative");
  std::vector<RealInterval> runs;
  for_each_run(c.members(), [&](const RealInterval& run, int count) {
    if (count > gamma) {
      if (!runs.empty() && runs.back().hi == run.lo)
        runs.back().hi = run.hi;
      else
        runs.push_back(run);
    }
  });
  return dyadic_cover(runs);
}

DyadicUnion dyadic_cover(std::span<const RealInterval> runs, int finest_level) {
  std::vector<DyadicInterval> pieces;
  for (const auto& run : runs) {
    const double a = std::round(std::ldexp(run.lo, finest_level));
    const double b = std::round(std::ldexp(run.hi, finest_level));
    auto x = static_cast<std::int64_t>(a);
    const auto end = static_cast<std::int64_t>(b);
    while (x < end) {
      // Largest aligned block starting at x that fits before end.
      int shift = 0;
      while (shift < 62 && (x & ((std::int64_t{1} << (shift + 1)) - 1)) == 0 &&
             x + (std::int64_t{1} << (shift + 1)) <= end)
        ++shift;
      pieces.push_back({finest_level - shift, x >> shift});
      x += std::int64_t{1} << shift;
    }
  }
  return DyadicUnion(std::move(pieces));
}

}  // namespace carleson
