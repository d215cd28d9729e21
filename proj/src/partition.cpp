#include "carleson/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace carleson {

std::vector<MeasuredTile> measure_tiles(std::span<const ESet> sets, int K) {
  std::vector<MeasuredTile> out;
  out.reserve(sets.size());
  for (const auto& E : sets) out.push_back({E.tile, E.density(K)});
  return out;
}

std::vector<std::size_t> maximal_tiles(std::span<const MeasuredTile> tiles,
                                       std::span<const std::size_t> candidates, double theta,
                                       const DyadicUnion& A) {
  std::vector<std::size_t> eligible;
  std::map<DyadicInterval, std::vector<std::size_t>> by_time;
  for (std::size_t i : candidates) {
    if (tiles[i].density >= theta && A.contains(tiles[i].tile.time)) {
      eligible.push_back(i);
      by_time[tiles[i].tile.time].push_back(i);
    }
  }
  std::vector<DilatedTile> boxes(tiles.size());
  for (std::size_t i : eligible) boxes[i] = box(tiles[i].tile);

  // P is maximal iff every P' >= P also has P' <= P; tiles over the same interval
  // are incomparable, so only strictly larger intervals can break maximality.
  std::vector<std::size_t> out;
  for (std::size_t i : eligible) {
    const auto& I = tiles[i].tile.time;
    bool maximal = true;
    for (DyadicInterval J = I; maximal && J.level > 0;) {
      J = J.parent();
      if (!A.contains(J)) break;
      auto it = by_time.find(J);
      if (it == by_time.end()) continue;
      for (std::size_t j : it->second) {
        if (leq(boxes[i], boxes[j]) && !leq(boxes[j], boxes[i])) {
          maximal = false;
          break;
        }
      }
    }
    if (maximal) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> maximal_tiles(std::span<const MeasuredTile> tiles, double theta,
                                       const DyadicUnion& A) {
  std::vector<std::size_t> all(tiles.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return maximal_tiles(tiles, all, theta, A);
}

const Generation* PartitionResult::generation(int n) const {
  for (const auto& g : generations)
    if (g.n == n) return &g;
  return nullptr;
}

std::vector<std::size_t> PartitionResult::pool_at(int n) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i].n == 0 || assignment[i].n >= n) out.push_back(i);
  return out;
}

CountingFunction PartitionResult::global_counting(int n) const {
  CountingFunction c;
  if (const auto* g = generation(n))
    for (const auto& L : g->layers)
      for (const auto& I : L.counting.members()) c.add(I);
  return c;
}

bool mass_in_range(double m, int n) {
  const double lo = std::ldexp(1.0, -n);
  const double hi = std::ldexp(1.0, -n + 1);
  // Mass never exceeds 1, so the top generation keeps its closed end.
  return m >= lo && (m < hi || (n == 1 && m <= 1.0));
}

double gamma_threshold(int n, double bmo, const PartitionConfig& cfg) {
  return n == 1 ? cfg.c * bmo : cfg.c * n * bmo;
}

namespace {

bool same(const DyadicUnion& a, const DyadicUnion& b) { return a.pieces() == b.pieces(); }

// Deepest layer region that contains I.
int layer_of(const DyadicInterval& I, const std::vector<PartitionLayer>& layers) {
  int k = 0;
  while (k + 1 < static_cast<int>(layers.size()) && layers[k + 1].region.contains(I)) ++k;
  return k;
}


// mass() over a shrinking pool; the pair terms A_0(P') ceil(Delta(2P, 2P'))^N do not
// depend on the pool, so they are computed once.
class MassCache {
 public:
  MassCache(const std::vector<MeasuredTile>& tiles, const PartitionConfig& cfg)
      : tiles_(tiles), cfg_(cfg) {
    doubled_.reserve(tiles.size());
    for (std::size_t i = 0; i < tiles.size(); ++i) {
      doubled_.push_back(dilate_tile(tiles[i].tile, 2.0));
      by_time_[tiles[i].tile.time].push_back(i);
    }
    for (auto& [I, idx] : by_time_)
      std::stable_sort(idx.begin(), idx.end(),
                       [&](std::size_t a, std::size_t b) { return tiles[a].density > tiles[b].density; });
  }

  double mass(std::size_t i, const std::vector<char>& alive, const DyadicUnion& A) {
    const auto& P = tiles_[i].tile;
    if (!A.contains(P.time)) throw std::invalid_argument("mass: tile time interval not inside region");
    double best = 0.0;
    for (DyadicInterval J = P.time;; J = J.parent()) {
      if (!A.contains(J)) break;
      if (auto it = by_time_.find(J); it != by_time_.end()) {
        for (std::size_t j : it->second) {
          if (!alive[j]) continue;
          if (tiles_[j].density <= best) break;
          best = std::max(best, pair(i, j, best));
        }
      }
      if (J.level <= 0) break;
    }
    return best;
  }

 private:
  // Exact pair term, or a value <= floor when a coarse bound already rules it out.
  double pair(std::size_t i, std::size_t j, double floor) {
    const auto key = (static_cast<std::uint64_t>(i) << 32) | j;
    if (auto it = values_.find(key); it != values_.end()) return it->second;
    const double a0 = tiles_[j].density;
    const double coarse = delta_pair_lower(doubled_[i], doubled_[j], cfg_.samples, 8);
    if (a0 * std::pow(ceil_bracket(coarse), cfg_.N) <= floor) return 0.0;
    const double b = ceil_bracket(delta_pair(doubled_[i], doubled_[j], cfg_.samples));
    return values_[key] = a0 * std::pow(b, cfg_.N);
  }

  const std::vector<MeasuredTile>& tiles_;
  const PartitionConfig& cfg_;
  std::vector<DilatedTile> doubled_;
  std::map<DyadicInterval, std::vector<std::size_t>> by_time_;
  std::unordered_map<std::uint64_t, double> values_;
};

Generation build_levels(int n, const std::vector<MeasuredTile>& tiles,
                        const std::vector<std::size_t>& pool, const PartitionConfig& cfg) {
  Generation g;
  g.n = n;
  const double theta = std::ldexp(1.0, -n);
  DyadicUnion region = DyadicUnion::unit();
  for (int k = 0; k < cfg.max_levels; ++k) {
    PartitionLayer L;
    L.n = n;
    L.k = k;
    L.region = region;
    L.maximal = maximal_tiles(tiles, pool, theta, region);
    std::set<DyadicInterval> times;
    for (std::size_t i : L.maximal) times.insert(tiles[i].tile.time);
    L.counting = CountingFunction({times.begin(), times.end()});
    L.bmo = bmo_c_norm(L.counting);
    L.gamma = gamma_threshold(n, L.bmo, cfg);
    const bool last = L.maximal.empty();
    DyadicUnion next = last ? DyadicUnion() : level_set(L.counting, L.gamma);
    g.layers.push_back(std::move(L));
    if (last || next.empty()) {
      g.tail = next;
      break;
    }
    if (same(next, region)) {
      // The recursion would repeat this layer forever; close it here.
      g.stalled = true;
      break;
    }
    region = std::move(next);
  }
  return g;
}

}  // namespace

PartitionResult build_partition(std::vector<MeasuredTile> tiles, const PartitionConfig& cfg) {
  PartitionResult r;
  r.tiles = std::move(tiles);
  r.assignment.assign(r.tiles.size(), Assignment{});
  std::vector<std::size_t> remaining(r.tiles.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

  MassCache cache(r.tiles, cfg);
  std::vector<char> alive(r.tiles.size(), 1);
  const DyadicUnion unit = DyadicUnion::unit();
  int n = 1;
  while (!remaining.empty()) {
    // Largest mass left decides the next generation that can receive tiles.
    std::vector<double> at_unit(remaining.size());
    double top = 0.0;
    for (std::size_t j = 0; j < remaining.size(); ++j) {
      at_unit[j] = cache.mass(remaining[j], alive, unit);
      top = std::max(top, at_unit[j]);
    }
    if (top == 0.0) break;
    int e = 0;
    std::frexp(top, &e);
    n = std::max(n, 1 - e);

    Generation g = build_levels(n, r.tiles, remaining, cfg);
    std::vector<std::size_t> kept;
    std::vector<std::size_t> placed;
    for (std::size_t j = 0; j < remaining.size(); ++j) {
      const std::size_t i = remaining[j];
      const int k = layer_of(r.tiles[i].tile.time, g.layers);
      const double m = k == 0 ? at_unit[j] : cache.mass(i, alive, g.layers[k].region);
      if (m >= std::ldexp(1.0, -n)) {
        r.assignment[i] = {n, k, m};
        g.layers[k].tiles.push_back(i);
        placed.push_back(i);
        if (!mass_in_range(m, n)) ++g.overshoot;
      } else {
        kept.push_back(i);
      }
    }
    for (std::size_t i : placed) alive[i] = 0;
    remaining = std::move(kept);
    r.generations.push_back(std::move(g));
    ++n;
  }
  for (std::size_t i : remaining) {
    r.assignment[i] = {0, 0, 0.0};
    r.null_tiles.push_back(i);
  }
  return r;
}

namespace {

// [lo, hi) covered by the pieces of B.
bool covered(double lo, double hi, const DyadicUnion& B) {
  for (const auto& p : B.pieces()) {
    if (p.hi() <= lo) continue;
    if (p.lo() > lo) return false;
    lo = p.hi();
    if (lo >= hi) return true;
  }
  return lo >= hi;
}

}  // namespace

double sup_on_difference(const CountingFunction& c, const DyadicUnion& A, const DyadicUnion& B) {
  std::vector<double> cuts;
  for (const auto& I : c.members()) {
    cuts.push_back(I.lo());
    cuts.push_back(I.hi());
  }
  for (const auto* U : {&A, &B}) {
    for (const auto& p : U->pieces()) {
      cuts.push_back(p.lo());
      cuts.push_back(p.hi());
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  int best = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    if (!A.contains(mid) || covered(cuts[i], cuts[i + 1], B)) continue;
    best = std::max(best, c(mid));
  }
  return best;
}

GenerationReport verify_generation(const PartitionResult& result, int n,
                                   const PartitionConfig& cfg) {
  GenerationReport rep;
  rep.n = n;
  rep.bmo_bound = std::ldexp(1.0, n);
  const auto* g = result.generation(n);
  if (!g) return rep;

  for (std::size_t k = 0; k < g->layers.size(); ++k) {
    const auto& L = g->layers[k];
    const DyadicUnion& next = k + 1 < g->layers.size() ? g->layers[k + 1].region : g->tail;
    rep.measures.push_back(L.region.measure());
    if (!next.subset_of(L.region)) rep.nesting = false;
    rep.max_bmo = std::max(rep.max_bmo, bmo_c_norm(L.counting));
    rep.max_local_sup = std::max(rep.max_local_sup, sup_on_difference(L.counting, L.region, next));
    for (std::size_t i : L.tiles) {
      const auto& I = result.tiles[i].tile.time;
      if (!L.region.contains(I) || next.contains(I)) ++rep.layer_violations;
    }
  }
  rep.global_bmo = bmo_c_norm(result.global_counting(n));

  // Independent recomputation through the plain mass() on the pool of generation n.
  const auto idx = result.pool_at(n);
  std::vector<MeasuredTile> sub;
  for (std::size_t i : idx) sub.push_back(result.tiles[i]);
  const TilePool pool(std::move(sub));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& a = result.assignment[idx[j]];
    if (a.n != n) continue;
    // Already a layer violation; mass is undefined outside the region.
    if (!g->layers[a.k].region.contains(pool[j].tile.time)) continue;
    const double m = mass(pool[j].tile, pool, g->layers[a.k].region, cfg.N, cfg.samples);
    if (!mass_in_range(m, n)) ++rep.mass_violations;
  }
  return rep;
}

}  // namespace carleson
