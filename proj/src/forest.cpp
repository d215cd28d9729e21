#include "carleson/forest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "carleson/discretize.hpp"

namespace carleson {

std::size_t Forest::tile_count() const {
  std::size_t s = 0;
  for (const auto& L : layers)
    for (const auto& t : L.trees) s += t.size();
  return s;
}

namespace {

// Tiles grouped by time interval, for walks over the intervals containing a given one.
class TimeIndex {
 public:
  explicit TimeIndex(const std::vector<Tile>& tiles) {
    for (std::size_t i = 0; i < tiles.size(); ++i) by_time_[tiles[i].time].push_back(i);
  }

  // Calls f(j) for every tile whose interval contains I, starting at I itself.
  template <typename F>
  void above(const DyadicInterval& I, F&& f) const {
    for (DyadicInterval J = I;; J = J.parent()) {
      if (auto it = by_time_.find(J); it != by_time_.end())
        for (std::size_t j : it->second) f(j);
      if (J.level <= min_level()) break;
    }
  }

 private:
  int min_level() const { return by_time_.empty() ? 0 : std::min(0, by_time_.begin()->first.level); }
  std::map<DyadicInterval, std::vector<std::size_t>> by_time_;
};

bool inside(const RealInterval& a, const DyadicInterval& I) { return a.lo >= I.lo() && a.hi <= I.hi(); }

bool overlaps(const RealInterval& a, const DyadicInterval& I) {
  return std::max(a.lo, I.lo()) < std::min(a.hi, I.hi());
}

// Mirsky layering: tiles of equal height are pairwise incomparable.
std::vector<std::vector<Tile>> antichain_layers(std::vector<Tile> set) {
  std::sort(set.begin(), set.end(), [](const Tile& a, const Tile& b) {
    if (a.time.level != b.time.level) return a.time.level > b.time.level;
    return a < b;
  });
  const TimeIndex idx(set);
  std::vector<DilatedTile> boxes;
  for (const auto& P : set) boxes.push_back(box(P));
  std::vector<int> h(set.size(), 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    idx.above(set[i].time, [&](std::size_t j) {
      if (j != i && set[j].time != set[i].time && leq(boxes[i], boxes[j]))
        h[j] = std::max(h[j], h[i] + 1);
    });
  }
  std::vector<std::vector<Tile>> out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (static_cast<std::size_t>(h[i]) >= out.size()) out.resize(h[i] + 1);
    out[h[i]].push_back(set[i]);
  }
  for (auto& L : out) std::sort(L.begin(), L.end());
  return out;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::string describe(const Tile& P) {
  std::ostringstream os;
  os << "[I=(" << P.time.level << "," << P.time.index << ")";
  for (const auto& a : P.freq) os << " (" << a.level << "," << a.index << ")";
  os << "]";
  return os.str();
}

}  // namespace

TreeCheck check_tree(const std::vector<Tile>& members, const Tile& top,
                     const std::vector<Tile>& universe) {
  TreeCheck c;
  const auto top10 = dilate_tile(top, 10.0);
  const auto top1 = box(top);
  for (const auto& P : members)
    if (!leq(dilate_tile(P, 1.5), top10)) c.inside_top = false;

  const std::set<Tile> in(members.begin(), members.end());
  const std::set<Tile> all(universe.begin(), universe.end());
  for (const auto& P : members) {
    for (const auto& Q : neighbors(P)) {
      if (!all.count(Q) || in.count(Q)) continue;
      if (leq(dilate_tile(Q, 1.5), top1)) c.neighbor_closed = false;
    }
  }

  std::vector<DilatedTile> mb;
  for (const auto& P : members) mb.push_back(box(P));
  for (const auto& P : universe) {
    if (in.count(P)) continue;
    const auto b = box(P);
    bool below = false, above = false;
    for (const auto& m : mb) {
      below = below || leq(m, b);
      above = above || leq(b, m);
    }
    if (below && above) c.convex = false;
  }
  return c;
}

bool is_tree(const std::vector<Tile>& members, const Tile& top, const std::vector<Tile>& universe) {
  return check_tree(members, top, universe).ok();
}

double sparseness(const std::vector<Tile>& members) {
  double worst = 0.0;
  for (const auto& P : members) {
    double s = 0.0;
    for (const auto& Q : members)
      if (Q.time.within(P.time)) s += Q.time.length();
    worst = std::max(worst, s / P.time.length());
  }
  return worst;
}

bool is_sparse_tree(const std::vector<Tile>& members, const Tile& top, double C,
                    const std::vector<Tile>& universe) {
  return is_tree(members, top, universe) && sparseness(members) <= C;
}

bool is_well_separated(const std::vector<Tree>& trees) {
  std::vector<DilatedTile> tops;
  for (const auto& t : trees) tops.push_back(dilate_tile(t.top, 10.0));
  for (std::size_t j = 0; j < trees.size(); ++j) {
    for (const auto& P : trees[j].members) {
      const auto P2 = dilate_tile(P, 2.0);
      for (std::size_t k = 0; k < trees.size(); ++k)
        if (k != j && leq(P2, tops[k])) return false;
    }
  }
  return true;
}

CountingFunction top_counting(const std::vector<Tree>& trees) {
  CountingFunction c;
  for (const auto& t : trees) c.add(t.top.time);
  return c;
}

bool is_linf_forest(const std::vector<Tree>& trees, int n, double factor) {
  if (!is_well_separated(trees)) return false;
  return top_counting(trees).sup() <= factor * n * std::ldexp(1.0, n);
}

bool layers_scaled(const Forest& f) {
  for (std::size_t a = 0; a < f.layers.size(); ++a) {
    for (std::size_t b = 0; b < f.layers.size(); ++b) {
      const int j = f.layers[a].k;
      const int k = f.layers[b].k;
      if (j >= k) continue;
      for (const auto& t : f.layers[a].trees)
        for (const auto& P : t.members)
          for (const auto& u : f.layers[b].trees)
            for (const auto& Q : u.members) {
              if (P.time.disjoint(Q.time)) continue;
              if (Q.time.length() > std::ldexp(P.time.length(), j - k)) return false;
            }
    }
  }
  return true;
}

bool is_bmo_forest(const Forest& f, double factor) {
  for (const auto& L : f.layers)
    if (!is_linf_forest(L.trees, f.n, factor)) return false;
  return layers_scaled(f);
}

bool is_normal_tree(const Tree& t) {
  for (const auto& P : t.members)
    if (!inside(dilate(P.time, 20.0), t.top.time)) return false;
  return true;
}

bool is_row(const std::vector<Tree>& trees) {
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (!is_normal_tree(trees[i])) return false;
    for (std::size_t j = i + 1; j < trees.size(); ++j)
      if (!trees[i].top.time.disjoint(trees[j].top.time)) return false;
  }
  return true;
}

bool is_separated(const Tree& t1, const Tree& t2, double delta) {
  if (t1.top.time.disjoint(t2.top.time)) return true;
  for (const auto* pair : {&t1, &t2}) {
    const Tree& own = *pair;
    const Tree& other = pair == &t1 ? t2 : t1;
    for (const auto& P : own.members)
      if (P.time.within(other.top.time) && ceil_bracket(delta_pair(P, other.top)) >= delta)
        return false;
  }
  return true;
}

std::vector<Row> rows_of(const std::vector<Tree>& trees) {
  std::vector<std::size_t> order(trees.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& I = trees[a].top.time;
    const auto& J = trees[b].top.time;
    if (I.lo() != J.lo()) return I.lo() < J.lo();
    return I.length() > J.length();
  });
  std::vector<Row> rows;
  for (std::size_t i : order) {
    const auto& I = trees[i].top.time;
    auto fits = [&](const Row& r) {
      return std::all_of(r.trees.begin(), r.trees.end(),
                         [&](const Tree& t) { return t.top.time.disjoint(I); });
    };
    auto it = std::find_if(rows.begin(), rows.end(), fits);
    if (it == rows.end()) it = rows.insert(rows.end(), Row{});
    it->trees.push_back(trees[i]);
  }
  return rows;
}

ForestReduction reduce_to_forests(const std::vector<Tile>& input, const std::vector<Tile>& maxima_in,
                                  int n, const ForestConfig& cfg) {
  ForestReduction red;
  red.n = n;
  if (input.empty()) return red;

  std::vector<Tile> tiles = input;
  std::sort(tiles.begin(), tiles.end());
  std::vector<Tile> maxima = maxima_in;
  std::sort(maxima.begin(), maxima.end());
  const int d = tiles.front().degree();
  const int closure_bound = cfg.closure_bound > 0 ? cfg.closure_bound
                                                  : static_cast<int>(std::pow(3, d)) * d;
  const int family_bound = cfg.antichain_bound > 0 ? cfg.antichain_bound : 4 * d;
  std::ostringstream dump;

  // (D): distinct scales at least D levels apart.
  {
    std::set<int> levels;
    for (const auto& P : tiles) levels.insert(P.time.level);
    for (const auto& P : maxima) levels.insert(P.time.level);
    const int D = scale_separation(d);
    const std::vector<int> v(levels.begin(), levels.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      if (v[i + 1] - v[i] < D) {
        ++red.properties.D;
        dump << "D: scales " << v[i] << " and " << v[i + 1] << "\n";
      }
    }
  }

  const std::size_t N = tiles.size();
  std::vector<DilatedTile> b1, b15, b2, b4;
  for (const auto& P : tiles) {
    b1.push_back(box(P));
    b15.push_back(dilate_tile(P, 1.5));
    b2.push_back(dilate_tile(P, 2.0));
    b4.push_back(dilate_tile(P, 4.0));
  }

  // (a), (b): B(P) counts the maxima whose box sits inside 4P.
  const TimeIndex max_idx(maxima);
  std::vector<DilatedTile> mbox;
  for (const auto& M : maxima) mbox.push_back(box(M));
  std::vector<int> B(N, 0);
  for (std::size_t i = 0; i < N; ++i)
    max_idx.above(tiles[i].time, [&](std::size_t j) {
      if (trianglelefteq(b4[i], mbox[j])) ++B[i];
    });

  std::vector<Tile> d_set;
  std::map<int, std::vector<std::size_t>> bands;
  for (std::size_t i = 0; i < N; ++i) {
    if (B[i] == 0) {
      d_set.push_back(tiles[i]);
    } else {
      int e = 0;
      std::frexp(static_cast<double>(B[i]), &e);
      bands[e - 1].push_back(i);
    }
  }
  {
    auto layers = antichain_layers(d_set);
    red.d_chain = static_cast<int>(layers.size());
    for (auto& L : layers) red.discarded.push_back({"D", -1, std::move(L)});
  }

  for (const auto& [j, members] : bands) {
    BandForest band;
    band.j = j;
    std::vector<Tile> sub;
    for (std::size_t i : members) sub.push_back(tiles[i]);
    const TimeIndex sub_idx(sub);
    auto b4s = [&](std::size_t s) -> const DilatedTile& { return b4[members[s]]; };

    // (c): tops are the tiles whose 4-dilate is maximal inside 4 p_nj.
    std::vector<std::size_t> tops;  // positions in sub
    for (std::size_t s = 0; s < sub.size(); ++s) {
      bool maximal = true;
      sub_idx.above(sub[s].time, [&](std::size_t t) {
        if (maximal && t != s && leq(b4s(s), b4s(t)) && !leq(b4s(t), b4s(s))) maximal = false;
      });
      if (maximal) tops.push_back(s);
    }
    std::vector<Tile> top_tiles;
    for (std::size_t s : tops) top_tiles.push_back(sub[s]);
    band.tops = top_tiles;
    const TimeIndex top_idx(top_tiles);
    std::vector<DilatedTile> t1, t4, t10;
    for (const auto& T : top_tiles) {
      t1.push_back(box(T));
      t4.push_back(dilate_tile(T, 4.0));
      t10.push_back(dilate_tile(T, 10.0));
    }

    // (A)
    for (std::size_t l = 0; l < top_tiles.size(); ++l)
      top_idx.above(top_tiles[l].time, [&](std::size_t k) {
        if (k != l && leq(t4[l], t4[k]) && top_tiles[l].time != top_tiles[k].time) {
          ++red.properties.A;
          dump << "A: " << describe(top_tiles[l]) << " under " << describe(top_tiles[k]) << "\n";
        }
      });
    // (B), (C)
    for (std::size_t s = 0; s < sub.size(); ++s) {
      bool covered = false;
      std::vector<std::size_t> under;
      top_idx.above(sub[s].time, [&](std::size_t l) {
        covered = covered || leq(b4s(s), t4[l]);
        if (trianglelefteq(b4s(s), t4[l])) under.push_back(l);
      });
      if (!covered) {
        ++red.properties.B;
        dump << "B: " << describe(sub[s]) << " under no top\n";
      }
      for (std::size_t a = 0; a < under.size(); ++a)
        for (std::size_t b = a + 1; b < under.size(); ++b)
          if (!leq(t4[under[a]], t4[under[b]]) || !leq(t4[under[b]], t4[under[a]])) {
            ++red.properties.C;
            dump << "C: " << describe(sub[s]) << "\n";
          }
    }

    // Removal set r_nj, each tile filed under the first description it meets.
    std::vector<Tile> not_close, top_scale, minimal, kept;
    std::vector<std::size_t> kept_pos;
    for (std::size_t s = 0; s < sub.size(); ++s) {
      const std::size_t i = members[s];
      bool close = false, same_scale = false;
      top_idx.above(sub[s].time, [&](std::size_t l) {
        if (leq(b15[i], t1[l])) {
          close = true;
          if (top_tiles[l].time.level == sub[s].time.level) same_scale = true;
        }
      });
      bool is_min = true;
      for (std::size_t t = 0; t < sub.size() && is_min; ++t) {
        if (t == s || !sub[t].time.within(sub[s].time)) continue;
        if (leq(b1[members[t]], b1[i]) && !leq(b1[i], b1[members[t]])) is_min = false;
      }
      if (!close) {
        not_close.push_back(sub[s]);
      } else if (same_scale) {
        top_scale.push_back(sub[s]);
      } else if (is_min) {
        minimal.push_back(sub[s]);
      } else {
        kept.push_back(sub[s]);
        kept_pos.push_back(s);
      }
    }
    int families = 0;
    for (auto [name, set] : {std::pair<const char*, std::vector<Tile>*>{"not-close", &not_close},
                             {"top-scale", &top_scale},
                             {"minimal", &minimal}}) {
      for (auto& L : antichain_layers(*set)) {
        red.discarded.push_back({name, j, std::move(L)});
        ++families;
      }
    }
    red.max_removed_families = std::max(red.max_removed_families, families);
    if (families > family_bound)
      dump << "band " << j << ": " << families << " removal families above " << family_bound << "\n";

    // S_k, the relation propto and its closure classes.
    const std::size_t R = top_tiles.size();
    std::vector<std::vector<std::size_t>> S(R);  // positions in kept
    std::vector<std::vector<std::size_t>> owners(kept.size());
    for (std::size_t m = 0; m < kept.size(); ++m) {
      const std::size_t i = members[kept_pos[m]];
      top_idx.above(kept[m].time, [&](std::size_t k) {
        if (leq(b15[i], t1[k])) {
          S[k].push_back(m);
          owners[m].push_back(k);
        }
      });
    }
    UnionFind uf(R);
    std::set<std::pair<std::size_t, std::size_t>> linked;
    for (std::size_t m = 0; m < kept.size(); ++m) {
      const std::size_t i = members[kept_pos[m]];
      top_idx.above(kept[m].time, [&](std::size_t l) {
        if (!leq(b2[i], t10[l])) return;
        for (std::size_t k : owners[m]) {
          if (S[l].empty() || k == l) continue;
          uf.unite(k, l);
          linked.insert({std::min(k, l), std::max(k, l)});
        }
      });
    }
    for (const auto& [k, l] : linked)
      if (top_tiles[k].time != top_tiles[l].time || !leq(t4[k], t4[l])) ++band.propto_violations;

    std::map<std::size_t, std::vector<std::size_t>> classes;
    for (std::size_t k = 0; k < R; ++k)
      if (!S[k].empty()) classes[uf.find(k)].push_back(k);
    for (const auto& [root, ks] : classes) {
      band.max_class = std::max(band.max_class, static_cast<int>(ks.size()));
      std::set<Tile> m;
      for (std::size_t k : ks)
        for (std::size_t p : S[k]) m.insert(kept[p]);
      band.trees.push_back({top_tiles[root], {m.begin(), m.end()}});
    }
    red.max_class = std::max(red.max_class, band.max_class);
    if (band.max_class > closure_bound)
      dump << "class of size " << band.max_class << " above " << closure_bound << "\n";
    if (!band.trees.empty()) red.bands.push_back(std::move(band));
  }

  if (cfg.strict && !red.properties.ok())
    throw ForestPropertyError("reduce_to_forests: property failure\n" + dump.str());
  return red;
}

GenerationForests reduce_generation(const PartitionResult& r, int n, const ForestConfig& cfg) {
  GenerationForests out;
  out.n = n;
  const auto* g = r.generation(n);
  if (!g) return out;
  std::map<int, Forest> by_band;
  for (std::size_t k = 0; k < g->layers.size(); ++k) {
    const auto& L = g->layers[k];
    std::vector<Tile> tiles, maxima;
    for (std::size_t i : L.tiles) tiles.push_back(r.tiles[i].tile);
    std::set<std::size_t> next;
    if (k + 1 < g->layers.size()) next.insert(g->layers[k + 1].maximal.begin(), g->layers[k + 1].maximal.end());
    for (std::size_t i : L.maximal)
      if (!next.count(i)) maxima.push_back(r.tiles[i].tile);
    auto red = reduce_to_forests(tiles, maxima, n, cfg);
    for (auto& band : red.bands) {
      auto& f = by_band[band.j];
      f.n = n;
      f.layers.push_back({L.k, band.trees});
    }
    for (const auto& fam : red.discarded) out.discarded_tiles += fam.tiles.size();
    out.per_layer.push_back(std::move(red));
  }
  for (auto& [j, f] : by_band) out.forests.push_back(std::move(f));
  return out;
}

ForestSplit split_normal_boundary(const Forest& f, const PartitionResult& r) {
  ForestSplit out;
  out.normal.n = out.boundary.n = f.n;
  const auto* g = r.generation(f.n);
  std::map<Tile, std::size_t> where;
  for (std::size_t i = 0; i < r.tiles.size(); ++i) where.emplace(r.tiles[i].tile, i);
  const double lo = std::ldexp(1.0, -f.n);
  const double hi = std::ldexp(1.0, -f.n + 1);

  for (const auto& layer : f.layers) {
    const PartitionLayer* L = nullptr;
    DyadicUnion next;
    if (g) {
      for (std::size_t k = 0; k < g->layers.size(); ++k) {
        if (g->layers[k].k != layer.k) continue;
        L = &g->layers[k];
        next = k + 1 < g->layers.size() ? g->layers[k + 1].region : g->tail;
      }
    }
    std::vector<Tile> maxima;
    if (L)
      for (std::size_t i : L->maximal) maxima.push_back(r.tiles[i].tile);
    const TimeIndex max_idx(maxima);
    std::vector<DilatedTile> mbox;
    for (const auto& M : maxima) mbox.push_back(box(M));

    ForestLayer nm{layer.k, {}}, bd{layer.k, {}};
    for (const auto& t : layer.trees) {
      Tree tn{t.top, {}}, tb{t.top, {}};
      for (const auto& P : t.members) {
        const RealInterval I20 = dilate(P.time, 20.0);
        bool good = L && L->region.contains(P.time);
        if (good) {
          auto it = where.find(P);
          const double m = it == where.end() ? 0.0 : r.assignment[it->second].mass;
          good = m >= lo && (m < hi || (f.n == 1 && m <= 1.0));
        }
        for (const auto& J : next.pieces())
          if (good && overlaps(I20, J) && !inside(I20, J) && P.time.length() < J.length()) good = false;
        bool edge = !inside(I20, t.top.time);
        const auto b = box(P);
        max_idx.above(P.time, [&](std::size_t j) {
          if (!edge && leq(b, mbox[j]) && !inside(I20, maxima[j].time)) edge = true;
        });
        (good && !edge ? tn : tb).members.push_back(P);
      }
      if (!tn.members.empty()) nm.trees.push_back(std::move(tn));
      if (!tb.members.empty()) bd.trees.push_back(std::move(tb));
    }
    if (!nm.trees.empty()) out.normal.layers.push_back(std::move(nm));
    if (!bd.trees.empty()) out.boundary.layers.push_back(std::move(bd));
  }
  return out;
}

}  // namespace carleson
