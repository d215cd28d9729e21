#pragma once

#include <compare>
#include <span>
#include <unordered_map>
#include <vector>

#include "carleson/dyadic.hpp"
#include "carleson/poly.hpp"

namespace carleson {

// [alpha^1, ..., alpha^d, I] with |alpha^j| = 1/|I|.
struct Tile {
  DyadicInterval time;
  std::vector<DyadicInterval> freq;

  int degree() const { return static_cast<int>(freq.size()); }
  std::vector<double> nodes() const { return node_vector(time, degree()); }
  bool valid() const;

  friend bool operator==(const Tile&, const Tile&) = default;
  friend auto operator<=>(const Tile&, const Tile&) = default;
};

struct TileHash {
  std::size_t operator()(const Tile& P) const;
};

// Real frequency boxes over a dyadic time interval; produced by dilate_tile.
struct DilatedTile {
  DyadicInterval time;
  std::vector<RealInterval> freq;

  int degree() const { return static_cast<int>(freq.size()); }
  std::vector<double> nodes() const { return node_vector(time, degree()); }
};

DilatedTile dilate_tile(const Tile& P, double a);
inline DilatedTile box(const Tile& P) { return dilate_tile(P, 1.0); }

// The degree-d tile over I whose frequency box contains q.
Tile tile_at(const DyadicInterval& I, const Poly& q, int d);

bool contains_poly(const DilatedTile& P, const Poly& q);
inline bool contains_poly(const Tile& P, const Poly& q) { return contains_poly(box(P), q); }

Poly central_polynomial(const Tile& P);

// Closure of {q(y) : q in P}.
RealInterval value_interval(const DilatedTile& P, double y);
inline RealInterval value_interval(const Tile& P, double y) { return value_interval(box(P), y); }

std::vector<Tile> neighbors(const Tile& P);

bool leq(const DilatedTile& P1, const DilatedTile& P2);
inline bool leq(const Tile& P1, const Tile& P2) { return leq(box(P1), box(P2)); }

bool trianglelefteq(const DilatedTile& P1, const DilatedTile& P2);
inline bool trianglelefteq(const Tile& P1, const Tile& P2) {
  return trianglelefteq(box(P1), box(P2));
}

inline constexpr int kSamplesPerLength = 64;

// inf over q1 in P of |I| sup_I |q - q1|, on a uniform sampling of I.
double delta_q_P(const Poly& q, const DilatedTile& P, int samples = kSamplesPerLength);
inline double delta_q_P(const Poly& q, const Tile& P, int samples = kSamplesPerLength) {
  return delta_q_P(q, box(P), samples);
}

double delta_pair(const DilatedTile& P1, const DilatedTile& P2, int samples = kSamplesPerLength);
inline double delta_pair(const Tile& P1, const Tile& P2, int samples = kSamplesPerLength) {
  return delta_pair(box(P1), box(P2), samples);
}

// delta_pair on every stride-th sample only; never above delta_pair.
double delta_pair_lower(const DilatedTile& P1, const DilatedTile& P2, int samples, int stride);

inline double ceil_bracket(double x) { return 1.0 / (1.0 + std::abs(x)); }

// max(ceil(Delta_{q_P1}(P2)), ceil(Delta_{q_P2}(P1))), comparable to ceil(Delta(P1,P2)).
double delta_pair_surrogate(const Tile& P1, const Tile& P2, int samples = kSamplesPerLength);

// sup over aI of |q - q_P| against c / |I|.
InequalityCheck lemma_c_check(const Tile& P, const Poly& q, double dilation, double c);

struct MeasuredTile {
  Tile tile;
  double density = 0.0;  // |E(P)| / |I|
};

// Tiles indexed by time interval, densest first within each interval.
class TilePool {
 public:
  TilePool() = default;
  explicit TilePool(std::vector<MeasuredTile> tiles);

  std::size_t size() const { return tiles_.size(); }
  bool empty() const { return tiles_.empty(); }
  const MeasuredTile& operator[](std::size_t i) const { return tiles_[i]; }
  const std::vector<MeasuredTile>& tiles() const { return tiles_; }
  const DilatedTile& doubled(std::size_t i) const { return doubled_[i]; }
  std::span<const std::size_t> at_time(const DyadicInterval& I) const;

 private:
  std::vector<MeasuredTile> tiles_;
  std::vector<DilatedTile> doubled_;
  std::unordered_map<DyadicInterval, std::vector<std::size_t>, DyadicIntervalHash> by_time_;
};

inline constexpr int kMassExponent = 20;

// sup over P' in pool with I_P inside I_P' inside A of A_0(P') ceil(Delta(2P, 2P'))^N.
double mass(const Tile& P, const TilePool& pool, const DyadicUnion& A, int N = kMassExponent,
            int samples = kSamplesPerLength);

}  // namespace carleson
