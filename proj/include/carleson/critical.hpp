#pragma once

#include <optional>
#include <vector>

#include "carleson/discretize.hpp"
#include "carleson/dyadic.hpp"
#include "carleson/poly.hpp"
#include "carleson/tiles.hpp"

namespace carleson {

// Disjoint, sorted closed intervals. Overlapping or touching pieces are merged.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<RealInterval> pieces);

  const std::vector<RealInterval>& pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }
  double measure() const;
  bool contains(double x, double tol = 0.0) const;
  bool subset_of(const IntervalUnion& other, double tol = 0.0) const;
  IntervalUnion intersect(const RealInterval& A) const;
  IntervalUnion unite(const IntervalUnion& other) const;
  double distance_to(const RealInterval& A) const;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  std::vector<RealInterval> pieces_;
};

struct CriticalParams {
  int d = 1;  // tile degree; the polynomials involved lie in Q_{d-1}
  double eps0 = 0.25;
  double c = 1.0;
  int finest_level = 40;  // resolution floor of the dyadic searches

  // c = d^d and eps0 = 1/(4d).
  static CriticalParams defaults(int d);
};

// Largest dyadic interval inside A; leftmost on ties.
std::optional<DyadicInterval> largest_dyadic_inside(const RealInterval& A);

// w, v, eta attached to a host interval and a polynomial.
struct HostScales {
  DyadicInterval J;
  double delta = 0.0;  // Delta_q(J)
  double w = 0.0;
  double v = 0.0;
  double eta = 0.0;
};
HostScales host_scales(const Poly& q, const RealInterval& host, const CriticalParams& p);

struct StationarySet {
  IntervalUnion set;
  bool clipped = false;  // some search ran out of room before the threshold was exceeded
};

StationarySet stationary_set(double eta, double v, const Poly& q, const RealInterval& host,
                             const CriticalParams& p);
IntervalUnion core_set(double eta, double w, const Poly& q, const RealInterval& host);
// A together with each complementary gap shorter than a neighbouring piece of A.
IntervalUnion regularize(const RealInterval& host, const IntervalUnion& A);

StationarySet separation_set_at(double eta, double v, const Poly& q, const RealInterval& host,
                                const CriticalParams& p);
IntervalUnion critical_set_at(double eta, double w, const Poly& q, const RealInterval& host);

// I_s with eta from the host scales and v = c / delta.
StationarySet separation_set(const Poly& q12, double delta, const RealInterval& host,
                             const CriticalParams& p);

std::optional<RealInterval> common_host(const Tile& P1, const Tile& P2);
Poly interaction_polynomial(const Tile& P1, const Tile& P2);
IntervalUnion critical_intersection(const Tile& P1, const Tile& P2, const CriticalParams& p);

// C^infinity weight equal to 0 on A and 1 at distance >= width from A.
double smooth_complement(const IntervalUnion& A, double width, double y);
// One tenth of the shortest piece or interior gap of A.
double cutoff_width(const IntervalUnion& A);

struct Lemma0Report {
  double delta = 0.0;  // Delta(P1, P2)
  int n = 0;
  double base = 0.0;  // int_{E1}|f| int_{E2}|g| / max(|I1|,|I2|)
  double off_critical = 0.0;
  double on_critical = 0.0;
  double composed_norm_sq = 0.0;
  double ratio_v15 = 0.0;
  double ratio_v16 = 0.0;
  double ratio_v17 = 0.0;
};

Lemma0Report lemma0_check(const ESet& P1, const ESet& P2, const ChoiceFunction& choice,
                          const GridFunction& f, const GridFunction& g, int n,
                          const CriticalParams& p, const Bump& bump = narrow_psi());

}  // namespace carleson
