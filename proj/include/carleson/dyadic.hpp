#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace carleson {

// num * 2^-exp, kept in lowest terms so equality is structural.
struct DyadicRational {
  std::int64_t num = 0;
  int exp = 0;

  static DyadicRational make(std::int64_t num, int exp);
  double value() const { return std::ldexp(static_cast<double>(num), -exp); }
  friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
};

struct RealInterval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x < hi; }
  bool closure_contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const RealInterval&, const RealInterval&) = default;
};

double distance(const RealInterval& a, const RealInterval& b);

// [m 2^-k, (m+1) 2^-k). Negative levels give intervals longer than one.
struct DyadicInterval {
  int level = 0;
  std::int64_t index = 0;

  DyadicRational lo_exact() const;
  DyadicRational hi_exact() const;
  double lo() const { return std::ldexp(static_cast<double>(index), -level); }
  double hi() const { return std::ldexp(static_cast<double>(index + 1), -level); }
  double length() const { return std::ldexp(1.0, -level); }
  RealInterval real() const { return {lo(), hi()}; }

  DyadicInterval parent() const { return {level - 1, index >> 1}; }
  DyadicInterval ancestor(int coarser_level) const;
  DyadicInterval left_child() const { return {level + 1, 2 * index}; }
  DyadicInterval right_child() const { return {level + 1, 2 * index + 1}; }

  // I subset-of other
  bool within(const DyadicInterval& other) const;
  bool disjoint(const DyadicInterval& other) const;
  bool contains(double x) const { return lo() <= x && x < hi(); }

  friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;
};

// Interval containing x at the given level.
DyadicInterval dyadic_at(double x, int level);

DyadicRational center(const DyadicInterval& I);

struct Brothers {
  DyadicInterval left;
  DyadicInterval right;
};
Brothers brothers(const DyadicInterval& I);

RealInterval dilate(const DyadicInterval& I, double a);
RealInterval dilate(const RealInterval& I, double a);

struct Star {
  RealInterval left;
  RealInterval right;
  bool contains(double x) const { return left.contains(x) || right.contains(x); }
};
Star star(const DyadicInterval& I);
// The stars of I and J share an interior point.
bool stars_meet(const DyadicInterval& I, const DyadicInterval& J);

enum class NodeRule { BreadthFirst, Equispaced };

inline constexpr int kMaxDegree = 8;

// Unit-interval node offsets in [0,1]. d=1 yields the left endpoint only.
std::vector<double> unit_nodes(int d, NodeRule rule = NodeRule::BreadthFirst,
                               int max_degree = kMaxDegree);
std::vector<double> node_vector(const DyadicInterval& I, int d,
                                NodeRule rule = NodeRule::BreadthFirst,
                                int max_degree = kMaxDegree);

// Disjoint maximal dyadic pieces, sorted by left endpoint.
class DyadicUnion {
 public:
  DyadicUnion() = default;
  explicit DyadicUnion(std::vector<DyadicInterval> pieces);

  static DyadicUnion unit() { return DyadicUnion({{0, 0}}); }

  const std::vector<DyadicInterval>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  bool contains(const DyadicInterval& I) const;
  bool contains(double x) const;
  bool subset_of(const DyadicUnion& other) const;
  double measure() const;

 private:
  std::vector<DyadicInterval> pieces_;
};

std::vector<DyadicInterval> whitney(const RealInterval& domain,
                                    std::span<const RealInterval> obstacle,
                                    int finest_level = 40);

class CountingFunction {
 public:
  CountingFunction() = default;
  explicit CountingFunction(std::vector<DyadicInterval> members)
      : members_(std::move(members)) {}

  void add(const DyadicInterval& I) { members_.push_back(I); }
  const std::vector<DyadicInterval>& members() const { return members_; }
  bool empty() const { return members_.empty(); }

  int operator()(double x) const;
  int sup() const;
  // Maximal value over the set A, exact since the function is a step function.
  int sup_on(const DyadicUnion& A) const;

 private:
  std::vector<DyadicInterval> members_;
};

double bmo_c_norm(const CountingFunction& c);
DyadicUnion level_set(const CountingFunction& c, double gamma);

// Maximal dyadic decomposition of the union of half-open [lo,hi) runs whose
// endpoints are dyadic.
DyadicUnion dyadic_cover(std::span<const RealInterval> runs, int finest_level = 60);

struct DyadicIntervalHash {
  std::size_t operator()(const DyadicInterval& I) const {
    return std::hash<std::int64_t>()(I.index * 131 + I.level);
  }
};

}  // namespace carleson
