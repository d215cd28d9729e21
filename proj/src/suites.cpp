#include "carleson/suites.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "carleson/estimate.hpp"
#include "carleson/fixtures.hpp"
#include "carleson/sampling.hpp"

namespace carleson {

namespace {

double share(const InequalityCheck& c) { return c.rhs > 0 ? c.lhs / c.rhs : 0.0; }

}  // namespace

AppendixResult appendix_suite(int d, int trials, std::uint64_t seed, double c_dilation) {
  if (d < 2) throw std::invalid_argument("appendix_suite: degree parameter must be at least 2");
  Rng rng(seed);
  AppendixResult out;
  out.d = d;
  out.trials = trials;
  const double c = proof_constant(d);
  const RealInterval I{-0.5, 0.5};
  for (int t = 0; t < trials; ++t) {
    const Poly q = random_poly(rng, d - 1, std::pow(10.0, uniform(rng, -2, 2)));
    const double len = std::pow(10.0, uniform(rng, -4, 0));
    const double a = uniform(rng, I.lo, I.hi - len);
    const auto A = lemma_a_check(q, I, {a, a + len}, d, c);
    out.a_failures += !A.holds();
    out.worst_a = std::max(out.worst_a, share(A));

    const double eta = sup_norm(q, I) * std::pow(10.0, uniform(rng, -6, 0.5));
    const auto B = lemma_b_check(q, I, eta, d, c);
    out.b_failures += !B.holds();
    out.worst_b = std::max(out.worst_b, share(B));

    const Tile P = random_tile(rng, d, 10);
    const Poly member = random_member(rng, P);
    const auto C = lemma_c_check(P, member, c_dilation, c);
    out.c_failures += !C.holds();
    out.worst_c = std::max(out.worst_c, share(C));
    out.c_on_I_failures += !lemma_c_check(P, member, 1.0, c).holds();
  }
  return out;
}

V17Result v17_sweep(int d, int pairs, int K, std::uint64_t seed) {
  Rng rng(seed);
  const auto choice = block_choice(K, d, 3, 40.0, 0.02, seed);
  std::vector<int> scales;
  for (int k = 2; k <= finest_resolved_scale(K); ++k) scales.push_back(k);
  const auto sets = tile_sets(choice, scales);
  if (sets.size() < 2) throw std::invalid_argument("v17_sweep: too few tiles");
  const auto f = random_gaussian(K, seed + 1);
  const auto g = random_gaussian(K, seed + 2);
  const auto params = CriticalParams::defaults(d);
  V17Result out;
  const int n = static_cast<int>(sets.size());
  for (int attempt = 0; static_cast<int>(out.reports.size()) < pairs && attempt < 1000 * pairs; ++attempt) {
    const auto& P1 = sets[uniform_int(rng, 0, n - 1)];
    const auto& P2 = sets[uniform_int(rng, 0, n - 1)];
    if (P1.tile.time.level != P2.tile.time.level) continue;
    if (!stars_meet(P1.tile.time, P2.tile.time)) continue;
    if (P1.samples.empty() || P2.samples.empty()) continue;
    const auto rep = lemma0_check(P1, P2, choice, f, g, 2, params);
    if (rep.composed_norm_sq <= 0) continue;
    out.reports.push_back(rep);
  }
  std::vector<double> r;
  for (const auto& rep : out.reports) r.push_back(rep.ratio_v17);
  if (r.empty()) return out;
  out.max = *std::max_element(r.begin(), r.end());
  std::nth_element(r.begin(), r.begin() + r.size() / 2, r.end());
  out.median = r[r.size() / 2];
  return out;
}

V15Result v15_decay(int n, std::span<const int> exponents, int K, std::uint64_t seed, double floor) {
  const DyadicInterval I{4, 7};
  if (K < I.level + kResolveMargin) throw std::invalid_argument("v15_decay: grid too coarse");
  const int per = 1 << (K - I.level);
  const int lo = static_cast<int>(I.index) * per;
  const auto f = random_gaussian(K, seed);
  const auto g = random_gaussian(K, seed + 1);
  const auto params = CriticalParams::defaults(1);
  V15Result out;
  std::vector<double> xs;
  std::vector<double> ys;
  for (int e : exponents) {
    const double nu1 = 3.0;
    const double nu2 = nu1 + std::ldexp(1.0, e) / I.length();
    ChoiceFunction choice(K, 1);
    choice.coeffs.setConstant(-1e6);
    for (int i = lo; i < lo + per; ++i) choice.coeffs(i, 0) = i % 2 == 0 ? nu1 : nu2;
    const auto sets = e_sets(choice, I.level);
    const ESet* P1 = nullptr;
    const ESet* P2 = nullptr;
    for (const auto& P : sets) {
      if (P.tile.time != I) continue;
      if (contains_poly(P.tile, Poly::constant(nu1))) P1 = &P;
      if (contains_poly(P.tile, Poly::constant(nu2))) P2 = &P;
    }
    if (!P1 || !P2) throw std::logic_error("v15_decay: tiles not found");
    const auto r = lemma0_check(*P1, *P2, choice, f, g, n, params);
    const double v = r.base > 0 ? r.off_critical / r.base : 0.0;
    out.deltas.push_back(r.delta);
    out.values.push_back(v);
    if (v < floor) {
      ++out.censored;
      continue;
    }
    xs.push_back(std::log2(r.delta));
    ys.push_back(std::log2(v));
  }
  if (xs.size() >= 2) out.slope = fit_slope(xs, ys);
  return out;
}

}  // namespace carleson
