#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "carleson/critical.hpp"

namespace carleson {

struct AppendixResult {
  int d = 0;
  int trials = 0;
  int a_failures = 0;
  int b_failures = 0;
  int c_failures = 0;       // on the dilated interval
  int c_on_I_failures = 0;  // on I itself, diagnostic
  double worst_a = 0.0;     // largest lhs / rhs
  double worst_b = 0.0;
  double worst_c = 0.0;
  bool ok() const { return a_failures == 0 && b_failures == 0 && c_failures == 0; }
};

// Randomized trials of the three growth lemmas at degree parameter d >= 2.
AppendixResult appendix_suite(int d, int trials, std::uint64_t seed, double c_dilation = 13.0);

struct V17Result {
  std::vector<Lemma0Report> reports;
  double max = 0.0;
  double median = 0.0;
  double spread() const { return median > 0 ? max / median : 0.0; }
};

// Random tile pairs of one choice function with meeting stars, at grid size K.
V17Result v17_sweep(int d, int pairs, int K, std::uint64_t seed);

struct V15Result {
  std::vector<double> deltas;
  std::vector<double> values;  // off-critical pairing over the base term
  int censored = 0;            // points at the rounding floor, left out of the fit
  double slope = 0.0;
};

// Two tiles over one interval, frequencies about 2^e / |I| apart for e in exponents.
V15Result v15_decay(int n, std::span<const int> exponents, int K, std::uint64_t seed,
                    double floor = 1e-12);

}  // namespace carleson
