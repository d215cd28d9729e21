#include "carleson/poly.hpp"

namespace carleson {

Eigen::VectorXd lagrange_basis(std::span<const double> nodes, double y) {
  const auto d = static_cast<Eigen::Index>(nodes.size());
  Eigen::VectorXd L(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double v = 1.0;
    for (Eigen::Index k = 0; k < d; ++k)
      if (k != j) v *= (y - nodes[k]) / (nodes[j] - nodes[k]);
    L(j) = v;
  }
  return L;
}

namespace {

// Root of a monotone piece bracketed by a sign change.
double bisect(const Poly& q, double a, double b, double fa, double tol) {
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = q(m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> real_roots(const Poly& q, double lo, double hi, double tol) {
  const int deg = q.degree();
  if (deg <= 0) return {};
  const double scaled_tol = tol * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  // q is monotone between consecutive critical points.
  std::vector<double> cuts{lo};
  if (deg >= 2) {
    for (double c : real_roots(q.derivative(), lo, hi, tol))
      if (c > cuts.back()) cuts.push_back(c);
  }
  if (hi > cuts.back()) cuts.push_back(hi);
  std::vector<double> roots;
  auto push = [&](double r) {
    if (roots.empty() || r - roots.back() > scaled_tol) roots.push_back(r);
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const double fa = q(a);
    const double fb = q(b);
    if (fa == 0.0) push(a);
    if (fa != 0.0 && fb != 0.0 && (fa < 0) != (fb < 0)) push(bisect(q, a, b, fa, scaled_tol));
    if (fb == 0.0) push(b);
  }
  if (cuts.size() == 1 && q(lo) == 0.0) push(lo);
  return roots;
}

std::vector<double> critical_points(const Poly& q, double lo, double hi) {
  return real_roots(q.derivative(), lo, hi);
}

double sup_norm(const Poly& q, const RealInterval& A) {
  double best = std::max(std::abs(q(A.lo)), std::abs(q(A.hi)));
  for (double c : critical_points(q, A.lo, A.hi)) best = std::max(best, std::abs(q(c)));
  return best;
}

double sup_norm_sampled(const Poly& q, const RealInterval& A, int samples) {
  double best = 0.0;
  for (int i = 0; i <= samples; ++i)
    best = std::max(best, std::abs(q(A.lo + A.length() * i / samples)));
  return best;
}

double delta_q_J(const Poly& q, const RealInterval& J) { return J.length() * sup_norm(q, J); }

double sublevel_measure(const Poly& q, const RealInterval& I, double eta) {
  if (!(eta > 0)) throw std::invalid_argument("sublevel_measure: eta must be positive");
  std::vector<double> cuts{I.lo, I.hi};
  for (double s : {eta, -eta}) {
    const auto r = real_roots(q - Poly::constant(s), I.lo, I.hi);
    cuts.insert(cuts.end(), r.begin(), r.end());
  }
  std::sort(cuts.begin(), cuts.end());
  double measure = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (b > a && std::abs(q(0.5 * (a + b))) < eta) measure += b - a;
  }
  return measure;
}

std::vector<double> local_minima_below(const Poly& q, const RealInterval& J, double eta) {
  if (q.is_constant()) return {};
  std::vector<double> cand{J.lo, J.hi};
  for (double r : real_roots(q, J.lo, J.hi)) cand.push_back(r);
  for (double c : critical_points(q, J.lo, J.hi)) cand.push_back(c);
  std::sort(cand.begin(), cand.end());
  const double h = 1e-7 * J.length();
  const double tol = 1e-12 * std::max(1.0, J.length());
  std::vector<double> out;
  for (double x : cand) {
    const double v = std::abs(q(x));
    if (!(v < eta)) continue;
    const bool left_ok = x - h < J.lo || v <= std::abs(q(x - h));
    const bool right_ok = x + h > J.hi || v <= std::abs(q(x + h));
    if (!(left_ok && right_ok)) continue;
    if (!out.empty() && x - out.back() <= tol) continue;
    out.push_back(x);
  }
  return out;
}

double proof_constant(int d) { return std::pow(static_cast<double>(d), d); }

InequalityCheck lemma_a_check(const Poly& q, const RealInterval& I, const RealInterval& J, int d,
                              double c) {
  const double ratio = I.length() / J.length();
  return {sup_norm(q, I), c * std::pow(ratio, d - 1) * sup_norm(q, J)};
}

InequalityCheck lemma_b_check(const Poly& q, const RealInterval& I, double eta, int d, double c) {
  if (d < 2) throw std::invalid_argument("lemma_b_check: degree parameter must be at least 2");
  const double sup = sup_norm(q, I);
  return {sublevel_measure(q, I, eta), c * std::pow(eta / sup, 1.0 / (d - 1)) * I.length()};
}

}  // namespace carleson
