#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include "carleson/dyadic.hpp"

namespace carleson {

// Monomial-basis polynomial c0 + c1 y + c2 y^2 + ...
template <typename Scalar>
class Polynomial {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Polynomial() : c_(Coeffs::Zero(1)) {}
  explicit Polynomial(Coeffs c) : c_(std::move(c)) {
    if (c_.size() == 0) c_ = Coeffs::Zero(1);
  }
  Polynomial(std::initializer_list<Scalar> c) : c_(static_cast<Eigen::Index>(c.size())) {
    std::copy(c.begin(), c.end(), c_.data());
    if (c_.size() == 0) c_ = Coeffs::Zero(1);
  }

  static Polynomial constant(Scalar v) { return Polynomial({v}); }
  static Polynomial monomial(int power, Scalar scale = Scalar(1)) {
    Coeffs c = Coeffs::Zero(power + 1);
    c(power) = scale;
    return Polynomial(std::move(c));
  }

  const Coeffs& coeffs() const { return c_; }
  Scalar coeff(int j) const { return j < c_.size() ? c_(j) : Scalar(0); }
  Eigen::Index size() const { return c_.size(); }

  // Highest index with a nonzero coefficient; -1 for the zero polynomial.
  int degree() const {
    for (Eigen::Index j = c_.size() - 1; j >= 0; --j)
      if (c_(j) != Scalar(0)) return static_cast<int>(j);
    return -1;
  }
  bool is_constant() const { return degree() <= 0; }

  Scalar operator()(Scalar y) const {
    Scalar acc = c_(c_.size() - 1);
    for (Eigen::Index j = c_.size() - 2; j >= 0; --j) acc = acc * y + c_(j);
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return Polynomial();
    Coeffs d(c_.size() - 1);
    for (Eigen::Index j = 1; j < c_.size(); ++j) d(j - 1) = Scalar(j) * c_(j);
    return Polynomial(std::move(d));
  }

  Polynomial antiderivative() const {
    Coeffs a = Coeffs::Zero(c_.size() + 1);
    for (Eigen::Index j = 0; j < c_.size(); ++j) a(j + 1) = c_(j) / Scalar(j + 1);
    return Polynomial(std::move(a));
  }

  Polynomial trimmed() const {
    const int deg = std::max(degree(), 0);
    return Polynomial(Coeffs(c_.head(deg + 1)));
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) {
      Coeffs grown = Coeffs::Zero(o.c_.size());
      grown.head(c_.size()) = c_;
      c_ = std::move(grown);
    }
    c_.head(o.c_.size()) += o.c_;
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) { return *this += -o; }
  Polynomial& operator*=(Scalar s) {
    c_ *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(const Polynomial& a) { return Polynomial(Coeffs(-a.c_)); }
  friend Polynomial operator*(Polynomial a, Scalar s) { return a *= s; }
  friend Polynomial operator*(Scalar s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Coeffs r = Coeffs::Zero(a.c_.size() + b.c_.size() - 1);
    for (Eigen::Index i = 0; i < a.c_.size(); ++i) r.segment(i, b.c_.size()) += a.c_(i) * b.c_;
    return Polynomial(std::move(r));
  }

 private:
  Coeffs c_;
};

using Poly = Polynomial<double>;

template <typename Scalar>
Scalar eval(const Polynomial<Scalar>& q, Scalar y) {
  return q(y);
}

template <typename Scalar>
Polynomial<Scalar> derivative(const Polynomial<Scalar>& Q) {
  return Q.derivative();
}

// Q(x) - Q(y), the integral of Q' from y to x.
template <typename Scalar>
Scalar phase_difference(const Polynomial<Scalar>& Q, Scalar x, Scalar y) {
  return Q(x) - Q(y);
}

// Interpolant of degree < nodes.size() through (nodes[j], values[j]).
template <typename Scalar>
Polynomial<Scalar> lagrange(std::span<const Scalar> nodes, std::span<const Scalar> values) {
  if (nodes.size() != values.size() || nodes.empty())
    throw std::invalid_argument("lagrange: nodes and values must be nonempty and equal length");
  using P = Polynomial<Scalar>;
  // Newton divided differences, expanded by nested multiplication.
  const std::size_t n = nodes.size();
  std::vector<Scalar> c(values.begin(), values.end());
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = n - 1; i >= k; --i) {
      const Scalar h = nodes[i] - nodes[i - k];
      if (h == Scalar(0)) throw std::invalid_argument("lagrange: coincident nodes");
      c[i] = (c[i] - c[i - 1]) / h;
    }
  }
  P result({c[n - 1]});
  for (std::size_t k = n - 1; k-- > 0;) result = result * P({-nodes[k], Scalar(1)}) + P({c[k]});
  return result;
}

// Lagrange basis values L_j(y) for the given nodes.
Eigen::VectorXd lagrange_basis(std::span<const double> nodes, double y);

// Sorted real roots of q in the closed interval [lo, hi]; empty for the zero polynomial.
std::vector<double> real_roots(const Poly& q, double lo, double hi, double tol = 1e-13);
std::vector<double> critical_points(const Poly& q, double lo, double hi);

double sup_norm(const Poly& q, const RealInterval& A);
double sup_norm_sampled(const Poly& q, const RealInterval& A, int samples);
double delta_q_J(const Poly& q, const RealInterval& J);
double sublevel_measure(const Poly& q, const RealInterval& I, double eta);

// Points of the closed interval where |q| has a local minimum below eta.
std::vector<double> local_minima_below(const Poly& q, const RealInterval& J, double eta);

// d^d, the constant carried by the growth lemmas.
double proof_constant(int d);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs * (1.0 + 1e-9) + 1e-300; }
};

// sup_I |q| <= c (|I|/|J|)^(d-1) sup_J |q| for q of degree <= d-1, J inside I.
InequalityCheck lemma_a_check(const Poly& q, const RealInterval& I, const RealInterval& J, int d,
                              double c);
// |{y in I : |q(y)| < eta}| <= c (eta / sup_I |q|)^(1/(d-1)) |I|.
InequalityCheck lemma_b_check(const Poly& q, const RealInterval& I, double eta, int d, double c);

}  // namespace carleson
