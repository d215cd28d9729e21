#include "lp.hpp"

#include <stdexcept>

namespace carleson::detail {

LpSolution maximize_from_origin(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                const Eigen::VectorXd& c) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m || c.size() != n) throw std::invalid_argument("lp: dimension mismatch");
  if ((b.array() < 0).any()) throw std::invalid_argument("lp: origin must be feasible");

  // Tableau rows 0..m-1 are constraints, row m is the reduced objective.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.col(n + m).head(m) = b;
  T.row(m).head(n) = -c.transpose();
  Eigen::VectorXi basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis(i) = static_cast<int>(n + i);

  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  const Eigen::Index max_pivots = 50 * (n + m) + 1000;
  for (Eigen::Index it = 0; it < max_pivots; ++it) {
    // Bland's rule: lowest-index improving column, lowest-index tied row.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (T(m, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (T(i, enter) > eps) {
        const double r = T(i, n + m) / T(i, enter);
        if (leave < 0 || r < best - 1e-15 || (r <= best + 1e-15 && basis(i) < basis(leave))) {
          leave = i;
          best = r;
        }
      }
    }
    if (leave < 0) throw std::runtime_error("lp: objective unbounded");
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    basis(leave) = static_cast<int>(enter);
  }

  LpSolution sol;
  sol.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis(i) < n) sol.x(basis(i)) = T(i, n + m);
  sol.value = c.dot(sol.x);
  return sol;
}

}  // namespace carleson::detail
