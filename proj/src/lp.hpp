#pragma once

#include <Eigen/Dense>

namespace carleson::detail {

struct LpSolution {
  double value = 0.0;
  Eigen::VectorXd x;
};

// max c.x subject to A x <= b, x >= 0, with b >= 0 so the origin is feasible.
// The feasible region must be bounded in the direction of c.
LpSolution maximize_from_origin(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                const Eigen::VectorXd& c);

}  // namespace carleson::detail
