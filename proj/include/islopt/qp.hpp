#pragma once

#include <Eigen/Dense>

#include "islopt/miqp.hpp"

namespace islopt {

// minimize  constant + || offset + M w ||^2
// subject to  box_lower <= w <= box_upper,  row_lower <= G w <= row_upper
struct LeastSquaresQp {
  Eigen::MatrixXd M;
  Eigen::VectorXd offset;
  double constant = 0.0;
  Eigen::VectorXd box_lower;
  Eigen::VectorXd box_upper;
  Eigen::MatrixXd G;
  Eigen::VectorXd row_lower;
  Eigen::VectorXd row_upper;
};

struct QpSolution {
  Eigen::VectorXd w;
  double primal_value = 0.0;
  // Lagrangian dual value at a multiplier made exactly feasible by absorbing
  // the stationarity residual into the box multipliers. Valid lower bound on
  // the QP optimum for any iterate.
  double dual_bound = 0.0;
  bool converged = false;
  int iterations = 0;
};

// ADMM in the operator-splitting form (dense KKT factorization, adaptive rho).
QpSolution solve_least_squares_qp(const LeastSquaresQp& qp, const QpOptions& options);

}  // namespace islopt
