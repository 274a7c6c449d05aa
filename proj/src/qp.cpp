#include "islopt/qp.hpp"

#include <algorithm>
#include <cmath>

#include "islopt/error.hpp"

namespace islopt {
namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

QpSolution solve_least_squares_qp(const LeastSquaresQp& qp, const QpOptions& options) {
  const Eigen::Index n = qp.M.cols();
  const Eigen::Index rows = qp.G.rows();
  if (qp.box_lower.size() != n || qp.box_upper.size() != n || qp.offset.size() != qp.M.rows() ||
      (rows > 0 && qp.G.cols() != n) || qp.row_lower.size() != rows || qp.row_upper.size() != rows) {
    throw UsageError("inconsistent QP dimensions");
  }

  QpSolution sol;
  if (n == 0) {
    sol.w = Eigen::VectorXd();
    sol.primal_value = qp.constant + qp.offset.squaredNorm();
    sol.dual_bound = sol.primal_value;
    sol.converged = true;
    return sol;
  }

  // Stacked constraint matrix A = [I; G] with bounds l, u.
  const Eigen::Index m = n + rows;
  Eigen::MatrixXd A(m, n);
  A.topRows(n).setIdentity();
  if (rows > 0) A.bottomRows(rows) = qp.G;
  Eigen::VectorXd l(m);
  Eigen::VectorXd u(m);
  l << qp.box_lower, qp.row_lower;
  u << qp.box_upper, qp.row_upper;

  const Eigen::MatrixXd P = 2.0 * qp.M.transpose() * qp.M;
  const Eigen::VectorXd q = 2.0 * qp.M.transpose() * qp.offset;
  const Eigen::MatrixXd AtA = A.transpose() * A;

  double rho = options.rho;
  const double sigma = options.sigma;
  const double alpha = options.alpha;
  auto factor = [&](double r) {
    Eigen::MatrixXd kkt = P + r * AtA;
    kkt.diagonal().array() += sigma;
    return Eigen::LLT<Eigen::MatrixXd>(kkt);
  };
  Eigen::LLT<Eigen::MatrixXd> llt = factor(rho);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  w = w.cwiseMax(qp.box_lower).cwiseMin(qp.box_upper);
  Eigen::VectorXd z = (A * w).cwiseMax(l).cwiseMin(u);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const Eigen::VectorXd rhs = sigma * w - q + A.transpose() * (rho * z - y);
    const Eigen::VectorXd w_tilde = llt.solve(rhs);
    const Eigen::VectorXd z_tilde = A * w_tilde;
    w = alpha * w_tilde + (1.0 - alpha) * w;
    const Eigen::VectorXd z_relaxed = alpha * z_tilde + (1.0 - alpha) * z;
    const Eigen::VectorXd z_next = (z_relaxed + y / rho).cwiseMax(l).cwiseMin(u);
    y += rho * (z_relaxed - z_next);
    z = z_next;

    if ((it + 1) % 10 != 0) continue;
    const Eigen::VectorXd Aw = A * w;
    const Eigen::VectorXd Pw = P * w;
    const Eigen::VectorXd Aty = A.transpose() * y;
    const double prim = inf_norm(Aw - z);
    const double dual = inf_norm(Pw + q + Aty);
    const double prim_scale = std::max(inf_norm(Aw), inf_norm(z));
    const double dual_scale = std::max({inf_norm(Pw), inf_norm(Aty), inf_norm(q)});
    if (prim <= options.eps_abs + options.eps_rel * prim_scale &&
        dual <= options.eps_abs + options.eps_rel * dual_scale) {
      sol.converged = true;
      ++it;
      break;
    }
    if ((it + 1) % 50 == 0) {
      const double ratio = std::sqrt((prim / (prim_scale + 1e-12)) / (dual / (dual_scale + 1e-12) + 1e-30));
      const double next = std::clamp(rho * ratio, 1e-6, 1e6);
      if (next > 5.0 * rho || next < 0.2 * rho) {
        rho = next;
        llt = factor(rho);
      }
    }
  }
  sol.iterations = it;
  sol.w = w.cwiseMax(qp.box_lower).cwiseMin(qp.box_upper);

  const Eigen::VectorXd residual = qp.offset + qp.M * sol.w;
  sol.primal_value = qp.constant + residual.squaredNorm();

  // Dual certificate: mu = 2 (offset + M w), lambda = y with the stationarity
  // residual M^T mu + A^T lambda moved onto the identity rows.
  const Eigen::VectorXd mu = 2.0 * residual;
  Eigen::VectorXd lambda = y;
  const Eigen::VectorXd stationarity = qp.M.transpose() * mu + A.transpose() * lambda;
  lambda.head(n) -= stationarity;
  double bound = qp.constant;
  bound += (-0.25 * mu.array().square() + mu.array() * qp.offset.array()).sum();
  for (Eigen::Index i = 0; i < m; ++i) bound -= std::max(lambda[i] * l[i], lambda[i] * u[i]);
  sol.dual_bound = bound;
  return sol;
}

}  // namespace islopt
