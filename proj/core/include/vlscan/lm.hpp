#pragma once

#include <Eigen/Core>
#include <functional>
#include <string_view>
#include <vector>

namespace vlscan {

struct LMOptions {
  int max_iter = 100;
  double gradient_tol = 1e-10;  // on the infinity norm of J^T r
  double step_tol = 1e-12;      // relative to |x|
  double initial_damping = 1e-3;  // times diag(J^T J)
};

enum class LMTermination { kGradient, kStep, kZeroCost, kMaxIterations, kNumerical };

std::string_view to_string(LMTermination t);

struct LMReport {
  int iterations = 0;         // accepted steps
  int evaluations = 0;
  double initial_cost = 0.0;  // 0.5 |r|^2
  double final_cost = 0.0;
  double gradient_norm = 0.0;
  LMTermination termination = LMTermination::kMaxIterations;
  std::vector<double> cost_history;  // initial cost then one entry per accepted step

  bool converged() const {
    return termination != LMTermination::kMaxIterations && termination != LMTermination::kNumerical;
  }
};

using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;
using JacobianFn = std::function<void(const Eigen::VectorXd& x, Eigen::MatrixXd& J)>;

// Residual and analytic Jacobian of one least-squares problem.
struct LeastSquaresProblem {
  ResidualFn residual;
  JacobianFn jacobian;
};

struct LMResult {
  Eigen::VectorXd x;  // best iterate
  LMReport report;
};

// Levenberg-Marquardt with Marquardt scaling and Nielsen's damping update, floored at a
// tenfold decrease per accepted step.
// Only cost-decreasing steps are accepted, so cost_history is non-increasing.
// A null jacobian selects central finite differences. Non-convergence is reported in the
// result, never thrown.
LMResult lm_solve(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd x0,
                  const LMOptions& options = {});

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x,
                                           double rel_step = 1e-6);

}  // namespace vlscan
