#include "vlscan/lm.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace vlscan {

std::string_view to_string(LMTermination t) {
  switch (t) {
    case LMTermination::kGradient: return "gradient";
    case LMTermination::kStep: return "step";
    case LMTermination::kZeroCost: return "zero_cost";
    case LMTermination::kMaxIterations: return "max_iterations";
    case LMTermination::kNumerical: return "numerical";
  }
  return "unknown";
}

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x,
                                           double rel_step) {
  Eigen::VectorXd r0;
  residual(x, r0);
  Eigen::MatrixXd J(r0.size(), x.size());
  Eigen::VectorXd xp = x;
  Eigen::VectorXd rp, rm;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    residual(xp, rp);
    xp[j] = x[j] - h;
    residual(xp, rm);
    xp[j] = x[j];
    J.col(j) = (rp - rm) / (2.0 * h);
  }
  return J;
}

LMResult lm_solve(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd x,
                  const LMOptions& options) {
  LMResult result;
  LMReport& report = result.report;

  auto eval_jacobian = [&](const Eigen::VectorXd& at, Eigen::MatrixXd& J) {
    if (jacobian) {
      jacobian(at, J);
    } else {
      J = finite_difference_jacobian(residual, at);
    }
  };

  Eigen::VectorXd r;
  residual(x, r);
  ++report.evaluations;
  double cost = 0.5 * r.squaredNorm();
  report.initial_cost = cost;
  report.cost_history.push_back(cost);
  result.x = x;
  if (!std::isfinite(cost)) {
    report.final_cost = cost;
    report.termination = LMTermination::kNumerical;
    return result;
  }

  Eigen::MatrixXd J;
  eval_jacobian(x, J);
  Eigen::MatrixXd A = J.transpose() * J;
  Eigen::VectorXd g = J.transpose() * r;
  // Marquardt scaling: damping proportional to diag(J^T J) keeps the step
  // invariant to per-parameter units.
  auto scaling = [](const Eigen::MatrixXd& M) {
    Eigen::VectorXd D = M.diagonal();
    const double floor = std::max(D.maxCoeff(), 1e-300) * 1e-12;
    return D.cwiseMax(floor).eval();
  };
  Eigen::VectorXd D = scaling(A);
  double mu = options.initial_damping;
  double nu = 2.0;
  report.termination = LMTermination::kMaxIterations;

  for (int attempt = 0; attempt < options.max_iter; ++attempt) {
    report.gradient_norm = g.lpNorm<Eigen::Infinity>();
    if (cost == 0.0) {
      report.termination = LMTermination::kZeroCost;
      break;
    }
    if (report.gradient_norm <= options.gradient_tol) {
      report.termination = LMTermination::kGradient;
      break;
    }
    Eigen::MatrixXd damped = A;
    damped.diagonal() += mu * D;
    const Eigen::VectorXd step = damped.ldlt().solve(-g);
    if (!step.allFinite()) {
      mu *= nu;
      nu *= 2.0;
      continue;
    }
    if (step.norm() <= options.step_tol * (x.norm() + options.step_tol)) {
      report.termination = LMTermination::kStep;
      break;
    }
    const Eigen::VectorXd x_new = x + step;
    Eigen::VectorXd r_new;
    residual(x_new, r_new);
    ++report.evaluations;
    const double cost_new = 0.5 * r_new.squaredNorm();
    const double predicted = 0.5 * step.dot(mu * D.cwiseProduct(step) - g);
    const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : -1.0;
    if (std::isfinite(cost_new) && cost_new < cost && rho > 0.0) {
      x = x_new;
      r = r_new;
      cost = cost_new;
      ++report.iterations;
      report.cost_history.push_back(cost);
      eval_jacobian(x, J);
      A = J.transpose() * J;
      g = J.transpose() * r;
      D = scaling(A);
      mu *= std::max(0.1, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu)) {
        report.termination = LMTermination::kNumerical;
        break;
      }
    }
  }
  report.gradient_norm = g.lpNorm<Eigen::Infinity>();
  report.final_cost = cost;
  result.x = x;
  return result;
}

}  // namespace vlscan
