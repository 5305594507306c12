#pragma once

#include <Eigen/Dense>

#include "polybound/core.hpp"

namespace polybound {

enum class Sense { minimize, maximize };

/// Standard-form linear program: optimize c'x subject to Ax = b, x >= 0.
struct LpProblem {
  Eigen::VectorXd objective;  // c, length n
  Eigen::MatrixXd equality;   // A, m x n
  Eigen::VectorXd rhs;        // b, length m
  Sense sense = Sense::minimize;
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  Eigen::VectorXd solution;
  // Row multipliers y with b'y = value. For minimize A'y <= c, for maximize A'y >= c.
  Eigen::VectorXd dual;
  int iterations = 0;
  double phase_one_residual = 0.0;
  double max_residual = 0.0;  // ||Ax - b||_inf at the returned solution
};

/// Dense two-phase simplex with Bland's anticycling rule.
///
/// Phase one minimizes the sum of artificial variables; a phase-one optimum
/// above `tol.lp_feasibility` certifies infeasibility. Artificial variables
/// left basic at zero are pivoted out, and rows where that is impossible are
/// dropped as redundant. The final basic solution and duals are recomputed
/// from the basis matrix by LU to shed tableau round-off.
///
/// Throws invalid_input on dimension mismatch and solver_failure when the
/// pivot count exceeds `tol.lp_iteration_factor * (m + n)`.
LpResult lp_solve(const LpProblem& problem, const Tolerances& tol = default_tolerances());

/// Convenience: is {x >= 0 : Ax = b} nonempty? Returns a witness when it is.
LpResult lp_feasibility(const Eigen::MatrixXd& equality, const Eigen::VectorXd& rhs,
                        const Tolerances& tol = default_tolerances());

}  // namespace polybound
