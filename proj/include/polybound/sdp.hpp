#pragma once

#include <vector>

#include <Eigen/Dense>

#include "polybound/core.hpp"

namespace polybound {

struct SdpConstraint {
  Eigen::MatrixXd matrix;  // symmetric, n x n
  double rhs = 0.0;
};

/// maximize <C, X>  subject to  <A_k, X> = b_k,  X PSD.
struct SdpProblem {
  Eigen::MatrixXd objective;
  std::vector<SdpConstraint> constraints;

  Eigen::Index dimension() const { return objective.rows(); }
};

enum class SdpStatus {
  optimal,
  inaccurate,  // steps stalled, but the gap is within 100x the reporting tolerance
};

const char* to_string(SdpStatus status);

struct SdpResult {
  SdpStatus status = SdpStatus::optimal;
  double value = 0.0;       // primal objective <C, X>
  double dual_value = 0.0;  // b'y
  Eigen::MatrixXd primal;   // X
  Eigen::VectorXd dual;     // y
  Eigen::MatrixXd slack;    // Z = sum y_k A_k - C
  double gap = 0.0;         // dual_value - value
  double min_eigenvalue = 0.0;
  double max_residual = 0.0;  // max_k |<A_k, X> - b_k|
  int iterations = 0;
};

/// Infeasible-start primal-dual path-following method on dense symmetric
/// matrices (HKM search direction, Mehrotra predictor-corrector). Starts from
/// scaled identities, so the problem needs a strictly feasible primal and
/// dual point. Constraint matrices must be linearly independent.
///
/// Throws invalid_input on malformed data and solver_failure when the
/// iteration cap is reached or the Newton system breaks down.
SdpResult sdp_solve(const SdpProblem& problem, const Tolerances& tol = default_tolerances());

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace polybound
