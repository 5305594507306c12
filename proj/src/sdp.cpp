#include "polybound/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace polybound {

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::inaccurate: return "inaccurate";
  }
  return "unknown";
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// tr(A B) for symmetric A.
double inner(const MatrixXd& a, const MatrixXd& b) { return a.cwiseProduct(b).sum(); }

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void validate(const SdpProblem& p) {
  const auto n = p.dimension();
  if (n == 0 || p.objective.cols() != n) throw invalid_input("sdp objective must be a non-empty square matrix");
  auto check = [n](const MatrixXd& m, const char* what) {
    if (m.rows() != n || m.cols() != n) throw invalid_input(std::string("sdp ") + what + " has wrong dimension");
    if (!m.allFinite()) throw invalid_input(std::string("sdp ") + what + " is not finite");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
      throw invalid_input(std::string("sdp ") + what + " is not symmetric");
  };
  check(p.objective, "objective");
  for (const auto& c : p.constraints) check(c.matrix, "constraint");
}

// Largest step in [0, inf) keeping X + a*D positive semidefinite, given the
// Cholesky factor of X.
double max_step(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& d) {
  const MatrixXd lower = chol.matrixL();
  MatrixXd w = lower.triangularView<Eigen::Lower>().solve(d);
  w = lower.triangularView<Eigen::Lower>().solve(w.transpose()).transpose();
  const double lam = min_eigenvalue(symmetrize(w));
  return lam < 0.0 ? -1.0 / lam : std::numeric_limits<double>::infinity();
}

struct Direction {
  MatrixXd dx;
  VectorXd dy;
  MatrixXd dz;
};

}  // namespace

SdpResult sdp_solve(const SdpProblem& p, const Tolerances& tol) {
  validate(p);
  const auto n = p.dimension();
  const auto m = static_cast<Eigen::Index>(p.constraints.size());
  const double dn = static_cast<double>(n);

  VectorXd b(m);
  double a_scale = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    b(k) = p.constraints[static_cast<std::size_t>(k)].rhs;
    a_scale = std::max(a_scale, p.constraints[static_cast<std::size_t>(k)].matrix.norm());
  }
  const MatrixXd& c = p.objective;

  double xi = std::max(10.0, std::sqrt(dn));
  for (Eigen::Index k = 0; k < m; ++k)
    xi = std::max(xi, dn * (1.0 + std::abs(b(k))) / (1.0 + p.constraints[static_cast<std::size_t>(k)].matrix.norm()));
  const double eta = std::max({10.0, std::sqrt(dn), c.norm(), a_scale});

  MatrixXd x = xi * MatrixXd::Identity(n, n);
  MatrixXd z = eta * MatrixXd::Identity(n, n);
  VectorXd y = VectorXd::Zero(m);

  auto apply_a = [&](const MatrixXd& mat) {
    VectorXd out(m);
    for (Eigen::Index k = 0; k < m; ++k) out(k) = inner(p.constraints[static_cast<std::size_t>(k)].matrix, mat);
    return out;
  };
  auto apply_at = [&](const VectorXd& v) {
    MatrixXd out = MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < m; ++k) out += v(k) * p.constraints[static_cast<std::size_t>(k)].matrix;
    return out;
  };

  const double b_norm = b.norm();
  const double c_norm = c.norm();
  SdpResult result;
  bool converged = false;
  bool stalled = false;

  for (int iter = 0; iter < tol.sdp_max_iterations; ++iter) {
    const VectorXd rp = b - apply_a(x);
    const MatrixXd rd = apply_at(y) - c - z;
    const double pobj = inner(c, x);
    const double dobj = b.dot(y);
    const double mu = inner(x, z) / dn;

    const double rel_gap = std::abs(dobj - pobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pinf = rp.norm() / (1.0 + b_norm);
    const double dinf = rd.norm() / (1.0 + c_norm);
    result.iterations = iter;
    if (rel_gap <= tol.sdp_target && pinf <= tol.sdp_target && dinf <= tol.sdp_target &&
        inner(x, z) <= tol.sdp_target * (1.0 + std::abs(pobj))) {
      converged = true;
      break;
    }

    Eigen::LLT<MatrixXd> chol_z(z);
    Eigen::LLT<MatrixXd> chol_x(x);
    if (chol_z.info() != Eigen::Success || chol_x.info() != Eigen::Success)
      throw solver_failure("sdp iterate lost positive definiteness");
    const MatrixXd z_inv = chol_z.solve(MatrixXd::Identity(n, n));

    // Schur complement M_kl = tr(A_k X A_l Z^-1).
    std::vector<MatrixXd> g(static_cast<std::size_t>(m));
    for (Eigen::Index l = 0; l < m; ++l)
      g[static_cast<std::size_t>(l)] = x * p.constraints[static_cast<std::size_t>(l)].matrix * z_inv;
    MatrixXd schur(m, m);
    for (Eigen::Index k = 0; k < m; ++k)
      for (Eigen::Index l = 0; l < m; ++l)
        schur(k, l) = p.constraints[static_cast<std::size_t>(k)].matrix.cwiseProduct(g[static_cast<std::size_t>(l)].transpose()).sum();
    schur = symmetrize(schur);
    // Near the optimum the Schur matrix can lose definiteness to rounding;
    // fall back to a rank-revealing factorization there.
    Eigen::LDLT<MatrixXd> ldlt(schur);
    const bool ldlt_ok = ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.vectorD().minCoeff() > 0.0;
    std::optional<Eigen::CompleteOrthogonalDecomposition<MatrixXd>> cod;
    if (!ldlt_ok) {
      cod.emplace(schur);
      if (!schur.allFinite()) throw solver_failure("sdp Schur complement is not finite");
    }
    auto schur_solve = [&](const VectorXd& rhs) -> VectorXd { return ldlt_ok ? VectorXd(ldlt.solve(rhs)) : VectorXd(cod->solve(rhs)); };

    auto solve_direction = [&](const MatrixXd& rhs_comp) {
      Direction d;
      const MatrixXd t = (rhs_comp - x * rd) * z_inv;
      VectorXd rhs(m);
      for (Eigen::Index k = 0; k < m; ++k)
        rhs(k) = p.constraints[static_cast<std::size_t>(k)].matrix.cwiseProduct(t.transpose()).sum() - rp(k);
      d.dy = schur_solve(rhs);
      d.dz = apply_at(d.dy) + rd;
      d.dx = symmetrize((rhs_comp - x * d.dz) * z_inv);
      return d;
    };

    const MatrixXd xz = x * z;
    const Direction pred = solve_direction(-xz);
    const double ap = std::min(1.0, max_step(chol_x, pred.dx));
    const double ad = std::min(1.0, max_step(chol_z, pred.dz));
    const double mu_aff = inner(x + ap * pred.dx, z + ad * pred.dz) / dn;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    const MatrixXd corr = sigma * mu * MatrixXd::Identity(n, n) - xz - pred.dx * pred.dz;
    const Direction step = solve_direction(corr);
    const double step_p = std::min(1.0, 0.98 * max_step(chol_x, step.dx));
    const double step_d = std::min(1.0, 0.98 * max_step(chol_z, step.dz));

    x = symmetrize(x + step_p * step.dx);
    y += step_d * step.dy;
    z = symmetrize(z + step_d * step.dz);

    if (std::max(step_p, step_d) < 1e-10) {
      stalled = true;
      result.iterations = iter + 1;
      break;
    }
    result.iterations = iter + 1;
  }

  result.primal = x;
  result.dual = y;
  result.slack = z;
  result.value = inner(c, x);
  result.dual_value = b.dot(y);
  result.gap = result.dual_value - result.value;
  result.min_eigenvalue = min_eigenvalue(x);
  result.max_residual = m > 0 ? (apply_a(x) - b).cwiseAbs().maxCoeff() : 0.0;

  if (!converged) {
    const double rel_gap = std::abs(result.gap) / (1.0 + std::abs(result.value) + std::abs(result.dual_value));
    if (stalled && rel_gap <= 100.0 * tol.sdp_gap && result.max_residual <= 1e-6) {
      result.status = SdpStatus::inaccurate;
      return result;
    }
    std::ostringstream os;
    os << "sdp did not converge after " << result.iterations << " iterations (relative gap " << rel_gap << ")";
    throw solver_failure(os.str());
  }
  result.status = SdpStatus::optimal;
  return result;
}

}  // namespace polybound
