#include "polybound/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

namespace polybound {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

// Dense tableau: rows_ x (num_cols + 1); the last column is the right-hand
// side. `cost_` holds reduced costs, its last entry is minus the objective.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Tolerances& tol, int pivot_limit)
      : n_(static_cast<int>(a.cols())), tol_(tol), pivot_limit_(pivot_limit) {
    const int m = static_cast<int>(a.rows());
    t_ = Eigen::MatrixXd::Zero(m, n_ + m + 1);
    basis_.resize(static_cast<std::size_t>(m));
    row_origin_.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const double s = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = s * a.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, n_ + m) = s * b(i);
      basis_[static_cast<std::size_t>(i)] = n_ + i;
      row_origin_[static_cast<std::size_t>(i)] = i;
    }
    allowed_.assign(static_cast<std::size_t>(n_ + m), true);
  }

  int rows() const { return static_cast<int>(t_.rows()); }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  int rhs_col() const { return cols(); }
  bool is_artificial(int j) const { return j >= n_; }
  int iterations() const { return iterations_; }
  const std::vector<int>& basis() const { return basis_; }
  const std::vector<int>& row_origin() const { return row_origin_; }
  double objective() const { return -cost_(rhs_col()); }

  void load_cost(const Eigen::VectorXd& c_full) {
    cost_ = Eigen::VectorXd::Zero(cols() + 1);
    cost_.head(cols()) = c_full;
    for (int i = 0; i < rows(); ++i) {
      const double cb = c_full(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) cost_ -= cb * t_.row(i).transpose();
    }
  }

  void forbid_artificials() {
    for (int j = n_; j < cols(); ++j) allowed_[static_cast<std::size_t>(j)] = false;
  }

  // Runs Bland-rule pivots to optimality. Returns false when unbounded.
  bool optimize() {
    for (;;) {
      int entering = -1;
      for (int j = 0; j < cols(); ++j) {
        if (allowed_[static_cast<std::size_t>(j)] && cost_(j) < -tol_.lp_reduced_cost) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;

      int leaving = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows(); ++i) {
        const double aij = t_(i, entering);
        if (aij <= tol_.lp_pivot) continue;
        const double ratio = t_(i, rhs_col()) / aij;
        if (leaving < 0) {
          best = ratio;
          leaving = i;
          continue;
        }
        const double tie = 1e-12 * std::max(1.0, std::abs(best));
        if (ratio < best - tie) {
          best = ratio;
          leaving = i;
        } else if (ratio <= best + tie &&
                   basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)]) {
          leaving = i;
        }
      }
      if (leaving < 0) return false;
      pivot(leaving, entering);
    }
  }

  void pivot(int r, int c) {
    if (++iterations_ > pivot_limit_) {
      std::ostringstream os;
      os << "simplex exceeded the pivot limit of " << pivot_limit_ << " (numerical degeneracy)";
      throw solver_failure(os.str());
    }
    t_.row(r) /= t_(r, c);
    for (int i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    const double f = cost_(c);
    if (f != 0.0) cost_ -= f * t_.row(r).transpose();
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Moves zero-level artificial variables out of the basis; rows with no
  // usable structural pivot are linearly dependent and get dropped.
  void expel_artificials() {
    for (int i = rows() - 1; i >= 0; --i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      int best = -1;
      double mag = tol_.lp_pivot;
      for (int j = 0; j < n_; ++j) {
        if (std::abs(t_(i, j)) > mag) {
          mag = std::abs(t_(i, j));
          best = j;
        }
      }
      if (best >= 0) {
        --iterations_;  // degenerate bookkeeping pivot, not counted
        pivot(i, best);
      } else {
        drop_row(i);
      }
    }
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < rows(); ++i) {
      const int j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) x(j) = t_(i, rhs_col());
    }
    return x;
  }

 private:
  void drop_row(int r) {
    const int last = rows() - 1;
    if (r != last) {
      t_.row(r) = t_.row(last);
      basis_[static_cast<std::size_t>(r)] = basis_[static_cast<std::size_t>(last)];
      row_origin_[static_cast<std::size_t>(r)] = row_origin_[static_cast<std::size_t>(last)];
    }
    t_.conservativeResize(last, Eigen::NoChange);
    basis_.pop_back();
    row_origin_.pop_back();
  }

  int n_;
  const Tolerances& tol_;
  int pivot_limit_;
  int iterations_ = 0;
  Eigen::MatrixXd t_;
  Eigen::VectorXd cost_;
  std::vector<int> basis_;
  std::vector<int> row_origin_;
  std::vector<bool> allowed_;
};

}  // namespace

LpResult lp_solve(const LpProblem& p, const Tolerances& tol) {
  const auto m = p.equality.rows();
  const auto n = p.equality.cols();
  if (p.objective.size() != n || p.rhs.size() != m) {
    std::ostringstream os;
    os << "lp dimension mismatch: A is " << m << "x" << n << ", c has " << p.objective.size() << ", b has "
       << p.rhs.size();
    throw invalid_input(os.str());
  }
  if (!p.equality.allFinite() || !p.rhs.allFinite() || !p.objective.allFinite())
    throw invalid_input("lp data must be finite");

  const int limit = tol.lp_iteration_factor * static_cast<int>(m + n);
  Tableau tab(p.equality, p.rhs, tol, std::max(limit, 1));

  // Phase one.
  Eigen::VectorXd phase_one = Eigen::VectorXd::Zero(n + m);
  phase_one.tail(m).setOnes();
  tab.load_cost(phase_one);
  tab.optimize();  // bounded below by zero

  LpResult result;
  result.phase_one_residual = std::max(0.0, tab.objective());
  const double scale = 1.0 + p.rhs.cwiseAbs().sum();
  if (result.phase_one_residual > tol.lp_feasibility * scale) {
    result.status = LpStatus::infeasible;
    result.iterations = tab.iterations();
    return result;
  }
  tab.expel_artificials();

  // Phase two, always as a minimization.
  const double sign = p.sense == Sense::maximize ? -1.0 : 1.0;
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
  cost.head(n) = sign * p.objective;
  tab.forbid_artificials();
  tab.load_cost(cost);
  const bool bounded = tab.optimize();
  result.iterations = tab.iterations();
  if (!bounded) {
    result.status = LpStatus::unbounded;
    result.solution = tab.primal();
    return result;
  }

  // Recompute the basic solution and the duals from the basis matrix.
  const auto& basis = tab.basis();
  const auto& origin = tab.row_origin();
  const auto r = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd x = tab.primal();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  if (r > 0) {
    Eigen::MatrixXd bmat(r, r);
    Eigen::VectorXd bvec(r);
    Eigen::VectorXd cb(r);
    for (Eigen::Index i = 0; i < r; ++i) {
      const auto row = origin[static_cast<std::size_t>(i)];
      bvec(i) = p.rhs(row);
      cb(i) = sign * p.objective(basis[static_cast<std::size_t>(i)]);
      for (Eigen::Index k = 0; k < r; ++k) bmat(i, k) = p.equality(row, basis[static_cast<std::size_t>(k)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(bmat);
    if (lu.isInvertible()) {
      const Eigen::VectorXd xb = lu.solve(bvec);
      x.setZero();
      for (Eigen::Index k = 0; k < r; ++k) x(basis[static_cast<std::size_t>(k)]) = xb(k);
      const Eigen::VectorXd yb = lu.transpose().solve(cb);
      for (Eigen::Index i = 0; i < r; ++i) y(origin[static_cast<std::size_t>(i)]) = sign * yb(i);
    }
  }
  // Round-off below the feasibility floor is not a real negative entry.
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (x(j) < 0.0 && x(j) > -tol.lp_feasibility) x(j) = 0.0;

  result.status = LpStatus::optimal;
  result.solution = x;
  result.dual = y;
  result.value = p.objective.dot(x);
  result.max_residual = m > 0 ? (p.equality * x - p.rhs).cwiseAbs().maxCoeff() : 0.0;
  return result;
}

LpResult lp_feasibility(const Eigen::MatrixXd& equality, const Eigen::VectorXd& rhs, const Tolerances& tol) {
  LpProblem p{Eigen::VectorXd::Zero(equality.cols()), equality, rhs, Sense::minimize};
  return lp_solve(p, tol);
}

}  // namespace polybound
