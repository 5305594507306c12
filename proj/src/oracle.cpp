#include "polybound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "polybound/lp.hpp"

namespace polybound {

AtomGrid::AtomGrid(std::vector<int> cardinalities) : card_(std::move(cardinalities)) {
  for (int c : card_) {
    if (c < 1) throw invalid_input("atom grid: cardinalities must be positive");
    size_ *= static_cast<std::size_t>(c);
    if (size_ > 32) throw invalid_input("atom grid: more than 32 atoms");
  }
}

std::vector<int> AtomGrid::atom(std::size_t index) const {
  std::vector<int> values(card_.size());
  for (std::size_t v = card_.size(); v-- > 0;) {
    const auto c = static_cast<std::size_t>(card_[v]);
    values[v] = static_cast<int>(index % c);
    index /= c;
  }
  return values;
}

std::optional<Eigen::VectorXd> oracle_joint_distribution(std::span<const MomentConstraint> constraints,
                                                         const AtomGrid& grid, const Tolerances& tol) {
  const auto rows = static_cast<Eigen::Index>(constraints.size()) + 1;
  const auto cols = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto atom = grid.atom(static_cast<std::size_t>(j));
    for (Eigen::Index i = 0; i + 1 < rows; ++i) a(i, j) = constraints[static_cast<std::size_t>(i)].coefficient(atom);
    a(rows - 1, j) = 1.0;
  }
  for (Eigen::Index i = 0; i + 1 < rows; ++i) b(i) = constraints[static_cast<std::size_t>(i)].target;
  b(rows - 1) = 1.0;

  const auto r = lp_feasibility(a, b, tol);
  if (r.status != LpStatus::optimal) return std::nullopt;
  return r.solution;
}

bool oracle_joint_feasibility(std::span<const MomentConstraint> constraints, const AtomGrid& grid,
                              const Tolerances& tol) {
  return oracle_joint_distribution(constraints, grid, tol).has_value();
}

Interval oracle_extremal_scan(const Eigen::VectorXd& objective, const Eigen::MatrixXd& vertices) {
  if (vertices.cols() == 0) throw invalid_input("extremal scan: empty vertex set");
  if (vertices.rows() != objective.size()) throw invalid_input("extremal scan: dimension mismatch");
  const Eigen::VectorXd values = vertices.transpose() * objective;
  return {values.minCoeff(), values.maxCoeff()};
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

namespace {

// Greedy row basis of A: keeps rows that raise the rank.
std::vector<Eigen::Index> independent_rows(const Eigen::MatrixXd& a) {
  std::vector<Eigen::Index> keep;
  Eigen::MatrixXd stacked(0, a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Eigen::MatrixXd trial(stacked.rows() + 1, a.cols());
    trial << stacked, a.row(i);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(trial);
    lu.setThreshold(1e-10);
    if (lu.rank() == trial.rows()) {
      stacked = trial;
      keep.push_back(i);
    }
  }
  return keep;
}

}  // namespace

Interval oracle_extremal_scan(const Eigen::VectorXd& objective, const Eigen::MatrixXd& equality,
                              const Eigen::VectorXd& rhs, std::size_t max_bases) {
  const auto n = static_cast<int>(equality.cols());
  if (objective.size() != n || rhs.size() != equality.rows()) throw invalid_input("extremal scan: dimension mismatch");

  const auto rows = independent_rows(equality);
  const int r = static_cast<int>(rows.size());
  if (binomial(n, r) > static_cast<double>(max_bases)) {
    std::ostringstream os;
    os << "extremal scan: " << binomial(n, r) << " candidate bases exceed the cap of " << max_bases;
    throw invalid_input(os.str());
  }
  Eigen::MatrixXd a(r, n);
  Eigen::VectorXd b(r);
  for (int i = 0; i < r; ++i) {
    a.row(i) = equality.row(rows[static_cast<std::size_t>(i)]);
    b(i) = rhs(rows[static_cast<std::size_t>(i)]);
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const double scale = 1.0 + (rhs.size() > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0);

  // Lexicographic walk over r-subsets of the columns.
  std::vector<int> pick(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k) pick[static_cast<std::size_t>(k)] = k;
  Eigen::MatrixXd basis(r, r);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  for (;;) {
    std::optional<Eigen::VectorXd> xb;
    if (r == 0) {
      xb = Eigen::VectorXd();
    } else {
      for (int k = 0; k < r; ++k) basis.col(k) = a.col(pick[static_cast<std::size_t>(k)]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
      lu.setThreshold(1e-10);
      if (lu.isInvertible()) xb = lu.solve(b);
    }
    if (xb) {
      if (r == 0 || xb->minCoeff() >= -1e-10) {
        q.setZero();
        for (int k = 0; k < r; ++k) q(pick[static_cast<std::size_t>(k)]) = std::max(0.0, (*xb)(k));
        // The dropped dependent rows must hold as well.
        if (equality.rows() == 0 || (equality * q - rhs).cwiseAbs().maxCoeff() <= 1e-9 * scale) {
          const double v = objective.dot(q);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
    }
    int k = r - 1;
    while (k >= 0 && pick[static_cast<std::size_t>(k)] == n - r + k) --k;
    if (k < 0) break;
    ++pick[static_cast<std::size_t>(k)];
    for (int t = k + 1; t < r; ++t) pick[static_cast<std::size_t>(t)] = pick[static_cast<std::size_t>(t - 1)] + 1;
  }
  if (lo > hi) throw infeasible("extremal scan: no basic feasible solution");
  return {lo, hi};
}

}  // namespace polybound
