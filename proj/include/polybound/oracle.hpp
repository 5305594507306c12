#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polybound/core.hpp"

namespace polybound {

/// The atoms of a small discrete joint distribution, enumerated in mixed-radix
/// order with the first variable most significant. At most 32 atoms.
class AtomGrid {
 public:
  explicit AtomGrid(std::vector<int> cardinalities);
  static AtomGrid binary(int variables) { return AtomGrid(std::vector<int>(static_cast<std::size_t>(variables), 2)); }

  std::size_t size() const noexcept { return size_; }
  std::size_t variables() const noexcept { return card_.size(); }
  std::vector<int> atom(std::size_t index) const;

 private:
  std::vector<int> card_;
  std::size_t size_ = 1;
};

/// One linear moment constraint: sum_atoms coefficient(atom) * p(atom) = target.
struct MomentConstraint {
  std::function<double(std::span<const int>)> coefficient;
  double target = 0.0;
};

/// Searches for a probability vector on the grid meeting every constraint.
/// Normalization is implied. Returns the witness when one exists.
std::optional<Eigen::VectorXd> oracle_joint_distribution(std::span<const MomentConstraint> constraints,
                                                         const AtomGrid& grid,
                                                         const Tolerances& tol = default_tolerances());

bool oracle_joint_feasibility(std::span<const MomentConstraint> constraints, const AtomGrid& grid,
                              const Tolerances& tol = default_tolerances());

/// Range of a linear functional over an explicit vertex list (one vertex per column).
Interval oracle_extremal_scan(const Eigen::VectorXd& objective, const Eigen::MatrixXd& vertices);

/// Range of c'q over {q >= 0 : Aq = b} by enumerating every basis of A and
/// keeping the nonnegative basic solutions. Independent of the simplex code:
/// only LU factorizations are used.
///
/// Throws invalid_input when more than `max_bases` candidate bases would be
/// visited and infeasible when no basic feasible solution exists.
Interval oracle_extremal_scan(const Eigen::VectorXd& objective, const Eigen::MatrixXd& equality,
                              const Eigen::VectorXd& rhs, std::size_t max_bases = 1'000'000);

/// Binomial coefficient in double precision; used for the blow-up guard.
double binomial(int n, int k);

}  // namespace polybound
