#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace polybound {

/// Machine-readable failure category. The CLI maps these onto exit codes.
enum class ErrorCode {
  invalid_input,  // schema or domain violation
  infeasible,     // data admits no compatible model
  solver,         // iteration limit or numerical breakdown
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline Error invalid_input(const std::string& what) { return {ErrorCode::invalid_input, what}; }
inline Error infeasible(const std::string& what) { return {ErrorCode::infeasible, what}; }
inline Error solver_failure(const std::string& what) { return {ErrorCode::solver, what}; }

const char* to_string(ErrorCode code);

/// Every numerical threshold used by the library. Defaults are the published
/// contract; the CLI can override individual fields.
struct Tolerances {
  double normalization = 1e-12;   // table construction
  double no_signaling = 1e-9;     // marginal independence flag
  double facet = 1e-9;            // CHSH facet violation
  double lp_feasibility = 1e-9;   // phase-1 optimum above this => infeasible
  double lp_pivot = 1e-11;        // smallest admissible pivot element
  double lp_reduced_cost = 1e-11; // optimality threshold on reduced costs
  double sdp_gap = 1e-6;          // reported duality gap must not exceed this
  double sdp_target = 1e-9;       // internal stopping threshold
  double interval = 1e-12;        // lo <= hi + interval
  int sdp_max_iterations = 200;
  int lp_iteration_factor = 50;   // pivot limit = factor * (m + n)
};

const Tolerances& default_tolerances();

/// Closed interval [lo, hi].
class Interval {
 public:
  Interval() = default;
  Interval(double lo, double hi, double tolerance = default_tolerances().interval);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double width() const noexcept { return hi_ - lo_; }
  bool contains(double v, double slack = 0.0) const noexcept {
    return v >= lo_ - slack && v <= hi_ + slack;
  }
  bool contains(const Interval& other, double slack = 0.0) const noexcept {
    return other.lo_ >= lo_ - slack && other.hi_ <= hi_ + slack;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// p(y, x | z) for binary instrument z, treatment x and outcome y.
class ObservedIVTable {
 public:
  using Array = std::array<std::array<std::array<double, 2>, 2>, 2>;  // [y][x][z]

  explicit ObservedIVTable(const Array& p, const Tolerances& tol = default_tolerances());

  double operator()(int y, int x, int z) const { return p_[y][x][z]; }
  const Array& data() const noexcept { return p_; }

  /// P(X = x | Z = z)
  double treatment_given(int x, int z) const { return p_[0][x][z] + p_[1][x][z]; }

 private:
  Array p_{};
};

/// p(a, b | x, y): Alice's outcome a for setting x, Bob's outcome b for setting y.
class Behavior {
 public:
  using Array = std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>;  // [a][b][x][y]

  explicit Behavior(const Array& p, const Tolerances& tol = default_tolerances());

  double operator()(int a, int b, int x, int y) const { return p_[a][b][x][y]; }
  const Array& data() const noexcept { return p_; }

  /// Largest deviation of a one-sided marginal across the remote setting.
  double signaling() const noexcept { return signaling_; }
  bool no_signaling() const noexcept { return no_signaling_; }

  double alice_marginal(int a, int x, int y) const { return p_[a][0][x][y] + p_[a][1][x][y]; }
  double bob_marginal(int b, int x, int y) const { return p_[0][b][x][y] + p_[1][b][x][y]; }

  static Behavior uniform();
  static Behavior pr_box();
  /// Mixture sum_k w_k * b_k; weights must be a probability vector.
  static Behavior mixture(const std::vector<Behavior>& parts, const std::vector<double>& weights);

 private:
  Array p_{};
  double signaling_ = 0.0;
  bool no_signaling_ = true;
};

/// E[A_x B_y] with the outcome map 0 -> +1, 1 -> -1.
struct CorrelationTable {
  std::array<std::array<double, 2>, 2> e{};

  CorrelationTable() = default;
  explicit CorrelationTable(const std::array<std::array<double, 2>, 2>& values);
  CorrelationTable(double e00, double e01, double e10, double e11)
      : CorrelationTable(std::array<std::array<double, 2>, 2>{{{e00, e01}, {e10, e11}}}) {}

  double operator()(int x, int y) const { return e[x][y]; }
};

struct CorrelationTriple {
  double ab = 0.0;
  double ac = 0.0;
  double bc = 0.0;

  CorrelationTriple() = default;
  CorrelationTriple(double ab, double ac, double bc);
};

/// Distribution over the 16 deterministic unit types, index 4 * i + j with
/// i the Z -> X response and j the X -> Y response (see classical.hpp).
class ResponseTypeDist {
 public:
  explicit ResponseTypeDist(const std::array<double, 16>& q, const Tolerances& tol = default_tolerances());
  double operator[](std::size_t k) const { return q_[k]; }
  const std::array<double, 16>& data() const noexcept { return q_; }

 private:
  std::array<double, 16> q_{};
};

/// Outcome bit to sign: 0 -> +1, 1 -> -1.
constexpr int sign_of(int bit) { return bit == 0 ? 1 : -1; }

CorrelationTable behavior_to_correlations(const Behavior& b);

double chsh_value(const CorrelationTable& c);

/// Coefficients of a correlation-type Bell functional sum_xy c[x][y] E[A_x B_y].
struct CorrelationFunctional {
  std::array<std::array<double, 2>, 2> c{};

  double operator()(const CorrelationTable& t) const;
  static CorrelationFunctional chsh() { return {{{{1.0, 1.0}, {1.0, -1.0}}}}; }
};

/// The eight CHSH sign variants: an odd number of minus signs. Variant 0 is
/// the standard (+,+,+,-) form.
const std::array<CorrelationFunctional, 8>& chsh_variants();

/// Rescales each conditional slice to sum to one. Negative entries are
/// rejected, not clipped.
Behavior::Array renormalize(Behavior::Array p);
ObservedIVTable::Array renormalize(ObservedIVTable::Array p);

}  // namespace polybound
