#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polybound/causal.hpp"
#include "polybound/classical.hpp"
#include "polybound/core.hpp"
#include "polybound/sdp.hpp"

namespace polybound {

/// Density matrix on Alice (x) Bob, basis |ab> with index 2a + b.
class TwoQubitState {
 public:
  explicit TwoQubitState(const Eigen::Matrix4cd& rho);

  /// |psi><psi| for a (not necessarily normalized) nonzero vector.
  static TwoQubitState pure(const Eigen::Vector4cd& psi);
  /// (|01> - |10>) / sqrt(2)
  static TwoQubitState singlet();
  static TwoQubitState product(int alice_bit, int bob_bit);
  static TwoQubitState maximally_mixed();

  const Eigen::Matrix4cd& rho() const noexcept { return rho_; }

 private:
  Eigen::Matrix4cd rho_;
};

/// Qubit observable with eigenvalues +1 and -1.
class DichotomicObservable {
 public:
  explicit DichotomicObservable(const Eigen::Matrix2cd& o);

  /// cos(theta) Z + sin(theta) X
  static DichotomicObservable bloch(double theta);
  /// n . (X, Y, Z) for a nonzero direction n (normalized internally).
  static DichotomicObservable direction(double nx, double ny, double nz);

  const Eigen::Matrix2cd& matrix() const noexcept { return o_; }
  /// Eigenprojector for outcome bit 0 (eigenvalue +1) or 1 (eigenvalue -1): (I +- O) / 2.
  Eigen::Matrix2cd projector(int outcome) const;

 private:
  Eigen::Matrix2cd o_;
};

struct Measurements {
  DichotomicObservable a0, a1, b0, b1;
};

/// p(a, b | x, y) = tr(rho (P_a^{A_x} (x) P_b^{B_y})).
Behavior quantum_behavior(const TwoQubitState& rho, const Measurements& m);

/// Singlet with Alice at angles {0, pi/2} and Bob at {5pi/4, 3pi/4}:
/// correlations (r, r, r, -r) with r = 1/sqrt(2).
Behavior tsirelson_behavior();

Eigen::Matrix2cd commutator(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b);
Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b);
/// A0 (x) (B0 + B1) + A1 (x) (B0 - B1)
Eigen::Matrix4cd chsh_operator(const Measurements& m);

struct NoncommutativityWitness {
  double comm_a = 0.0;           // ||[A0, A1]||
  double comm_b = 0.0;           // ||[B0, B1]||
  double achievable_chsh = 0.0;  // largest eigenvalue of the CHSH operator
};

NoncommutativityWitness noncommutativity_witness(const Measurements& m);

// ---------------------------------------------------------------------------
// Moment-matrix relaxations

enum class NpaLevel {
  L1,    // words {1, A0, A1, B0, B1}
  L1AB,  // plus the four products A_x B_y
};

const char* to_string(NpaLevel level);

/// Operator word over letters 0 = A0, 1 = A1, 2 = B0, 3 = B1.
using Word = std::vector<int>;

/// Reduced form: Alice letters before Bob letters (they commute), then
/// squares cancelled (every letter is a +-1 observable).
Word reduce_word(const Word& w);
std::string word_label(const Word& w);
std::vector<Word> npa_words(NpaLevel level);

/// The SDP instance: unit diagonal, equalities between entries whose words
/// agree up to reduction and adjoint, objective sum_xy c_xy Gamma(A_x, B_y).
SdpProblem npa_problem(NpaLevel level, const CorrelationFunctional& f);

struct NpaResult {
  double bound = 0.0;
  NpaLevel level = NpaLevel::L1;
  SdpResult sdp;
  std::size_t equality_constraints = 0;
};

NpaResult npa_solve(NpaLevel level, const CorrelationFunctional& f, const Tolerances& tol = default_tolerances());
double npa_bound(NpaLevel level, const CorrelationFunctional& f, const Tolerances& tol = default_tolerances());

/// max of the functional over the local polytope (LP over strategy weights).
double classical_bound(const CorrelationFunctional& f, const Tolerances& tol = default_tolerances());
/// max of the functional over no-signaling behaviors (LP over p(a, b | x, y)).
double nosignaling_bound(const CorrelationFunctional& f, const Tolerances& tol = default_tolerances());

// ---------------------------------------------------------------------------
// Local / quantum / no-signaling comparison

struct GapReport {
  CorrelationFunctional functional;
  NpaLevel level = NpaLevel::L1;
  double classical = 0.0;
  double quantum = 0.0;
  double nosignaling = 0.0;
  double gap = 0.0;  // quantum - classical
  int lp_iterations = 0;
  int sdp_iterations = 0;
  double sdp_gap = 0.0;
  double sdp_min_eigenvalue = 0.0;
};

GapReport quantum_gap_report(const CorrelationFunctional& f, NpaLevel level = NpaLevel::L1,
                             const Tolerances& tol = default_tolerances());

/// The behavior's most violated CHSH variant, evaluated on the three sets.
struct BehaviorGapReport {
  GapReport bounds;
  FacetValue facet;
  bool local_member = false;
};

BehaviorGapReport quantum_gap_report(const Behavior& b, NpaLevel level = NpaLevel::L1,
                                     const Tolerances& tol = default_tolerances());

/// For an instrumental-variable table: the classical layer is the Balke-Pearl
/// interval and the assumption-free layer the per-arm worst-case interval. A
/// moment-matrix construction for the IV graph is not implemented, so
/// `quantum` stays empty.
struct IvGapReport {
  Interval classical;
  Interval nosignaling;
  InstrumentalCheck instrumental;
  std::optional<double> quantum;
};

IvGapReport quantum_gap_report(const ObservedIVTable& t, const Tolerances& tol = default_tolerances());

/// Support values of the three nested sets in the (S, S') plane, where
/// S = CHSH (+,+,+,-) and S' = (+,-,+,+); direction theta.
struct CrossSectionSample {
  double theta = 0.0;
  double classical = 0.0;
  double quantum = 0.0;
  double nosignaling = 0.0;
};

std::vector<CrossSectionSample> polytope_cross_section(int samples, NpaLevel level = NpaLevel::L1,
                                                       const Tolerances& tol = default_tolerances());

}  // namespace polybound
