#pragma once

#include <array>

#include "polybound/core.hpp"

namespace polybound {

/// A deterministic local strategy: Alice answers a_x, Bob answers b_y (signs).
///
/// The same object is a causal response type. With bit(s) = 0 for s = +1 and
/// 1 for s = -1, Alice's pair is the Z -> X response and Bob's pair the X -> Y
/// response:
///
///   index = 8 bit(a0) + 4 bit(a1) + 2 bit(b0) + bit(b1) = 4 i + j
///
///   i = 2 x(z=0) + x(z=1):  0 never-taker, 1 complier, 2 defier, 3 always-taker
///   j = 2 y(x=0) + y(x=1):  0 never-recover, 1 helped, 2 hurt, 3 always-recover
///
/// so strategy k and response type q[k] of ResponseTypeDist coincide.
struct DeterministicStrategy {
  std::array<int, 4> signs{1, 1, 1, 1};  // a0, a1, b0, b1

  int alice(int x) const { return signs[static_cast<std::size_t>(x)]; }
  int bob(int y) const { return signs[static_cast<std::size_t>(2 + y)]; }
  int index() const;
  /// Response of X to Z (0..3) and of Y to X (0..3).
  int treatment_response() const { return index() / 4; }
  int outcome_response() const { return index() % 4; }

  Behavior behavior() const;
  CorrelationTable correlations() const;
};

/// All 16 strategies, (a0, a1, b0, b1) lexicographic with +1 before -1.
const std::array<DeterministicStrategy, 16>& enumerate_strategies();

struct FacetValue {
  int variant = 0;  // index into chsh_variants()
  double value = 0.0;
};

/// The CHSH variant with the largest value on these correlations.
FacetValue most_violated_facet(const CorrelationTable& c);

struct MembershipCertificate {
  bool member = false;
  std::array<double, 16> weights{};  // populated when member
  FacetValue facet;                  // most violated CHSH variant (always populated)
  double residual = 0.0;             // max |mixture - behavior| when member
  int lp_iterations = 0;
};

/// Decides whether b is a convex mixture of the 16 deterministic behaviors.
MembershipCertificate local_membership(const Behavior& b, const Tolerances& tol = default_tolerances());

struct FineCheck {
  bool joint_exists = false;
  bool all_chsh_hold = false;
  double max_chsh = 0.0;
  bool agree() const { return joint_exists == all_chsh_hold; }
};

/// Joint distribution over (A0, A1, B0, B1) versus the eight CHSH facets.
/// Rejects signaling behaviors.
FineCheck fine_check(const Behavior& b, const Tolerances& tol = default_tolerances());

struct BooleBellCheck {
  bool holds = false;
  double slack = 0.0;  // (1 - E[BC]) - |E[AB] - E[AC]|
};

BooleBellCheck boole_bell_check(const CorrelationTriple& t);

/// Whether some distribution on {-1, +1}^3 has the three pair correlations.
bool triple_feasibility(const CorrelationTriple& t, const Tolerances& tol = default_tolerances());

/// [W(u, v), M(u, v)] = [max(u + v - 1, 0), min(u, v)].
Interval frechet_bounds(double u, double v);

/// 2x2 joint p[i][j] = P(A = i, B = j) of A ~ Bernoulli(u), B ~ Bernoulli(v)
/// built from one uniform: A = 1{U <= u}, B = 1{U <= v} (comonotone) or
/// B = 1{U >= 1 - v} (countermonotone).
using BinaryJoint = std::array<std::array<double, 2>, 2>;
BinaryJoint comonotone_coupling(double u, double v);
BinaryJoint countermonotone_coupling(double u, double v);

}  // namespace polybound
