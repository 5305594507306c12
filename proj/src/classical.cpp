#include "polybound/classical.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "polybound/lp.hpp"
#include "polybound/oracle.hpp"

namespace polybound {

namespace {

int bit_of(int sign) { return sign > 0 ? 0 : 1; }

void check_probability(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw invalid_input(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

int DeterministicStrategy::index() const {
  return 8 * bit_of(signs[0]) + 4 * bit_of(signs[1]) + 2 * bit_of(signs[2]) + bit_of(signs[3]);
}

Behavior DeterministicStrategy::behavior() const {
  Behavior::Array p{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) p[bit_of(alice(x))][bit_of(bob(y))][x][y] = 1.0;
  return Behavior(p);
}

CorrelationTable DeterministicStrategy::correlations() const {
  return CorrelationTable(static_cast<double>(alice(0) * bob(0)), static_cast<double>(alice(0) * bob(1)),
                          static_cast<double>(alice(1) * bob(0)), static_cast<double>(alice(1) * bob(1)));
}

const std::array<DeterministicStrategy, 16>& enumerate_strategies() {
  static const std::array<DeterministicStrategy, 16> all = [] {
    std::array<DeterministicStrategy, 16> out{};
    for (int k = 0; k < 16; ++k)
      for (int v = 0; v < 4; ++v) out[static_cast<std::size_t>(k)].signs[static_cast<std::size_t>(v)] = sign_of((k >> (3 - v)) & 1);
    return out;
  }();
  return all;
}

FacetValue most_violated_facet(const CorrelationTable& c) {
  FacetValue best{0, -1e300};
  const auto& variants = chsh_variants();
  for (int k = 0; k < 8; ++k) {
    const double v = variants[static_cast<std::size_t>(k)](c);
    if (v > best.value) best = {k, v};
  }
  return best;
}

MembershipCertificate local_membership(const Behavior& b, const Tolerances& tol) {
  const auto& strategies = enumerate_strategies();
  Eigen::MatrixXd a(16, 16);
  Eigen::VectorXd rhs(16);
  for (int s = 0; s < 16; ++s) {
    const Behavior d = strategies[static_cast<std::size_t>(s)].behavior();
    for (int row = 0; row < 16; ++row) {
      const int ai = row >> 3, bi = (row >> 2) & 1, x = (row >> 1) & 1, y = row & 1;
      a(row, s) = d(ai, bi, x, y);
      rhs(row) = b(ai, bi, x, y);
    }
  }
  const auto lp = lp_feasibility(a, rhs, tol);

  MembershipCertificate cert;
  cert.facet = most_violated_facet(behavior_to_correlations(b));
  cert.lp_iterations = lp.iterations;
  if (lp.status == LpStatus::optimal) {
    cert.member = true;
    for (int s = 0; s < 16; ++s) cert.weights[static_cast<std::size_t>(s)] = std::max(0.0, lp.solution(s));
    cert.residual = (a * lp.solution - rhs).cwiseAbs().maxCoeff();
  }
  return cert;
}

FineCheck fine_check(const Behavior& b, const Tolerances& tol) {
  if (!b.no_signaling())
    throw invalid_input("fine_check requires a no-signaling behavior (marginal drift " + std::to_string(b.signaling()) + ")");

  // Atoms are bit patterns of (A0, A1, B0, B1); one constraint per p(a, b | x, y).
  std::vector<MomentConstraint> constraints;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi)
          constraints.push_back({[=](std::span<const int> atom) {
                                   return (atom[static_cast<std::size_t>(x)] == ai &&
                                           atom[static_cast<std::size_t>(2 + y)] == bi)
                                              ? 1.0
                                              : 0.0;
                                 },
                                 b(ai, bi, x, y)});

  FineCheck out;
  out.joint_exists = oracle_joint_feasibility(constraints, AtomGrid::binary(4), tol);
  out.max_chsh = most_violated_facet(behavior_to_correlations(b)).value;
  out.all_chsh_hold = out.max_chsh <= 2.0 + tol.facet;
  return out;
}

BooleBellCheck boole_bell_check(const CorrelationTriple& t) {
  const double slack = (1.0 - t.bc) - std::abs(t.ab - t.ac);
  return {slack >= -1e-12, slack};
}

bool triple_feasibility(const CorrelationTriple& t, const Tolerances& tol) {
  auto product = [](int i, int j) {
    return [=](std::span<const int> atom) {
      return static_cast<double>(sign_of(atom[static_cast<std::size_t>(i)]) * sign_of(atom[static_cast<std::size_t>(j)]));
    };
  };
  const std::array<MomentConstraint, 3> constraints{{{product(0, 1), t.ab}, {product(0, 2), t.ac}, {product(1, 2), t.bc}}};
  return oracle_joint_feasibility(constraints, AtomGrid::binary(3), tol);
}

Interval frechet_bounds(double u, double v) {
  check_probability(u, "frechet: u");
  check_probability(v, "frechet: v");
  const double hi = std::min(u, v);
  return {std::min(std::max(u + v - 1.0, 0.0), hi), hi};
}

BinaryJoint comonotone_coupling(double u, double v) {
  check_probability(u, "coupling: u");
  check_probability(v, "coupling: v");
  // Lengths of the U-intervals on which (A, B) takes each value.
  const double both = std::min(u, v);
  BinaryJoint p{};
  p[1][1] = both;
  p[1][0] = u - both;
  p[0][1] = v - both;
  p[0][0] = 1.0 - std::max(u, v);
  return p;
}

BinaryJoint countermonotone_coupling(double u, double v) {
  check_probability(u, "coupling: u");
  check_probability(v, "coupling: v");
  // A = 1 on [0, u], B = 1 on [1 - v, 1].
  const double both = std::max(0.0, u - (1.0 - v));
  const double neither = std::max(0.0, (1.0 - v) - u);
  BinaryJoint p{};
  p[1][1] = both;
  p[1][0] = u - both;
  p[0][1] = v - both;
  p[0][0] = neither;
  return p;
}

}  // namespace polybound
