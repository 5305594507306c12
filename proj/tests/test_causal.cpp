#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"
#include "polybound/causal.hpp"
#include "polybound/oracle.hpp"
#include "support/generators.hpp"

using namespace polybound;
using polybound::testing::Rng;

namespace {

ObservedIVTable perfect_compliance(double p1, double p0) {
  ObservedIVTable::Array a{};
  a[1][1][1] = p1;
  a[0][1][1] = 1 - p1;
  a[1][0][0] = p0;
  a[0][0][0] = 1 - p0;
  return ObservedIVTable(a);
}

ObservedIVTable table_from_bits(int y0, int x0, int y1, int x1) {
  ObservedIVTable::Array a{};
  a[y0][x0][0] = 1.0;
  a[y1][x1][1] = 1.0;
  return ObservedIVTable(a);
}

// Random walk inside {q >= 0 : A q = p}, started at a feasible q.
std::vector<double> hit_and_run_aces(const ResponseTypeDist& start, Rng& rng, int steps) {
  const Eigen::MatrixXd a = response_constraint_matrix();
  const Eigen::MatrixXd null = Eigen::FullPivLU<Eigen::MatrixXd>(a).kernel();
  const Eigen::VectorXd c = ace_coefficients();
  Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(start.data().data(), 16);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> out;
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXd r(null.cols());
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = n(rng);
    const Eigen::VectorXd d = null * r;
    double lo = -1e300, hi = 1e300;
    for (int i = 0; i < 16; ++i) {
      if (d(i) > 1e-14) lo = std::max(lo, -q(i) / d(i));
      if (d(i) < -1e-14) hi = std::min(hi, -q(i) / d(i));
    }
    if (!(lo <= hi)) continue;
    q += (lo + (hi - lo) * polybound::testing::uniform01(rng)) * d;
    q = q.cwiseMax(0.0);
    out.push_back(c.dot(q));
  }
  return out;
}

}  // namespace

TEST_CASE("instrumental inequality examples") {
  const auto perfect = table_from_bits(0, 0, 1, 1);
  const auto std_check = instrumental_inequality(perfect);
  CHECK(std_check.holds);
  CHECK(std_check.value == doctest::Approx(1.0));
  CHECK(std_check.variant == IvVariant::standard);

  const auto violating = table_from_bits(1, 1, 0, 1);
  const auto v = instrumental_inequality(violating);
  CHECK_FALSE(v.holds);
  CHECK(v.value == doctest::Approx(2.0));
  CHECK(instrumental_inequality(violating, IvVariant::literal).holds);
  CHECK(std::string(to_string(IvVariant::literal)) == "paper-literal");
}

TEST_CASE("literal variant never fails") {
  Rng rng(9);
  for (int k = 0; k < 500; ++k) {
    ObservedIVTable::Array a{};
    for (int z = 0; z < 2; ++z) {
      const auto w = polybound::testing::dirichlet<4>(rng);
      for (int i = 0; i < 4; ++i) a[i >> 1][i & 1][z] = w[static_cast<std::size_t>(i)];
    }
    const ObservedIVTable t(a, Tolerances{.normalization = 1e-10});
    CHECK(instrumental_inequality(t, IvVariant::literal).value <= 1.0 + 1e-12);
  }
}

TEST_CASE("forward simulated tables satisfy the IV constraints") {
  Rng rng(10);
  for (int k = 0; k < 500; ++k) {
    const auto m = polybound::testing::random_structural_model(rng);
    const auto t = observe(m);
    CHECK(instrumental_inequality(t).holds);
    const auto bounds = ace_bounds(t);
    CHECK(bounds.width() < 1.0);
    CHECK(bounds.contains(true_ace(m), 1e-9));
  }
}

TEST_CASE("ace bounds examples") {
  const auto point = ace_bounds(perfect_compliance(0.7, 0.4));
  CHECK(point.lo() == doctest::Approx(0.3));
  CHECK(point.hi() == doctest::Approx(0.3));

  // Nobody treated and nobody recovers: Y(0) = 0 is identified, Y(1) is free.
  const auto degenerate = ace_bounds(table_from_bits(0, 0, 0, 0));
  const Interval oracle = oracle_extremal_scan(ace_coefficients(), response_constraint_matrix(),
                                               observed_vector(table_from_bits(0, 0, 0, 0)));
  CHECK(degenerate.lo() == doctest::Approx(oracle.lo()));
  CHECK(degenerate.hi() == doctest::Approx(oracle.hi()));
  CHECK(degenerate.lo() == doctest::Approx(0.0));
  CHECK(degenerate.hi() == doctest::Approx(1.0));

  const Interval scan = oracle_extremal_scan(ace_coefficients(), response_constraint_matrix(),
                                             observed_vector(perfect_compliance(0.7, 0.4)));
  CHECK(scan.lo() == doctest::Approx(0.3));
  CHECK(scan.hi() == doctest::Approx(0.3));
}

TEST_CASE("infeasible tables are rejected") {
  try {
    ace_bounds(table_from_bits(1, 1, 0, 1));
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::infeasible);
  }
}

TEST_CASE("balke-pearl bounds agree with basis enumeration and contain sampled effects") {
  Rng rng(12);
  const Eigen::MatrixXd a = response_constraint_matrix();
  for (int k = 0; k < 60; ++k) {
    const auto q = polybound::testing::random_response_types(rng);
    const auto t = iv_table_from(q);
    const auto detail = ace_bounds_detail(t);
    const Interval oracle = oracle_extremal_scan(ace_coefficients(), a, observed_vector(t));
    CHECK(std::abs(detail.ace.lo() - oracle.lo()) <= 1e-9);
    CHECK(std::abs(detail.ace.hi() - oracle.hi()) <= 1e-9);
    CHECK(detail.max_residual <= 1e-9);
    CHECK(detail.ace.contains(ace_of(q), 1e-9));
    for (double ace : hit_and_run_aces(q, rng, 50)) CHECK(detail.ace.contains(ace, 1e-9));
    CHECK(manski_iv_bounds(t).contains(detail.ace, 1e-9));
    CHECK(detail.ace.lo() >= -1.0);
    CHECK(detail.ace.hi() <= 1.0);
  }
}

TEST_CASE("response table matches forward simulation of each type") {
  for (int k = 0; k < 16; ++k) {
    std::array<double, 16> w{};
    w[static_cast<std::size_t>(k)] = 1.0;
    const auto t = iv_table_from(ResponseTypeDist(w));
    const int i = k / 4, j = k % 4;
    for (int z = 0; z < 2; ++z) {
      const int x = z == 0 ? (i >> 1) & 1 : i & 1;
      const int y = x == 0 ? (j >> 1) & 1 : j & 1;
      CHECK(t(y, x, z) == 1.0);
    }
  }
}

TEST_CASE("manski bounds") {
  const auto r = manski_bounds(0.7, 0.4, 0.5);
  CHECK(r.lo() == doctest::Approx(-0.35));
  CHECK(r.hi() == doctest::Approx(0.65));
  const auto full = manski_bounds(1, 0, 1);
  CHECK(full.lo() == doctest::Approx(0.0));
  CHECK(full.hi() == doctest::Approx(1.0));
  CHECK_THROWS_AS(manski_bounds(1.2, 0, 0.5), Error);
  CHECK_THROWS_AS(manski_bounds(0.5, 0, -0.5), Error);

  Rng rng(14);
  for (int k = 0; k < 1000; ++k) {
    using polybound::testing::uniform01;
    const auto b = manski_bounds(uniform01(rng), uniform01(rng), uniform01(rng));
    CHECK(std::abs(b.width() - 1.0) <= 1e-12);
    CHECK(b.contains(0.0));
  }
}

TEST_CASE("pns bounds example") {
  const ExperimentalData e{0.7, 0.3};
  ObservationalData o;
  o.joint[1][1] = 0.4;
  o.joint[1][0] = 0.1;
  o.joint[0][1] = 0.2;
  o.joint[0][0] = 0.3;
  const auto r = pns_bounds(e, o);
  CHECK(r.lo() == doctest::Approx(0.4));
  CHECK(r.hi() == doctest::Approx(0.7));
  const auto lp = pns_lp_bounds(e, o);
  CHECK(lp.lo() == doctest::Approx(0.4));
  CHECK(lp.hi() == doctest::Approx(0.7));
}

TEST_CASE("pns with equal arms") {
  Rng rng(15);
  for (int k = 0; k < 50; ++k) {
    const double p = polybound::testing::uniform01(rng);
    // No causal effect at all: Y_x = Y_x' for every unit.
    const double px = polybound::testing::uniform01(rng);
    ObservationalData o;
    o.joint[1][1] = px * p;
    o.joint[1][0] = px * (1 - p);
    o.joint[0][1] = (1 - px) * p;
    o.joint[0][0] = (1 - px) * (1 - p);
    const auto r = pns_bounds({p, p}, o);
    CHECK(r.lo() >= 0.0);
    CHECK(r.hi() <= p + 1e-12);
  }
}

TEST_CASE("pns closed form is sharp") {
  Rng rng(16);
  int literal_loose = 0;
  for (int k = 0; k < 500; ++k) {
    const auto s = polybound::testing::random_counterfactual(rng);
    const auto formula = pns_bounds(s.experimental, s.observational);
    const auto lp = pns_lp_bounds(s.experimental, s.observational);
    CHECK(std::abs(formula.lo() - lp.lo()) <= 1e-9);
    CHECK(std::abs(formula.hi() - lp.hi()) <= 1e-9);
    const auto literal = pns_bounds(s.experimental, s.observational, PnsVariant::literal);
    CHECK(literal.contains(lp, 1e-9));
    if (literal.hi() > lp.hi() + 1e-9) ++literal_loose;
  }
  CHECK(literal_loose > 0);
}

TEST_CASE("three-term upper bound can be loose") {
  // Treated units recover, untreated do not; every treated unit would also
  // recover untreated, so only the untreated can be helped.
  const ExperimentalData e{0.6, 0.5};
  ObservationalData o;
  o.joint[1][1] = 0.5;
  o.joint[0][0] = 0.5;
  CHECK(pns_bounds(e, o, PnsVariant::literal).hi() == doctest::Approx(0.5));
  CHECK(pns_bounds(e, o).lo() == doctest::Approx(0.1));
  CHECK(pns_bounds(e, o).hi() == doctest::Approx(0.1));
  CHECK(pns_lp_bounds(e, o).hi() == doctest::Approx(0.1));
}

TEST_CASE("pns inconsistency is reported") {
  ObservationalData o;
  o.joint[1][1] = 0.5;
  o.joint[0][0] = 0.5;
  try {
    pns_bounds({0.1, 0.9}, o);
    FAIL("expected inconsistency");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::infeasible);
  }
  CHECK_THROWS_AS(pns_lp_bounds({0.1, 0.9}, o), Error);
  ObservationalData bad;
  bad.joint[1][1] = 0.7;
  CHECK_THROWS_AS(pns_bounds({0.5, 0.5}, bad), Error);
}

TEST_CASE("pn and ps examples") {
  ObservationalData o;
  o.joint[1][1] = 0.5;
  o.joint[0][0] = 0.5;
  const auto det = pn_ps_point_bounds({1.0, 0.0}, o);
  CHECK(det.pn.lo() == doctest::Approx(1.0));
  CHECK(det.pn.hi() == doctest::Approx(1.0));
  CHECK(det.ps.lo() == doctest::Approx(1.0));

  ObservationalData null;
  for (auto& row : null.joint) row = {0.25, 0.25};
  const auto r = pn_ps_point_bounds({0.5, 0.5}, null);
  CHECK(r.pn.contains(0.0, 1e-12));
  CHECK(r.ps.contains(0.0, 1e-12));

  ObservationalData zero;
  zero.joint[1][0] = 0.5;
  zero.joint[0][1] = 0.5;
  CHECK_THROWS_AS(pn_ps_point_bounds({0.5, 0.5}, zero), Error);
}

TEST_CASE("pn and ps match the closed forms under both data sources") {
  Rng rng(17);
  for (int k = 0; k < 300; ++k) {
    const auto s = polybound::testing::random_counterfactual(rng);
    const auto& e = s.experimental;
    const auto& o = s.observational;
    if (o(1, 1) < 1e-3 || o(0, 0) < 1e-3) continue;
    const auto r = pn_ps_point_bounds(e, o);
    CHECK(r.pn.lo() <= r.pn.hi());
    CHECK(r.ps.lo() <= r.ps.hi());
    const double py = o.p_y();
    const double pn_lo = std::max(0.0, (py - e.p_yxp) / o(1, 1));
    const double pn_hi = std::min(1.0, ((1 - e.p_yxp) - o(0, 0)) / o(1, 1));
    const double ps_lo = std::max(0.0, (e.p_yx - py) / o(0, 0));
    const double ps_hi = std::min(1.0, (e.p_yx - o(1, 1)) / o(0, 0));
    CHECK(std::abs(r.pn.lo() - pn_lo) <= 1e-7);
    CHECK(std::abs(r.pn.hi() - pn_hi) <= 1e-7);
    CHECK(std::abs(r.ps.lo() - ps_lo) <= 1e-7);
    CHECK(std::abs(r.ps.hi() - ps_hi) <= 1e-7);
  }
}

TEST_CASE("counterfactual polytope is feasible for forward-built data") {
  Rng rng(18);
  for (int k = 0; k < 100; ++k) {
    const auto s = polybound::testing::random_counterfactual(rng);
    std::vector<MomentConstraint> c;
    c.push_back({[](std::span<const int> a) { return double(a[1]); }, s.experimental.p_yx});
    c.push_back({[](std::span<const int> a) { return double(a[0]); }, s.experimental.p_yxp});
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        c.push_back({[=](std::span<const int> a) { return double(a[2] == x && (x ? a[1] : a[0]) == y); },
                     s.observational(x, y)});
    CHECK(oracle_joint_feasibility(c, AtomGrid::binary(3)));
  }
}
