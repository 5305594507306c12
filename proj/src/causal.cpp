#include "polybound/causal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "polybound/lp.hpp"

namespace polybound {

const char* to_string(IvVariant v) {
  switch (v) {
    case IvVariant::standard: return "standard";
    case IvVariant::literal: return "paper-literal";
  }
  return "unknown";
}

InstrumentalCheck instrumental_inequality(const ObservedIVTable& t, IvVariant variant) {
  double value = 0.0;
  if (variant == IvVariant::standard) {
    for (int x = 0; x < 2; ++x) {
      double s = 0.0;
      for (int y = 0; y < 2; ++y) s += std::max(t(y, x, 0), t(y, x, 1));
      value = std::max(value, s);
    }
  } else {
    for (int z = 0; z < 2; ++z) {
      double s = 0.0;
      for (int y = 0; y < 2; ++y) s += std::max(t(y, 0, z), t(y, 1, z));
      value = std::max(value, s);
    }
  }
  return {value <= 1.0 + 1e-12, value, variant};
}

namespace {

// Response functions: index 2 f(0) + f(1).
int respond(int type, int input) { return input == 0 ? (type >> 1) & 1 : type & 1; }

}  // namespace

Eigen::MatrixXd response_constraint_matrix() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(8, 16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int z = 0; z < 2; ++z) {
        const int x = respond(i, z);
        const int y = respond(j, x);
        a(4 * z + 2 * x + y, 4 * i + j) = 1.0;
      }
  return a;
}

Eigen::VectorXd observed_vector(const ObservedIVTable& t) {
  Eigen::VectorXd p(8);
  for (int z = 0; z < 2; ++z)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) p(4 * z + 2 * x + y) = t(y, x, z);
  return p;
}

Eigen::VectorXd ace_coefficients() {
  Eigen::VectorXd c(16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c(4 * i + j) = respond(j, 1) - respond(j, 0);
  return c;
}

ObservedIVTable iv_table_from(const ResponseTypeDist& q) {
  const Eigen::Map<const Eigen::VectorXd> qv(q.data().data(), 16);
  const Eigen::VectorXd p = response_constraint_matrix() * qv;
  ObservedIVTable::Array arr{};
  for (int z = 0; z < 2; ++z)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) arr[y][x][z] = p(4 * z + 2 * x + y);
  Tolerances tol;
  tol.normalization = 1e-10;
  return ObservedIVTable(arr, tol);
}

double ace_of(const ResponseTypeDist& q) {
  const Eigen::Map<const Eigen::VectorXd> qv(q.data().data(), 16);
  return ace_coefficients().dot(qv);
}

AceBounds ace_bounds_detail(const ObservedIVTable& t, const Tolerances& tol) {
  const Eigen::MatrixXd a = response_constraint_matrix();
  const Eigen::VectorXd p = observed_vector(t);
  const Eigen::VectorXd c = ace_coefficients();

  const auto lo = lp_solve({c, a, p, Sense::minimize}, tol);
  if (lo.status == LpStatus::infeasible)
    throw infeasible("observed table is incompatible with every response-type distribution (IV model violated)");
  const auto hi = lp_solve({c, a, p, Sense::maximize}, tol);
  if (lo.status != LpStatus::optimal || hi.status != LpStatus::optimal)
    throw solver_failure("ace linear program did not reach an optimum");

  AceBounds out;
  out.ace = Interval(std::max(-1.0, lo.value), std::min(1.0, hi.value), 1e-9);
  out.lp_iterations = lo.iterations + hi.iterations;
  out.max_residual = std::max(lo.max_residual, hi.max_residual);
  return out;
}

Interval ace_bounds(const ObservedIVTable& t, const Tolerances& tol) { return ace_bounds_detail(t, tol).ace; }

namespace {

void check_unit(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw invalid_input(std::string(what) + " must lie in [0, 1]");
}

void check_model(const StructuralIvModel& m) {
  const auto k = m.confounder.size();
  if (k == 0 || m.treatment.size() != k || m.outcome.size() != k)
    throw invalid_input("structural model: confounder, treatment and outcome must have equal non-zero length");
  double sum = 0.0;
  for (std::size_t u = 0; u < k; ++u) {
    check_unit(m.confounder[u], "structural model: P(U)");
    sum += m.confounder[u];
    for (int v = 0; v < 2; ++v) {
      check_unit(m.treatment[u][static_cast<std::size_t>(v)], "structural model: P(X | Z, U)");
      check_unit(m.outcome[u][static_cast<std::size_t>(v)], "structural model: P(Y | X, U)");
    }
  }
  if (std::abs(sum - 1.0) > 1e-9) throw invalid_input("structural model: P(U) must sum to one");
}

}  // namespace

ObservedIVTable observe(const StructuralIvModel& m) {
  check_model(m);
  ObservedIVTable::Array p{};
  for (std::size_t u = 0; u < m.confounder.size(); ++u)
    for (int z = 0; z < 2; ++z)
      for (int x = 0; x < 2; ++x) {
        const double px = x == 1 ? m.treatment[u][static_cast<std::size_t>(z)] : 1.0 - m.treatment[u][static_cast<std::size_t>(z)];
        const double py1 = m.outcome[u][static_cast<std::size_t>(x)];
        p[1][x][z] += m.confounder[u] * px * py1;
        p[0][x][z] += m.confounder[u] * px * (1.0 - py1);
      }
  Tolerances tol;
  tol.normalization = 1e-9;
  return ObservedIVTable(p, tol);
}

double true_ace(const StructuralIvModel& m) {
  check_model(m);
  double ace = 0.0;
  for (std::size_t u = 0; u < m.confounder.size(); ++u) ace += m.confounder[u] * (m.outcome[u][1] - m.outcome[u][0]);
  return ace;
}

Interval manski_bounds(double e1, double e0, double px1) {
  check_unit(e1, "manski: E[Y | X=1]");
  check_unit(e0, "manski: E[Y | X=0]");
  check_unit(px1, "manski: P(X=1)");
  const double px0 = 1.0 - px1;
  const double lower = e1 * px1 + 0.0 * px0 - (e0 * px0 + 1.0 * px1);
  const double upper = e1 * px1 + 1.0 * px0 - (e0 * px0 + 0.0 * px1);
  return {lower, upper};
}

Interval manski_iv_bounds(const ObservedIVTable& t) {
  double lo = -1.0;
  double hi = 1.0;
  for (int z = 0; z < 2; ++z) {
    // Same formula in joint form, which stays defined when an arm has no treated units.
    const double px1 = t.treatment_given(1, z);
    lo = std::max(lo, t(1, 1, z) - t(1, 0, z) - px1);
    hi = std::min(hi, t(1, 1, z) + (1.0 - px1) - t(1, 0, z));
  }
  if (lo > hi + 1e-12) throw infeasible("instrument arms admit no common average treatment effect");
  return {lo, std::max(lo, hi)};
}

void validate(const ExperimentalData& e) {
  check_unit(e.p_yx, "experimental P(y_x)");
  check_unit(e.p_yxp, "experimental P(y_x')");
}

void validate(const ObservationalData& o, const Tolerances& tol) {
  double sum = 0.0;
  for (const auto& row : o.joint)
    for (double v : row) {
      check_unit(v, "observational P(x, y)");
      sum += v;
    }
  if (std::abs(sum - 1.0) > tol.normalization) throw invalid_input("observational P(x, y) must sum to one");
}

const char* to_string(PnsVariant v) {
  switch (v) {
    case PnsVariant::standard: return "standard";
    case PnsVariant::literal: return "paper-literal";
  }
  return "unknown";
}

Interval pns_bounds(const ExperimentalData& e, const ObservationalData& o, PnsVariant variant) {
  validate(e);
  validate(o);
  const double py = o.p_y();
  const double lower = std::max({0.0, e.p_yx - e.p_yxp, py - e.p_yxp, e.p_yx - py});
  double upper = std::min({e.p_yx, 1.0 - e.p_yxp, o(1, 1) + o(0, 0)});
  if (variant == PnsVariant::standard) upper = std::min(upper, e.p_yx - e.p_yxp + o(1, 0) + o(0, 1));
  if (lower > upper + 1e-12) {
    std::ostringstream os;
    os << "experimental and observational data are inconsistent: PNS lower bound " << lower << " exceeds upper bound "
       << upper;
    throw infeasible(os.str());
  }
  return {lower, std::max(lower, upper)};
}

namespace {

// Atoms (Y_x', Y_x, X) as bits, index 4 y0 + 2 y1 + x.
struct CounterfactualLp {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

CounterfactualLp counterfactual_system(const ExperimentalData& e, const ObservationalData& o) {
  CounterfactualLp lp{Eigen::MatrixXd::Zero(7, 8), Eigen::VectorXd(7)};
  for (int k = 0; k < 8; ++k) {
    const int y0 = (k >> 2) & 1, y1 = (k >> 1) & 1, x = k & 1;
    lp.a(0, k) = 1.0;
    lp.a(1, k) = y1;
    lp.a(2, k) = y0;
    // Consistency: the observed Y equals the potential outcome at the realized X.
    const int y = x == 1 ? y1 : y0;
    lp.a(3 + 2 * x + y, k) = 1.0;
  }
  lp.b << 1.0, e.p_yx, e.p_yxp, o(0, 0), o(0, 1), o(1, 0), o(1, 1);
  return lp;
}

Interval lp_range(const CounterfactualLp& sys, const Eigen::VectorXd& objective, const Tolerances& tol) {
  const auto lo = lp_solve({objective, sys.a, sys.b, Sense::minimize}, tol);
  if (lo.status == LpStatus::infeasible)
    throw infeasible("experimental and observational data admit no common counterfactual distribution");
  const auto hi = lp_solve({objective, sys.a, sys.b, Sense::maximize}, tol);
  if (lo.status != LpStatus::optimal || hi.status != LpStatus::optimal)
    throw solver_failure("counterfactual linear program did not reach an optimum");
  return {lo.value, std::max(lo.value, hi.value)};
}

Eigen::VectorXd atom_indicator(const std::function<bool(int y0, int y1, int x)>& pred) {
  Eigen::VectorXd c(8);
  for (int k = 0; k < 8; ++k) c(k) = pred((k >> 2) & 1, (k >> 1) & 1, k & 1) ? 1.0 : 0.0;
  return c;
}

}  // namespace

Interval pns_lp_bounds(const ExperimentalData& e, const ObservationalData& o, const Tolerances& tol) {
  validate(e);
  validate(o);
  return lp_range(counterfactual_system(e, o), atom_indicator([](int y0, int y1, int) { return y1 == 1 && y0 == 0; }), tol);
}

CausationBounds pn_ps_point_bounds(const ExperimentalData& e, const ObservationalData& o, const Tolerances& tol) {
  validate(e);
  validate(o);
  const double treated_recovered = o(1, 1);
  const double untreated_unrecovered = o(0, 0);
  if (treated_recovered <= 0.0) throw invalid_input("PN conditions on P(X=1, Y=1) = 0");
  if (untreated_unrecovered <= 0.0) throw invalid_input("PS conditions on P(X=0, Y=0) = 0");

  const auto sys = counterfactual_system(e, o);
  const Interval pn_joint = lp_range(sys, atom_indicator([](int y0, int y1, int x) { return x == 1 && y1 == 1 && y0 == 0; }), tol);
  const Interval ps_joint = lp_range(sys, atom_indicator([](int y0, int y1, int x) { return x == 0 && y0 == 0 && y1 == 1; }), tol);

  auto ratio = [](const Interval& i, double d) {
    return Interval(std::clamp(i.lo() / d, 0.0, 1.0), std::clamp(i.hi() / d, 0.0, 1.0), 1e-9);
  };
  return {ratio(pn_joint, treated_recovered), ratio(ps_joint, untreated_unrecovered)};
}

}  // namespace polybound
