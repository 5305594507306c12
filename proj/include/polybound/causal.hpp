#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "polybound/core.hpp"

namespace polybound {

// ---------------------------------------------------------------------------
// Instrumental inequality

enum class IvVariant {
  standard,  // max_x sum_y max_z p(y, x | z) <= 1
  literal,   // max_z sum_y max_x p(y, x | z) <= 1; holds for every table
};

const char* to_string(IvVariant v);

struct InstrumentalCheck {
  bool holds = true;
  double value = 0.0;
  IvVariant variant = IvVariant::standard;
};

InstrumentalCheck instrumental_inequality(const ObservedIVTable& t, IvVariant variant = IvVariant::standard);

// ---------------------------------------------------------------------------
// Balke-Pearl response-type linear program
//
// Rows of the constraint matrix are indexed 4 z + 2 x + y; columns follow the
// strategy / response-type index documented in classical.hpp.

Eigen::MatrixXd response_constraint_matrix();
Eigen::VectorXd observed_vector(const ObservedIVTable& t);
/// c_ij = y_j(1) - y_j(0): +1 for "helped", -1 for "hurt", 0 otherwise.
Eigen::VectorXd ace_coefficients();

ObservedIVTable iv_table_from(const ResponseTypeDist& q);
double ace_of(const ResponseTypeDist& q);

struct AceBounds {
  Interval ace;
  int lp_iterations = 0;
  double max_residual = 0.0;
};

/// Sharp ACE bounds over {q >= 0 : Aq = p}. Throws infeasible when the table
/// is incompatible with every response-type distribution.
AceBounds ace_bounds_detail(const ObservedIVTable& t, const Tolerances& tol = default_tolerances());
Interval ace_bounds(const ObservedIVTable& t, const Tolerances& tol = default_tolerances());

/// Structural IV model with a finite confounder, used for forward simulation:
/// Z independent of U, X ~ Bernoulli(treatment[u][z]), Y ~ Bernoulli(outcome[u][x]).
struct StructuralIvModel {
  std::vector<double> confounder;                // P(U = u)
  std::vector<std::array<double, 2>> treatment;  // P(X = 1 | Z = z, U = u)
  std::vector<std::array<double, 2>> outcome;    // P(Y = 1 | X = x, U = u)
};

ObservedIVTable observe(const StructuralIvModel& m);
double true_ace(const StructuralIvModel& m);

// ---------------------------------------------------------------------------
// Manski no-assumption bounds

/// e1 = E[Y | X=1], e0 = E[Y | X=0], px1 = P(X=1); width is always one.
Interval manski_bounds(double e1, double e0, double px1);

/// Intersection over z of the no-assumption bounds computed within each
/// instrument arm. Contains the Balke-Pearl interval.
Interval manski_iv_bounds(const ObservedIVTable& t);

// ---------------------------------------------------------------------------
// Probabilities of causation

struct ExperimentalData {
  double p_yx = 0.0;   // P(Y_x = 1), treatment forced on
  double p_yxp = 0.0;  // P(Y_x' = 1), treatment forced off
};

struct ObservationalData {
  std::array<std::array<double, 2>, 2> joint{};  // [x][y]

  double operator()(int x, int y) const { return joint[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)]; }
  double p_y() const { return joint[0][1] + joint[1][1]; }
};

void validate(const ExperimentalData& e);
void validate(const ObservationalData& o, const Tolerances& tol = default_tolerances());

enum class PnsVariant {
  standard,  // upper bound includes P(y_x) - P(y_x') + P(x, y') + P(x', y)
  literal,   // three-term upper bound; not sharp when that fourth term is smallest
};

const char* to_string(PnsVariant v);

/// Closed-form PNS bounds. Throws infeasible when lower exceeds upper.
Interval pns_bounds(const ExperimentalData& e, const ObservationalData& o, PnsVariant variant = PnsVariant::standard);

/// PNS range over joint distributions of (Y_x', Y_x, X) consistent with both
/// data sources; the sharpness reference for pns_bounds.
Interval pns_lp_bounds(const ExperimentalData& e, const ObservationalData& o,
                       const Tolerances& tol = default_tolerances());

struct CausationBounds {
  Interval pn;  // P(Y_x' = 0 | X = 1, Y = 1)
  Interval ps;  // P(Y_x = 1 | X = 0, Y = 0)
};

/// PN and PS ranges from the same counterfactual linear program. Throws
/// invalid_input when P(x, y) or P(x', y') is zero.
CausationBounds pn_ps_point_bounds(const ExperimentalData& e, const ObservationalData& o,
                                   const Tolerances& tol = default_tolerances());

}  // namespace polybound
