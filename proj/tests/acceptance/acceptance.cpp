// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria. Extra arguments are unit-test executables whose
// runtime counts toward the suite budget in criterion 12.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "polybound/causal.hpp"
#include "polybound/classical.hpp"
#include "polybound/entropic.hpp"
#include "polybound/lp.hpp"
#include "polybound/oracle.hpp"
#include "polybound/quantum.hpp"
#include "support/generators.hpp"

using namespace polybound;
using namespace polybound::testing;
using Clock = std::chrono::steady_clock;

namespace {

const double tsirelson = 2.0 * std::numbers::sqrt2;

constexpr double kTsirelsonTol = 1e-4;
constexpr double kExactTol = 1e-9;
constexpr double kSimulatorTol = 1e-12;
constexpr double kIdentityTol = 1e-10;
constexpr double kLpTol = 1e-9;
constexpr double kManskiTol = 1e-12;
constexpr double kCouplingTol = 1e-12;
constexpr double kEigenTol = 1e-7;
constexpr double kGapTol = 1e-6;
constexpr double kSuiteSeconds = 60.0;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Solver outputs gathered across criteria and judged in criterion 12.
struct Hygiene {
  int sdp = 0, lp = 0;
  double worst_eigen = 1e300, worst_gap = 0.0, worst_residual = 0.0;

  void sdp_result(const SdpResult& r) {
    ++sdp;
    worst_eigen = std::min(worst_eigen, r.min_eigenvalue);
    worst_gap = std::max(worst_gap, std::abs(r.gap));
  }
  void lp_residual(double r) {
    ++lp;
    worst_residual = std::max(worst_residual, r);
  }
} hygiene;

template <class F>
void guarded(int id, const char* name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

void tsirelson_reproduction() {
  guarded(1, "tsirelson", [] {
    const auto t0 = Clock::now();
    const auto r = npa_solve(NpaLevel::L1, CorrelationFunctional::chsh());
    const double elapsed = seconds_since(t0);
    hygiene.sdp_result(r.sdp);
    const bool ok = std::abs(r.bound - tsirelson) <= kTsirelsonTol && elapsed < 1.0;
    report(1, "tsirelson", ok, fmt("bound %.10f, |err| %.2e, %.4f s", r.bound, std::abs(r.bound - tsirelson), elapsed));
  });
}

void polytope_triple() {
  guarded(2, "polytope triple", [] {
    const auto r = quantum_gap_report(CorrelationFunctional::chsh(), NpaLevel::L1);
    const bool ok = std::abs(r.classical - 2.0) <= kExactTol && std::abs(r.quantum - tsirelson) <= kTsirelsonTol &&
                    std::abs(r.nosignaling - 4.0) <= kExactTol;
    report(2, "polytope triple", ok, fmt("classical %.12g, quantum %.10f, no-signaling %.12g", r.classical, r.quantum, r.nosignaling));
  });
}

void simulator_exactness() {
  guarded(3, "simulator exactness", [] {
    const auto singlet = TwoQubitState::singlet();
    double grid_err = 0.0;
    for (int i = 0; i < 36; ++i)
      for (int j = 0; j < 36; ++j) {
        const double ta = 2.0 * std::numbers::pi * i / 36.0, tb = 2.0 * std::numbers::pi * j / 36.0;
        const auto a = DichotomicObservable::bloch(ta), b = DichotomicObservable::bloch(tb);
        const auto e = behavior_to_correlations(quantum_behavior(singlet, {a, a, b, b}))(0, 0);
        grid_err = std::max(grid_err, std::abs(e + std::cos(ta - tb)));
      }

    const double s = chsh_value(behavior_to_correlations(tsirelson_behavior()));
    const double chsh_err = std::abs(s - tsirelson);

    Rng rng(1003);
    double identity_err = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto m = random_measurements(rng);
      const Eigen::Matrix4cd c = chsh_operator(m);
      const Eigen::Matrix4cd rhs = 4.0 * Eigen::Matrix4cd::Identity() -
                                   kron(commutator(m.a0.matrix(), m.a1.matrix()), commutator(m.b0.matrix(), m.b1.matrix()));
      identity_err = std::max(identity_err, (c * c - rhs).cwiseAbs().maxCoeff());
    }
    const bool ok = grid_err <= kSimulatorTol && chsh_err <= kExactTol && identity_err <= kIdentityTol;
    report(3, "simulator exactness", ok,
           fmt("grid %.2e, CHSH %.12f (|err| %.2e), identity %.2e", grid_err, s, chsh_err, identity_err));
  });
}

void fine_equivalence() {
  guarded(4, "fine equivalence", [] {
    Rng rng(1004);
    const int n = 1200;
    int disagreements = 0, local = 0;
    for (int k = 0; k < n; ++k) {
      Behavior b = Behavior::uniform();
      switch (k % 4) {
        case 0: b = random_local_mixture(rng); break;
        case 1: b = random_nosignaling_mixture(rng); break;
        case 2: b = noisy_pr_box(rng); break;
        default: b = random_quantum_behavior(rng); break;
      }
      const auto f = fine_check(b);
      if (!f.agree()) ++disagreements;
      if (f.joint_exists) ++local;
    }
    report(4, "fine equivalence", disagreements == 0 && local > 0 && local < n,
           fmt("%g behaviors (%g local, %g nonlocal), %g disagreements", n, local, n - local, disagreements));
  });
}

// Relative-interior point of {q >= 0 : A q = p}: the mean of LP vertices for
// random objectives.
Eigen::VectorXd interior_point(const Eigen::MatrixXd& a, const Eigen::VectorXd& p, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(a.cols());
  const int draws = 24;
  for (int k = 0; k < draws; ++k) {
    Eigen::VectorXd c(a.cols());
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = gauss(rng);
    const auto r = lp_solve({c, a, p, Sense::minimize});
    hygiene.lp_residual((a * r.solution - p).cwiseAbs().maxCoeff());
    sum += r.solution;
  }
  return sum / draws;
}

// Hit-and-run inside the face spanned by the support of `start`.
std::vector<double> sampled_aces(const Eigen::MatrixXd& a, const Eigen::VectorXd& start, Rng& rng, int steps) {
  std::vector<int> support;
  for (int i = 0; i < start.size(); ++i)
    if (start(i) > 1e-12) support.push_back(i);
  Eigen::MatrixXd as(a.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) as.col(static_cast<Eigen::Index>(k)) = a.col(support[k]);
  const Eigen::MatrixXd null = Eigen::FullPivLU<Eigen::MatrixXd>(as).kernel();
  const Eigen::VectorXd c = ace_coefficients();
  Eigen::VectorXd q = start;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out;
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(start.size());
    if (null.cols() > 0 && null.norm() > 0.0) {
      Eigen::VectorXd r(null.cols());
      for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = gauss(rng);
      const Eigen::VectorXd ds = null * r;
      for (std::size_t k = 0; k < support.size(); ++k) d(support[k]) = ds(static_cast<Eigen::Index>(k));
    }
    double lo = -1e300, hi = 1e300;
    for (int i = 0; i < d.size(); ++i) {
      if (d(i) > 1e-14) lo = std::max(lo, -q(i) / d(i));
      if (d(i) < -1e-14) hi = std::min(hi, -q(i) / d(i));
    }
    if (lo > hi || lo < -1e299) continue;
    q += (lo + (hi - lo) * uniform01(rng)) * d;
    q = q.cwiseMax(0.0);
    out.push_back(c.dot(q));
  }
  return out;
}

void balke_pearl() {
  guarded(5, "balke-pearl", [] {
    Rng rng(1005);
    const Eigen::MatrixXd a = response_constraint_matrix();
    const int n = 200;
    double worst = 0.0, widest = 0.0, coverage = 0.0;
    int outside = 0, samples = 0;
    for (int k = 0; k < n; ++k) {
      // Half from response-type mixtures, half forward-simulated with a finite confounder.
      ObservedIVTable t = iv_table_from(random_response_types(rng));
      if (k % 2) t = observe(random_structural_model(rng));
      const auto detail = ace_bounds_detail(t);
      hygiene.lp_residual(detail.max_residual);
      const Interval oracle = oracle_extremal_scan(ace_coefficients(), a, observed_vector(t));
      worst = std::max({worst, std::abs(detail.ace.lo() - oracle.lo()), std::abs(detail.ace.hi() - oracle.hi())});
      widest = std::max(widest, detail.ace.width());

      const auto aces = sampled_aces(a, interior_point(a, observed_vector(t), rng), rng, 40);
      double smin = 1e300, smax = -1e300;
      for (double ace : aces) {
        ++samples;
        smin = std::min(smin, ace);
        smax = std::max(smax, ace);
        if (!detail.ace.contains(ace, kLpTol)) ++outside;
      }
      if (!aces.empty() && detail.ace.width() > 0.0) coverage += (smax - smin) / detail.ace.width();
    }
    const bool ok = worst <= kLpTol && outside == 0 && widest < 1.0;
    report(5, "balke-pearl", ok,
           fmt("%g tables, max |lp - oracle| %.2e, max width %.6f; ", n, worst, widest) +
               fmt("%g of %g sampled effects outside, mean sampled spread %.2f of width", outside, samples, coverage / n));
  });
}

void manski() {
  guarded(6, "manski", [] {
    Rng rng(1006);
    int bad_width = 0, no_zero = 0;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const auto r = manski_bounds(uniform01(rng), uniform01(rng), uniform01(rng));
      worst = std::max(worst, std::abs(r.width() - 1.0));
      if (std::abs(r.width() - 1.0) > kManskiTol) ++bad_width;
      if (!r.contains(0.0)) ++no_zero;
    }
    report(6, "manski", bad_width == 0 && no_zero == 0,
           fmt("1000 inputs, max |width - 1| %.2e, %g exclude zero", worst, no_zero));
  });
}

// PNS range over the 8 atoms (Y_x, Y_x', X), index 4 y_x + 2 y_x' + x.
Interval pns_oracle(const ExperimentalData& e, const ObservationalData& o) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(7, 8);
  Eigen::VectorXd objective(8);
  for (int k = 0; k < 8; ++k) {
    const int yx = (k >> 2) & 1, yxp = (k >> 1) & 1, x = k & 1;
    const int y = x ? yx : yxp;  // consistency
    a(0, k) = 1.0;
    a(1, k) = yx;
    a(2, k) = yxp;
    a(3 + 2 * x + y, k) = 1.0;
    objective(k) = yx == 1 && yxp == 0;
  }
  Eigen::VectorXd b(7);
  b << 1.0, e.p_yx, e.p_yxp, o(0, 0), o(0, 1), o(1, 0), o(1, 1);
  return oracle_extremal_scan(objective, a, b);
}

void tian_pearl() {
  guarded(7, "tian-pearl sharpness", [] {
    Rng rng(1007);
    const int n = 500;
    double worst = 0.0, worst_literal = 0.0;
    int literal_loose = 0;
    for (int k = 0; k < n; ++k) {
      const auto s = random_counterfactual(rng);
      const auto formula = pns_bounds(s.experimental, s.observational);
      const auto oracle = pns_oracle(s.experimental, s.observational);
      worst = std::max({worst, std::abs(formula.lo() - oracle.lo()), std::abs(formula.hi() - oracle.hi())});
      const auto literal = pns_bounds(s.experimental, s.observational, PnsVariant::literal);
      const double gap = std::max(std::abs(literal.lo() - oracle.lo()), std::abs(literal.hi() - oracle.hi()));
      worst_literal = std::max(worst_literal, gap);
      if (gap > kLpTol) ++literal_loose;
    }
    report(7, "tian-pearl sharpness", worst <= kLpTol,
           fmt("%g instances, max |formula - oracle| %.2e; three-term form loose on %g (max %.3f)", n, worst,
               literal_loose, worst_literal));
  });
}

void instrumental() {
  guarded(8, "instrumental inequality", [] {
    Rng rng(1008);
    int violations = 0;
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const auto c = instrumental_inequality(observe(random_structural_model(rng)));
      worst = std::max(worst, c.value);
      if (!c.holds) ++violations;
    }
    ObservedIVTable::Array p{};
    p[1][1][0] = 1.0;
    p[0][1][1] = 1.0;
    const auto crafted = instrumental_inequality(ObservedIVTable(p));
    const bool ok = violations == 0 && !crafted.holds && std::abs(crafted.value - 2.0) <= kExactTol;
    report(8, "instrumental inequality", ok,
           fmt("10000 simulated tables, %g violations, max value %.6f; crafted table value %.12g", violations, worst,
               crafted.value));
  });
}

void frechet() {
  guarded(9, "frechet", [] {
    int order = 0;
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i)
      for (int j = 0; j <= 100; ++j) {
        const double u = i / 100.0, v = j / 100.0;
        const auto r = frechet_bounds(u, v);
        if (r.lo() > r.hi()) ++order;
        const auto co = comonotone_coupling(u, v), counter = countermonotone_coupling(u, v);
        worst = std::max({worst, std::abs(co[1][1] - r.hi()), std::abs(counter[1][1] - r.lo())});
        // Both couplings must carry the requested marginals.
        for (const auto& m : {co, counter})
          worst = std::max({worst, std::abs(m[1][0] + m[1][1] - u), std::abs(m[0][1] + m[1][1] - v)});
      }
    report(9, "frechet", order == 0 && worst <= kCouplingTol,
           fmt("101x101 grid, %g order violations, max coupling error %.2e", order, worst));
  });
}

void boole_bell() {
  guarded(10, "boole-bell", [] {
    Rng rng(1010);
    std::uniform_real_distribution<double> e(-1.0, 1.0);
    int counter = 0, feasible = 0;
    for (int k = 0; k < 1000; ++k) {
      const CorrelationTriple t{e(rng), e(rng), e(rng)};
      if (triple_feasibility(t)) {
        ++feasible;
        if (!boole_bell_check(t).holds) ++counter;
      }
    }
    const CorrelationTriple bad{1, -1, 1};
    const bool crafted = !triple_feasibility(bad) && !boole_bell_check(bad).holds;
    report(10, "boole-bell", counter == 0 && crafted,
           fmt("1000 triples (%g feasible), %g feasible but violating; (1,-1,1) infeasible and violating: ", feasible,
               counter) +
               (crafted ? "yes" : "no"));
  });
}

void entropic() {
  guarded(11, "entropic", [] {
    int failing = 0, checked = 0;
    for (const auto& s : enumerate_strategies()) {
      ++checked;
      if (!entropic_chsh(s.behavior()).holds) ++failing;
    }
    Rng rng(1011);
    for (int k = 0; k < 500; ++k) {
      ++checked;
      if (!entropic_chsh(random_local_mixture(rng)).holds) ++failing;
    }
    const double pr = entropic_chsh(Behavior::pr_box()).lhs;
    report(11, "entropic", failing == 0 && std::abs(pr - 2.0) <= kExactTol,
           fmt("%g local behaviors, %g violate; PR box lhs %.12g", checked, failing, pr));
  });
}

void solver_hygiene(int argc, char** argv, Clock::time_point start) {
  guarded(12, "solver hygiene", [&] {
    Rng rng(1012);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int k = 0; k < 60; ++k) {
      CorrelationFunctional f{{{{coef(rng), coef(rng)}, {coef(rng), coef(rng)}}}};
      hygiene.sdp_result(npa_solve(k % 2 ? NpaLevel::L1AB : NpaLevel::L1, f).sdp);
    }
    for (int k = 0; k < 200; ++k) {
      const auto b = k % 2 ? random_local_mixture(rng) : random_nosignaling_mixture(rng);
      const auto cert = local_membership(b);
      if (cert.member) hygiene.lp_residual(cert.residual);
    }
    // Random bounded LPs: nonnegative mixtures of a simplex.
    for (int k = 0; k < 200; ++k) {
      const int m = 3 + k % 5, n = m + 4 + k % 7;
      Eigen::MatrixXd a = Eigen::MatrixXd::Random(m, n);
      a.row(0).setOnes();
      const auto w = dirichlet(rng, static_cast<std::size_t>(n));
      const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
      LpProblem p{Eigen::VectorXd::Random(n), a, a * x0, k % 2 ? Sense::maximize : Sense::minimize};
      const auto r = lp_solve(p);
      if (r.status != LpStatus::optimal) throw std::runtime_error("random LP not solved to optimality");
      const double neg = std::max(0.0, -r.solution.minCoeff());
      hygiene.lp_residual(std::max((a * r.solution - p.rhs).cwiseAbs().maxCoeff(), neg));
    }

    double units = 0.0;
    int unit_failures = 0;
    for (int i = 1; i < argc; ++i) {
      const auto t0 = Clock::now();
      const std::string cmd = std::string("\"") + argv[i] + "\" > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) ++unit_failures;
      units += seconds_since(t0);
    }
    const double total = seconds_since(start) + units;
    const bool ok = hygiene.worst_eigen >= -kEigenTol && hygiene.worst_gap <= kGapTol &&
                    hygiene.worst_residual <= kLpTol && total < kSuiteSeconds && unit_failures == 0;
    report(12, "solver hygiene", ok,
           fmt("%g SDPs (min eigenvalue %.2e, max gap %.2e), ", hygiene.sdp, hygiene.worst_eigen, hygiene.worst_gap) +
               fmt("%g LPs (max residual %.2e), suite %.2f s over %g unit binaries", hygiene.lp, hygiene.worst_residual, total,
                   argc - 1) +
               (unit_failures ? fmt(", %g unit binaries failed", unit_failures) : std::string()));
  });
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = Clock::now();
  tsirelson_reproduction();
  polytope_triple();
  simulator_exactness();
  fine_equivalence();
  balke_pearl();
  manski();
  tian_pearl();
  instrumental();
  frechet();
  boole_bell();
  entropic();
  solver_hygiene(argc, argv, start);
  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures;
}
