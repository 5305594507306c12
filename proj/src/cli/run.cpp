#include <algorithm>
#include <cmath>
#include <map>

#include "polybound/causal.hpp"
#include "polybound/classical.hpp"
#include "polybound/cli.hpp"
#include "polybound/entropic.hpp"
#include "polybound/lp.hpp"
#include "polybound/oracle.hpp"
#include "polybound/quantum.hpp"

namespace polybound::cli {

namespace {

constexpr const char* engine_version = "polybound 0.1.0";
constexpr double audit_tolerance = 1e-9;

struct Context {
  const Request& request;
  Tolerances tol;
  double input_tolerance = 1e-9;
  Json results = Json::object();
  Json provenance = Json::object();
  std::vector<std::string> warnings;
  bool audit_failed = false;

  Context(const Request& r, const Tolerances& t) : request(r), tol(t) {}

  void add_lp(int iterations, double residual = 0.0) {
    auto& lp = provenance["lp"];
    if (lp.is_null()) lp = Json::object();
    lp["iterations"] = lp.value("iterations", 0) + iterations;
    lp["max_residual"] = std::max(lp.value("max_residual", 0.0), residual);
  }
  void add_sdp(const SdpResult& s) {
    Json j;
    j["iterations"] = s.iterations;
    j["duality_gap"] = s.gap;
    j["min_eigenvalue"] = s.min_eigenvalue;
    j["max_residual"] = s.max_residual;
    j["status"] = s.status == SdpStatus::optimal ? "optimal" : "inaccurate";
    provenance["sdp"] = j;
    if (s.status != SdpStatus::optimal) warnings.push_back("SDP stopped before the internal target; duality gap " + format_number(s.gap));
  }
};

Json interval(const Interval& i) {
  Json j;
  j["lo"] = i.lo();
  j["hi"] = i.hi();
  j["width"] = i.width();
  return j;
}

std::vector<double> flat(const Json& tensor) {
  std::vector<double> out;
  std::function<void(const Json&)> walk = [&](const Json& n) {
    if (n.is_array())
      for (const auto& c : n) walk(c);
    else
      out.push_back(n.get<double>());
  };
  walk(tensor.at("values"));
  return out;
}

Tolerances input_tolerances(const Context& c) {
  Tolerances t = c.tol;
  t.normalization = c.input_tolerance;
  return t;
}

Behavior read_behavior(const Json& j, Context& c) {
  const auto v = flat(j);
  Behavior::Array p{};
  for (std::size_t k = 0; k < 16; ++k) p[(k >> 3) & 1][(k >> 2) & 1][(k >> 1) & 1][k & 1] = v[k];
  if (c.request.options.renormalize) p = renormalize(p);
  const Behavior b(p, input_tolerances(c));
  if (!b.no_signaling()) c.warnings.push_back("behavior is signaling: marginal drift " + format_number(b.signaling()));
  return b;
}

ObservedIVTable read_table(const Json& j, Context& c) {
  const auto v = flat(j);
  ObservedIVTable::Array p{};
  for (std::size_t k = 0; k < 8; ++k) p[(k >> 2) & 1][(k >> 1) & 1][k & 1] = v[k];
  if (c.request.options.renormalize) p = renormalize(p);
  return ObservedIVTable(p, input_tolerances(c));
}

CorrelationTable read_correlations(const Json& j) {
  const auto v = flat(j);
  return CorrelationTable(v[0], v[1], v[2], v[3]);
}

CorrelationFunctional read_functional(const Json& j) {
  const auto v = flat(j);
  return {{{{v[0], v[1]}, {v[2], v[3]}}}};
}

std::array<std::array<double, 2>, 2> read_xy(const Json& j, Context& c, const char* what) {
  const auto v = flat(j);
  std::array<std::array<double, 2>, 2> p{{{v[0], v[1]}, {v[2], v[3]}}};
  double sum = 0.0;
  for (const auto& row : p)
    for (double x : row) {
      if (x < 0.0) throw invalid_input(std::string(what) + " has a negative entry");
      sum += x;
    }
  if (c.request.options.renormalize && sum > 0.0) {
    for (auto& row : p)
      for (double& x : row) x /= sum;
  } else if (std::abs(sum - 1.0) > c.input_tolerance) {
    throw invalid_input(std::string(what) + " does not sum to one (sum " + format_number(sum) + ")");
  }
  return p;
}

Json functional_json(const CorrelationFunctional& f) {
  return Json::array({Json::array({f.c[0][0], f.c[0][1]}), Json::array({f.c[1][0], f.c[1][1]})});
}

Json variants_json(const CorrelationTable& t) {
  Json out = Json::array();
  const auto& variants = chsh_variants();
  for (std::size_t k = 0; k < variants.size(); ++k) {
    Json v;
    v["variant"] = k;
    v["coefficients"] = functional_json(variants[k]);
    v["value"] = variants[k](t);
    out.push_back(v);
  }
  return out;
}

Json facet_json(const FacetValue& f) {
  Json j;
  j["variant"] = f.variant;
  j["value"] = f.value;
  j["coefficients"] = functional_json(chsh_variants()[static_cast<std::size_t>(f.variant)]);
  return j;
}

Eigen::MatrixXd strategy_correlations() {
  Eigen::MatrixXd v(4, 16);
  const auto& all = enumerate_strategies();
  for (int s = 0; s < 16; ++s) {
    const auto c = all[static_cast<std::size_t>(s)].correlations();
    v.col(s) << c(0, 0), c(0, 1), c(1, 0), c(1, 1);
  }
  return v;
}

// The eight PR-box vertices of the no-signaling polytope, in correlation space.
Eigen::MatrixXd nosignaling_correlation_vertices() {
  Eigen::MatrixXd v(4, 24);
  v.leftCols(16) = strategy_correlations();
  int col = 16;
  for (int alpha = 0; alpha < 2; ++alpha)
    for (int beta = 0; beta < 2; ++beta)
      for (int gamma = 0; gamma < 2; ++gamma, ++col)
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y) v(2 * x + y, col) = sign_of((x * y) ^ (alpha * x) ^ (beta * y) ^ gamma);
  return v;
}

bool correlation_membership_lp(const CorrelationTable& t, Context& c) {
  Eigen::MatrixXd a(5, 16);
  a.topRows(4) = strategy_correlations();
  a.row(4).setOnes();
  Eigen::VectorXd b(5);
  b << t(0, 0), t(0, 1), t(1, 0), t(1, 1), 1.0;
  const auto r = lp_feasibility(a, b, c.tol);
  c.add_lp(r.iterations, r.status == LpStatus::optimal ? r.max_residual : 0.0);
  return r.status == LpStatus::optimal;
}

Eigen::MatrixXd strategy_behavior_matrix() {
  Eigen::MatrixXd a(16, 16);
  const auto& all = enumerate_strategies();
  for (int s = 0; s < 16; ++s) {
    const Behavior d = all[static_cast<std::size_t>(s)].behavior();
    for (int row = 0; row < 16; ++row) a(row, s) = d(row >> 3, (row >> 2) & 1, (row >> 1) & 1, row & 1);
  }
  return a;
}

Eigen::VectorXd behavior_vector(const Behavior& b) {
  Eigen::VectorXd v(16);
  for (int row = 0; row < 16; ++row) v(row) = b(row >> 3, (row >> 2) & 1, (row >> 1) & 1, row & 1);
  return v;
}

// ---------------------------------------------------------------------------
// Audit: engine results against the brute-force oracles.

struct AuditLog {
  Json checks = Json::array();

  void value(const std::string& name, double engine, double oracle) {
    Json j;
    j["check"] = name;
    j["engine"] = engine;
    j["oracle"] = oracle;
    j["difference"] = std::abs(engine - oracle);
    j["agree"] = std::abs(engine - oracle) <= audit_tolerance * (1.0 + std::abs(oracle));
    checks.push_back(j);
  }
  void verdict(const std::string& name, bool engine, bool oracle) {
    Json j;
    j["check"] = name;
    j["engine"] = engine;
    j["oracle"] = oracle;
    j["agree"] = engine == oracle;
    checks.push_back(j);
  }
  void note(const std::string& name, const std::string& text) {
    Json j;
    j["check"] = name;
    j["note"] = text;
    j["agree"] = true;
    checks.push_back(j);
  }
};

// Range of an LP objective, or nullopt when the polytope is empty.
template <class F>
std::optional<Interval> guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::infeasible) throw;
    return std::nullopt;
  }
}

void audit_table(const ObservedIVTable& t, AuditLog& log, Context& c) {
  const auto engine = guarded([&] { return ace_bounds(t, c.tol); });
  const auto oracle = guarded([&] {
    return oracle_extremal_scan(ace_coefficients(), response_constraint_matrix(), observed_vector(t));
  });
  log.verdict("ace polytope nonempty", engine.has_value(), oracle.has_value());
  if (engine && oracle) {
    log.value("ace lower bound", engine->lo(), oracle->lo());
    log.value("ace upper bound", engine->hi(), oracle->hi());
  }
  log.verdict("instrumental inequality vs ace feasibility", instrumental_inequality(t).holds, engine.has_value());
}

void audit_behavior(const Behavior& b, AuditLog& log, Context& c) {
  const auto cert = local_membership(b, c.tol);
  const bool oracle_member = guarded([&] {
                               return oracle_extremal_scan(Eigen::VectorXd::Zero(16), strategy_behavior_matrix(),
                                                           behavior_vector(b));
                             }).has_value();
  log.verdict("local membership (basis enumeration)", cert.member, oracle_member);
  if (b.no_signaling()) {
    const auto f = fine_check(b, c.tol);
    log.verdict("joint distribution vs CHSH facets", f.joint_exists, f.all_chsh_hold);
    log.verdict("local membership vs joint distribution", cert.member, f.joint_exists);
  } else {
    log.note("fine equivalence", "skipped: behavior is signaling");
  }
}

void audit_correlations(const CorrelationTable& t, AuditLog& log, Context& c) {
  log.verdict("correlation membership vs CHSH facets", correlation_membership_lp(t, c),
              most_violated_facet(t).value <= 2.0 + c.tol.facet);
}

void audit_functional(const CorrelationFunctional& f, AuditLog& log, Context& c) {
  const Eigen::Vector4d w(f.c[0][0], f.c[0][1], f.c[1][0], f.c[1][1]);
  log.value("classical bound (vertex scan)", classical_bound(f, c.tol), oracle_extremal_scan(w, strategy_correlations()).hi());
  log.value("no-signaling bound (vertex scan)", nosignaling_bound(f, c.tol),
            oracle_extremal_scan(w, nosignaling_correlation_vertices()).hi());
  log.note("quantum bound", "no finite oracle for the semidefinite relaxation");
}

void audit_pns(const ExperimentalData& e, const ObservationalData& o, AuditLog& log, Context& c) {
  const auto lp = guarded([&] { return pns_lp_bounds(e, o, c.tol); });
  const auto formula = guarded([&] { return pns_bounds(e, o, PnsVariant::standard); });
  log.verdict("data consistent", formula.has_value(), lp.has_value());
  if (lp && formula) {
    log.value("pns lower bound", formula->lo(), lp->lo());
    log.value("pns upper bound", formula->hi(), lp->hi());
    const auto literal = pns_bounds(e, o, PnsVariant::literal);
    Json j;
    j["check"] = "pns upper bound, paper-literal form";
    j["engine"] = literal.hi();
    j["oracle"] = lp->hi();
    j["difference"] = literal.hi() - lp->hi();
    j["agree"] = true;
    j["note"] = literal.hi() > lp->hi() + audit_tolerance ? "three-term form is not sharp here" : "three-term form is sharp here";
    log.checks.push_back(j);
  }
}

void audit_frechet(double u, double v, AuditLog& log) {
  // Joint of two binary variables: atoms (0,0), (0,1), (1,0), (1,1).
  Eigen::MatrixXd a(3, 4);
  a << 1, 1, 1, 1, 0, 0, 1, 1, 0, 1, 0, 1;
  const Interval oracle = oracle_extremal_scan(Eigen::Vector4d(0, 0, 0, 1), a, Eigen::Vector3d(1, u, v));
  const Interval engine = frechet_bounds(u, v);
  log.value("lower bound", engine.lo(), oracle.lo());
  log.value("upper bound", engine.hi(), oracle.hi());
}

void audit_manski(double e1, double e0, double px1, AuditLog& log) {
  // Atoms (Y(1), Y(0), X), index 4 y1 + 2 y0 + x.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 8);
  Eigen::VectorXd ace(8);
  for (int k = 0; k < 8; ++k) {
    const int y1 = (k >> 2) & 1, y0 = (k >> 1) & 1, x = k & 1;
    a(0, k) = 1.0;
    a(1, k) = x;
    a(2, k) = x * y1;
    a(3, k) = (1 - x) * y0;
    ace(k) = y1 - y0;
  }
  const Eigen::Vector4d b(1.0, px1, e1 * px1, e0 * (1.0 - px1));
  const Interval oracle = oracle_extremal_scan(ace, a, b);
  const Interval engine = manski_bounds(e1, e0, px1);
  log.value("lower bound", engine.lo(), oracle.lo());
  log.value("upper bound", engine.hi(), oracle.hi());
}

ExperimentalData read_experimental(const Json& j) { return {j.at("p_yx").get<double>(), j.at("p_yxp").get<double>()}; }

ObservationalData read_observational(const Json& j, Context& c) {
  ObservationalData o;
  o.joint = read_xy(j, c, "observational distribution");
  return o;
}

void finish_audit(AuditLog& log, Context& c) {
  bool all = true;
  for (const auto& check : log.checks) all = all && check.at("agree").get<bool>();
  Json a;
  a["checks"] = log.checks;
  a["all_agree"] = all;
  c.results["audit"] = a;
  if (!all) {
    c.audit_failed = true;
    c.warnings.push_back("audit: engine and oracle disagree");
  }
}

void audit_payload(const Json& p, Context& c) {
  AuditLog log;
  if (p.contains("table")) audit_table(read_table(p.at("table"), c), log, c);
  if (p.contains("behavior") && c.request.kind != Kind::entropic) audit_behavior(read_behavior(p.at("behavior"), c), log, c);
  if (p.contains("correlations")) audit_correlations(read_correlations(p.at("correlations")), log, c);
  if (p.contains("functional")) audit_functional(read_functional(p.at("functional")), log, c);
  if (p.contains("experimental"))
    audit_pns(read_experimental(p.at("experimental")), read_observational(p.at("observational"), c), log, c);
  if (c.request.kind == Kind::frechet) audit_frechet(p.at("u").get<double>(), p.at("v").get<double>(), log);
  if (c.request.kind == Kind::manski)
    audit_manski(p.at("e1").get<double>(), p.at("e0").get<double>(), p.at("px1").get<double>(), log);
  if (log.checks.empty()) log.note("oracle", "no brute-force oracle applies to this analysis");
  finish_audit(log, c);
}

// ---------------------------------------------------------------------------

void instrumental(const ObservedIVTable& t, Context& c) {
  const IvVariant v = c.request.options.variant == Variant::literal ? IvVariant::literal : IvVariant::standard;
  const auto check = instrumental_inequality(t, v);
  Json j;
  j["variant"] = to_string(v);
  j["value"] = check.value;
  j["holds"] = check.holds;
  c.results["instrumental_inequality"] = j;
  if (v == IvVariant::literal)
    c.warnings.push_back("instrumental inequality evaluated in the paper-literal form, which every table satisfies");
  else if (!check.holds)
    c.warnings.push_back("instrumental inequality violated: the table is incompatible with the IV model");
}

void run_iv_bounds(Context& c) {
  const auto t = read_table(c.request.payload.at("table"), c);
  instrumental(t, c);
  c.results["manski_per_arm"] = interval(manski_iv_bounds(t));
  const auto ace = ace_bounds_detail(t, c.tol);
  c.add_lp(ace.lp_iterations, ace.max_residual);
  c.results["ace"] = interval(ace.ace);
}

void chsh_common(const CorrelationTable& t, Context& c) {
  Json corr = Json::array({Json::array({t(0, 0), t(0, 1)}), Json::array({t(1, 0), t(1, 1)})});
  c.results["correlations"] = corr;
  c.results["S"] = chsh_value(t);
  c.results["variants"] = variants_json(t);
  c.results["max_facet"] = facet_json(most_violated_facet(t));
}

void run_chsh(Context& c) {
  const auto& p = c.request.payload;
  if (p.contains("correlations")) {
    const auto t = read_correlations(p.at("correlations"));
    chsh_common(t, c);
    c.results["membership"] = correlation_membership_lp(t, c);
  } else {
    const auto b = read_behavior(p.at("behavior"), c);
    chsh_common(behavior_to_correlations(b), c);
    const auto cert = local_membership(b, c.tol);
    c.add_lp(cert.lp_iterations, cert.residual);
    c.results["membership"] = cert.member;
    c.results["no_signaling"] = b.no_signaling();
  }
}

void run_membership(Context& c) {
  const auto b = read_behavior(c.request.payload.at("behavior"), c);
  const auto cert = local_membership(b, c.tol);
  c.add_lp(cert.lp_iterations, cert.residual);
  c.results["member"] = cert.member;
  c.results["facet"] = facet_json(cert.facet);
  c.results["no_signaling"] = b.no_signaling();
  if (cert.member) {
    Json w = Json::array();
    for (int s = 0; s < 16; ++s) {
      Json e;
      const auto& strat = enumerate_strategies()[static_cast<std::size_t>(s)];
      e["strategy"] = s;
      e["signs"] = strat.signs;
      e["weight"] = cert.weights[static_cast<std::size_t>(s)];
      w.push_back(e);
    }
    c.results["weights"] = w;
    c.results["residual"] = cert.residual;
  }
  if (b.no_signaling()) {
    const auto f = fine_check(b, c.tol);
    Json j;
    j["joint_exists"] = f.joint_exists;
    j["all_chsh_hold"] = f.all_chsh_hold;
    j["agree"] = f.agree();
    c.results["fine"] = j;
  } else {
    c.warnings.push_back("joint-distribution check skipped: it presupposes a no-signaling behavior");
  }
}

void run_npa(Context& c) {
  const auto f = read_functional(c.request.payload.at("functional"));
  const auto r = npa_solve(c.request.options.npa_level, f, c.tol);
  c.add_sdp(r.sdp);
  c.results["bound"] = r.bound;
  c.results["level"] = to_string(r.level);
  c.results["moment_matrix_size"] = r.sdp.primal.rows();
  c.results["equality_constraints"] = r.equality_constraints;
  c.results["functional"] = functional_json(f);
}

Json triple_json(const GapReport& r) {
  Json j;
  j["classical"] = r.classical;
  j["quantum"] = r.quantum;
  j["nosignaling"] = r.nosignaling;
  j["gap"] = r.gap;
  j["level"] = to_string(r.level);
  j["functional"] = functional_json(r.functional);
  return j;
}

void gap_provenance(const GapReport& r, Context& c) {
  c.add_lp(r.lp_iterations);
  Json s;
  s["iterations"] = r.sdp_iterations;
  s["duality_gap"] = r.sdp_gap;
  s["min_eigenvalue"] = r.sdp_min_eigenvalue;
  c.provenance["sdp"] = s;
}

void run_gap(Context& c) {
  const auto& p = c.request.payload;
  const NpaLevel level = c.request.options.npa_level;
  if (p.contains("functional")) {
    const auto r = quantum_gap_report(read_functional(p.at("functional")), level, c.tol);
    c.results["bounds"] = triple_json(r);
    gap_provenance(r, c);
  } else if (p.contains("behavior")) {
    const auto r = quantum_gap_report(read_behavior(p.at("behavior"), c), level, c.tol);
    c.results["bounds"] = triple_json(r.bounds);
    c.results["facet"] = facet_json(r.facet);
    c.results["local_member"] = r.local_member;
    gap_provenance(r.bounds, c);
  } else {
    const auto t = read_table(p.at("table"), c);
    instrumental(t, c);
    const auto r = quantum_gap_report(t, c.tol);
    Json b;
    b["classical"] = interval(r.classical);
    b["nosignaling"] = interval(r.nosignaling);
    b["quantum"] = nullptr;
    c.results["bounds"] = b;
    c.warnings.push_back("no moment-matrix relaxation is implemented for the IV graph; the quantum layer is left empty");
  }
}

void run_pns(Context& c) {
  const auto& p = c.request.payload;
  const auto e = read_experimental(p.at("experimental"));
  const auto o = read_observational(p.at("observational"), c);
  const PnsVariant v = c.request.options.variant == Variant::literal ? PnsVariant::literal : PnsVariant::standard;
  Json pns = interval(pns_bounds(e, o, v));
  pns["variant"] = to_string(v);
  c.results["pns"] = pns;
  if (v == PnsVariant::literal)
    c.warnings.push_back("PNS upper bound evaluated in the paper-literal three-term form, which is not always sharp");
  c.results["pns_lp"] = interval(pns_lp_bounds(e, o, c.tol));
  if (o(1, 1) > 0.0 && o(0, 0) > 0.0) {
    const auto r = pn_ps_point_bounds(e, o, c.tol);
    c.results["pn"] = interval(r.pn);
    c.results["ps"] = interval(r.ps);
  } else {
    c.warnings.push_back("PN or PS undefined: P(x, y) or P(x', y') is zero");
  }
}

void run_manski(Context& c) {
  const auto& p = c.request.payload;
  const auto r = manski_bounds(p.at("e1").get<double>(), p.at("e0").get<double>(), p.at("px1").get<double>());
  c.results["ate"] = interval(r);
  c.results["contains_zero"] = r.contains(0.0);
}

void run_frechet(Context& c) {
  const double u = c.request.payload.at("u").get<double>();
  const double v = c.request.payload.at("v").get<double>();
  c.results["joint"] = interval(frechet_bounds(u, v));
  auto joint = [](const BinaryJoint& j) {
    return Json::array({Json::array({j[0][0], j[0][1]}), Json::array({j[1][0], j[1][1]})});
  };
  c.results["comonotone"] = joint(comonotone_coupling(u, v));
  c.results["countermonotone"] = joint(countermonotone_coupling(u, v));
}

Json shannon_json(const ShannonCheck& s) {
  Json j;
  j["member"] = s.member;
  j["violations"] = Json::array();
  for (const auto& v : s.violations) {
    Json e;
    e["kind"] = v.kind == ShannonViolation::Kind::monotonicity ? "monotonicity" : "submodularity";
    e["inequality"] = v.describe();
    e["amount"] = v.amount;
    j["violations"].push_back(e);
  }
  return j;
}

std::string subset_key(unsigned mask) {
  std::string s;
  for (int v = 0; v < 4; ++v)
    if (mask & (1u << v)) s += (s.empty() ? "" : ",") + std::to_string(v);
  return s;
}

void run_entropic(Context& c) {
  const auto& p = c.request.payload;
  if (p.contains("behavior")) {
    const auto b = read_behavior(p.at("behavior"), c);
    const auto s = p.contains("settings") ? read_xy(p.at("settings"), c, "settings distribution") : uniform_settings();
    const auto r = entropic_chsh(b, s);
    c.results["lhs"] = r.lhs;
    c.results["rhs"] = r.rhs;
    c.results["holds"] = r.holds;
    c.results["mutual_information"] = Json::array(
        {Json::array({r.information[0][0], r.information[0][1]}), Json::array({r.information[1][0], r.information[1][1]})});
    c.results["form"] = "paper-literal";
    c.warnings.push_back("entropic CHSH uses the literal right-hand side 2 H(settings), in bits");
    return;
  }
  if (p.contains("entropy_vector")) {
    const auto& ev = p.at("entropy_vector");
    const int n = ev.at("n").get<int>();
    std::map<unsigned, double> values;
    for (const auto& [key, v] : ev.at("values").items()) {
      unsigned mask = 0;
      std::size_t pos = 0;
      while (pos < key.size()) {
        const auto comma = key.find(',', pos);
        mask |= 1u << std::stoi(key.substr(pos, comma - pos));
        pos = comma == std::string::npos ? key.size() : comma + 1;
      }
      values[mask] = v.get<double>();
    }
    c.results["shannon"] = shannon_json(shannon_cone_check(EntropyVector(n, values)));
    return;
  }
  const auto& j = p.at("joint");
  const auto card = j.at("cardinalities").get<std::vector<int>>();
  auto values = j.at("values").get<std::vector<double>>();
  if (c.request.options.renormalize) {
    double sum = 0.0;
    for (double v : values) sum += v;
    if (sum > 0.0)
      for (double& v : values) v /= sum;
  }
  entropy(values, c.input_tolerance);
  const auto h = EntropyVector::from_joint(values, card);
  Json ent = Json::object();
  for (unsigned mask = 1; mask < (1u << card.size()); ++mask) ent[subset_key(mask)] = h[mask];
  c.results["entropies"] = ent;
  c.results["shannon"] = shannon_json(shannon_cone_check(h));
}

Json tolerances_json(const Context& c) {
  Json t;
  t["input_normalization"] = c.input_tolerance;
  t["no_signaling"] = c.tol.no_signaling;
  t["facet"] = c.tol.facet;
  t["lp_feasibility"] = c.tol.lp_feasibility;
  t["sdp_gap"] = c.tol.sdp_gap;
  t["audit"] = audit_tolerance;
  return t;
}

}  // namespace

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_input: return 2;
    case ErrorCode::infeasible: return 3;
    case ErrorCode::solver: return 4;
  }
  return 4;
}

Report error_report(const std::string& code, int exit_code, const std::string& message) {
  Report r;
  r.exit_code = exit_code;
  r.body["schema"] = 1;
  r.body["status"] = "error";
  r.body["error"] = {{"code", code}, {"exit_code", exit_code}, {"message", message}};
  r.body["warnings"] = Json::array();
  r.body["provenance"] = {{"engine", engine_version}};
  return r;
}

Report run(const Request& req) {
  Context c(req, default_tolerances());
  if (req.options.tolerance) {
    const double t = *req.options.tolerance;
    c.tol.no_signaling = c.tol.facet = c.tol.lp_feasibility = t;
    c.input_tolerance = t;
  }

  Report r;
  Json error;
  try {
    switch (req.kind) {
      case Kind::iv_bounds: run_iv_bounds(c); break;
      case Kind::chsh: run_chsh(c); break;
      case Kind::membership: run_membership(c); break;
      case Kind::npa: run_npa(c); break;
      case Kind::gap: run_gap(c); break;
      case Kind::pns: run_pns(c); break;
      case Kind::manski: run_manski(c); break;
      case Kind::frechet: run_frechet(c); break;
      case Kind::entropic: run_entropic(c); break;
      case Kind::audit: break;
    }
    if (req.kind == Kind::audit || req.options.audit) audit_payload(req.payload, c);
  } catch (const Error& e) {
    r.exit_code = exit_code_for(e.code());
    error = {{"code", to_string(e.code())}, {"exit_code", r.exit_code}, {"message", e.what()}};
  } catch (const std::exception& e) {
    r.exit_code = 4;
    error = {{"code", "internal"}, {"exit_code", 4}, {"message", e.what()}};
  }
  if (error.is_null() && c.audit_failed) {
    r.exit_code = 4;
    error = {{"code", "audit_mismatch"}, {"exit_code", 4}, {"message", "engine and oracle results disagree"}};
  }

  c.provenance["engine"] = engine_version;
  c.provenance["tolerances"] = tolerances_json(c);
  r.body["schema"] = 1;
  r.body["kind"] = to_string(req.kind);
  r.body["request"] = to_json(req);
  r.body["results"] = c.results;
  r.body["provenance"] = c.provenance;
  r.body["warnings"] = c.warnings;
  r.body["status"] = error.is_null() ? "ok" : "error";
  if (!error.is_null()) r.body["error"] = error;
  return r;
}

Report run_document(const Json& doc, std::optional<Kind> kind_override, const OptionOverrides& overrides) {
  Request req;
  try {
    req = parse_request(doc, kind_override, overrides);
  } catch (const SchemaError& e) {
    return error_report("schema", 2, e.what());
  }
  return run(req);
}

std::string cross_section_csv(int samples, NpaLevel level, const Tolerances& tol) {
  std::string out = "theta,classical,quantum,nosignaling\n";
  for (const auto& s : polytope_cross_section(samples, level, tol))
    out += format_number(s.theta) + "," + format_number(s.classical) + "," + format_number(s.quantum) + "," +
           format_number(s.nosignaling) + "\n";
  return out;
}

}  // namespace polybound::cli
