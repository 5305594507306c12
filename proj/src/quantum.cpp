#include "polybound/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "polybound/lp.hpp"

namespace polybound {

namespace {

using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using cd = std::complex<double>;

double hermitian_defect(const auto& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

Matrix2cd pauli_x() {
  Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}
Matrix2cd pauli_y() {
  Matrix2cd m;
  m << 0, cd(0, -1), cd(0, 1), 0;
  return m;
}
Matrix2cd pauli_z() {
  Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

TwoQubitState::TwoQubitState(const Eigen::Matrix4cd& rho) : rho_(rho) {
  if (!rho.allFinite()) throw invalid_input("density matrix is not finite");
  if (hermitian_defect(rho) > 1e-12) throw invalid_input("density matrix is not Hermitian");
  if (std::abs(rho.trace() - cd(1.0, 0.0)) > 1e-12) throw invalid_input("density matrix trace is not one");
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-10) throw invalid_input("density matrix is not positive semidefinite");
}

TwoQubitState TwoQubitState::pure(const Eigen::Vector4cd& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw invalid_input("state vector must be nonzero");
  const Eigen::Vector4cd v = psi / norm;
  Matrix4cd rho = v * v.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return TwoQubitState(rho);
}

TwoQubitState TwoQubitState::singlet() {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(1) = 1.0;
  psi(2) = -1.0;
  return pure(psi);
}

TwoQubitState TwoQubitState::product(int alice_bit, int bob_bit) {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(2 * alice_bit + bob_bit) = 1.0;
  return pure(psi);
}

TwoQubitState TwoQubitState::maximally_mixed() { return TwoQubitState(0.25 * Matrix4cd::Identity()); }

DichotomicObservable::DichotomicObservable(const Eigen::Matrix2cd& o) : o_(o) {
  if (!o.allFinite() || hermitian_defect(o) > 1e-12) throw invalid_input("observable is not Hermitian");
  if ((o * o - Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw invalid_input("observable does not square to the identity");
}

DichotomicObservable DichotomicObservable::bloch(double theta) {
  return DichotomicObservable(std::cos(theta) * pauli_z() + std::sin(theta) * pauli_x());
}

DichotomicObservable DichotomicObservable::direction(double nx, double ny, double nz) {
  const double n = std::sqrt(nx * nx + ny * ny + nz * nz);
  if (!(n > 0.0)) throw invalid_input("observable direction must be nonzero");
  Matrix2cd o = (nx / n) * pauli_x() + (ny / n) * pauli_y() + (nz / n) * pauli_z();
  return DichotomicObservable(o);
}

Eigen::Matrix2cd DichotomicObservable::projector(int outcome) const {
  const double s = sign_of(outcome);
  return 0.5 * (Matrix2cd::Identity() + s * o_);
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Eigen::Matrix2cd commutator(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) { return a * b - b * a; }

Behavior quantum_behavior(const TwoQubitState& rho, const Measurements& m) {
  const DichotomicObservable* alice[2] = {&m.a0, &m.a1};
  const DichotomicObservable* bob[2] = {&m.b0, &m.b1};
  Behavior::Array p{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const Matrix4cd proj = kron(alice[x]->projector(a), bob[y]->projector(b));
          p[a][b][x][y] = std::max(0.0, (rho.rho() * proj).trace().real());
        }
  Tolerances tol;
  tol.normalization = 1e-10;
  return Behavior(p, tol);
}

Behavior tsirelson_behavior() {
  using std::numbers::pi;
  return quantum_behavior(TwoQubitState::singlet(),
                          {DichotomicObservable::bloch(0.0), DichotomicObservable::bloch(pi / 2),
                           DichotomicObservable::bloch(5 * pi / 4), DichotomicObservable::bloch(3 * pi / 4)});
}

Eigen::Matrix4cd chsh_operator(const Measurements& m) {
  return kron(m.a0.matrix(), m.b0.matrix() + m.b1.matrix()) + kron(m.a1.matrix(), m.b0.matrix() - m.b1.matrix());
}

NoncommutativityWitness noncommutativity_witness(const Measurements& m) {
  auto op_norm = [](const Matrix2cd& c) {
    Eigen::JacobiSVD<Matrix2cd> svd(c);
    return svd.singularValues()(0);
  };
  NoncommutativityWitness w;
  w.comm_a = op_norm(commutator(m.a0.matrix(), m.a1.matrix()));
  w.comm_b = op_norm(commutator(m.b0.matrix(), m.b1.matrix()));
  Matrix4cd c = chsh_operator(m);
  c = 0.5 * (c + c.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(c, Eigen::EigenvaluesOnly);
  w.achievable_chsh = es.eigenvalues()(3);
  return w;
}

// ---------------------------------------------------------------------------

const char* to_string(NpaLevel level) { return level == NpaLevel::L1 ? "1" : "1ab"; }

Word reduce_word(const Word& w) {
  auto cancel = [](const Word& letters) {
    Word out;
    for (int l : letters) {
      if (!out.empty() && out.back() == l)
        out.pop_back();
      else
        out.push_back(l);
    }
    return out;
  };
  Word alice, bob;
  for (int l : w) {
    if (l < 0 || l > 3) throw invalid_input("operator word letter out of range");
    (l < 2 ? alice : bob).push_back(l);
  }
  Word out = cancel(alice);
  const Word b = cancel(bob);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::string word_label(const Word& w) {
  static const char* names[] = {"A0", "A1", "B0", "B1"};
  if (w.empty()) return "1";
  std::string s;
  for (int l : w) s += names[l];
  return s;
}

std::vector<Word> npa_words(NpaLevel level) {
  std::vector<Word> words{{}, {0}, {1}, {2}, {3}};
  if (level == NpaLevel::L1AB)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) words.push_back({x, 2 + y});
  return words;
}

namespace {

// Entry (u, v) holds <u^dagger v>. Real moment matrices suffice: the real part
// of a feasible Hermitian moment matrix is feasible with the same objective,
// so words are identified with their adjoints.
Word entry_word(const Word& u, const Word& v) {
  Word w(u.rbegin(), u.rend());
  w.insert(w.end(), v.begin(), v.end());
  w = reduce_word(w);
  const Word adj = reduce_word(Word(w.rbegin(), w.rend()));
  return std::min(w, adj);
}

Eigen::MatrixXd sym_unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  if (i == j) {
    e(i, i) = 1.0;
  } else {
    e(i, j) = 0.5;
    e(j, i) = 0.5;
  }
  return e;
}

}  // namespace

SdpProblem npa_problem(NpaLevel level, const CorrelationFunctional& f) {
  const auto words = npa_words(level);
  const auto n = static_cast<Eigen::Index>(words.size());

  std::map<Word, std::vector<std::pair<Eigen::Index, Eigen::Index>>> classes;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      classes[entry_word(words[static_cast<std::size_t>(i)], words[static_cast<std::size_t>(j)])].emplace_back(i, j);

  SdpProblem p;
  p.objective = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [word, entries] : classes) {
    if (word.empty()) {
      for (const auto& [i, j] : entries) p.constraints.push_back({sym_unit(n, i, j), 1.0});
      continue;
    }
    const auto [i0, j0] = entries.front();
    for (std::size_t k = 1; k < entries.size(); ++k) {
      const auto [i, j] = entries[k];
      p.constraints.push_back({sym_unit(n, i, j) - sym_unit(n, i0, j0), 0.0});
    }
  }
  // Words 1, 2 are A0, A1 and 3, 4 are B0, B1 in every level.
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) p.objective += f.c[x][y] * sym_unit(n, 1 + x, 3 + y);
  return p;
}

NpaResult npa_solve(NpaLevel level, const CorrelationFunctional& f, const Tolerances& tol) {
  const SdpProblem p = npa_problem(level, f);
  NpaResult r;
  r.level = level;
  r.equality_constraints = p.constraints.size();
  r.sdp = sdp_solve(p, tol);
  r.bound = r.sdp.value;
  return r;
}

double npa_bound(NpaLevel level, const CorrelationFunctional& f, const Tolerances& tol) {
  return npa_solve(level, f, tol).bound;
}

namespace {

LpResult maximize_or_throw(const LpProblem& p, const Tolerances& tol, const char* what) {
  auto r = lp_solve(p, tol);
  if (r.status != LpStatus::optimal) throw solver_failure(std::string(what) + " linear program did not reach an optimum");
  return r;
}

LpResult classical_lp(const CorrelationFunctional& f, const Tolerances& tol) {
  Eigen::VectorXd c(16);
  const auto& strategies = enumerate_strategies();
  for (int s = 0; s < 16; ++s) c(s) = f(strategies[static_cast<std::size_t>(s)].correlations());
  return maximize_or_throw({c, Eigen::MatrixXd::Ones(1, 16), Eigen::VectorXd::Ones(1), Sense::maximize}, tol, "classical");
}

// Variables p(a, b | x, y) at index 8 x + 4 y + 2 a + b.
LpResult nosignaling_lp(const CorrelationFunctional& f, const Tolerances& tol) {
  auto idx = [](int a, int b, int x, int y) { return 8 * x + 4 * y + 2 * a + b; };
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(12, 16);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(12);
  Eigen::VectorXd c(16);
  int row = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi) {
          a(row, idx(ai, bi, x, y)) = 1.0;
          c(idx(ai, bi, x, y)) = f.c[x][y] * sign_of(ai) * sign_of(bi);
        }
      rhs(row++) = 1.0;
    }
  for (int x = 0; x < 2; ++x)
    for (int ai = 0; ai < 2; ++ai, ++row)
      for (int bi = 0; bi < 2; ++bi) {
        a(row, idx(ai, bi, x, 0)) += 1.0;
        a(row, idx(ai, bi, x, 1)) -= 1.0;
      }
  for (int y = 0; y < 2; ++y)
    for (int bi = 0; bi < 2; ++bi, ++row)
      for (int ai = 0; ai < 2; ++ai) {
        a(row, idx(ai, bi, 0, y)) += 1.0;
        a(row, idx(ai, bi, 1, y)) -= 1.0;
      }
  return maximize_or_throw({c, a, rhs, Sense::maximize}, tol, "no-signaling");
}

}  // namespace

double classical_bound(const CorrelationFunctional& f, const Tolerances& tol) { return classical_lp(f, tol).value; }

double nosignaling_bound(const CorrelationFunctional& f, const Tolerances& tol) { return nosignaling_lp(f, tol).value; }

GapReport quantum_gap_report(const CorrelationFunctional& f, NpaLevel level, const Tolerances& tol) {
  const auto cl = classical_lp(f, tol);
  const auto ns = nosignaling_lp(f, tol);
  const auto q = npa_solve(level, f, tol);
  GapReport r;
  r.functional = f;
  r.level = level;
  r.classical = cl.value;
  r.nosignaling = ns.value;
  r.quantum = q.bound;
  r.gap = q.bound - cl.value;
  r.lp_iterations = cl.iterations + ns.iterations;
  r.sdp_iterations = q.sdp.iterations;
  r.sdp_gap = q.sdp.gap;
  r.sdp_min_eigenvalue = q.sdp.min_eigenvalue;
  return r;
}

BehaviorGapReport quantum_gap_report(const Behavior& b, NpaLevel level, const Tolerances& tol) {
  BehaviorGapReport r;
  const auto cert = local_membership(b, tol);
  r.facet = cert.facet;
  r.local_member = cert.member;
  r.bounds = quantum_gap_report(chsh_variants()[static_cast<std::size_t>(cert.facet.variant)], level, tol);
  return r;
}

IvGapReport quantum_gap_report(const ObservedIVTable& t, const Tolerances& tol) {
  IvGapReport r;
  r.instrumental = instrumental_inequality(t, IvVariant::standard);
  r.classical = ace_bounds(t, tol);
  r.nosignaling = manski_iv_bounds(t);
  return r;
}

std::vector<CrossSectionSample> polytope_cross_section(int samples, NpaLevel level, const Tolerances& tol) {
  if (samples < 1) throw invalid_input("cross-section needs at least one sample");
  std::vector<CrossSectionSample> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / samples;
    const double c = std::cos(theta), s = std::sin(theta);
    const CorrelationFunctional f{{{{c + s, c - s}, {c + s, -c + s}}}};
    const auto r = quantum_gap_report(f, level, tol);
    out.push_back({theta, r.classical, r.quantum, r.nosignaling});
  }
  return out;
}

}  // namespace polybound
