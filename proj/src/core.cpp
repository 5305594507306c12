#include "polybound/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace polybound {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::solver: return "solver_failure";
  }
  return "unknown";
}

const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

Interval::Interval(double lo, double hi, double tolerance) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw invalid_input("interval endpoints must be finite");
  if (lo > hi + tolerance) {
    std::ostringstream os;
    os << "interval lower end " << lo << " exceeds upper end " << hi;
    throw invalid_input(os.str());
  }
}

namespace {

void check_entry(double v, const char* what) {
  if (!std::isfinite(v)) throw invalid_input(std::string(what) + ": non-finite probability");
  if (v < 0.0) throw invalid_input(std::string(what) + ": negative probability");
}

void check_sum(double sum, double tol, const char* what) {
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << what << ": conditional slice sums to " << sum << ", expected 1";
    throw invalid_input(os.str());
  }
}

}  // namespace

ObservedIVTable::ObservedIVTable(const Array& p, const Tolerances& tol) : p_(p) {
  for (int z = 0; z < 2; ++z) {
    double sum = 0.0;
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) {
        check_entry(p_[y][x][z], "iv table");
        sum += p_[y][x][z];
      }
    check_sum(sum, tol.normalization, "iv table");
  }
}

Behavior::Behavior(const Array& p, const Tolerances& tol) : p_(p) {
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      double sum = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          check_entry(p_[a][b][x][y], "behavior");
          sum += p_[a][b][x][y];
        }
      check_sum(sum, tol.normalization, "behavior");
    }

  double worst = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 2; ++x)
      worst = std::max(worst, std::abs(alice_marginal(a, x, 0) - alice_marginal(a, x, 1)));
  for (int b = 0; b < 2; ++b)
    for (int y = 0; y < 2; ++y)
      worst = std::max(worst, std::abs(bob_marginal(b, 0, y) - bob_marginal(b, 1, y)));
  signaling_ = worst;
  no_signaling_ = worst <= tol.no_signaling;
}

Behavior Behavior::uniform() {
  Array p{};
  for (auto& pa : p)
    for (auto& pb : pa)
      for (auto& px : pb) px.fill(0.25);
  return Behavior(p);
}

Behavior Behavior::pr_box() {
  Array p{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) p[a][b][x][y] = ((a ^ b) == (x & y)) ? 0.5 : 0.0;
  return Behavior(p);
}

Behavior Behavior::mixture(const std::vector<Behavior>& parts, const std::vector<double>& weights) {
  if (parts.size() != weights.size() || parts.empty())
    throw invalid_input("mixture: parts and weights must be non-empty and of equal length");
  Array p{};
  for (std::size_t k = 0; k < parts.size(); ++k) {
    check_entry(weights[k], "mixture weight");
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y) p[a][b][x][y] += weights[k] * parts[k](a, b, x, y);
  }
  Tolerances tol;
  tol.normalization = 1e-10;
  return Behavior(p, tol);
}

CorrelationTable::CorrelationTable(const std::array<std::array<double, 2>, 2>& values) : e(values) {
  for (const auto& row : e)
    for (double v : row)
      if (!std::isfinite(v) || std::abs(v) > 1.0 + 1e-12) throw invalid_input("correlation outside [-1, 1]");
}

CorrelationTriple::CorrelationTriple(double ab_, double ac_, double bc_) : ab(ab_), ac(ac_), bc(bc_) {
  for (double v : {ab, ac, bc})
    if (!std::isfinite(v) || std::abs(v) > 1.0 + 1e-12) throw invalid_input("correlation outside [-1, 1]");
}

ResponseTypeDist::ResponseTypeDist(const std::array<double, 16>& q, const Tolerances& tol) : q_(q) {
  double sum = 0.0;
  for (double v : q_) {
    check_entry(v, "response-type distribution");
    sum += v;
  }
  check_sum(sum, tol.normalization, "response-type distribution");
}

CorrelationTable behavior_to_correlations(const Behavior& b) {
  std::array<std::array<double, 2>, 2> e{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      double s = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) s += sign_of(a) * sign_of(bb) * b(a, bb, x, y);
      e[x][y] = std::clamp(s, -1.0, 1.0);
    }
  return CorrelationTable(e);
}

double chsh_value(const CorrelationTable& c) { return c(0, 0) + c(0, 1) + c(1, 0) - c(1, 1); }

double CorrelationFunctional::operator()(const CorrelationTable& t) const {
  double s = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) s += c[x][y] * t(x, y);
  return s;
}

const std::array<CorrelationFunctional, 8>& chsh_variants() {
  static const std::array<CorrelationFunctional, 8> variants = [] {
    std::array<CorrelationFunctional, 8> out{};
    // Position of the lone minus sign, then the global sign flip.
    for (int k = 0; k < 4; ++k)
      for (int flip = 0; flip < 2; ++flip) {
        auto& f = out[static_cast<std::size_t>(flip * 4 + (3 - k))];
        for (int j = 0; j < 4; ++j) {
          const double s = (j == k) ? -1.0 : 1.0;
          f.c[j / 2][j % 2] = flip ? -s : s;
        }
      }
    return out;
  }();
  return variants;
}

namespace {

template <typename Slice>
void rescale(Slice&& entries) {
  double sum = 0.0;
  for (double* v : entries) {
    if (!std::isfinite(*v) || *v < 0.0) throw invalid_input("renormalize: negative or non-finite entry");
    sum += *v;
  }
  if (sum <= 0.0) throw invalid_input("renormalize: slice has zero mass");
  for (double* v : entries) *v /= sum;
}

}  // namespace

Behavior::Array renormalize(Behavior::Array p) {
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      rescale(std::array<double*, 4>{&p[0][0][x][y], &p[0][1][x][y], &p[1][0][x][y], &p[1][1][x][y]});
  return p;
}

ObservedIVTable::Array renormalize(ObservedIVTable::Array p) {
  for (int z = 0; z < 2; ++z)
    rescale(std::array<double*, 4>{&p[0][0][z], &p[0][1][z], &p[1][0][z], &p[1][1][z]});
  return p;
}

}  // namespace polybound
