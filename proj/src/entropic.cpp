#include "polybound/entropic.hpp"

#include <cmath>
#include <sstream>

namespace polybound {

double entropy(std::span<const double> p, double tolerance) {
  double sum = 0.0, h = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) throw invalid_input("probabilities must be finite and nonnegative");
    sum += v;
    if (v > 0.0) h -= v * std::log2(v);
  }
  if (std::abs(sum - 1.0) > tolerance) throw invalid_input("distribution does not sum to one");
  return h;
}

double mutual_information(const std::array<std::array<double, 2>, 2>& p) {
  const std::array<double, 2> pa{p[0][0] + p[0][1], p[1][0] + p[1][1]};
  const std::array<double, 2> pb{p[0][0] + p[1][0], p[0][1] + p[1][1]};
  const std::array<double, 4> joint{p[0][0], p[0][1], p[1][0], p[1][1]};
  return std::max(0.0, entropy(pa) + entropy(pb) - entropy(joint));
}

EntropicChsh entropic_chsh(const Behavior& b, const SettingsDistribution& settings) {
  const std::array<double, 4> s{settings[0][0], settings[0][1], settings[1][0], settings[1][1]};
  EntropicChsh out;
  out.rhs = 2.0 * entropy(s);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      std::array<std::array<double, 2>, 2> p{};
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) p[a][bb] = b(a, bb, x, y);
      out.information[x][y] = mutual_information(p);
    }
  const auto& i = out.information;
  out.lhs = i[0][0] + i[0][1] + i[1][0] - i[1][1];
  out.holds = out.lhs <= out.rhs + 1e-12;
  return out;
}

EntropyVector::EntropyVector(int n, const std::map<unsigned, double>& values) : n_(n) {
  if (n < 1 || n > 4) throw invalid_input("entropy vectors cover 1 to 4 variables");
  const unsigned full = (1u << n) - 1;
  h_.assign(full + 1, 0.0);
  for (const auto& [mask, v] : values) {
    if (mask == 0 || mask > full) throw invalid_input("entropy vector subset out of range");
    if (!std::isfinite(v) || v < 0.0) throw invalid_input("entropy values must be finite and nonnegative");
    h_[mask] = v;
  }
  for (unsigned mask = 1; mask <= full; ++mask)
    if (!values.contains(mask)) {
      std::ostringstream os;
      os << "entropy vector is incomplete: subset mask " << mask << " missing";
      throw invalid_input(os.str());
    }
}

EntropyVector EntropyVector::from_joint(std::span<const double> joint, const std::vector<int>& cardinalities) {
  const int n = static_cast<int>(cardinalities.size());
  if (n < 1 || n > 4) throw invalid_input("entropy vectors cover 1 to 4 variables");
  std::size_t atoms = 1;
  for (int c : cardinalities) {
    if (c < 1) throw invalid_input("cardinalities must be positive");
    atoms *= static_cast<std::size_t>(c);
  }
  if (joint.size() != atoms) throw invalid_input("joint distribution size does not match the cardinalities");
  entropy(joint);

  std::map<unsigned, double> h;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::map<std::vector<int>, double> marginal;
    std::vector<int> digits(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < atoms; ++k) {
      std::size_t rest = k;
      for (int v = n - 1; v >= 0; --v) {
        digits[static_cast<std::size_t>(v)] = static_cast<int>(rest % static_cast<std::size_t>(cardinalities[static_cast<std::size_t>(v)]));
        rest /= static_cast<std::size_t>(cardinalities[static_cast<std::size_t>(v)]);
      }
      std::vector<int> key;
      for (int v = 0; v < n; ++v)
        if (mask & (1u << v)) key.push_back(digits[static_cast<std::size_t>(v)]);
      marginal[key] += joint[k];
    }
    std::vector<double> p;
    for (const auto& [key, v] : marginal) p.push_back(v);
    h[mask] = entropy(p);
  }
  return EntropyVector(n, h);
}

namespace {

std::string subset(unsigned mask) {
  std::string s = "{";
  bool first = true;
  for (int v = 0; v < 4; ++v)
    if (mask & (1u << v)) {
      if (!first) s += ",";
      s += std::to_string(v);
      first = false;
    }
  return s + "}";
}

}  // namespace

std::string ShannonViolation::describe() const {
  const unsigned si = base | (1u << i);
  if (kind == Kind::monotonicity) return "h(" + subset(base) + ") <= h(" + subset(si) + ")";
  const unsigned sj = base | (1u << j);
  return "h(" + subset(si) + ") + h(" + subset(sj) + ") >= h(" + subset(si | sj) + ") + h(" + subset(base) + ")";
}

ShannonCheck shannon_cone_check(const EntropyVector& h, double tolerance) {
  ShannonCheck out;
  const int n = h.size();
  const unsigned full = (1u << n) - 1;
  for (unsigned s = 0; s <= full; ++s)
    for (int i = 0; i < n; ++i) {
      if (s & (1u << i)) continue;
      const unsigned si = s | (1u << i);
      const double mono = h[s] - h[si];
      if (mono > tolerance) out.violations.push_back({ShannonViolation::Kind::monotonicity, s, i, -1, mono});
      for (int j = i + 1; j < n; ++j) {
        if (s & (1u << j)) continue;
        const unsigned sj = s | (1u << j);
        const double sub = h[si | sj] + h[s] - h[si] - h[sj];
        if (sub > tolerance) out.violations.push_back({ShannonViolation::Kind::submodularity, s, i, j, sub});
      }
    }
  out.member = out.violations.empty();
  return out;
}

}  // namespace polybound
