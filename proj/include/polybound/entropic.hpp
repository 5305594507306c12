#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "polybound/core.hpp"

namespace polybound {

/// Shannon entropy in bits; 0 log 0 = 0. Rejects negative entries and sums
/// further than `tolerance` from one.
double entropy(std::span<const double> p, double tolerance = 1e-9);

/// I(A : B) in bits for a joint p[a][b].
double mutual_information(const std::array<std::array<double, 2>, 2>& p);

/// Distribution over the setting pair, s[x][y].
using SettingsDistribution = std::array<std::array<double, 2>, 2>;

inline SettingsDistribution uniform_settings() { return {{{0.25, 0.25}, {0.25, 0.25}}}; }

struct EntropicChsh {
  double lhs = 0.0;  // I(A0:B0) + I(A0:B1) + I(A1:B0) - I(A1:B1)
  double rhs = 0.0;  // 2 H(settings)
  bool holds = true;
  std::array<std::array<double, 2>, 2> information{};  // I(A_x : B_y)
};

EntropicChsh entropic_chsh(const Behavior& b, const SettingsDistribution& settings = uniform_settings());

/// h[S] for every subset S of n <= 4 variables, indexed by bitmask (bit i set
/// when variable i is in S). h[0] = 0.
class EntropyVector {
 public:
  /// `values` must hold every nonempty subset of {0, .., n-1}.
  EntropyVector(int n, const std::map<unsigned, double>& values);

  /// Entropies of all marginals of a joint over variables with the given
  /// cardinalities, laid out first-variable-most-significant.
  static EntropyVector from_joint(std::span<const double> joint, const std::vector<int>& cardinalities);

  int size() const noexcept { return n_; }
  double operator[](unsigned mask) const { return h_.at(mask); }

 private:
  int n_ = 0;
  std::vector<double> h_;
};

struct ShannonViolation {
  enum class Kind { monotonicity, submodularity } kind = Kind::monotonicity;
  unsigned base = 0;  // S
  int i = 0;
  int j = -1;         // second variable for submodularity
  double amount = 0.0;

  /// e.g. "h({0}) + h({1}) >= h({0,1}) + h({})"
  std::string describe() const;
};

struct ShannonCheck {
  bool member = true;
  std::vector<ShannonViolation> violations;
};

/// Monotonicity h[S] <= h[S + i] and submodularity
/// h[S + i] + h[S + j] >= h[S + i + j] + h[S] for all S avoiding i, j.
ShannonCheck shannon_cone_check(const EntropyVector& h, double tolerance = 1e-10);

}  // namespace polybound
