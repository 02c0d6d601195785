#pragma once

#include <complex>
#include <random>
#include <vector>

#include "qes/cpoly.hpp"

namespace qes::testing {

/// sum_k c[k] (E - offset)^k, i.e. a polynomial written in a shifted variable.
inline CPoly in_shifted_variable(const std::vector<Complex>& c, Complex offset) {
  CPoly acc;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * CPoly::linear_factor(offset) + CPoly::constant(*it);
  return acc;
}

inline double max_coeff_diff(const CPoly& a, const CPoly& b) { return (a - b).max_abs_coeff(); }

inline CPoly random_poly(std::mt19937_64& rng, int degree) {
  // Unit-scale: modulus in [0.5, 1], uniform phase.
  std::uniform_real_distribution<double> mod(0.5, 1.0);
  std::uniform_real_distribution<double> phase(-3.141592653589793, 3.141592653589793);
  std::vector<Complex> c(static_cast<std::size_t>(degree) + 1);
  for (auto& x : c) x = std::polar(mod(rng), phase(rng));
  return CPoly(c);
}

/// Largest distance from each expected value to the nearest unused actual value.
inline double multiset_gap(std::vector<Complex> expected, std::vector<Complex> actual) {
  if (expected.size() != actual.size()) return 1e300;
  double worst = 0.0;
  for (const auto& e : expected) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < actual.size(); ++j)
      if (std::abs(actual[j] - e) < std::abs(actual[best] - e)) best = j;
    worst = std::max(worst, std::abs(actual[best] - e));
    actual.erase(actual.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return worst;
}

}  // namespace qes::testing
