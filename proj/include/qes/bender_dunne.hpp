#pragma once

#include <string_view>
#include <vector>

#include "qes/cpoly.hpp"

namespace qes {

/// Integer M and real coupling zeta of H = p^2 - (zeta cosh 2x - iM)^2.
class ModelParams {
 public:
  /// Throws InvalidArgument unless M >= 1 and zeta is finite and nonzero.
  ModelParams(int m, double zeta);

  int m() const noexcept { return m_; }
  double zeta() const noexcept { return zeta_; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  int m_;
  double zeta_;
};

/// P: even-index series coefficients R_{2k}. Q: odd-index R_{2k+1}.
enum class Branch { P, Q };

std::string_view to_string(Branch b) noexcept;

/**
 * Truncating choice for one branch: the ansatz exponent s (stored as
 * two_s in {0, 1}) and the index n_c at which the recursion's lower-term
 * coefficient vanishes.
 */
struct BranchSpec {
  Branch branch = Branch::P;
  int two_s = 0;
  int critical_index = 1;

  double s() const noexcept { return 0.5 * two_s; }
  /// Degree of the critical polynomial, n_c - 1.
  int critical_degree() const noexcept { return critical_index - 1; }
  /// Power of cosh x multiplying R_0 or R_1: 0 for P, 1 for Q.
  int cosh_parity() const noexcept { return branch == Branch::P ? 0 : 1; }

  friend bool operator==(const BranchSpec&, const BranchSpec&) = default;
};

/**
 * Selects s so that the lower-term factor (M+3-2s-2n) for P, or
 * (M+2-2s-2n) for Q, vanishes at an integer n_c >= 1.
 *
 * P takes s = 1/2 for even M and s = 0 for odd M; Q the reverse.
 */
BranchSpec critical_index(int m, Branch branch);

/// polys[n] for n = 0..n_max, each monic of degree n in E.
struct RecursionTable {
  ModelParams params;
  BranchSpec branch;
  std::vector<CPoly> polys;
};

/// Default table length used by factorization checks: n_c + 4.
inline constexpr int kExtraRows = 4;

/**
 * Runs the P or Q three-term recursion up to n_max with polys[-1] = 0.
 *
 * The branch's two_s is used as given, so non-truncating choices of s can
 * also be tabulated. Throws InvalidArgument when n_max < 1.
 */
RecursionTable generate(const ModelParams& params, const BranchSpec& branch, int n_max);

/// polys[n_c - 1] for the branch's truncating s. Degree 0 (the constant 1) is possible for Q at M = 1.
CPoly critical_polynomial(const ModelParams& params, Branch branch);

struct FactorizationReport {
  BranchSpec branch;
  /// remainder_norms[j] = max |coeff| of polys[n_c-1+j] mod critical.
  std::vector<double> remainder_norms;
  /// Same norms divided by max |coeff| of the dividend.
  std::vector<double> relative_norms;

  double max_relative() const noexcept;
};

/// Divides polys[n_c-1+j], j = 0..extra, by the critical polynomial. Throws InvalidArgument when extra < 1.
FactorizationReport factorization_check(const ModelParams& params, Branch branch, int extra = kExtraRows);

/**
 * Series coefficients of the truncated solution at a root E of the
 * critical polynomial.
 *
 * Entry k multiplies cosh^(2k + parity) x, where parity is 0 for P and 1
 * for Q, and equals R_n(E)/n! with P_k = R_{2k}, Q_k = R_{2k+1}. The
 * list is scaled so that the highest retained power has coefficient 1.
 *
 * Throws InvalidArgument if E is not a root of the critical polynomial
 * to within tol (backward-error sense), since the series would not
 * terminate.
 */
std::vector<Complex> coefficients_at_energy(const ModelParams& params, const BranchSpec& branch, Complex energy,
                                            double tol = 1e-8);

}  // namespace qes
