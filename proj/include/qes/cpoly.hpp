#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace qes {

using Complex = std::complex<double>;

/**
 * \brief Polynomial in one complex variable with complex coefficients.
 *
 * Coefficients are stored in ascending degree. Exact zero leading
 * coefficients are trimmed on construction, so a nonzero polynomial always
 * has a nonzero leading coefficient. The zero polynomial has no
 * coefficients and reports degree -1.
 *
 * Non-finite coefficients are rejected with InvalidArgument.
 */
class CPoly {
 public:
  CPoly() = default;
  explicit CPoly(std::vector<Complex> coeffs);
  CPoly(std::initializer_list<Complex> coeffs);

  static CPoly constant(Complex c);
  /// E - root
  static CPoly linear_factor(Complex root);
  /// Monic polynomial with the given roots (repeated roots allowed).
  static CPoly from_roots(std::span<const Complex> roots);

  bool is_zero() const noexcept { return coeffs_.empty(); }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }

  /// Coefficient of E^k; zero beyond the degree.
  Complex operator[](std::size_t k) const noexcept {
    return k < coeffs_.size() ? coeffs_[k] : Complex{};
  }
  Complex leading() const noexcept { return coeffs_.empty() ? Complex{} : coeffs_.back(); }

  /// Horner evaluation.
  Complex operator()(Complex e) const noexcept;
  Complex eval(Complex e) const noexcept { return (*this)(e); }

  CPoly derivative() const;
  /// All coefficients conjugated.
  CPoly conj() const;
  /// Divided by the leading coefficient; the zero polynomial is returned unchanged.
  CPoly monic() const;

  /// max_k |a_k|, zero for the zero polynomial.
  double max_abs_coeff() const noexcept;
  /// sum_k |a_k| |e|^k, the magnitude scale used for backward-error tests.
  double eval_scale(Complex e) const noexcept;

  friend bool operator==(const CPoly&, const CPoly&) = default;

 private:
  void trim();
  std::vector<Complex> coeffs_;
};

CPoly add(const CPoly& a, const CPoly& b);
CPoly sub(const CPoly& a, const CPoly& b);
CPoly mul(const CPoly& a, const CPoly& b);
CPoly scale(const CPoly& a, Complex s);

inline CPoly operator+(const CPoly& a, const CPoly& b) { return add(a, b); }
inline CPoly operator-(const CPoly& a, const CPoly& b) { return sub(a, b); }
inline CPoly operator*(const CPoly& a, const CPoly& b) { return mul(a, b); }
inline CPoly operator*(Complex s, const CPoly& a) { return scale(a, s); }

struct DivRem {
  CPoly quotient;
  CPoly remainder;
};

/// Long division a = q*b + r with degree(r) < degree(b). Throws InvalidArgument if b is zero.
DivRem divrem(const CPoly& a, const CPoly& b);

struct RootOptions {
  /// Accepted backward error: |p(r)| <= tol * p.eval_scale(r).
  double tol = 1e-10;
  int max_iterations = 500;
  /// Roots closer than this (absolute) are merged by cluster_roots.
  double cluster_radius = 1e-7;
};

/**
 * Roots of p with multiplicity, via Aberth–Ehrlich simultaneous iteration.
 *
 * The polynomial is made monic and the variable rescaled so that the
 * geometric mean of root moduli is one. Initial guesses sit on a circle
 * around the root centroid at fixed angles 2*pi*k/n + 0.4, so results are
 * deterministic. Converged roots get one Newton polish step on the original
 * polynomial when that lowers the residual.
 *
 * Throws InvalidArgument for degree < 1 and RootFindingError when the
 * iteration budget runs out or a root fails the backward-error bound.
 */
std::vector<Complex> roots(const CPoly& p, const RootOptions& opts = {});

struct RootCluster {
  Complex value;
  int multiplicity = 1;
};

/**
 * Groups a root multiset into distinct roots with multiplicity.
 *
 * Candidates within 1e-2 max(1, |r|) of a root are tried as an m-fold
 * group, largest m first. The group centroid is refined by Newton's method
 * on p^(m-1), and the group is accepted if |p^(j)| at the refined centre
 * is within a small multiple of its rounding error for every j < m. This
 * catches m-fold roots, which double precision resolves only to about
 * eps^(1/m). Failing that, roots within opts.cluster_radius are merged at
 * their centroid. Output is sorted by real part, then imaginary part.
 */
std::vector<RootCluster> cluster_roots(const CPoly& p, std::span<const Complex> rts,
                                       const RootOptions& opts = {});

}  // namespace qes
