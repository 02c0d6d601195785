#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qes/bender_dunne.hpp"
#include "qes/cpoly.hpp"
#include "qes/spectrum.hpp"

namespace qes {

// ---------------------------------------------------------------------------
// Gauged Hamiltonian oracle
// ---------------------------------------------------------------------------

/// Largest matrix dimension matrix_spectrum accepts.
inline constexpr int kMaxMatrixDim = 64;

/**
 * Matrix of the gauged operator -4 J0^2 + 2i zeta (J- - J+) + M^2 - zeta^2
 * on span{1, z, ..., z^(M-1)}, with generator actions
 *   J+ z^j = j z^(j-1),  J0 z^j = (j - n/2) z^j,  J- z^j = (j - n) z^(j+1),
 * n = M - 1. Column j holds the image of z^j. Row-major storage.
 */
struct GaugedMatrix {
  ModelParams params;
  int dim = 0;
  std::vector<Complex> entries;

  Complex operator()(int row, int col) const { return entries[static_cast<std::size_t>(row * dim + col)]; }
  bool is_tridiagonal() const;
};

GaugedMatrix build_gauged_matrix(const ModelParams& params);

/// det(E I - H) by the three-term recurrence for tridiagonal matrices.
CPoly characteristic_polynomial(const GaugedMatrix& m);

/**
 * Eigenvalues of a tridiagonal gauged matrix: roots of the characteristic
 * polynomial, polished by Aberth iteration on the determinant recurrence, with
 * coincident pairs merged to their mean. Throws InvalidArgument if dim exceeds kMaxMatrixDim
 * or the matrix is not tridiagonal.
 */
std::vector<Complex> matrix_spectrum(const GaugedMatrix& m, const RootOptions& opts = {});

/// Largest distance between greedily matched elements of two equal-size multisets (infinity if sizes differ).
double multiset_distance(std::span<const Complex> a, std::span<const Complex> b);

// ---------------------------------------------------------------------------
// Closed-form eigenfunctions
// ---------------------------------------------------------------------------

struct Derivatives {
  Complex value;
  Complex first;
  Complex second;
};

/**
 * psi(x) = exp(i zeta cosh 2x / 2) * sinh^s2(x) * sum_k coeffs[k] cosh^(2k + cosh_parity)(x).
 *
 * All derivatives are obtained by exact term-by-term differentiation.
 */
struct Eigenfunction {
  ModelParams params;
  Branch branch = Branch::P;
  Complex energy;
  int s2 = 0;
  int cosh_parity = 0;
  std::vector<Complex> coeffs;

  /// Highest cosh power carried by the polynomial part.
  int top_cosh_power() const noexcept { return 2 * (static_cast<int>(coeffs.size()) - 1) + cosh_parity; }

  Derivatives phi(Complex x) const;
  Derivatives psi(Complex x) const;
  Complex operator()(Complex x) const { return psi(x).value; }
  /// log|psi(x)|, computed without forming the gauge factor.
  double log_abs_psi(Complex x) const;
};

/// Throws InvalidArgument (from coefficients_at_energy) when E is not a root of the branch's critical polynomial.
Eigenfunction build_eigenfunction(const ModelParams& params, const BranchSpec& branch, Complex energy);

// ---------------------------------------------------------------------------
// Contours and Stokes wedges
// ---------------------------------------------------------------------------

/// Sampling line x = u + i v.
struct ContourSpec {
  double v = 0.0;
  std::vector<double> u_samples;
};

/// True when psi decays toward u -> sign(u) infinity along Im x = v: zeta * sinh(2u) * sin(2v) > 0.
bool in_stokes_wedge(double zeta, double u, double v);

/**
 * Default sample lines: v = -3pi/4 for u > 0 and v = -pi/4 for u < 0 when
 * zeta > 0 (swapped for zeta < 0), u = +-0.1, +-0.2, ..., +-0.1*per_side.
 */
std::vector<ContourSpec> default_contours(double zeta, int per_side = 16);

/**
 * Max over samples of |phi'' + 2i zeta sinh 2x phi' + K phi| divided by
 * |phi''| + |2i zeta sinh 2x phi'| + (|E| + |K - E|) |phi|, with
 * K = E - M^2 + zeta^2 - 2i(M-1) zeta cosh 2x.
 *
 * Throws PreconditionError for a sample outside the wedges.
 */
double ode_residual(const Eigenfunction& f, std::span<const ContourSpec> contours);
double ode_residual(const Eigenfunction& f, const ContourSpec& contour);

struct DecayReport {
  double onset = 1.0;
  std::vector<bool> per_ray;
  bool decreasing = true;
};

/// log|psi| strictly decreasing in |u| for samples with |u| >= onset on every ray.
DecayReport decay_check(const Eigenfunction& f, std::span<const ContourSpec> rays, double onset = 1.0);

// ---------------------------------------------------------------------------
// PT symmetry
// ---------------------------------------------------------------------------

using Evaluator = std::function<Complex(Complex)>;

/// x -> fbar(i pi/2 - x), fbar being f with every explicit coefficient (and i) conjugated.
Evaluator pt_transform(const Eigenfunction& f);

/// x -> conj(g(conj(i pi/2 - x))) for an arbitrary analytic evaluator.
Evaluator pt_apply(Evaluator g);

enum class PTVerdict { Unbroken, Broken };

struct PTClassification {
  PTVerdict verdict = PTVerdict::Unbroken;
  /// PT eigenvalue when unbroken; proportionality constant to the partner when broken.
  Complex eigenvalue;
  std::optional<std::size_t> partner;
  /// Spread of the sampled ratio (and | |eigenvalue| - 1 | when unbroken).
  double residual = 0.0;
};

std::vector<Complex> default_pt_samples();

/**
 * Unbroken if (PT psi)/psi is a unimodular constant over the samples,
 * otherwise broken with the first candidate psi' of energy conj(E) for
 * which (PT psi)/psi' is constant. Samples where |psi| is below 1e-8 of
 * the largest sampled value are skipped. Throws ConsistencyError when
 * neither holds.
 */
PTClassification classify_pt(const Eigenfunction& f, std::span<const Eigenfunction> candidates,
                             std::span<const Complex> samples, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Periodic partner V(theta) = (zeta cos 2 theta - iM)^2
// ---------------------------------------------------------------------------

struct PeriodicReport {
  Complex partner_energy;
  double residual = 0.0;
  bool periodic = false;
};

std::vector<double> default_theta_samples();

/**
 * psibar(theta) = psi(i theta) checked against -psibar'' + V psibar = -E psibar
 * on real theta (relative residual), and for psibar(theta + pi) = psibar(theta).
 */
PeriodicReport periodic_partner_check(const Eigenfunction& f, Complex energy,
                                      std::span<const double> thetas = default_theta_samples());

// ---------------------------------------------------------------------------
// Whole-spectrum verification
// ---------------------------------------------------------------------------

struct VerifyTolerances {
  double oracle = 1e-8;
  double ode = 1e-8;
  double pt = 1e-8;
};

struct VerificationReport {
  bool oracle_match = false;
  double oracle_distance = 0.0;
  double max_ode_residual = 0.0;
  std::vector<PTClassification> pt_verdicts;
  /// Broken verdicts exactly on the pair-member levels.
  bool pt_consistent = false;

  bool ok(const VerifyTolerances& tol = {}) const noexcept {
    return oracle_match && max_ode_residual <= tol.ode && pt_consistent;
  }
};

/// Gauged-matrix oracle, ODE residuals on default contours, and PT classification for every level.
VerificationReport verify_spectrum(const QesSpectrum& spectrum, const VerifyTolerances& tol = {},
                                   const RootOptions& root_opts = {});

}  // namespace qes
