#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qes/bender_dunne.hpp"
#include "qes/cpoly.hpp"

namespace qes {

enum class Reality { Real, PairMember };

std::string_view to_string(Reality r) noexcept;

struct QesLevel {
  Complex energy;
  Branch branch = Branch::P;
  Reality reality = Reality::Real;
  /// Index (into the owning level list) of the complex-conjugate partner.
  std::optional<std::size_t> partner;
  /// Number of coincident roots this level belongs to; copies are listed separately.
  int multiplicity = 1;
};

struct QesSpectrum {
  ModelParams params;
  /// Sorted by real part, then imaginary part.
  std::vector<QesLevel> levels;
  bool pt_broken = false;

  std::vector<Complex> energies() const;
  bool all_real() const noexcept { return !pt_broken; }
};

struct SpectrumOptions {
  RootOptions roots{};
  /// |Im E| <= reality_tol * max(1, |E|) classifies a level as real.
  double reality_tol = 1e-9;
  /// Conjugate partners must agree to pair_tol * max(1, |E|).
  double pair_tol = 1e-8;
};

/**
 * Greedy conjugate matching over a level list.
 *
 * Levels with small imaginary part are real; every other level is paired
 * with the nearest unmatched level to its conjugate. Throws
 * ConsistencyError when a complex level has no partner within pair_tol.
 * Input order is preserved and `partner` indexes into it.
 */
std::vector<QesLevel> classify_reality(std::span<const Complex> energies, const SpectrumOptions& opts = {});

/// Same as above but keeps the branch and multiplicity already stored in `levels`.
void classify_reality(std::vector<QesLevel>& levels, const SpectrumOptions& opts = {});

/**
 * All M QES levels: roots of both critical polynomials, clustered for
 * multiplicity, sorted and classified.
 *
 * Negative zeta is solved at |zeta| and the spectrum conjugated.
 */
QesSpectrum solve(const ModelParams& params, const SpectrumOptions& opts = {});

struct CriticalCoupling {
  int m = 0;
  double zeta_c = 0.0;
  double bracket_width = 0.0;
};

/**
 * Largest zeta for which every level of odd M stays real, by bisection
 * on the reality predicate. The upper end is found by doubling from 1/16.
 *
 * M = 1 is rejected with InvalidArgument (E = 1 - zeta^2 is real for all
 * zeta); even M is rejected likewise. Throws NumericalError if no
 * transition is found below zeta = 2^20.
 */
CriticalCoupling critical_zeta(int m, double tol = 1e-10, const SpectrumOptions& opts = {});

/// Spectrum of V(theta) = (zeta cos 2 theta - iM)^2: energies negated, order reversed, reclassified.
QesSpectrum anti_isospectral(const QesSpectrum& spectrum, const SpectrumOptions& opts = {});

struct ScanPoint {
  double zeta = 0.0;
  /// levels[t] is the level following track t; empty on failure.
  std::vector<QesLevel> levels;
  std::optional<std::string> error;
};

/**
 * Spectra over a coupling grid, with levels tracked by nearest-neighbour
 * continuity between successive successful points. Grid points are solved
 * concurrently and assembled in grid order. A failing point records its
 * error and the scan continues.
 *
 * Throws InvalidArgument if the grid contains zero.
 */
std::vector<ScanPoint> scan(int m, std::span<const double> zeta_grid, const SpectrumOptions& opts = {});

}  // namespace qes
