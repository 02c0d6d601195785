#include "qes/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <string>
#include <thread>
#include <tuple>

#include "qes/errors.hpp"

namespace qes {

namespace {

bool level_less(const QesLevel& a, const QesLevel& b) {
  if (a.energy.real() != b.energy.real()) return a.energy.real() < b.energy.real();
  return a.energy.imag() < b.energy.imag();
}

bool is_real(Complex e, double tol) { return std::abs(e.imag()) <= tol * std::max(1.0, std::abs(e)); }

bool any_pair(const std::vector<QesLevel>& levels) {
  return std::any_of(levels.begin(), levels.end(), [](const QesLevel& l) { return l.reality == Reality::PairMember; });
}

// Sort, classify, then project onto an exactly conjugation-closed set:
// real levels get Im = +0 and each pair is replaced by its symmetrized
// average. Moves are bounded by the classification tolerances.
void canonicalize(std::vector<QesLevel>& levels, const SpectrumOptions& opts) {
  std::stable_sort(levels.begin(), levels.end(), level_less);
  classify_reality(levels, opts);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    QesLevel& l = levels[i];
    if (l.reality == Reality::Real) {
      l.energy = Complex{l.energy.real() + 0.0, 0.0};
    } else if (*l.partner > i) {
      QesLevel& other = levels[*l.partner];
      const Complex avg = 0.5 * (l.energy + std::conj(other.energy));
      l.energy = avg;
      other.energy = std::conj(avg);
    }
  }
  std::stable_sort(levels.begin(), levels.end(), level_less);
  classify_reality(levels, opts);
}

}  // namespace

std::string_view to_string(Reality r) noexcept { return r == Reality::Real ? "real" : "pair_member"; }

std::vector<Complex> QesSpectrum::energies() const {
  std::vector<Complex> out;
  out.reserve(levels.size());
  for (const auto& l : levels) out.push_back(l.energy);
  return out;
}

void classify_reality(std::vector<QesLevel>& levels, const SpectrumOptions& opts) {
  std::vector<bool> matched(levels.size(), false);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    levels[i].partner.reset();
    if (is_real(levels[i].energy, opts.reality_tol)) {
      levels[i].reality = Reality::Real;
      matched[i] = true;
    } else {
      levels[i].reality = Reality::PairMember;
    }
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (matched[i]) continue;
    const Complex target = std::conj(levels[i].energy);
    std::optional<std::size_t> best;
    double best_dist = 0.0;
    for (std::size_t j = 0; j < levels.size(); ++j) {
      if (j == i || matched[j]) continue;
      const double d = std::abs(levels[j].energy - target);
      if (!best || d < best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (!best || best_dist > opts.pair_tol * std::max(1.0, std::abs(levels[i].energy))) {
      throw ConsistencyError("classify_reality: complex level (" + std::to_string(levels[i].energy.real()) + ", " +
                             std::to_string(levels[i].energy.imag()) + ") has no conjugate partner");
    }
    matched[i] = matched[*best] = true;
    levels[i].partner = *best;
    levels[*best].partner = i;
  }
}

std::vector<QesLevel> classify_reality(std::span<const Complex> energies, const SpectrumOptions& opts) {
  std::vector<QesLevel> levels;
  levels.reserve(energies.size());
  for (const auto& e : energies) levels.push_back(QesLevel{e, Branch::P, Reality::Real, std::nullopt, 1});
  classify_reality(levels, opts);
  return levels;
}

QesSpectrum solve(const ModelParams& params, const SpectrumOptions& opts) {
  const bool flip = params.zeta() < 0.0;
  const ModelParams positive(params.m(), std::abs(params.zeta()));

  QesSpectrum out{params, {}, false};
  for (Branch b : {Branch::P, Branch::Q}) {
    const CPoly crit = critical_polynomial(positive, b);
    if (crit.degree() < 1) continue;
    const auto rts = roots(crit, opts.roots);
    for (const auto& cl : cluster_roots(crit, rts, opts.roots)) {
      const Complex e = flip ? std::conj(cl.value) : cl.value;
      for (int k = 0; k < cl.multiplicity; ++k) out.levels.push_back(QesLevel{e, b, Reality::Real, std::nullopt, cl.multiplicity});
    }
  }
  canonicalize(out.levels, opts);
  out.pt_broken = any_pair(out.levels);
  return out;
}

CriticalCoupling critical_zeta(int m, double tol, const SpectrumOptions& opts) {
  if (m == 1) throw InvalidArgument("critical_zeta: M = 1 has no finite critical coupling (E = 1 - zeta^2 is always real)");
  if (m < 1 || m % 2 == 0) throw InvalidArgument("critical_zeta: M must be an odd integer >= 3");
  if (!(tol > 0.0)) throw InvalidArgument("critical_zeta: tol must be positive");

  const auto real_at = [&](double z) { return solve(ModelParams(m, z), opts).all_real(); };

  double lo = 1.0 / 16.0;
  while (!real_at(lo)) {
    lo *= 0.5;
    if (lo < 0x1p-30) throw NumericalError("critical_zeta: levels are complex down to zeta = 2^-30");
  }
  double hi = 2.0 * lo;
  while (real_at(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0x1p20) {
      throw NumericalError("critical_zeta: no transition found for zeta in (0, 2^20]; all levels stay real");
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (real_at(mid) ? lo : hi) = mid;
  }
  return CriticalCoupling{m, 0.5 * (lo + hi), hi - lo};
}

QesSpectrum anti_isospectral(const QesSpectrum& spectrum, const SpectrumOptions& opts) {
  QesSpectrum out{spectrum.params, {}, false};
  out.levels.reserve(spectrum.levels.size());
  for (auto it = spectrum.levels.rbegin(); it != spectrum.levels.rend(); ++it) {
    QesLevel l = *it;
    l.energy = -l.energy;
    out.levels.push_back(l);
  }
  canonicalize(out.levels, opts);
  out.pt_broken = any_pair(out.levels);
  return out;
}

namespace {

// Reorders `next` so that next[t] is the level closest to prev[t], by
// greedy assignment over all (track, level) distances.
std::vector<QesLevel> follow_tracks(const std::vector<QesLevel>& prev, const std::vector<QesLevel>& next) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t t = 0; t < prev.size(); ++t)
    for (std::size_t i = 0; i < next.size(); ++i) pairs.emplace_back(std::abs(prev[t].energy - next[i].energy), t, i);
  std::sort(pairs.begin(), pairs.end());

  std::vector<std::optional<std::size_t>> assign(prev.size());
  std::vector<bool> taken(next.size(), false);
  for (const auto& [d, t, i] : pairs) {
    if (assign[t] || taken[i]) continue;
    assign[t] = i;
    taken[i] = true;
  }
  std::vector<QesLevel> out;
  out.reserve(next.size());
  for (const auto& a : assign) out.push_back(next[*a]);
  return out;
}

}  // namespace

std::vector<ScanPoint> scan(int m, std::span<const double> zeta_grid, const SpectrumOptions& opts) {
  for (double z : zeta_grid) {
    if (z == 0.0) throw InvalidArgument("scan: zeta grid must exclude 0");
  }

  std::vector<ScanPoint> out(zeta_grid.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < zeta_grid.size(); i = next++) {
      ScanPoint& pt = out[i];
      pt.zeta = zeta_grid[i];
      try {
        pt.levels = solve(ModelParams(m, pt.zeta), opts).levels;
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(zeta_grid.size(), std::max(1u, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  const std::vector<QesLevel>* last = nullptr;
  for (ScanPoint& pt : out) {
    if (pt.error) continue;
    if (last != nullptr && last->size() == pt.levels.size()) pt.levels = follow_tracks(*last, pt.levels);
    // Partner indices refer to sorted order; recompute after reordering.
    classify_reality(pt.levels, opts);
    last = &pt.levels;
  }
  return out;
}

}  // namespace qes
