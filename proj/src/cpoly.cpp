#include "qes/cpoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>

#include "qes/errors.hpp"

namespace qes {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

// Value and first derivative by simultaneous Horner.
void horner2(std::span<const Complex> a, Complex z, Complex& p, Complex& dp) {
  p = a.back();
  dp = Complex{};
  for (std::size_t k = a.size() - 1; k-- > 0;) {
    dp = dp * z + p;
    p = p * z + a[k];
  }
}

double abs_scale(std::span<const Complex> a, double r) {
  double s = 0.0;
  for (std::size_t k = a.size(); k-- > 0;) s = s * r + std::abs(a[k]);
  return s;
}

bool less_re_im(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

CPoly::CPoly(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  for (const auto& c : coeffs_) {
    if (!finite(c)) throw InvalidArgument("CPoly: non-finite coefficient");
  }
  trim();
}

CPoly::CPoly(std::initializer_list<Complex> coeffs) : CPoly(std::vector<Complex>(coeffs)) {}

CPoly CPoly::constant(Complex c) { return CPoly({c}); }

CPoly CPoly::linear_factor(Complex root) { return CPoly({-root, Complex{1.0}}); }

CPoly CPoly::from_roots(std::span<const Complex> roots) {
  CPoly p = constant(1.0);
  for (const auto& r : roots) p = p * linear_factor(r);
  return p;
}

void CPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == Complex{}) coeffs_.pop_back();
}

Complex CPoly::operator()(Complex e) const noexcept {
  Complex acc{};
  for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * e + coeffs_[k];
  return acc;
}

CPoly CPoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Complex> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return CPoly(std::move(d));
}

CPoly CPoly::conj() const {
  std::vector<Complex> c(coeffs_.size());
  std::transform(coeffs_.begin(), coeffs_.end(), c.begin(), [](Complex z) { return std::conj(z); });
  return CPoly(std::move(c));
}

CPoly CPoly::monic() const {
  if (is_zero()) return *this;
  return scale(*this, 1.0 / leading());
}

double CPoly::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double CPoly::eval_scale(Complex e) const noexcept {
  if (is_zero()) return 0.0;
  return abs_scale(coeffs_, std::abs(e));
}

CPoly add(const CPoly& a, const CPoly& b) {
  const std::size_t n = std::max(a.coefficients().size(), b.coefficients().size());
  std::vector<Complex> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = a[k] + b[k];
  return CPoly(std::move(c));
}

CPoly sub(const CPoly& a, const CPoly& b) { return add(a, scale(b, -1.0)); }

CPoly mul(const CPoly& a, const CPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const auto ac = a.coefficients();
  const auto bc = b.coefficients();
  std::vector<Complex> c(ac.size() + bc.size() - 1);
  for (std::size_t i = 0; i < ac.size(); ++i)
    for (std::size_t j = 0; j < bc.size(); ++j) c[i + j] += ac[i] * bc[j];
  return CPoly(std::move(c));
}

CPoly scale(const CPoly& a, Complex s) {
  std::vector<Complex> c(a.coefficients().begin(), a.coefficients().end());
  for (auto& x : c) x *= s;
  return CPoly(std::move(c));
}

DivRem divrem(const CPoly& a, const CPoly& b) {
  if (b.is_zero()) throw InvalidArgument("divrem: division by the zero polynomial");
  const int db = b.degree();
  const int da = a.degree();
  if (da < db) return {CPoly{}, a};

  std::vector<Complex> rem(a.coefficients().begin(), a.coefficients().end());
  std::vector<Complex> quot(static_cast<std::size_t>(da - db + 1));
  const Complex lead = b.leading();
  for (int k = da - db; k >= 0; --k) {
    const Complex q = rem[static_cast<std::size_t>(k + db)] / lead;
    quot[static_cast<std::size_t>(k)] = q;
    for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(k + j)] -= q * b[static_cast<std::size_t>(j)];
  }
  rem.resize(static_cast<std::size_t>(db));
  return {CPoly(std::move(quot)), CPoly(std::move(rem))};
}

std::vector<Complex> roots(const CPoly& p, const RootOptions& opts) {
  if (p.degree() < 1) throw InvalidArgument("roots: polynomial degree must be at least 1");

  const CPoly pm = p.monic();
  std::vector<Complex> a(pm.coefficients().begin(), pm.coefficients().end());

  // Exact zeros at the origin.
  std::vector<Complex> result;
  std::size_t zeros = 0;
  while (zeros < a.size() - 1 && a[zeros] == Complex{}) ++zeros;
  result.assign(zeros, Complex{});
  a.erase(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(zeros));

  const std::size_t n = a.size() - 1;
  if (n == 1) {
    result.push_back(-a[0]);
  } else if (n > 1) {
    // Rescale E = sigma * w so that the product of root moduli is one.
    const double sigma = std::pow(std::abs(a[0]), 1.0 / static_cast<double>(n));
    std::vector<Complex> b(a.size());
    for (std::size_t k = 0; k <= n; ++k) b[k] = a[k] * std::pow(sigma, static_cast<double>(k) - static_cast<double>(n));

    const Complex centroid = -b[n - 1] / static_cast<double>(n);
    Complex pc, dpc;
    horner2(b, centroid, pc, dpc);
    double radius = std::pow(std::abs(pc), 1.0 / static_cast<double>(n));
    if (!(radius > 1e-3)) radius = 1.0;

    std::vector<Complex> z(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4;
      z[k] = centroid + std::polar(radius, theta);
    }

    std::vector<bool> done(n, false);
    const double stop = 8.0 * static_cast<double>(n) * kEps;
    bool all_done = false;
    for (int it = 0; it < opts.max_iterations && !all_done; ++it) {
      all_done = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (done[k]) continue;
        Complex pz, dpz;
        horner2(b, z[k], pz, dpz);
        if (std::abs(pz) <= stop * abs_scale(b, std::abs(z[k]))) {
          done[k] = true;
          continue;
        }
        all_done = false;
        Complex s{};
        for (std::size_t j = 0; j < n; ++j) {
          if (j != k) s += 1.0 / (z[k] - z[j]);
        }
        const Complex ratio = pz / dpz;
        Complex step = ratio / (1.0 - ratio * s);
        if (!finite(step)) step = Complex{1e-3 * radius, 1e-3 * radius};
        z[k] -= step;
      }
    }
    for (auto& w : z) result.push_back(sigma * w);
    if (!all_done) {
      throw RootFindingError("roots: Aberth iteration did not converge within " +
                                 std::to_string(opts.max_iterations) + " iterations",
                             result);
    }
  }

  // One Newton polish step on the caller's polynomial, kept only if it helps.
  const CPoly dp = p.derivative();
  for (auto& r : result) {
    const Complex d = dp(r);
    if (d == Complex{}) continue;
    const Complex cand = r - p(r) / d;
    if (finite(cand) && std::abs(p(cand)) < std::abs(p(r))) r = cand;
  }

  for (const auto& r : result) {
    if (!(std::abs(p(r)) <= opts.tol * p.eval_scale(r))) {
      throw RootFindingError("roots: root fails backward-error bound", result);
    }
  }
  return result;
}

namespace {

// An m-fold root of p is a simple root of p^(m-1): polish the candidate
// centre there by Newton, then accept it if p^(j)(c) vanishes for j < m to
// within a small multiple of the rounding error of evaluating p^(j).
std::optional<Complex> refine_multiple_root(const std::vector<CPoly>& derivs, Complex c, int m, double reach) {
  const CPoly& f = derivs[static_cast<std::size_t>(m - 1)];
  const CPoly& df = derivs[static_cast<std::size_t>(m)];
  const Complex start = c;
  for (int it = 0; it < 50; ++it) {
    const Complex d = df(c);
    if (d == Complex{}) break;
    const Complex step = f(c) / d;
    c -= step;
    if (!finite(c) || std::abs(c - start) > reach) return std::nullopt;
    if (std::abs(step) <= 4.0 * kEps * std::max(1.0, std::abs(c))) break;
  }
  for (int j = 0; j < m; ++j) {
    const CPoly& dj = derivs[static_cast<std::size_t>(j)];
    const double n = std::max(1, dj.degree());
    if (!(std::abs(dj(c)) <= 64.0 * n * kEps * dj.eval_scale(c))) return std::nullopt;
  }
  return c;
}

}  // namespace

std::vector<RootCluster> cluster_roots(const CPoly& p, std::span<const Complex> rts, const RootOptions& opts) {
  std::vector<Complex> sorted(rts.begin(), rts.end());
  std::sort(sorted.begin(), sorted.end(), less_re_im);

  std::vector<CPoly> derivs{p};
  derivs.reserve(sorted.size() + 1);
  for (std::size_t j = 1; j <= sorted.size(); ++j) derivs.push_back(derivs.back().derivative());

  std::vector<bool> used(sorted.size(), false);
  std::vector<RootCluster> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (used[i]) continue;
    const Complex ri = sorted[i];

    std::vector<std::size_t> near;
    const double loose = 1e-2 * std::max(1.0, std::abs(ri));
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      if (j != i && !used[j] && std::abs(sorted[j] - ri) <= loose) near.push_back(j);
    }
    std::sort(near.begin(), near.end(), [&](std::size_t x, std::size_t y) {
      return std::abs(sorted[x] - ri) < std::abs(sorted[y] - ri);
    });

    std::vector<std::size_t> group{i};
    std::optional<Complex> centre;
    for (std::size_t m = near.size() + 1; m >= 2; --m) {
      Complex c = ri;
      double spread = 0.0;
      for (std::size_t t = 0; t + 1 < m; ++t) {
        c += sorted[near[t]];
        spread = std::max(spread, std::abs(sorted[near[t]] - ri));
      }
      c /= static_cast<double>(m);
      centre = refine_multiple_root(derivs, c, static_cast<int>(m), spread + loose);
      if (centre) {
        group.insert(group.end(), near.begin(), near.begin() + static_cast<std::ptrdiff_t>(m - 1));
        break;
      }
    }
    if (group.size() == 1) {
      for (std::size_t j : near) {
        if (std::abs(sorted[j] - ri) <= opts.cluster_radius) group.push_back(j);
      }
    }

    Complex c{};
    for (std::size_t j : group) {
      used[j] = true;
      c += sorted[j];
    }
    out.push_back({centre ? *centre : c / static_cast<double>(group.size()), static_cast<int>(group.size())});
  }
  std::sort(out.begin(), out.end(), [](const RootCluster& x, const RootCluster& y) { return less_re_im(x.value, y.value); });
  return out;
}

}  // namespace qes
