#include "qes/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>

#include "qes/errors.hpp"

namespace qes {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

// Finite sum of c * sinh^a(x) cosh^b(x), closed under d/dx.
class HyperbolicPoly {
 public:
  void add(int a, int b, Complex c) {
    if (c != Complex{}) terms_[{a, b}] += c;
  }

  HyperbolicPoly derivative() const {
    HyperbolicPoly d;
    for (const auto& [ab, c] : terms_) {
      const auto [a, b] = ab;
      if (a > 0) d.add(a - 1, b + 1, static_cast<double>(a) * c);
      if (b > 0) d.add(a + 1, b - 1, static_cast<double>(b) * c);
    }
    return d;
  }

  Complex operator()(Complex sh, Complex ch) const {
    Complex sum{};
    for (const auto& [ab, c] : terms_) sum += c * ipow(sh, ab.first) * ipow(ch, ab.second);
    return sum;
  }

 private:
  static Complex ipow(Complex z, int k) {
    Complex r{1.0};
    for (int i = 0; i < k; ++i) r *= z;
    return r;
  }
  std::map<std::pair<int, int>, Complex> terms_;
};

HyperbolicPoly phi_poly(const Eigenfunction& f) {
  HyperbolicPoly p;
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) p.add(f.s2, 2 * static_cast<int>(k) + f.cosh_parity, f.coeffs[k]);
  return p;
}

double rel_scale(Complex e) { return std::max(1.0, std::abs(e)); }

}  // namespace

// --- gauged matrix -----------------------------------------------------------

bool GaugedMatrix::is_tridiagonal() const {
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (std::abs(r - c) > 1 && (*this)(r, c) != Complex{}) return false;
  return true;
}

GaugedMatrix build_gauged_matrix(const ModelParams& params) {
  const int dim = params.m();
  const double n = dim - 1;
  const double zeta = params.zeta();
  const double m = params.m();
  GaugedMatrix g{params, dim, std::vector<Complex>(static_cast<std::size_t>(dim * dim))};
  auto at = [&](int r, int c) -> Complex& { return g.entries[static_cast<std::size_t>(r * dim + c)]; };
  for (int j = 0; j < dim; ++j) {
    const double j0 = j - 0.5 * n;
    at(j, j) = -4.0 * j0 * j0 + m * m - zeta * zeta;
    if (j + 1 < dim) at(j + 1, j) = 2.0 * kI * zeta * (j - n);          // J-
    if (j > 0) at(j - 1, j) = -2.0 * kI * zeta * static_cast<double>(j);  // -J+
  }
  return g;
}

CPoly characteristic_polynomial(const GaugedMatrix& m) {
  if (!m.is_tridiagonal()) throw InvalidArgument("characteristic_polynomial: matrix is not tridiagonal");
  CPoly prev = CPoly::constant(1.0);
  if (m.dim == 0) return prev;
  CPoly cur = CPoly::linear_factor(m(0, 0));
  for (int k = 1; k < m.dim; ++k) {
    CPoly next = CPoly::linear_factor(m(k, k)) * cur - scale(prev, m(k, k - 1) * m(k - 1, k));
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

namespace {

// det(E I - H) and its first two E-derivatives by the three-term
// recurrence, with a running bound on the rounding error of the value.
struct DetEval {
  Complex value, first, second;
  double error = 0.0;
};

DetEval determinant_and_derivative(const GaugedMatrix& m, Complex e) {
  constexpr double u = std::numeric_limits<double>::epsilon();
  Complex f_prev{1.0}, d1_prev{}, d2_prev{};
  Complex f = e - m(0, 0), d1{1.0}, d2{};
  double err_prev = 0.0, err = u * std::abs(f);
  for (int k = 1; k < m.dim; ++k) {
    const Complex b = m(k, k - 1) * m(k - 1, k);
    const Complex g = e - m(k, k);
    const Complex f_next = g * f - b * f_prev;
    const Complex d1_next = f + g * d1 - b * d1_prev;
    const Complex d2_next = 2.0 * d1 + g * d2 - b * d2_prev;
    const double err_next = std::abs(g) * err + std::abs(b) * err_prev +
                            2.0 * u * (std::abs(g * f) + std::abs(b * f_prev) + std::abs(f_next));
    f_prev = f;
    d1_prev = d1;
    d2_prev = d2;
    f = f_next;
    d1 = d1_next;
    d2 = d2_next;
    err_prev = err;
    err = err_next;
  }
  return {f, d1, d2, err};
}

}  // namespace

std::vector<Complex> matrix_spectrum(const GaugedMatrix& m, const RootOptions& opts) {
  if (m.dim < 1 || m.dim > kMaxMatrixDim) {
    throw InvalidArgument("matrix_spectrum: dimension " + std::to_string(m.dim) + " outside [1, " +
                          std::to_string(kMaxMatrixDim) + "]");
  }
  std::vector<Complex> z = roots(characteristic_polynomial(m), opts);

  // Aberth polish on det(E I - H) evaluated by the recurrence.
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < opts.max_iterations; ++it) {
    bool moved = false;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const DetEval d = determinant_and_derivative(m, z[k]);
      const Complex p = d.value, dp = d.first;
      if (p == Complex{} || dp == Complex{}) continue;
      Complex s{};
      for (std::size_t j = 0; j < z.size(); ++j) {
        if (j != k && z[j] != z[k]) s += 1.0 / (z[k] - z[j]);
      }
      const Complex ratio = p / dp;
      const Complex step = ratio / (1.0 - ratio * s);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[k] -= step;
      if (std::abs(step) > 4.0 * kEps * rel_scale(z[k])) moved = true;
    }
    if (!moved) break;
  }

  // A double eigenvalue splits into c +- O(sqrt(eps)). Such a pair is
  // merged at the critical point of det between them when det there is
  // within its rounding-error bound.
  std::sort(z.begin(), z.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  std::vector<bool> merged(z.size(), false);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (merged[i]) continue;
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      const double gap = std::abs(z[j] - z[i]);
      if (merged[j] || gap > 1e-4 * rel_scale(z[i])) continue;
      Complex c = 0.5 * (z[i] + z[j]);
      for (int it = 0; it < 20; ++it) {
        const DetEval d = determinant_and_derivative(m, c);
        if (d.second == Complex{}) break;
        const Complex step = d.first / d.second;
        if (!(std::abs(step) <= gap)) break;
        c -= step;
        if (std::abs(step) <= 4.0 * kEps * rel_scale(c)) break;
      }
      if (std::abs(c - 0.5 * (z[i] + z[j])) > gap) continue;
      const DetEval dc = determinant_and_derivative(m, c);
      if (std::abs(dc.value) <= 4.0 * dc.error) {
        z[i] = z[j] = c;
        merged[i] = merged[j] = true;
        break;
      }
    }
  }
  return z;
}

double multiset_distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) pairs.emplace_back(std::abs(a[i] - b[j]), i, j);
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> ua(a.size(), false), ub(b.size(), false);
  double worst = 0.0;
  for (const auto& [d, i, j] : pairs) {
    if (ua[i] || ub[j]) continue;
    ua[i] = ub[j] = true;
    worst = std::max(worst, d);
  }
  return worst;
}

// --- eigenfunctions -------------------------------------------------------------

Derivatives Eigenfunction::phi(Complex x) const {
  const HyperbolicPoly p0 = phi_poly(*this);
  const HyperbolicPoly p1 = p0.derivative();
  const HyperbolicPoly p2 = p1.derivative();
  const Complex sh = std::sinh(x);
  const Complex ch = std::cosh(x);
  return {p0(sh, ch), p1(sh, ch), p2(sh, ch)};
}

Derivatives Eigenfunction::psi(Complex x) const {
  const Derivatives f = phi(x);
  const double zeta = params.zeta();
  const Complex s2x = std::sinh(2.0 * x);
  const Complex c2x = std::cosh(2.0 * x);
  const Complex gauge = std::exp(0.5 * kI * zeta * c2x);
  const Complex w = kI * zeta * s2x;  // g'/g
  return {gauge * f.value, gauge * (f.first + w * f.value),
          gauge * (f.second + 2.0 * w * f.first + (2.0 * kI * zeta * c2x - zeta * zeta * s2x * s2x) * f.value)};
}

double Eigenfunction::log_abs_psi(Complex x) const {
  return -0.5 * params.zeta() * std::cosh(2.0 * x).imag() + std::log(std::abs(phi(x).value));
}

Eigenfunction build_eigenfunction(const ModelParams& params, const BranchSpec& branch, Complex energy) {
  return Eigenfunction{params,           branch.branch,       energy, branch.two_s, branch.cosh_parity(),
                       coefficients_at_energy(params, branch, energy)};
}

// --- contours -------------------------------------------------------------------

bool in_stokes_wedge(double zeta, double u, double v) {
  if (u == 0.0) return false;
  const double sign = (zeta > 0) == (u > 0) ? 1.0 : -1.0;
  return sign * std::sin(2.0 * v) > 1e-12;
}

std::vector<ContourSpec> default_contours(double zeta, int per_side) {
  ContourSpec right{zeta > 0 ? -0.75 * kPi : -0.25 * kPi, {}};
  ContourSpec left{zeta > 0 ? -0.25 * kPi : -0.75 * kPi, {}};
  for (int k = 1; k <= per_side; ++k) {
    right.u_samples.push_back(0.1 * k);
    left.u_samples.push_back(-0.1 * k);
  }
  return {right, left};
}

namespace {

void require_wedge(double zeta, double u, double v, const char* who) {
  if (!in_stokes_wedge(zeta, u, v)) {
    throw PreconditionError(std::string(who) + ": sample x = " + std::to_string(u) + " + " + std::to_string(v) +
                            "i lies outside the Stokes wedges; psi does not decay along this line");
  }
}

}  // namespace

double ode_residual(const Eigenfunction& f, const ContourSpec& contour) {
  const double zeta = f.params.zeta();
  const double m = f.params.m();
  double worst = 0.0;
  for (double u : contour.u_samples) {
    require_wedge(zeta, u, contour.v, "ode_residual");
    const Complex x{u, contour.v};
    const Derivatives d = f.phi(x);
    const Complex t1 = d.second;
    const Complex t2 = 2.0 * kI * zeta * std::sinh(2.0 * x) * d.first;
    const Complex k = f.energy - m * m + zeta * zeta - 2.0 * kI * (m - 1.0) * zeta * std::cosh(2.0 * x);
    const Complex t3 = k * d.value;
    // Local scale uses |E| and |K - E| separately.
    const double denom = std::abs(t1) + std::abs(t2) + (std::abs(f.energy) + std::abs(k - f.energy)) * std::abs(d.value);
    if (denom == 0.0) continue;
    worst = std::max(worst, std::abs(t1 + t2 + t3) / denom);
  }
  return worst;
}

double ode_residual(const Eigenfunction& f, std::span<const ContourSpec> contours) {
  double worst = 0.0;
  for (const auto& c : contours) worst = std::max(worst, ode_residual(f, c));
  return worst;
}

DecayReport decay_check(const Eigenfunction& f, std::span<const ContourSpec> rays, double onset) {
  DecayReport report;
  report.onset = onset;
  for (const auto& ray : rays) {
    std::vector<double> us;
    for (double u : ray.u_samples) {
      require_wedge(f.params.zeta(), u, ray.v, "decay_check");
      if (std::abs(u) >= onset) us.push_back(u);
    }
    std::sort(us.begin(), us.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    bool ok = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double u : us) {
      const double l = f.log_abs_psi({u, ray.v});
      if (!(l < prev)) ok = false;
      prev = l;
    }
    report.per_ray.push_back(ok);
    report.decreasing = report.decreasing && ok;
  }
  return report;
}

// --- PT -------------------------------------------------------------------------

Evaluator pt_transform(const Eigenfunction& f) {
  std::vector<Complex> cc(f.coeffs.size());
  std::transform(f.coeffs.begin(), f.coeffs.end(), cc.begin(), [](Complex c) { return std::conj(c); });
  return [zeta = f.params.zeta(), s2 = f.s2, parity = f.cosh_parity, cc = std::move(cc)](Complex x) {
    const Complex y = Complex{0.0, 0.5 * kPi} - x;
    const Complex sh = std::sinh(y);
    const Complex ch = std::cosh(y);
    Complex poly{};
    Complex chn = parity == 1 ? ch : Complex{1.0};
    for (const auto& c : cc) {
      poly += c * chn;
      chn *= ch * ch;
    }
    if (s2 == 1) poly *= sh;
    return std::exp(-0.5 * kI * zeta * std::cosh(2.0 * y)) * poly;
  };
}

Evaluator pt_apply(Evaluator g) {
  return [g = std::move(g)](Complex x) { return std::conj(g(std::conj(Complex{0.0, 0.5 * kPi} - x))); };
}

std::vector<Complex> default_pt_samples() {
  std::vector<Complex> xs;
  for (int k = 0; k < 8; ++k) xs.emplace_back(-0.55 + 0.17 * k, 0.12 + 0.05 * k);
  return xs;
}

namespace {

// Mean of num(x)/den(x) over usable samples and its relative spread.
std::optional<std::pair<Complex, double>> constant_ratio(const Evaluator& num, const Evaluator& den,
                                                         std::span<const Complex> samples) {
  std::vector<Complex> dv, nv;
  double biggest = 0.0;
  for (const auto& x : samples) {
    dv.push_back(den(x));
    nv.push_back(num(x));
    biggest = std::max(biggest, std::abs(dv.back()));
  }
  std::vector<Complex> ratios;
  for (std::size_t i = 0; i < dv.size(); ++i) {
    if (std::abs(dv[i]) > 1e-8 * biggest) ratios.push_back(nv[i] / dv[i]);
  }
  if (ratios.size() < 2) return std::nullopt;
  Complex mean{};
  for (const auto& r : ratios) mean += r;
  mean /= static_cast<double>(ratios.size());
  if (mean == Complex{}) return std::nullopt;
  double spread = 0.0;
  for (const auto& r : ratios) spread = std::max(spread, std::abs(r - mean) / std::abs(mean));
  return std::make_pair(mean, spread);
}

}  // namespace

PTClassification classify_pt(const Eigenfunction& f, std::span<const Eigenfunction> candidates,
                             std::span<const Complex> samples, double tol) {
  const Evaluator pt = pt_transform(f);
  const Evaluator self = [&f](Complex x) { return f(x); };

  if (const auto r = constant_ratio(pt, self, samples)) {
    const double modulus_err = std::abs(std::abs(r->first) - 1.0);
    if (r->second <= tol && modulus_err <= tol) {
      return {PTVerdict::Unbroken, r->first, std::nullopt, std::max(r->second, modulus_err)};
    }
  }
  const Complex target = std::conj(f.energy);
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const Eigenfunction& g = candidates[j];
    if (std::abs(g.energy - target) > 1e-6 * rel_scale(target)) continue;
    const Evaluator other = [&g](Complex x) { return g(x); };
    if (const auto r = constant_ratio(pt, other, samples); r && r->second <= tol) {
      return {PTVerdict::Broken, r->first, j, r->second};
    }
  }
  throw ConsistencyError("classify_pt: PT psi is neither proportional to psi nor to a conjugate-energy partner");
}

// --- periodic partner -------------------------------------------------------------

std::vector<double> default_theta_samples() {
  std::vector<double> t;
  for (int k = 0; k < 16; ++k) t.push_back(0.1 + k * kPi / 16.0);
  return t;
}

PeriodicReport periodic_partner_check(const Eigenfunction& f, Complex energy, std::span<const double> thetas) {
  const double zeta = f.params.zeta();
  const double m = f.params.m();
  PeriodicReport report{-energy, 0.0, true};
  double biggest = 0.0;
  std::vector<double> jumps;
  for (double th : thetas) {
    const Derivatives d = f.psi({0.0, th});
    const Complex bar = d.value;
    const Complex bar2 = -d.second;  // d^2/dtheta^2 psi(i theta)
    const Complex v = std::pow(zeta * std::cos(2.0 * th) - kI * m, 2);
    const Complex lhs = -bar2 + v * bar;
    const Complex rhs = report.partner_energy * bar;
    const double denom = std::abs(bar2) + std::abs(v * bar) + std::abs(rhs);
    if (denom > 0.0) report.residual = std::max(report.residual, std::abs(lhs - rhs) / denom);

    biggest = std::max(biggest, std::abs(bar));
    jumps.push_back(std::abs(f(Complex{0.0, th + kPi}) - bar));
  }
  for (double j : jumps) {
    if (j > 1e-8 * biggest) report.periodic = false;
  }
  return report;
}

// --- whole spectrum ---------------------------------------------------------------

VerificationReport verify_spectrum(const QesSpectrum& spectrum, const VerifyTolerances& tol,
                                   const RootOptions& root_opts) {
  const ModelParams& params = spectrum.params;
  VerificationReport report;

  const auto energies = spectrum.energies();
  const auto oracle = matrix_spectrum(build_gauged_matrix(params), root_opts);
  report.oracle_distance = multiset_distance(energies, oracle);
  report.oracle_match = report.oracle_distance <= tol.oracle;

  std::vector<Eigenfunction> fns;
  fns.reserve(spectrum.levels.size());
  for (const auto& level : spectrum.levels) {
    fns.push_back(build_eigenfunction(params, critical_index(params.m(), level.branch), level.energy));
  }

  const auto contours = default_contours(params.zeta());
  for (const auto& f : fns) report.max_ode_residual = std::max(report.max_ode_residual, ode_residual(f, contours));

  const auto samples = default_pt_samples();
  report.pt_consistent = true;
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const auto verdict = classify_pt(fns[i], fns, samples, tol.pt);
    const bool broken = verdict.verdict == PTVerdict::Broken;
    if (broken != (spectrum.levels[i].reality == Reality::PairMember)) report.pt_consistent = false;
    report.pt_verdicts.push_back(verdict);
  }
  return report;
}

}  // namespace qes
