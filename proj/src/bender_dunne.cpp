#include "qes/bender_dunne.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qes/errors.hpp"

namespace qes {

namespace {

constexpr Complex kI{0.0, 1.0};

// P_k = (E + shift(k)) P_{k-1} - lower(k) P_{k-2}, likewise for Q.
Complex shift(const ModelParams& prm, const BranchSpec& br, int k) {
  const double s = br.s();
  const double n = k;
  const Complex iz = kI * prm.zeta();
  const Complex mz = static_cast<double>(prm.m()) - iz;
  if (br.branch == Branch::P) {
    return 4.0 * n * n + 8.0 * n * (s - iz - 1.0) + 4.0 * s * s - 8.0 * s + 4.0 + 6.0 * iz - mz * mz;
  }
  return 4.0 * n * n + 4.0 * n * (2.0 * s - 2.0 * iz - 1.0) + 4.0 * s * s - 4.0 * s + 1.0 + 2.0 * iz - mz * mz;
}

Complex lower(const ModelParams& prm, const BranchSpec& br, int k) {
  const double n = k;
  const double m = prm.m();
  const double two_s = br.two_s;
  if (br.branch == Branch::P) {
    return 8.0 * kI * prm.zeta() * (n - 1.0) * (2.0 * n - 3.0) * (m + 3.0 - two_s - 2.0 * n);
  }
  return 8.0 * kI * prm.zeta() * (n - 1.0) * (2.0 * n - 1.0) * (m + 2.0 - two_s - 2.0 * n);
}

}  // namespace

ModelParams::ModelParams(int m, double zeta) : m_(m), zeta_(zeta) {
  if (m < 1) throw InvalidArgument("ModelParams: M must be a positive integer, got " + std::to_string(m));
  if (!std::isfinite(zeta)) throw InvalidArgument("ModelParams: zeta must be finite");
  if (zeta == 0.0) {
    throw InvalidArgument("ModelParams: zeta = 0 is a degenerate coupling (constant potential, no QES truncation)");
  }
}

std::string_view to_string(Branch b) noexcept { return b == Branch::P ? "P" : "Q"; }

BranchSpec critical_index(int m, Branch branch) {
  if (m < 1) throw InvalidArgument("critical_index: M must be a positive integer");
  const bool even = m % 2 == 0;
  BranchSpec spec;
  spec.branch = branch;
  if (branch == Branch::P) {
    spec.two_s = even ? 1 : 0;
    spec.critical_index = (m + 3 - spec.two_s) / 2;
  } else {
    spec.two_s = even ? 0 : 1;
    spec.critical_index = (m + 2 - spec.two_s) / 2;
  }
  return spec;
}

RecursionTable generate(const ModelParams& params, const BranchSpec& branch, int n_max) {
  if (n_max < 1) throw InvalidArgument("generate: n_max must be at least 1");
  if (branch.two_s != 0 && branch.two_s != 1) throw InvalidArgument("generate: s must be 0 or 1/2");

  RecursionTable table{params, branch, {}};
  table.polys.reserve(static_cast<std::size_t>(n_max) + 1);
  table.polys.push_back(CPoly::constant(1.0));
  CPoly prev2;  // polys[-1] = 0
  for (int k = 1; k <= n_max; ++k) {
    const CPoly& prev = table.polys.back();
    CPoly next = CPoly({shift(params, branch, k), Complex{1.0}}) * prev;
    const Complex low = lower(params, branch, k);
    if (low != Complex{} && !prev2.is_zero()) next = next - scale(prev2, low);
    prev2 = prev;
    table.polys.push_back(std::move(next));
  }
  return table;
}

CPoly critical_polynomial(const ModelParams& params, Branch branch) {
  const BranchSpec spec = critical_index(params.m(), branch);
  if (spec.critical_degree() == 0) return CPoly::constant(1.0);
  return generate(params, spec, spec.critical_degree()).polys.back();
}

double FactorizationReport::max_relative() const noexcept {
  return relative_norms.empty() ? 0.0 : *std::max_element(relative_norms.begin(), relative_norms.end());
}

FactorizationReport factorization_check(const ModelParams& params, Branch branch, int extra) {
  if (extra < 1) throw InvalidArgument("factorization_check: extra must be at least 1");
  const BranchSpec spec = critical_index(params.m(), branch);
  const int first = spec.critical_degree();
  const RecursionTable table = generate(params, spec, first + extra);
  const CPoly& crit = table.polys[static_cast<std::size_t>(first)];

  FactorizationReport report{spec, {}, {}};
  for (int j = 0; j <= extra; ++j) {
    const CPoly& dividend = table.polys[static_cast<std::size_t>(first + j)];
    const DivRem dr = divrem(dividend, crit);
    const double norm = dr.remainder.max_abs_coeff();
    report.remainder_norms.push_back(norm);
    report.relative_norms.push_back(norm / dividend.max_abs_coeff());
  }
  return report;
}

std::vector<Complex> coefficients_at_energy(const ModelParams& params, const BranchSpec& branch, Complex energy,
                                            double tol) {
  const int last = branch.critical_degree();
  const CPoly crit = last == 0 ? CPoly::constant(1.0) : generate(params, branch, last).polys.back();
  if (!(std::abs(crit(energy)) <= tol * crit.eval_scale(energy))) {
    throw InvalidArgument("coefficients_at_energy: energy is not a root of the " + std::string(to_string(branch.branch)) +
                          " critical polynomial; the series does not terminate");
  }

  // Scalar recursion for P_k(E) / Q_k(E), k = 0..n_c-2.
  std::vector<Complex> values{Complex{1.0}};
  Complex prev2{};
  for (int k = 1; k < last; ++k) {
    const Complex next = (energy + shift(params, branch, k)) * values.back() - lower(params, branch, k) * prev2;
    prev2 = values.back();
    values.push_back(next);
  }

  const int parity = branch.cosh_parity();
  std::vector<Complex> coeffs(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const int n = 2 * static_cast<int>(k) + parity;
    coeffs[k] = values[k] / std::tgamma(static_cast<double>(n) + 1.0);
  }
  const Complex lead = coeffs.back();
  for (auto& c : coeffs) c /= lead;
  coeffs.back() = 1.0;
  return coeffs;
}

}  // namespace qes
