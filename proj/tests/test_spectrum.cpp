#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "qes/errors.hpp"
#include "qes/spectrum.hpp"
#include "test_helpers.hpp"

using namespace qes;
using qes::testing::multiset_gap;

namespace {

constexpr Complex I{0.0, 1.0};

std::vector<Complex> conj_all(std::vector<Complex> v) {
  for (auto& x : v) x = std::conj(x);
  return v;
}

// Tridiagonal gauged matrix rebuilt from the generator actions and handed to
// a dense eigensolver; shares no code with the critical-polynomial route.
std::vector<Complex> dense_eigenvalues(int m, double zeta) {
  const int n = m - 1;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    h(j, j) = -4.0 * (j - 0.5 * n) * (j - 0.5 * n) + m * m - zeta * zeta;
    if (j + 1 < m) h(j + 1, j) = 2.0 * I * zeta * static_cast<double>(j - n);
    if (j > 0) h(j - 1, j) = -2.0 * I * zeta * static_cast<double>(j);
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h, false);
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + m);
  return out;
}

}  // namespace

TEST_CASE("solve: M = 2 conjugate pair") {
  const auto s = solve(ModelParams(2, 1.0));
  REQUIRE(s.levels.size() == 2);
  CHECK(s.pt_broken);
  CHECK(s.levels[0].energy == Complex{2.0, -2.0});
  CHECK(s.levels[1].energy == Complex{2.0, 2.0});
  CHECK(s.levels[0].partner == 1u);
  CHECK(s.levels[1].partner == 0u);
  CHECK(s.levels[0].branch == Branch::P);
  CHECK(s.levels[1].branch == Branch::Q);
}

TEST_CASE("solve: M = 1 and M = 3 real spectra") {
  const auto s1 = solve(ModelParams(1, 0.5));
  REQUIRE(s1.levels.size() == 1);
  CHECK(std::abs(s1.levels[0].energy - 0.75) < 1e-15);
  CHECK_FALSE(s1.pt_broken);

  const auto s3 = solve(ModelParams(3, 0.3));
  CHECK(multiset_gap({4.91, 5.31, 8.51}, s3.energies()) < 1e-12);
  for (const auto& l : s3.levels) CHECK(l.reality == Reality::Real);
  CHECK(s3.levels[0].branch == Branch::Q);
}

TEST_CASE("solve: M = 4 two conjugate pairs from the closed forms") {
  const double z = 0.2;
  const Complex r1 = std::sqrt(Complex{1.0 - z * z, -z});
  const Complex r2 = std::sqrt(Complex{1.0 - z * z, z});
  const std::vector<Complex> expected{11.0 - z * z - 2.0 * I * z + 4.0 * r1, 11.0 - z * z - 2.0 * I * z - 4.0 * r1,
                                      11.0 - z * z + 2.0 * I * z + 4.0 * r2, 11.0 - z * z + 2.0 * I * z - 4.0 * r2};
  const auto s = solve(ModelParams(4, z));
  CHECK(multiset_gap(expected, s.energies()) < 1e-12);
  CHECK(s.pt_broken);
  for (const auto& l : s.levels) CHECK(l.reality == Reality::PairMember);
}

TEST_CASE("solve: negative zeta conjugates the spectrum") {
  for (int m : {2, 3, 4, 7}) {
    const auto pos = solve(ModelParams(m, 0.45));
    const auto neg = solve(ModelParams(m, -0.45));
    CHECK(multiset_gap(conj_all(pos.energies()), neg.energies()) < 1e-12);
    CHECK(neg.pt_broken == pos.pt_broken);
  }
}

TEST_CASE("classify_reality") {
  const std::vector<Complex> pair{Complex{2.0, 2.0}, Complex{2.0, -2.0}};
  const auto lv = classify_reality(pair);
  CHECK(lv[0].reality == Reality::PairMember);
  CHECK(lv[0].partner == 1u);
  CHECK(lv[1].partner == 0u);

  const std::vector<Complex> reals{4.91, 5.31, 8.51};
  for (const auto& l : classify_reality(reals)) CHECK(l.reality == Reality::Real);

  const std::vector<Complex> twice{5.0, 5.0};
  const auto d = classify_reality(twice);
  REQUIRE(d.size() == 2);
  CHECK(d[0].reality == Reality::Real);
  CHECK(d[1].reality == Reality::Real);

  const std::vector<Complex> lonely{Complex{1.0, 1.0}, 3.0};
  CHECK_THROWS_AS(classify_reality(lonely), ConsistencyError);

  // Tolerance: |Im| <= 1e-9 max(1, |E|).
  const std::vector<Complex> tiny{Complex{100.0, 5e-8}, Complex{100.0, -5e-8}};
  for (const auto& l : classify_reality(tiny)) CHECK(l.reality == Reality::Real);
}

TEST_CASE("critical_zeta: M = 3 is 1/2 and the top levels merge there") {
  const auto cc = critical_zeta(3, 1e-8);
  CHECK(cc.m == 3);
  CHECK(std::abs(cc.zeta_c - 0.5) <= 1e-8);
  CHECK(cc.bracket_width <= 1e-8);

  const auto at = solve(ModelParams(3, 0.5));
  REQUIRE(at.levels.size() == 3);
  CHECK(at.levels[1].multiplicity == 2);
  CHECK(at.levels[2].multiplicity == 2);
  CHECK(std::abs(at.levels[2].energy - 6.75) < 1e-12);
  CHECK_FALSE(at.pt_broken);

  // The bracket invariant: real just below, complex just above.
  CHECK(solve(ModelParams(3, cc.zeta_c - cc.bracket_width)).all_real());
  CHECK_FALSE(solve(ModelParams(3, cc.zeta_c + cc.bracket_width)).all_real());
}

TEST_CASE("critical_zeta: rejected inputs") {
  CHECK_THROWS_AS(critical_zeta(1), InvalidArgument);
  CHECK_THROWS_AS(critical_zeta(4), InvalidArgument);
  CHECK_THROWS_AS(critical_zeta(-3), InvalidArgument);
  CHECK_THROWS_AS(critical_zeta(3, 0.0), InvalidArgument);
}

TEST_CASE("critical_zeta: M = 5, 7 fixtures agree with a dense-grid eigenvalue scan") {
  // Regression fixtures from bisection at tol 1e-10.
  const std::vector<std::pair<int, double>> fixtures{{5, 0.29592589984531514}, {7, 0.2106084479310084}};
  for (const auto& [m, expected] : fixtures) {
    const auto cc = critical_zeta(m, 1e-10);
    CHECK(std::abs(cc.zeta_c - expected) < 1e-9);

    // Independent route: dense eigenvalues on a grid of step 1e-3.
    double last_real = 0.0, first_complex = 0.0;
    for (int k = 1; k < 2000; ++k) {
      const double z = 1e-3 * k;
      const auto ev = dense_eigenvalues(m, z);
      double worst_im = 0.0;
      for (const auto& e : ev) worst_im = std::max(worst_im, std::abs(e.imag()));
      if (worst_im < 1e-6) {
        last_real = z;
      } else {
        first_complex = z;
        break;
      }
    }
    CAPTURE(m);
    CHECK(last_real <= cc.zeta_c);
    CHECK(cc.zeta_c < first_complex);
    CHECK(first_complex - last_real == doctest::Approx(1e-3));
  }
}

TEST_CASE("anti_isospectral") {
  const auto s2 = solve(ModelParams(2, 1.0));
  const auto a2 = anti_isospectral(s2);
  CHECK(multiset_gap({Complex{-2.0, -2.0}, Complex{-2.0, 2.0}}, a2.energies()) == 0.0);
  CHECK(a2.pt_broken);

  const auto a1 = anti_isospectral(solve(ModelParams(1, 0.5)));
  REQUIRE(a1.levels.size() == 1);
  CHECK(std::abs(a1.levels[0].energy + 0.75) < 1e-15);

  // Distinct real levels come back in reversed order.
  const auto s3 = solve(ModelParams(3, 0.3));
  const auto a3 = anti_isospectral(s3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(a3.levels[k].energy == -s3.levels[2 - k].energy);
  CHECK(a3.levels[0].branch == s3.levels[2].branch);

  for (int m = 1; m <= 8; ++m) {
    const auto s = solve(ModelParams(m, 0.77));
    const auto back = anti_isospectral(anti_isospectral(s));
    CHECK(multiset_gap(s.energies(), back.energies()) == 0.0);
  }
}

TEST_CASE("scan: M = 3 reality switches at zeta = 1/2") {
  std::vector<double> grid;
  for (int k = 1; k <= 9; ++k) grid.push_back((0.1 * (9 - k) + 0.9 * (k - 1)) / 8.0);
  const auto pts = scan(3, grid);
  REQUIRE(pts.size() == 9);
  for (const auto& pt : pts) {
    REQUIRE_FALSE(pt.error);
    REQUIRE(pt.levels.size() == 3);
    double im = 0.0;
    for (const auto& l : pt.levels) im = std::max(im, std::abs(l.energy.imag()));
    CAPTURE(pt.zeta);
    if (pt.zeta <= 0.5) {
      CHECK(im == 0.0);
    } else {
      CHECK(im > 0.0);
    }
  }
  // At 0.5 the two top tracks coincide at 6.75.
  const auto& half = pts[4];
  CHECK(half.zeta == 0.5);
  int at_675 = 0;
  for (const auto& l : half.levels) at_675 += std::abs(l.energy - 6.75) < 1e-12 ? 1 : 0;
  CHECK(at_675 == 2);
}

TEST_CASE("scan: tracking, single point, failures") {
  const std::vector<double> one{0.3};
  const auto single = scan(3, one);
  REQUIRE(single.size() == 1);
  CHECK(multiset_gap(single[0].levels.empty() ? std::vector<Complex>{} : std::vector<Complex>{
                         single[0].levels[0].energy, single[0].levels[1].energy, single[0].levels[2].energy},
                     solve(ModelParams(3, 0.3)).energies()) == 0.0);

  // Tracks follow continuity: small steps move each track by a small amount.
  std::vector<double> fine;
  for (int k = 0; k < 50; ++k) fine.push_back(0.2 + 0.01 * k);
  const auto pts = scan(4, fine);
  for (std::size_t p = 1; p < pts.size(); ++p)
    for (std::size_t t = 0; t < 4; ++t) CHECK(std::abs(pts[p].levels[t].energy - pts[p - 1].levels[t].energy) < 0.2);

  const std::vector<double> bad{0.1, 0.0};
  CHECK_THROWS_AS(scan(3, bad), InvalidArgument);

  // Invalid M is recorded per point and the scan continues.
  const std::vector<double> g{0.1, 0.2};
  const auto failed = scan(0, g);
  REQUIRE(failed.size() == 2);
  CHECK(failed[0].error.has_value());
  CHECK(failed[1].error.has_value());
}

TEST_CASE("conjugation closure for M <= 10, |zeta| <= 2") {
  for (int m = 1; m <= 10; ++m)
    for (double z : {-2.0, -1.1, -0.3, 0.05, 0.4, 1.0, 2.0}) {
      const auto s = solve(ModelParams(m, z));
      CHECK(s.levels.size() == static_cast<std::size_t>(m));
      CHECK(multiset_gap(s.energies(), conj_all(s.energies())) <= 1e-8);
    }
}

TEST_CASE("even M has no real levels; odd M is real below the critical coupling") {
  for (int m : {2, 4, 6})
    for (double z : {0.1, 0.5, 1.0, 2.0})
      for (const auto& l : solve(ModelParams(m, z)).levels) CHECK(l.reality == Reality::PairMember);

  for (int m : {3, 5, 7}) {
    const double zc = critical_zeta(m, 1e-10).zeta_c;
    const auto s = solve(ModelParams(m, 0.9 * zc));
    CHECK_FALSE(s.pt_broken);
    for (const auto& l : s.levels) CHECK(l.reality == Reality::Real);
  }
}

TEST_CASE("Vieta sum rule: level sum equals minus the subleading coefficients") {
  for (int m = 1; m <= 10; ++m)
    for (double z : {0.2, 0.9, 1.6}) {
      const ModelParams prm(m, z);
      Complex expected{};
      for (Branch b : {Branch::P, Branch::Q}) {
        const CPoly c = critical_polynomial(prm, b);
        if (c.degree() >= 1) expected -= c[static_cast<std::size_t>(c.degree() - 1)];
      }
      Complex sum{};
      for (const auto& e : solve(prm).energies()) sum += e;
      CHECK(std::abs(sum - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
    }
}
