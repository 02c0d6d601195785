#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "qes/output.hpp"

using namespace qes;
using namespace qes::output;

TEST_CASE("format_double round-trips") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(8.510000000000002) == "8.510000000000002");
  CHECK(format_double(-0.0) == "-0");
  CHECK(format_double(1e-300) == "1e-300");

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int t = 0; t < 1000; ++t) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    const std::string s = format_double(x);
    CHECK(std::stod(s) == x);
    CHECK(s.size() <= 24);
  }
}

TEST_CASE("spectrum_record layout") {
  const auto s = solve(ModelParams(2, 1.0));
  const auto j = spectrum_record(s, std::nullopt, 0);
  CHECK(j["schema_version"] == "1.0");
  CHECK(j["command"] == "spectrum");
  CHECK(j["params"]["M"] == 2);
  CHECK(j["params"]["zeta"] == 1.0);
  CHECK(j["pt_broken"] == true);
  CHECK(j["verification"].is_null());
  CHECK(j["timing_ms"] == 0);
  REQUIRE(j["levels"].size() == 2);
  CHECK(j["levels"][0]["re"] == 2.0);
  CHECK(j["levels"][0]["im"] == -2.0);
  CHECK(j["levels"][0]["branch"] == "P");
  CHECK(j["levels"][0]["reality"] == "pair_member");
  CHECK(j["levels"][0]["partner"] == 1);
  CHECK(j["levels"][1]["partner"] == 0);

  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"schema_version", "command", "params", "levels", "pt_broken", "verification",
                                         "timing_ms"});

  const auto real = spectrum_record(solve(ModelParams(3, 0.3)), std::nullopt, 0);
  for (const auto& l : real["levels"]) CHECK(l["partner"].is_null());
}

TEST_CASE("spectrum_record with verification") {
  const auto s = solve(ModelParams(3, 0.3));
  const auto j = spectrum_record(s, verify_spectrum(s), 5);
  CHECK(j["verification"]["oracle_match"] == true);
  CHECK(j["verification"]["pt_consistent"] == true);
  CHECK(j["verification"]["pt_verdicts"].size() == 3);
  CHECK(j["verification"]["pt_verdicts"][0]["verdict"] == "unbroken");
  CHECK(j["timing_ms"] == 5);
}

TEST_CASE("critical_zeta and scan records") {
  const auto cz = critical_zeta_record(CriticalCoupling{3, 0.5, 1e-10}, 1e-10, 0);
  CHECK(cz["command"] == "critical-zeta");
  CHECK(cz["params"]["M"] == 3);
  CHECK(cz["zeta_c"] == 0.5);

  const std::vector<double> grid{0.2, 0.3};
  auto pts = scan(3, grid);
  pts.push_back(ScanPoint{0.4, {}, std::string("boom")});
  const auto sj = scan_record(3, pts, 0);
  CHECK(sj["rows"].size() == 6);
  CHECK(sj["rows"][3]["zeta"] == 0.3);
  CHECK(sj["rows"][3]["level"] == 0);
  REQUIRE(sj["errors"].size() == 1);
  CHECK(sj["errors"][0]["message"] == "boom");

  const std::string csv = scan_csv(pts);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("spectrum and periodic CSV") {
  const auto s = solve(ModelParams(2, 1.0));
  CHECK(spectrum_csv(s) == "zeta,level,branch,re,im,reality\n1,0,P,2,-2,pair_member\n1,1,Q,2,2,pair_member\n");

  const auto partner = anti_isospectral(s);
  const std::vector<PeriodicReport> reps{{partner.levels[0].energy, 0.0, false}, {partner.levels[1].energy, 0.0, false}};
  CHECK(periodic_csv(partner, reps) ==
        "zeta,level,branch,re,im,reality,periodic\n1,0,Q,-2,-2,pair_member,false\n1,1,P,-2,2,pair_member,false\n");
  const auto pj = periodic_record(partner, reps, 0);
  CHECK(pj["command"] == "periodic");
  CHECK(pj["all_periodic"] == false);
  CHECK(pj["levels"][0]["periodic"] == false);
}

TEST_CASE("dump is deterministic and newline-terminated") {
  const auto s = solve(ModelParams(4, 0.2));
  const std::string a = dump(spectrum_record(s, std::nullopt, 0));
  const std::string b = dump(spectrum_record(solve(ModelParams(4, 0.2)), std::nullopt, 0));
  CHECK(a == b);
  CHECK(a.back() == '\n');
  CHECK(a.find("  \"schema_version\"") != std::string::npos);
}
