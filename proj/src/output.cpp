#include "qes/output.hpp"

#include <array>
#include <charconv>
#include <sstream>

namespace qes::output {

namespace {

using json = nlohmann::ordered_json;

json level_json(const QesLevel& l, std::size_t index) {
  json j{{"index", index},
         {"re", l.energy.real()},
         {"im", l.energy.imag()},
         {"branch", std::string(to_string(l.branch))},
         {"reality", std::string(to_string(l.reality))},
         {"multiplicity", l.multiplicity}};
  j["partner"] = l.partner ? json(*l.partner) : json(nullptr);
  return j;
}

json params_json(const ModelParams& p) { return json{{"M", p.m()}, {"zeta", p.zeta()}}; }

json verification_json(const VerificationReport& v) {
  json verdicts = json::array();
  for (const auto& pt : v.pt_verdicts) {
    json e{{"verdict", pt.verdict == PTVerdict::Unbroken ? "unbroken" : "broken"},
           {"eigenvalue_re", pt.eigenvalue.real()},
           {"eigenvalue_im", pt.eigenvalue.imag()},
           {"residual", pt.residual}};
    e["partner"] = pt.partner ? json(*pt.partner) : json(nullptr);
    verdicts.push_back(std::move(e));
  }
  return json{{"oracle_match", v.oracle_match},
              {"oracle_distance", v.oracle_distance},
              {"max_ode_residual", v.max_ode_residual},
              {"pt_consistent", v.pt_consistent},
              {"pt_verdicts", std::move(verdicts)}};
}

void csv_row(std::ostringstream& os, double zeta, std::size_t level, const QesLevel& l) {
  os << format_double(zeta) << ',' << level << ',' << to_string(l.branch) << ',' << format_double(l.energy.real())
     << ',' << format_double(l.energy.imag()) << ',' << to_string(l.reality);
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

json spectrum_record(const QesSpectrum& spectrum, const std::optional<VerificationReport>& verification,
                     std::int64_t timing_ms) {
  json levels = json::array();
  for (std::size_t i = 0; i < spectrum.levels.size(); ++i) levels.push_back(level_json(spectrum.levels[i], i));
  json j{{"schema_version", kSchemaVersion},
         {"command", "spectrum"},
         {"params", params_json(spectrum.params)},
         {"levels", std::move(levels)},
         {"pt_broken", spectrum.pt_broken}};
  j["verification"] = verification ? verification_json(*verification) : json(nullptr);
  j["timing_ms"] = timing_ms;
  return j;
}

json critical_zeta_record(const CriticalCoupling& cc, double tol, std::int64_t timing_ms) {
  return json{{"schema_version", kSchemaVersion},
              {"command", "critical-zeta"},
              {"params", json{{"M", cc.m}}},
              {"tol", tol},
              {"zeta_c", cc.zeta_c},
              {"bracket_width", cc.bracket_width},
              {"timing_ms", timing_ms}};
}

json scan_record(int m, std::span<const ScanPoint> points, std::int64_t timing_ms) {
  json rows = json::array();
  json errors = json::array();
  for (const auto& pt : points) {
    if (pt.error) {
      errors.push_back(json{{"zeta", pt.zeta}, {"message", *pt.error}});
      continue;
    }
    for (std::size_t t = 0; t < pt.levels.size(); ++t) {
      const auto& l = pt.levels[t];
      rows.push_back(json{{"zeta", pt.zeta},
                          {"level", t},
                          {"branch", std::string(to_string(l.branch))},
                          {"re", l.energy.real()},
                          {"im", l.energy.imag()},
                          {"reality", std::string(to_string(l.reality))}});
    }
  }
  return json{{"schema_version", kSchemaVersion},
              {"command", "scan"},
              {"params", json{{"M", m}}},
              {"rows", std::move(rows)},
              {"errors", std::move(errors)},
              {"timing_ms", timing_ms}};
}

json periodic_record(const QesSpectrum& partner, std::span<const PeriodicReport> reports, std::int64_t timing_ms) {
  json j = spectrum_record(partner, std::nullopt, timing_ms);
  j["command"] = "periodic";
  for (std::size_t i = 0; i < reports.size() && i < j["levels"].size(); ++i) {
    j["levels"][i]["periodic"] = reports[i].periodic;
    j["levels"][i]["partner_residual"] = reports[i].residual;
  }
  bool all = true;
  for (const auto& r : reports) all = all && r.periodic;
  j["all_periodic"] = all;
  return j;
}

std::string spectrum_csv(const QesSpectrum& spectrum) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (std::size_t i = 0; i < spectrum.levels.size(); ++i) {
    csv_row(os, spectrum.params.zeta(), i, spectrum.levels[i]);
    os << '\n';
  }
  return os.str();
}

std::string scan_csv(std::span<const ScanPoint> points) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& pt : points) {
    if (pt.error) continue;
    for (std::size_t t = 0; t < pt.levels.size(); ++t) {
      csv_row(os, pt.zeta, t, pt.levels[t]);
      os << '\n';
    }
  }
  return os.str();
}

std::string periodic_csv(const QesSpectrum& partner, std::span<const PeriodicReport> reports) {
  std::ostringstream os;
  os << kCsvHeader << ",periodic\n";
  for (std::size_t i = 0; i < partner.levels.size(); ++i) {
    csv_row(os, partner.params.zeta(), i, partner.levels[i]);
    os << ',' << (i < reports.size() && reports[i].periodic ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace qes::output
