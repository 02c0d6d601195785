// qes: QES spectrum of V(x) = -(zeta cosh 2x - iM)^2 from the command line.
//
// Exit codes: 0 ok, 2 usage, 3 numerical failure, 4 verification mismatch, 5 I/O.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qes/errors.hpp"
#include "qes/output.hpp"
#include "qes/spectrum.hpp"
#include "qes/verify.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3, kMismatch = 4, kIo = 5 };

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level log_level() {
  const char* env = std::getenv("QES_LOG_LEVEL");
  const std::string v = env ? env : "warn";
  if (v == "error") return Level::Error;
  if (v == "info") return Level::Info;
  if (v == "debug") return Level::Debug;
  return Level::Warn;
}

void log(Level lvl, const std::string& msg) {
  static const Level threshold = log_level();
  static constexpr const char* names[] = {"error", "warn", "info", "debug"};
  if (static_cast<int>(lvl) <= static_cast<int>(threshold)) {
    std::cerr << "qes [" << names[static_cast<int>(lvl)] << "] " << msg << '\n';
  }
}

struct Common {
  std::string format = "json";
  std::optional<double> tol;
  bool timing = false;
};

class Stopwatch {
 public:
  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

qes::SpectrumOptions spectrum_options(const Common& c) {
  qes::SpectrumOptions opts;
  if (c.tol) opts.roots.tol = *c.tol;
  return opts;
}

void add_common(CLI::App* cmd, Common& c, bool with_tol = true) {
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  if (with_tol) cmd->add_option("--tol", c.tol, "Root-finder backward-error tolerance")->check(CLI::PositiveNumber);
  cmd->add_flag("--timing", c.timing, "Report wall time in timing_ms (otherwise 0)");
}

int cmd_spectrum(int m, double zeta, bool verify, const Common& c) {
  const Stopwatch sw;
  const qes::ModelParams params(m, zeta);
  const auto opts = spectrum_options(c);
  const qes::QesSpectrum spectrum = qes::solve(params, opts);
  log(Level::Info, "solved M=" + std::to_string(m) + " with " + std::to_string(spectrum.levels.size()) + " levels");

  std::optional<qes::VerificationReport> report;
  if (verify) report = qes::verify_spectrum(spectrum, {}, opts.roots);
  const std::int64_t ms = c.timing ? sw.elapsed_ms() : 0;

  if (c.format == "csv") {
    std::cout << qes::output::spectrum_csv(spectrum);
  } else {
    std::cout << qes::output::dump(qes::output::spectrum_record(spectrum, report, ms));
  }
  if (report && !report->ok()) {
    log(Level::Error, "verification mismatch: oracle_distance=" + qes::output::format_double(report->oracle_distance) +
                          " max_ode_residual=" + qes::output::format_double(report->max_ode_residual) +
                          " pt_consistent=" + (report->pt_consistent ? "true" : "false"));
    return kMismatch;
  }
  return kOk;
}

int cmd_critical_zeta(int m, double tol, const Common& c) {
  const Stopwatch sw;
  const qes::CriticalCoupling cc = qes::critical_zeta(m, tol);
  const std::int64_t ms = c.timing ? sw.elapsed_ms() : 0;
  if (c.format == "csv") {
    std::cout << "M,zeta_c,bracket_width\n"
              << m << ',' << qes::output::format_double(cc.zeta_c) << ','
              << qes::output::format_double(cc.bracket_width) << '\n';
  } else {
    std::cout << qes::output::dump(qes::output::critical_zeta_record(cc, tol, ms));
  }
  return kOk;
}

int cmd_scan(int m, double zmin, double zmax, int steps, const std::string& out_path, const Common& c) {
  if (!(zmin < zmax)) throw qes::InvalidArgument("scan: --zeta-min must be below --zeta-max");
  if (steps < 2) throw qes::InvalidArgument("scan: --steps must be at least 2");
  if (m < 1) throw qes::InvalidArgument("scan: --m must be a positive integer");

  const Stopwatch sw;
  std::vector<double> grid;
  for (int i = 0; i < steps; ++i) {
    const double n = steps - 1;
    grid.push_back((zmin * (n - i) + zmax * i) / n);
  }
  const auto points = qes::scan(m, grid, spectrum_options(c));
  for (const auto& pt : points) {
    if (pt.error) log(Level::Warn, "scan point zeta=" + qes::output::format_double(pt.zeta) + " failed: " + *pt.error);
  }
  const std::int64_t ms = c.timing ? sw.elapsed_ms() : 0;
  const std::string text =
      c.format == "csv" ? qes::output::scan_csv(points) : qes::output::dump(qes::output::scan_record(m, points, ms));

  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return kOk;
  }
  std::ofstream os(out_path, std::ios::binary | std::ios::trunc);
  if (!os) {
    log(Level::Error, "cannot open " + out_path + " for writing");
    return kIo;
  }
  os << text;
  os.close();
  if (!os) {
    log(Level::Error, "write to " + out_path + " failed");
    return kIo;
  }
  return kOk;
}

int cmd_periodic(int m, double zeta, const Common& c) {
  const Stopwatch sw;
  const qes::ModelParams params(m, zeta);
  const auto opts = spectrum_options(c);
  const qes::QesSpectrum original = qes::solve(params, opts);
  const qes::QesSpectrum partner = qes::anti_isospectral(original, opts);

  // partner level i corresponds to original level n-1-i only when real
  // parts are distinct; match by negated energy instead.
  std::vector<qes::PeriodicReport> reports;
  double worst = 0.0;
  for (const auto& pl : partner.levels) {
    const qes::QesLevel* src = nullptr;
    for (const auto& ol : original.levels) {
      if (!src || std::abs(ol.energy + pl.energy) < std::abs(src->energy + pl.energy)) src = &ol;
    }
    const auto f = qes::build_eigenfunction(params, qes::critical_index(m, src->branch), src->energy);
    reports.push_back(qes::periodic_partner_check(f, src->energy));
    worst = std::max(worst, reports.back().residual);
  }
  const std::int64_t ms = c.timing ? sw.elapsed_ms() : 0;
  if (c.format == "csv") {
    std::cout << qes::output::periodic_csv(partner, reports);
  } else {
    std::cout << qes::output::dump(qes::output::periodic_record(partner, reports, ms));
  }
  if (worst > 1e-8) {
    log(Level::Error, "periodic partner residual " + qes::output::format_double(worst) + " exceeds 1e-8");
    return kMismatch;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-exactly-solvable spectrum of H = p^2 - (zeta cosh 2x - iM)^2"};
  app.require_subcommand(1);

  Common common;
  int m = 0;
  double zeta = 0.0;
  bool verify = false;
  double cz_tol = 1e-10;
  double zmin = 0.0, zmax = 0.0;
  int steps = 0;
  std::string out_path;

  auto* spectrum = app.add_subcommand("spectrum", "QES levels for one (M, zeta)");
  spectrum->add_option("--m", m, "Integer M >= 1")->required();
  spectrum->add_option("--zeta", zeta, "Nonzero real coupling")->required();
  spectrum->add_flag("--verify", verify, "Run oracle, ODE-residual and PT checks");
  add_common(spectrum, common);

  auto* critical = app.add_subcommand("critical-zeta", "Critical coupling for odd M >= 3");
  critical->add_option("--m", m, "Odd integer M >= 3")->required();
  critical->add_option("--tol", cz_tol, "Bisection bracket width")->check(CLI::PositiveNumber);
  critical->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  critical->add_flag("--timing", common.timing, "Report wall time in timing_ms (otherwise 0)");

  auto* scan = app.add_subcommand("scan", "Level trajectories over a uniform zeta grid");
  scan->add_option("--m", m, "Integer M >= 1")->required();
  scan->add_option("--zeta-min", zmin, "First grid point")->required();
  scan->add_option("--zeta-max", zmax, "Last grid point")->required();
  scan->add_option("--steps", steps, "Number of grid points (>= 2)")->required();
  scan->add_option("--out", out_path, "Output file (stdout if omitted or '-')");
  add_common(scan, common);

  auto* periodic = app.add_subcommand("periodic", "Spectrum of the periodic partner (zeta cos 2 theta - iM)^2");
  periodic->add_option("--m", m, "Integer M >= 1")->required();
  periodic->add_option("--zeta", zeta, "Nonzero real coupling")->required();
  add_common(periodic, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*spectrum) return cmd_spectrum(m, zeta, verify, common);
    if (*critical) return cmd_critical_zeta(m, cz_tol, common);
    if (*scan) return cmd_scan(m, zmin, zmax, steps, out_path, common);
    if (*periodic) return cmd_periodic(m, zeta, common);
  } catch (const qes::InvalidArgument& e) {
    log(Level::Error, e.what());
    return kUsage;
  } catch (const qes::NumericalError& e) {
    log(Level::Error, e.what());
    return kNumerical;
  } catch (const std::ios_base::failure& e) {
    log(Level::Error, e.what());
    return kIo;
  }
  return kUsage;
}
