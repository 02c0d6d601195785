#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qes/spectrum.hpp"
#include "qes/verify.hpp"

namespace qes::output {

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr const char* kCsvHeader = "zeta,level,branch,re,im,reality";

/// Shortest round-trip decimal form of x (at most 17 significant digits).
std::string format_double(double x);

nlohmann::ordered_json spectrum_record(const QesSpectrum& spectrum, const std::optional<VerificationReport>& verification,
                               std::int64_t timing_ms);

nlohmann::ordered_json critical_zeta_record(const CriticalCoupling& cc, double tol, std::int64_t timing_ms);

nlohmann::ordered_json scan_record(int m, std::span<const ScanPoint> points, std::int64_t timing_ms);

/// `partner` holds the periodic-potential spectrum; reports are per level of that spectrum.
nlohmann::ordered_json periodic_record(const QesSpectrum& partner, std::span<const PeriodicReport> reports,
                               std::int64_t timing_ms);

/// Header plus one row per level, all rows sharing the spectrum's zeta.
std::string spectrum_csv(const QesSpectrum& spectrum);
/// Header plus rows in grid order, then level order; failed points are skipped.
std::string scan_csv(std::span<const ScanPoint> points);
/// Spectrum header with an extra `periodic` column.
std::string periodic_csv(const QesSpectrum& partner, std::span<const PeriodicReport> reports);

/// Two-space indented JSON followed by a newline.
std::string dump(const nlohmann::ordered_json& j);

}  // namespace qes::output
