#pragma once

// JSON report layout and validators. The same rules are published as JSON
// Schema documents in data/run_report.schema.json and data/bench_report.schema.json.

#include "qwp/metrics.hpp"
#include "qwp/qwpdn.hpp"
#include "qwp/wnnm.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace qwp {

inline constexpr const char* kRunReportSchema = "qwp-run-report";
inline constexpr const char* kBenchReportSchema = "qwp-bench-report";
inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const MetricReport& m);
nlohmann::json to_json(const DenoiseParams& p, std::size_t image_side);
nlohmann::json to_json(const WnnmParams& p);

/// Empty when the document satisfies the run-report schema; otherwise one
/// message per violation.
std::vector<std::string> validate_run_report(const nlohmann::json& doc);
std::vector<std::string> validate_bench_report(const nlohmann::json& doc);

}  // namespace qwp
