#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "agcm/data.hpp"
#include "agcm/simulation.hpp"

namespace agcm {

// Stable key order so emitted files diff cleanly.
using Json = nlohmann::ordered_json;

Json to_json(const Matrix& A);
Matrix matrix_from_json(const Json& j);

Json to_json(const FitResult& fit);
FitResult fit_from_json(const Json& j);

Json to_json(const SelectionResult& sel);
Json to_json(const McReport& mc);
Json to_json(const std::vector<ConsistencyPoint>& table);
Json to_json(const AsymptoticReport& rep);

// Aligned plain-text renderings.
std::string fit_table(const FitResult& fit, const std::vector<std::string>& block_labels = {});
std::string selection_table(const SelectionResult& sel);
std::string mc_table(const McReport& mc);
std::string consistency_table(const std::vector<ConsistencyPoint>& table);
std::string asymptotic_summary(const AsymptoticReport& rep);

// Full-precision flat table of the averaged-AIC points.
std::string mc_csv(const McReport& mc);

// Line chart of the three averaged-AIC series against n.
std::string mc_svg(const McReport& mc);

enum class ReportFormat { kJson, kText, kCsv, kSvg };

// Parses a comma-separated list like "json,svg".
std::set<ReportFormat> parse_formats(const std::string& list);

// Each writer emits one file per requested format, named out_base plus the
// format's extension, creating parent directories as needed. Formats a result
// type cannot render are rejected. Returns the paths written.
std::vector<std::filesystem::path> emit_report(const FitResult& fit,
                                               const std::filesystem::path& out_base,
                                               const std::set<ReportFormat>& formats,
                                               const std::vector<std::string>& block_labels = {});
std::vector<std::filesystem::path> emit_report(const SelectionResult& sel,
                                               const std::filesystem::path& out_base,
                                               const std::set<ReportFormat>& formats);
std::vector<std::filesystem::path> emit_report(const McReport& mc,
                                               const std::filesystem::path& out_base,
                                               const std::set<ReportFormat>& formats);
std::vector<std::filesystem::path> emit_report(const std::vector<ConsistencyPoint>& table,
                                               const std::filesystem::path& out_base,
                                               const std::set<ReportFormat>& formats);
std::vector<std::filesystem::path> emit_report(const AsymptoticReport& rep,
                                               const std::filesystem::path& out_base,
                                               const std::set<ReportFormat>& formats);

}  // namespace agcm
