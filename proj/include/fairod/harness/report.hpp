#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairod/harness/experiment.hpp"

namespace fairod::harness {

inline constexpr const char* kResultsFile = "results.json";
inline constexpr const char* kTimingsFile = "timings.json";
inline constexpr const char* kSummaryFile = "summary.txt";

/// Results document for one run. Wall-clock times are left out so that repeated runs produce
/// identical documents; they go to the timings file instead.
nlohmann::json run_to_json(const RunRecord& run);
RunRecord run_from_json(const nlohmann::json& j);

/// Aligned table: dataset, mode, [sweep point], seeds, AUC, F_Gap, F_Rank (mean±std), note.
std::string format_table(const std::vector<RunRecord>& runs);

/// Writes results.json, timings.json and summary.txt into `dir`.
void emit_report(const std::vector<RunRecord>& runs, const std::filesystem::path& dir);

/// Reads results.json and merges wall-clock times from timings.json when present.
std::vector<RunRecord> read_report(const std::filesystem::path& dir);

/// Score dump: header line "score", then one score per input row in row order.
void write_scores(const std::filesystem::path& path, const std::vector<double>& scores);
std::vector<double> read_scores(const std::filesystem::path& path);

}  // namespace fairod::harness
