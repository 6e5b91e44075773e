#include "fairod/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fairod/errors.hpp"

namespace fairod::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json aggregate_json(const std::optional<Aggregate>& a) {
  if (!a) return nullptr;
  return {{"mean", a->mean}, {"std", a->stdev}, {"count", a->count}};
}

std::optional<Aggregate> aggregate_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  Aggregate a;
  a.mean = j.at("mean").get<double>();
  a.stdev = j.at("std").get<double>();
  a.count = j.at("count").get<int>();
  return a;
}

json seed_json(const SeedRecord& s) {
  json j = {{"seed", s.seed}, {"ok", s.ok}};
  if (!s.ok) j["error"] = s.error;
  j["metrics"] = s.metrics ? json(*s.metrics) : json(nullptr);
  j["scores_file"] = s.scores_file;
  j["checkpoint_file"] = s.checkpoint_file;
  return j;
}

SeedRecord seed_from(const json& j) {
  SeedRecord s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.ok = j.at("ok").get<bool>();
  s.error = j.value("error", std::string());
  if (j.contains("metrics") && !j.at("metrics").is_null()) s.metrics = j.at("metrics").get<metrics::MetricReport>();
  s.scores_file = j.value("scores_file", std::string());
  s.checkpoint_file = j.value("checkpoint_file", std::string());
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError("'" + path.string() + "': " + e.what());
  }
}

std::string cell(const std::optional<Aggregate>& a) {
  if (!a) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f ± %.4f", a->mean, a->stdev);
  return buf;
}

// Display width in code points, so the ± sign counts as one column.
std::size_t width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

}  // namespace

json run_to_json(const RunRecord& run) {
  json seeds = json::array();
  for (const auto& s : run.seeds) seeds.push_back(seed_json(s));
  return {
      {"dataset", run.dataset},
      {"mode", run.mode},
      {"label", run.label},
      {"note", run.note},
      {"config", run.config},
      {"seeds", seeds},
      {"failed_seeds", run.failed()},
      {"auc", aggregate_json(run.auc)},
      {"f_gap", aggregate_json(run.f_gap)},
      {"f_rank", aggregate_json(run.f_rank)},
  };
}

RunRecord run_from_json(const json& j) {
  RunRecord run;
  try {
    run.dataset = j.at("dataset").get<std::string>();
    run.mode = j.at("mode").get<std::string>();
    run.label = j.value("label", std::string());
    run.note = j.value("note", std::string());
    run.config = j.value("config", json::object());
    for (const auto& s : j.at("seeds")) run.seeds.push_back(seed_from(s));
    run.auc = aggregate_from(j.value("auc", json(nullptr)));
    run.f_gap = aggregate_from(j.value("f_gap", json(nullptr)));
    run.f_rank = aggregate_from(j.value("f_rank", json(nullptr)));
  } catch (const json::exception& e) {
    throw LoadError(std::string("results document: ") + e.what());
  }
  return run;
}

std::string format_table(const std::vector<RunRecord>& runs) {
  bool labelled = false;
  for (const auto& r : runs) labelled |= !r.label.empty();

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"dataset", "mode"};
  if (labelled) header.push_back("setting");
  header.insert(header.end(), {"seeds", "AUC", "F_Gap", "F_Rank", "note"});
  rows.push_back(header);
  for (const auto& r : runs) {
    std::vector<std::string> row = {r.dataset, r.mode};
    if (labelled) row.push_back(r.label);
    std::string seeds = std::to_string(r.seeds.size() - static_cast<std::size_t>(r.failed()));
    if (r.failed() > 0) seeds += " (" + std::to_string(r.failed()) + " failed)";
    row.insert(row.end(), {seeds, cell(r.auc), cell(r.f_gap), cell(r.f_rank), r.note});
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], width(row[c]));

  std::ostringstream out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(widths[c] - width(row[c]) + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
  return out.str();
}

void emit_report(const std::vector<RunRecord>& runs, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw LoadError("cannot create output directory '" + dir.string() + "': " + ec.message());

  json results = json::array();
  json timings = json::array();
  for (const auto& r : runs) {
    results.push_back(run_to_json(r));
    json t = json::array();
    for (const auto& s : r.seeds) t.push_back({{"seed", s.seed}, {"wall_seconds", s.wall_seconds}});
    timings.push_back({{"dataset", r.dataset}, {"mode", r.mode}, {"label", r.label}, {"seeds", t}});
  }
  write_text(dir / kResultsFile, json({{"runs", results}}).dump(2) + "\n");
  write_text(dir / kTimingsFile, json({{"runs", timings}}).dump(2) + "\n");
  write_text(dir / kSummaryFile, format_table(runs));
}

std::vector<RunRecord> read_report(const fs::path& dir) {
  const auto doc = read_json(dir / kResultsFile);
  std::vector<RunRecord> runs;
  try {
    for (const auto& r : doc.at("runs")) runs.push_back(run_from_json(r));
  } catch (const json::exception& e) {
    throw LoadError(std::string("results document: ") + e.what());
  }
  if (fs::exists(dir / kTimingsFile)) {
    const auto t = read_json(dir / kTimingsFile).value("runs", json::array());
    for (std::size_t i = 0; i < runs.size() && i < t.size(); ++i) {
      const auto& seeds = t[i].value("seeds", json::array());
      for (std::size_t s = 0; s < runs[i].seeds.size() && s < seeds.size(); ++s) {
        runs[i].seeds[s].wall_seconds = seeds[s].value("wall_seconds", 0.0);
      }
    }
  }
  return runs;
}

void write_scores(const fs::path& path, const std::vector<double>& scores) {
  std::ostringstream out;
  out << "score\n";
  char buf[32];
  for (double s : scores) {
    std::snprintf(buf, sizeof buf, "%.17g\n", s);
    out << buf;
  }
  write_text(path, out.str());
}

std::vector<double> read_scores(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open scores '" + path.string() + "'");
  std::string line;
  std::vector<double> scores;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == "score") continue;
    try {
      std::size_t used = 0;
      scores.push_back(std::stod(line, &used));
      if (used != line.size()) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      throw LoadError("scores '" + path.string() + "' line " + std::to_string(lineno) + ": not a number");
    }
  }
  return scores;
}

}  // namespace fairod::harness
