#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fairod::dataio {

enum class ColumnKind { kNumeric, kCategorical };

std::string to_string(ColumnKind kind);
ColumnKind parse_column_kind(const std::string& name);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;

  bool operator==(const ColumnSpec&) const = default;
};

/// Which value of the label column marks an outlier, e.g. {"G3", "<=", "6"}.
/// Comparisons are numeric when both sides parse as numbers, string equality otherwise
/// (ordering operators then require numbers).
struct LabelPredicate {
  std::string column;
  std::string op = "==";
  std::string value = "1";

  bool matches(const std::string& cell) const;
  bool operator==(const LabelPredicate&) const = default;
};

struct DatasetSchema {
  std::vector<ColumnSpec> features;
  std::string sensitive;
  std::optional<LabelPredicate> label;
  bool include_sensitive_in_features = false;

  void validate() const;
  bool operator==(const DatasetSchema&) const = default;
};

void to_json(nlohmann::json& j, const DatasetSchema& schema);
void from_json(const nlohmann::json& j, DatasetSchema& schema);

DatasetSchema load_schema(const std::filesystem::path& path);
void save_schema(const DatasetSchema& schema, const std::filesystem::path& path);

}  // namespace fairod::dataio
