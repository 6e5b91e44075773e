#include "fairod/dataio/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "fairod/dataio/csv.hpp"
#include "fairod/errors.hpp"

namespace fairod::dataio {

namespace {

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "?" || cell == "nan" || cell == "NaN";
}

double parse_numeric_cell(const std::string& cell, const std::string& column, std::size_t row) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  // Tolerate surrounding blanks but nothing else.
  while (end != nullptr && (*end == ' ' || *end == '\t')) ++end;
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw LoadError("column '" + column + "', data row " + std::to_string(row + 1) +
                    ": cannot parse '" + cell + "' as a number");
  }
  return v;
}

std::vector<std::string> sorted_levels(const std::vector<std::vector<std::string>>& rows, int col) {
  std::set<std::string> levels;
  for (const auto& r : rows) levels.insert(r[static_cast<std::size_t>(col)]);
  return {levels.begin(), levels.end()};
}

}  // namespace

void FeatureTable::validate() const {
  if (static_cast<Index>(subgroups.size()) != features.rows()) {
    throw DimensionError("FeatureTable: " + std::to_string(subgroups.size()) + " subgroup labels for " +
                         std::to_string(features.rows()) + " rows");
  }
  if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != features.cols()) {
    throw DimensionError("FeatureTable: feature name count does not match columns");
  }
  for (int s : subgroups) {
    if (s < 0 || s >= num_subgroups()) {
      throw ArgumentError("FeatureTable: subgroup index " + std::to_string(s) + " outside [0, " +
                          std::to_string(num_subgroups()) + ")");
    }
  }
  if (!features.allFinite()) throw ArgumentError("FeatureTable: non-finite feature value");
}

void standardize_columns(Matrix& x, const std::vector<Index>& columns) {
  const double n = static_cast<double>(x.rows());
  for (Index c : columns) {
    const double mean = x.col(c).mean();
    const double var = (x.col(c).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      x.col(c) = ((x.col(c).array() - mean) / sd).matrix();
    } else {
      x.col(c).setZero();
    }
  }
}

Dataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema) {
  schema.validate();
  CsvTable csv = read_csv(path);

  auto require = [&](const std::string& name) {
    const int idx = csv.column_index(name);
    if (idx < 0) throw LoadError("'" + path.string() + "': missing column '" + name + "'");
    return idx;
  };
  std::vector<int> feature_cols;
  for (const auto& f : schema.features) feature_cols.push_back(require(f.name));
  const int sensitive_col = require(schema.sensitive);
  const int label_col = schema.label ? require(schema.label->column) : -1;

  std::vector<int> used = feature_cols;
  used.push_back(sensitive_col);
  if (label_col >= 0) used.push_back(label_col);

  std::vector<std::vector<std::string>> rows;
  std::size_t rejected = 0;
  for (auto& row : csv.rows) {
    const bool missing = std::any_of(used.begin(), used.end(), [&](int c) {
      return is_missing(row[static_cast<std::size_t>(c)]);
    });
    if (missing) {
      ++rejected;
    } else {
      rows.push_back(std::move(row));
    }
  }
  if (rejected > 0) {
    spdlog::warn("{}: rejected {} row(s) with missing cells", path.string(), rejected);
  }
  if (rows.empty()) throw LoadError("'" + path.string() + "': no usable data rows");

  Dataset ds;
  ds.rejected_rows = rejected;
  FeatureTable& t = ds.table;

  t.subgroup_names = sorted_levels(rows, sensitive_col);
  std::map<std::string, int> subgroup_index;
  for (std::size_t i = 0; i < t.subgroup_names.size(); ++i) {
    subgroup_index[t.subgroup_names[i]] = static_cast<int>(i);
  }

  // Column plan: numeric features -> 1 column, categoricals -> one column per level.
  struct Encoded {
    int csv_col;
    ColumnKind kind;
    std::vector<std::string> levels;
  };
  std::vector<Encoded> plan;
  for (std::size_t f = 0; f < schema.features.size(); ++f) {
    Encoded e{feature_cols[f], schema.features[f].kind, {}};
    if (e.kind == ColumnKind::kCategorical) {
      e.levels = sorted_levels(rows, e.csv_col);
      for (const auto& lvl : e.levels) t.feature_names.push_back(schema.features[f].name + "=" + lvl);
    } else {
      t.feature_names.push_back(schema.features[f].name);
    }
    plan.push_back(std::move(e));
  }
  if (schema.include_sensitive_in_features) {
    plan.push_back({sensitive_col, ColumnKind::kCategorical, t.subgroup_names});
    for (const auto& lvl : t.subgroup_names) t.feature_names.push_back(schema.sensitive + "=" + lvl);
  }

  const auto n_rows = static_cast<Index>(rows.size());
  t.features = Matrix::Zero(n_rows, static_cast<Index>(t.feature_names.size()));
  std::vector<Index> numeric_cols;
  Index out_col = 0;
  for (const auto& e : plan) {
    if (e.kind == ColumnKind::kNumeric) {
      numeric_cols.push_back(out_col);
      for (Index r = 0; r < n_rows; ++r) {
        t.features(r, out_col) = parse_numeric_cell(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(e.csv_col)],
                                                     csv.header[static_cast<std::size_t>(e.csv_col)],
                                                     static_cast<std::size_t>(r));
      }
      ++out_col;
    } else {
      for (Index r = 0; r < n_rows; ++r) {
        const auto& cell = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(e.csv_col)];
        const auto it = std::lower_bound(e.levels.begin(), e.levels.end(), cell);
        t.features(r, out_col + (it - e.levels.begin())) = 1.0;
      }
      out_col += static_cast<Index>(e.levels.size());
    }
  }
  standardize_columns(t.features, numeric_cols);

  t.subgroups.reserve(rows.size());
  for (const auto& row : rows) t.subgroups.push_back(subgroup_index.at(row[static_cast<std::size_t>(sensitive_col)]));

  if (schema.label) {
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (const auto& row : rows) labels.push_back(schema.label->matches(row[static_cast<std::size_t>(label_col)]) ? 1 : 0);
    ds.labels = std::move(labels);
  }
  t.validate();
  return ds;
}

}  // namespace fairod::dataio
