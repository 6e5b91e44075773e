#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairod/dataio/schema.hpp"
#include "fairod/numcore/matrix.hpp"

namespace fairod::dataio {

using numcore::Index;
using numcore::Matrix;

/// Everything a detector may see: encoded features and subgroup membership.
/// Ground-truth outlier labels live outside this type so training code cannot read them.
struct FeatureTable {
  Matrix features;                      // N x n
  std::vector<int> subgroups;           // N entries in [0, M)
  std::vector<std::string> subgroup_names;
  std::vector<std::string> feature_names;

  Index size() const { return features.rows(); }
  Index dims() const { return features.cols(); }
  int num_subgroups() const { return static_cast<int>(subgroup_names.size()); }
  void validate() const;
};

struct Dataset {
  FeatureTable table;
  std::optional<std::vector<int>> labels;  // 1 = outlier; evaluation only
  std::size_t rejected_rows = 0;           // rows dropped for missing cells

  Index size() const { return table.size(); }
  bool has_labels() const { return labels.has_value(); }
};

/// Reads an RFC-4180 CSV with a header row and encodes it per `schema`: categoricals one-hot,
/// numerics z-scored over the full file, sensitive column mapped to subgroup indices.
Dataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema);

/// Column-wise z-score in place (population standard deviation). Constant columns become 0.
void standardize_columns(Matrix& x, const std::vector<Index>& columns);

}  // namespace fairod::dataio
