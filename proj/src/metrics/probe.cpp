#include "fairod/metrics/probe.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairod/errors.hpp"

namespace fairod::metrics {

using numcore::Index;
using numcore::Matrix;
using numcore::RowVector;

ProbeResult subgroup_probe(const Matrix& features, std::span<const int> subgroups, int num_subgroups,
                           const ProbeOptions& options) {
  if (static_cast<Index>(subgroups.size()) != features.rows()) {
    throw DimensionError("probe: subgroup count does not match rows");
  }
  if (features.rows() < 4 || num_subgroups < 2) throw ArgumentError("probe: too few rows or subgroups");

  std::vector<Index> train_rows, test_rows;
  for (Index i = 0; i < features.rows(); ++i) (i % 2 == 0 ? train_rows : test_rows).push_back(i);
  auto gather = [&](const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), features.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = features.row(rows[r]);
    return out;
  };
  Matrix train = gather(train_rows);
  Matrix test = gather(test_rows);

  const RowVector mean = train.colwise().mean();
  RowVector sd = ((train.rowwise() - mean).array().square().colwise().mean()).sqrt().matrix();
  for (Index c = 0; c < sd.size(); ++c) {
    if (sd(c) <= 1e-12) sd(c) = 1.0;
  }
  train = ((train.rowwise() - mean).array().rowwise() / sd.array()).matrix();
  test = ((test.rowwise() - mean).array().rowwise() / sd.array()).matrix();

  const Index m = num_subgroups;
  Matrix onehot = Matrix::Zero(train.rows(), m);
  for (std::size_t r = 0; r < train_rows.size(); ++r) {
    onehot(static_cast<Index>(r), subgroups[static_cast<std::size_t>(train_rows[r])]) = 1.0;
  }

  Matrix weight = Matrix::Zero(train.cols(), m);
  RowVector bias = RowVector::Zero(m);
  const double n = static_cast<double>(train.rows());
  auto softmax_rows = [](Matrix logits) {
    for (Index i = 0; i < logits.rows(); ++i) {
      logits.row(i).array() -= logits.row(i).maxCoeff();
      logits.row(i) = logits.row(i).array().exp().matrix();
      logits.row(i) /= logits.row(i).sum();
    }
    return logits;
  };
  for (int it = 0; it < options.iterations; ++it) {
    Matrix logits = train * weight;
    logits.rowwise() += bias;
    const Matrix resid = softmax_rows(std::move(logits)) - onehot;
    weight -= options.learning_rate * ((train.transpose() * resid) / n + options.l2 * weight);
    bias -= options.learning_rate * (resid.colwise().sum() / n);
  }

  Matrix logits = test * weight;
  logits.rowwise() += bias;
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  int correct = 0;
  for (std::size_t r = 0; r < test_rows.size(); ++r) {
    Index pred = 0;
    logits.row(static_cast<Index>(r)).maxCoeff(&pred);
    const int truth = subgroups[static_cast<std::size_t>(test_rows[r])];
    correct += pred == truth ? 1 : 0;
    ++counts[static_cast<std::size_t>(truth)];
  }
  const double total = static_cast<double>(test_rows.size());
  return ProbeResult{correct / total, *std::max_element(counts.begin(), counts.end()) / total};
}

}  // namespace fairod::metrics
