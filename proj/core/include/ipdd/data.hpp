#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ipdd {

/// A fully materialized classification dataset. Rows of `features` are
/// instances, `labels` holds dense class ids in [0, num_classes).
struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  int num_classes = 0;

  int rows() const { return static_cast<int>(features.rows()); }
  int cols() const { return static_cast<int>(features.cols()); }

  void validate() const {
    if (features.rows() != static_cast<Eigen::Index>(labels.size()))
      throw std::invalid_argument("dataset: feature rows and label count differ");
    if (num_classes < 2) throw std::invalid_argument("dataset: num_classes must be >= 2");
    for (const int y : labels)
      if (y < 0 || y >= num_classes)
        throw std::invalid_argument("dataset: label outside [0, num_classes)");
  }
};

/// Copies the given rows (in the given order) into a new dataset.
inline LabeledDataset take_rows(const LabeledDataset& ds, std::span<const int> rows) {
  LabeledDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
  out.labels.reserve(rows.size());
  Eigen::Index r = 0;
  for (const int i : rows) {
    if (i < 0 || i >= ds.rows()) throw std::out_of_range("take_rows: row index out of range");
    out.features.row(r++) = ds.features.row(i);
    out.labels.push_back(ds.labels[static_cast<std::size_t>(i)]);
  }
  out.feature_names = ds.feature_names;
  out.num_classes = ds.num_classes;
  return out;
}

/// Copies the contiguous row range [begin, end).
inline LabeledDataset slice_rows(const LabeledDataset& ds, int begin, int end) {
  if (begin < 0 || end < begin || end > ds.rows())
    throw std::out_of_range("slice_rows: bad range");
  LabeledDataset out;
  out.features = ds.features.middleRows(begin, end - begin);
  out.labels.assign(ds.labels.begin() + begin, ds.labels.begin() + end);
  out.feature_names = ds.feature_names;
  out.num_classes = ds.num_classes;
  return out;
}

}  // namespace ipdd
