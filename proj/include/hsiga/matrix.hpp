#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace hsiga {

/// Row-major sample matrix: one spectrum (feature vector) per row.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const FeatureMatrix& m, Eigen::Index r) {
    return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

/// Copies the listed rows, in order.
FeatureMatrix gather_rows(const FeatureMatrix& m, std::span<const std::size_t> rows);

/// Copies the listed rows restricted to the listed columns. An empty column
/// list means all columns.
FeatureMatrix gather(const FeatureMatrix& m, std::span<const std::size_t> rows,
                     std::span<const std::size_t> cols);

/// Copies all rows restricted to the listed columns (empty = all).
FeatureMatrix select_columns(const FeatureMatrix& m, std::span<const std::size_t> cols);

}  // namespace hsiga
