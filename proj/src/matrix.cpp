#include "hsiga/matrix.hpp"

namespace hsiga {

FeatureMatrix gather_rows(const FeatureMatrix& m, std::span<const std::size_t> rows) {
    FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

FeatureMatrix gather(const FeatureMatrix& m, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    if (cols.empty()) return gather_rows(m, rows);
    FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double* src = m.data() + static_cast<Eigen::Index>(rows[i]) * m.cols();
        double* dst = out.data() + static_cast<Eigen::Index>(i) * out.cols();
        for (std::size_t j = 0; j < cols.size(); ++j) dst[j] = src[cols[j]];
    }
    return out;
}

FeatureMatrix select_columns(const FeatureMatrix& m, std::span<const std::size_t> cols) {
    if (cols.empty()) return m;
    FeatureMatrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double* src = m.data() + i * m.cols();
        double* dst = out.data() + i * out.cols();
        for (std::size_t j = 0; j < cols.size(); ++j) dst[j] = src[cols[j]];
    }
    return out;
}

}  // namespace hsiga
