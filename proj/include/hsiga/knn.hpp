#pragma once

#include "hsiga/matrix.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hsiga {

enum class DistanceMetric { euclidean, manhattan, chebyshev };
enum class KnnWeighting { uniform, distance };

std::string_view to_string(DistanceMetric m);
std::string_view to_string(KnnWeighting w);

struct KnnSpec {
    DistanceMetric metric = DistanceMetric::euclidean;
    KnnWeighting weighting = KnnWeighting::uniform;
    std::size_t k = 5;

    friend bool operator==(const KnnSpec&, const KnnSpec&) = default;
};

/// Training is storage: the model keeps every record (restricted to the
/// selected columns).
struct KnnModel {
    KnnSpec spec;
    std::size_t input_dims = 0;
    std::vector<std::size_t> feature_indices;
    FeatureMatrix samples;
    std::vector<int> labels;
};

double distance(DistanceMetric metric, std::span<const double> a, std::span<const double> b);

KnnModel train_knn(const KnnSpec& spec, const FeatureMatrix& x, std::span<const int> labels,
                   std::span<const std::size_t> feature_indices = {});

/// Majority (optionally 1/(d + 1e-12) weighted) vote of the k nearest
/// records. Neighbours at equal distance are ordered by class id; vote ties go
/// to the lowest class id.
std::vector<int> predict(const KnnModel& model, const FeatureMatrix& x);

}  // namespace hsiga
