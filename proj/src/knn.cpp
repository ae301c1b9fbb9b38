#include "hsiga/knn.hpp"

#include "hsiga/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace hsiga {

std::string_view to_string(DistanceMetric m) {
    switch (m) {
        case DistanceMetric::euclidean: return "euclidean";
        case DistanceMetric::manhattan: return "manhattan";
        case DistanceMetric::chebyshev: return "chebyshev";
    }
    return "?";
}

std::string_view to_string(KnnWeighting w) { return w == KnnWeighting::uniform ? "uniform" : "distance"; }

double distance(DistanceMetric metric, std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = std::abs(a[k] - b[k]);
        switch (metric) {
            case DistanceMetric::euclidean: acc += d * d; break;
            case DistanceMetric::manhattan: acc += d; break;
            case DistanceMetric::chebyshev: acc = std::max(acc, d); break;
        }
    }
    return metric == DistanceMetric::euclidean ? std::sqrt(acc) : acc;
}

KnnModel train_knn(const KnnSpec& spec, const FeatureMatrix& x, std::span<const int> labels,
                   std::span<const std::size_t> feature_indices) {
    if (labels.empty()) throw InvalidArgument("train_knn: empty training set");
    if (static_cast<std::size_t>(x.rows()) != labels.size()) throw InvalidArgument("train_knn: label count mismatch");
    if (spec.k < 1) throw InvalidArgument("train_knn: k must be >= 1");
    if (spec.k > labels.size())
        throw InvalidArgument("train_knn: k = " + std::to_string(spec.k) + " exceeds " + std::to_string(labels.size())
                              + " training records");
    for (auto f : feature_indices)
        if (f >= static_cast<std::size_t>(x.cols())) throw InvalidArgument("train_knn: feature index out of range");
    return KnnModel{spec, static_cast<std::size_t>(x.cols()), {feature_indices.begin(), feature_indices.end()},
                    select_columns(x, feature_indices), {labels.begin(), labels.end()}};
}

std::vector<int> predict(const KnnModel& model, const FeatureMatrix& x) {
    if (static_cast<std::size_t>(x.cols()) != model.input_dims)
        throw InvalidArgument("predict: query has " + std::to_string(x.cols()) + " features, model expects "
                              + std::to_string(model.input_dims));
    const FeatureMatrix q = select_columns(x, model.feature_indices);
    const auto n = model.labels.size();
    const auto k = model.spec.k;
    std::vector<std::pair<double, int>> dist(n);
    std::vector<int> out(static_cast<std::size_t>(q.rows()));
    std::map<int, double> votes;
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
        const auto qr = row_span(q, r);
        for (std::size_t i = 0; i < n; ++i)
            dist[i] = {distance(model.spec.metric, qr, row_span(model.samples, static_cast<Eigen::Index>(i))),
                       model.labels[i]};
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        votes.clear();
        for (std::size_t i = 0; i < k; ++i)
            votes[dist[i].second] += model.spec.weighting == KnnWeighting::uniform ? 1.0 : 1.0 / (dist[i].first + 1e-12);
        int best = votes.begin()->first;
        double best_w = votes.begin()->second;
        for (const auto& [label, w] : votes)
            if (w > best_w) {
                best = label;
                best_w = w;
            }
        out[static_cast<std::size_t>(r)] = best;
    }
    return out;
}

}  // namespace hsiga
