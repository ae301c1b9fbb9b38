#include "hsiga/metrics.hpp"

#include "hsiga/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hsiga {

double accuracy(std::span<const int> predictions, std::span<const int> truth) {
    if (predictions.size() != truth.size())
        throw InvalidArgument("accuracy: " + std::to_string(predictions.size()) + " predictions for "
                              + std::to_string(truth.size()) + " labels");
    if (truth.empty()) throw InvalidArgument("accuracy of an empty prediction set");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) correct += predictions[i] == truth[i];
    // 100 * correct is exact, so this is the correctly rounded percentage
    return static_cast<double>(100 * correct) / static_cast<double>(truth.size());
}

double cv_accuracy(std::span<const double> fold_accuracies) {
    if (fold_accuracies.empty()) throw InvalidArgument("cv_accuracy needs at least one fold");
    double sum = 0.0;
    for (double a : fold_accuracies) sum += a;
    return sum / static_cast<double>(fold_accuracies.size());
}

MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) return {};
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); }))
        return {values.front(), 0.0};
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> predictions, std::span<const int> truth,
                                                       std::span<const int> classes) {
    if (predictions.size() != truth.size()) throw InvalidArgument("confusion_matrix: length mismatch");
    std::vector<std::vector<std::size_t>> counts(classes.size(), std::vector<std::size_t>(classes.size(), 0));
    auto index = [&](int c) -> std::ptrdiff_t {
        auto it = std::find(classes.begin(), classes.end(), c);
        return it == classes.end() ? -1 : it - classes.begin();
    };
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto t = index(truth[i]);
        const auto p = index(predictions[i]);
        if (t >= 0 && p >= 0) ++counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
    }
    return counts;
}

}  // namespace hsiga
