#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hsiga {

/// Percentage of positions where prediction equals truth.
double accuracy(std::span<const int> predictions, std::span<const int> truth);

/// Unweighted mean of per-fold accuracy percentages.
double cv_accuracy(std::span<const double> fold_accuracies);

/// Population mean and standard deviation. Identical inputs give std 0.
struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};
MeanStd mean_std(std::span<const double> values);

/// Row-major counts[truth][prediction] over the given class ids; pairs with
/// an unknown id are ignored.
std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> predictions, std::span<const int> truth,
                                                       std::span<const int> classes);

}  // namespace hsiga
