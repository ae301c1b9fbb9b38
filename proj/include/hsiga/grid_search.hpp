#pragma once

#include "hsiga/ga.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace hsiga {

enum class ClassifierFamily { nu_svm, svc, lsvc, knn, mlp };

std::string_view to_string(ClassifierFamily f);
ClassifierFamily parse_classifier(std::string_view s);

/// Cartesian block of SVM settings for one family and kernel. Only the axes
/// the kernel reads are enumerated (rbf: reg x gamma; sigmoid: reg x gamma x
/// coef0; polynomial: reg x gamma x coef0 x degree; linear_c: loss x reg).
struct SvmGrid {
    SvmFamily family = SvmFamily::nu;
    KernelKind kernel = KernelKind::rbf;
    std::vector<double> regularization;  // nu or C
    std::vector<double> gamma{1.0};
    std::vector<double> coef0{0.0};
    std::vector<int> degree{3};
    std::vector<LinearLoss> loss{LinearLoss::hinge};
};

struct KnnGrid {
    std::vector<DistanceMetric> metric;
    std::vector<KnnWeighting> weighting;
    std::vector<std::size_t> k;
};

struct MlpGrid {
    std::vector<std::vector<std::size_t>> hidden;
    std::vector<double> dropout;
    std::vector<double> learning_rate;
    std::vector<std::size_t> batch_size;
    std::vector<std::size_t> iterations;
    std::uint64_t seed = 0;
};

using GridBlock = std::variant<SvmGrid, KnnGrid, MlpGrid>;

/// Union of Cartesian blocks, enumerated block by block in a fixed order.
struct GridSpec {
    std::vector<GridBlock> blocks;
};

std::size_t block_size(const GridBlock& block);
std::size_t grid_size(const GridSpec& grid);
std::vector<ModelSpec> enumerate(const GridSpec& grid);

/// Full-resolution grids for each family: log-spaced C and gamma, five nu
/// and coef0 levels, degrees 1-5, k 1-20, the listed MLP layouts.
GridSpec paper_grid(ClassifierFamily family);
/// Coarsened grids that keep desk-scale runs short.
GridSpec desk_grid(ClassifierFamily family);

struct GridResult {
    ModelSpec best;
    double best_fitness = 0.0;
    std::size_t best_index = 0;
    std::vector<double> scores;  // per grid point, enumeration order
};

/// Exhaustive evaluation on all `feature_count` features. Point i receives
/// seed derive_seed(seed, {i}); ties go to the earlier point.
GridResult grid_search(const GridSpec& grid, std::size_t feature_count, const FitnessFn& fitness,
                       std::uint64_t seed = 0, unsigned workers = 1);

}  // namespace hsiga
