#pragma once

#include "hsiga/cube.hpp"
#include "hsiga/dataset.hpp"
#include "hsiga/preprocess.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <utility>
#include <vector>

namespace hsiga {

/// Gaussian bump over the band axis, truncated to zero beyond 3 widths.
struct Bump {
    double center = 0.0;  // band index at day 1
    double width = 1.0;   // standard deviation in bands
    double amplitude = 0.0;
};

/// Smooth baseline (level + slope over the band axis) plus bumps. The first
/// two bumps of a class endmember are its signature pair.
struct Endmember {
    double level = 0.0;
    double slope = 0.0;  // change across the whole band axis
    std::vector<Bump> bumps;
};

struct SceneRecipe {
    std::size_t bands = 128;
    std::vector<int> classes{1, 2, 3, 5, 6, 7};
    bool include_excluded = false;    // adds a stripe of class 4
    int excluded_class = 4;
    std::size_t rows = 48;
    std::size_t cols = 48;
    Scene scene = Scene::frame;
    Day day = Day::d1;
    std::uint64_t endmember_seed = 1;
    std::size_t background_count = 1;  // Frame 1, Comparison >= 3
    double background_contrast = 1.0;  // scales level spread and bumps of Comparison backgrounds
    std::pair<double, double> alpha{0.5, 0.9};
    double illumination_amplitude = 0.3;  // field lies in [1 - a, 1 + a]
    double illumination_frequency = 1.0;  // cycles across the image; lower is smoother
    double noise_std = 0.005;
    double drift = 0.1;  // bump-center shift in bands per day

    void validate() const;
};

/// Days elapsed since day 1 (1 and 1a count as 0).
double days_elapsed(Day d);

std::vector<Endmember> generate_endmembers(const SceneRecipe& recipe, std::uint64_t seed);
/// Spectrum of an endmember on `bands` bands with bump centers shifted by
/// drift * days_elapsed(day).
std::vector<double> render(const Endmember& e, std::size_t bands, Day day = Day::d1, double drift = 0.0);

std::vector<Endmember> generate_backgrounds(const SceneRecipe& recipe, const std::vector<Endmember>& classes,
                                            std::uint64_t seed);

struct SceneData {
    SpectralCube cube;
    LabelMap labels;
};

/// Rectangular blob of one class; rows [row0, row1) x cols [col0, col1).
struct Blob {
    int label = 0;
    std::size_t row0 = 0, row1 = 0, col0 = 0, col1 = 0;
    std::size_t area() const { return (row1 - row0) * (col1 - col0); }
};

/// One horizontal stripe per class (plus the excluded class when enabled),
/// each holding a blob with a one-pixel margin.
std::vector<Blob> scene_layout(const SceneRecipe& recipe);

/// Endmembers come from recipe.endmember_seed, everything else (backgrounds,
/// mixing, illumination, noise) from `seed`.
SceneData generate_scene(const SceneRecipe& recipe, std::uint64_t seed);

struct SuiteImage {
    ImageMeta meta;
    SpectralCube cube;
    LabelMap labels;
};

struct Suite {
    std::vector<SuiteImage> images;
    std::vector<int> classes;
    std::vector<std::size_t> informative_bands;  // raw band indices
};

/// Bands within 1.5 widths of any class signature bump on any day in
/// `days`.
std::vector<std::size_t> informative_bands(const SceneRecipe& recipe, const std::vector<Endmember>& endmembers,
                                           std::span<const Day> days);

/// Four Frame images (days 1, 1a, 7, 21) and three Comparison images (days
/// 1, 7, 21) sharing class endmembers. `base` supplies everything except
/// scene, day and background count.
Suite generate_suite(const SceneRecipe& base, std::uint64_t seed, std::size_t comparison_backgrounds = 3);

/// Writes `<id>.cube`, `<id>.labels` per image and a `suite.json` sidecar.
void save_suite(const std::filesystem::path& dir, const Suite& suite);
Suite load_suite(const std::filesystem::path& dir);

/// Preprocesses every image and concatenates their labeled pixels.
LabeledDataset suite_dataset(const Suite& suite, const PreprocessConfig& config,
                             const std::set<int>& excluded = kDefaultExcluded);

/// Band-recovery dataset: unit Gaussian noise on every band, and class k
/// (k < informative) shifted by `separation` on its informative band. The
/// last class carries no signal. One image, Frame scene, day 1.
struct RecoveryData {
    LabeledDataset data;
    std::vector<std::size_t> informative;
};
RecoveryData band_recovery_dataset(std::size_t bands, std::size_t informative, std::size_t per_class,
                                   double separation, std::uint64_t seed);

}  // namespace hsiga
