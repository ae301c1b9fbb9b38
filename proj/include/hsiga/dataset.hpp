#pragma once

#include "hsiga/cube.hpp"
#include "hsiga/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsiga {

enum class Scene { frame, comparison };
enum class Day { d1, d1a, d7, d21 };

std::string_view to_string(Scene s);
std::string_view to_string(Day d);
Scene parse_scene(std::string_view s);
Day parse_day(std::string_view s);

/// Day column a test pixel is reported under; the afternoon acquisition of
/// day 1 is reported with day 1.
Day report_day(Day d);

/// Classes used by the six-class problem; class 4 is excluded by default.
inline const std::set<int> kDefaultClasses{1, 2, 3, 5, 6, 7};
inline const std::set<int> kDefaultExcluded{4};

struct ImageMeta {
    std::string id;
    Scene scene = Scene::frame;
    Day day = Day::d1;

    friend bool operator==(const ImageMeta&, const ImageMeta&) = default;
};

/// A read-only view of one record.
struct RecordView {
    std::span<const double> spectrum;
    int label;
    std::size_t image;
    const ImageMeta* meta;
};

/// Flat collection of labeled spectra with their source-image metadata.
/// Spectra are rows of one matrix; per-record attributes live in parallel arrays.
class LabeledDataset {
public:
    LabeledDataset() = default;
    LabeledDataset(FeatureMatrix spectra, std::vector<int> labels, std::vector<std::size_t> image_of,
                   std::vector<ImageMeta> images, std::set<int> classes = kDefaultClasses);

    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }
    std::size_t dims() const noexcept { return static_cast<std::size_t>(spectra_.cols()); }

    RecordView record(std::size_t i) const;
    const FeatureMatrix& spectra() const noexcept { return spectra_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    const std::vector<std::size_t>& image_of() const noexcept { return image_of_; }
    const std::vector<ImageMeta>& images() const noexcept { return images_; }
    const std::set<int>& classes() const noexcept { return classes_; }

    Scene scene(std::size_t i) const { return images_[image_of_[i]].scene; }
    Day day(std::size_t i) const { return images_[image_of_[i]].day; }

    /// Concatenates datasets sharing a class set and spectrum length. Image
    /// metadata is merged by id.
    static LabeledDataset concat(std::span<const LabeledDataset> parts);

    /// Same records with spectra replaced (row count must match).
    LabeledDataset with_spectra(FeatureMatrix spectra) const;

private:
    FeatureMatrix spectra_;
    std::vector<int> labels_;
    std::vector<std::size_t> image_of_;
    std::vector<ImageMeta> images_;
    std::set<int> classes_;
};

/// Index partition of a dataset. Validation is empty when unused.
struct SplitPlan {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<std::size_t> validation;
};

/// Checks the SplitPlan invariants (pairwise disjoint, indices < n).
bool is_valid_split(const SplitPlan& plan, std::size_t n);

/// Builds a dataset from every pixel whose label is in `classes`. Background
/// (0) and `excluded` labels are dropped; any other label is an error.
LabeledDataset extract_labeled(const SpectralCube& cube, const LabelMap& labels, const ImageMeta& meta,
                               const std::set<int>& classes = kDefaultClasses,
                               const std::set<int>& excluded = kDefaultExcluded);

enum class GroupBy { label, label_and_image };

/// Draws exactly `per_class` records per group without replacement. When
/// `subset` is non-empty only those records are eligible and the test part is
/// the remainder of the subset.
SplitPlan stratified_sample(const LabeledDataset& data, std::size_t per_class, GroupBy group_by,
                            std::uint64_t seed, std::span<const std::size_t> subset = {});

/// Count of records per class label.
std::vector<std::pair<int, std::size_t>> class_histogram(const LabeledDataset& data,
                                                         std::span<const std::size_t> subset = {});

}  // namespace hsiga
