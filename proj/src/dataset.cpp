#include "hsiga/dataset.hpp"

#include "hsiga/error.hpp"
#include "hsiga/random.hpp"

#include <algorithm>
#include <map>

namespace hsiga {

std::string_view to_string(Scene s) { return s == Scene::frame ? "Frame" : "Comparison"; }

std::string_view to_string(Day d) {
    switch (d) {
        case Day::d1: return "1";
        case Day::d1a: return "1a";
        case Day::d7: return "7";
        case Day::d21: return "21";
    }
    return "?";
}

Scene parse_scene(std::string_view s) {
    if (s == "Frame" || s == "frame" || s == "F") return Scene::frame;
    if (s == "Comparison" || s == "comparison" || s == "E") return Scene::comparison;
    throw InvalidArgument("unknown scene '" + std::string(s) + "'");
}

Day parse_day(std::string_view s) {
    if (s == "1") return Day::d1;
    if (s == "1a") return Day::d1a;
    if (s == "7") return Day::d7;
    if (s == "21") return Day::d21;
    throw InvalidArgument("unknown day '" + std::string(s) + "'");
}

Day report_day(Day d) { return d == Day::d1a ? Day::d1 : d; }

LabeledDataset::LabeledDataset(FeatureMatrix spectra, std::vector<int> labels, std::vector<std::size_t> image_of,
                               std::vector<ImageMeta> images, std::set<int> classes)
    : spectra_(std::move(spectra)),
      labels_(std::move(labels)),
      image_of_(std::move(image_of)),
      images_(std::move(images)),
      classes_(std::move(classes)) {
    if (static_cast<std::size_t>(spectra_.rows()) != labels_.size() || image_of_.size() != labels_.size())
        throw InvalidArgument("dataset arrays have inconsistent lengths");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!classes_.contains(labels_[i]))
            throw InvalidArgument("label " + std::to_string(labels_[i]) + " not in declared class set");
        if (image_of_[i] >= images_.size()) throw InvalidArgument("record refers to unknown image");
    }
}

RecordView LabeledDataset::record(std::size_t i) const {
    return {row_span(spectra_, static_cast<Eigen::Index>(i)), labels_[i], image_of_[i], &images_[image_of_[i]]};
}

LabeledDataset LabeledDataset::concat(std::span<const LabeledDataset> parts) {
    if (parts.empty()) return {};
    const auto& classes = parts.front().classes();
    std::size_t total = 0;
    Eigen::Index dims = -1;
    for (const auto& p : parts) {
        if (p.classes() != classes) throw InvalidArgument("cannot concatenate datasets with different class sets");
        if (p.empty()) continue;
        if (dims >= 0 && p.spectra().cols() != dims) throw InvalidArgument("spectrum length mismatch in concat");
        dims = p.spectra().cols();
        total += p.size();
    }
    FeatureMatrix spectra(static_cast<Eigen::Index>(total), std::max<Eigen::Index>(dims, 0));
    std::vector<int> labels;
    std::vector<std::size_t> image_of;
    std::vector<ImageMeta> images;
    labels.reserve(total);
    image_of.reserve(total);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        std::vector<std::size_t> remap(p.images().size());
        for (std::size_t k = 0; k < p.images().size(); ++k) {
            const auto& m = p.images()[k];
            auto it = std::find_if(images.begin(), images.end(), [&](const ImageMeta& x) { return x.id == m.id; });
            if (it == images.end()) {
                remap[k] = images.size();
                images.push_back(m);
            } else {
                if (!(*it == m)) throw InvalidArgument("conflicting metadata for image " + m.id);
                remap[k] = static_cast<std::size_t>(it - images.begin());
            }
        }
        if (p.empty()) continue;
        spectra.middleRows(at, static_cast<Eigen::Index>(p.size())) = p.spectra();
        at += static_cast<Eigen::Index>(p.size());
        labels.insert(labels.end(), p.labels().begin(), p.labels().end());
        for (auto im : p.image_of()) image_of.push_back(remap[im]);
    }
    return LabeledDataset(std::move(spectra), std::move(labels), std::move(image_of), std::move(images), classes);
}

LabeledDataset LabeledDataset::with_spectra(FeatureMatrix spectra) const {
    if (static_cast<std::size_t>(spectra.rows()) != size()) throw InvalidArgument("replacement spectra row count mismatch");
    return LabeledDataset(std::move(spectra), labels_, image_of_, images_, classes_);
}

bool is_valid_split(const SplitPlan& plan, std::size_t n) {
    std::vector<char> seen(n, 0);
    for (const auto* part : {&plan.train, &plan.test, &plan.validation})
        for (auto i : *part) {
            if (i >= n || seen[i]) return false;
            seen[i] = 1;
        }
    return true;
}

LabeledDataset extract_labeled(const SpectralCube& cube, const LabelMap& labels, const ImageMeta& meta,
                               const std::set<int>& classes, const std::set<int>& excluded) {
    if (cube.rows() != labels.rows() || cube.cols() != labels.cols())
        throw InvalidArgument("label map " + std::to_string(labels.rows()) + "x" + std::to_string(labels.cols())
                              + " does not match cube " + std::to_string(cube.rows()) + "x"
                              + std::to_string(cube.cols()));
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < labels.labels().size(); ++k) {
        const int l = labels.labels()[k];
        if (l == 0 || excluded.contains(l)) continue;
        if (!classes.contains(l)) throw InvalidArgument("label " + std::to_string(l) + " not in declared class set");
        keep.push_back(k);
    }
    FeatureMatrix spectra(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(cube.bands()));
    std::vector<int> out_labels;
    out_labels.reserve(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const auto px = cube.pixel(keep[i] / cube.cols(), keep[i] % cube.cols());
        for (std::size_t b = 0; b < px.size(); ++b) spectra(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) = px[b];
        out_labels.push_back(labels.labels()[keep[i]]);
    }
    return LabeledDataset(std::move(spectra), std::move(out_labels), std::vector<std::size_t>(keep.size(), 0), {meta},
                          classes);
}

SplitPlan stratified_sample(const LabeledDataset& data, std::size_t per_class, GroupBy group_by, std::uint64_t seed,
                            std::span<const std::size_t> subset) {
    std::vector<std::size_t> eligible;
    if (subset.empty()) {
        eligible.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) eligible[i] = i;
    } else {
        eligible.assign(subset.begin(), subset.end());
        std::sort(eligible.begin(), eligible.end());
    }
    // Groups in (label, image) order; map keeps the iteration order deterministic.
    std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> groups;
    for (auto i : eligible) {
        const std::size_t image = group_by == GroupBy::label_and_image ? data.image_of()[i] : 0;
        groups[{data.labels()[i], image}].push_back(i);
    }
    // Every declared class must be represented in every participating image.
    std::set<std::size_t> images;
    for (auto i : eligible) images.insert(group_by == GroupBy::label_and_image ? data.image_of()[i] : 0);
    if (images.empty()) images.insert(0);
    for (int c : data.classes())
        for (auto im : images) groups[{c, im}];
    SplitPlan plan;
    for (auto& [key, members] : groups) {
        if (members.size() < per_class) {
            std::string name = "class " + std::to_string(key.first);
            if (group_by == GroupBy::label_and_image) name += " in image " + data.images()[key.second].id;
            throw InsufficientData(name + " has " + std::to_string(members.size()) + " records, "
                                   + std::to_string(per_class) + " requested");
        }
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(key.first), key.second}));
        shuffle(members.begin(), members.end(), rng);
        plan.train.insert(plan.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(per_class));
        plan.test.insert(plan.test.end(), members.begin() + static_cast<std::ptrdiff_t>(per_class), members.end());
    }
    std::sort(plan.train.begin(), plan.train.end());
    std::sort(plan.test.begin(), plan.test.end());
    return plan;
}

std::vector<std::pair<int, std::size_t>> class_histogram(const LabeledDataset& data,
                                                         std::span<const std::size_t> subset) {
    std::map<int, std::size_t> counts;
    for (int c : data.classes()) counts[c] = 0;
    if (subset.empty()) {
        for (int l : data.labels()) ++counts[l];
    } else {
        for (auto i : subset) ++counts[data.labels()[i]];
    }
    return {counts.begin(), counts.end()};
}

}  // namespace hsiga
