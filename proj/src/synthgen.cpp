#include "hsiga/synthgen.hpp"

#include "hsiga/error.hpp"
#include "hsiga/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

namespace hsiga {

void SceneRecipe::validate() const {
    if (bands < 16) throw InvalidArgument("recipe needs at least 16 bands");
    if (classes.empty()) throw InvalidArgument("recipe needs at least one class");
    if (!(alpha.first > 0.0 && alpha.first <= alpha.second && alpha.second <= 1.0))
        throw InvalidArgument("mixing range must lie in (0, 1]");
    if (noise_std < 0.0) throw InvalidArgument("noise std must be >= 0");
    if (illumination_amplitude < 0.0 || illumination_amplitude >= 1.0)
        throw InvalidArgument("illumination amplitude must lie in [0, 1)");
    if (background_count == 0) throw InvalidArgument("need at least one background");
    const std::size_t stripes = classes.size() + (include_excluded ? 1 : 0);
    if (rows / stripes < 3 || cols < 3) throw InvalidArgument("image too small for the class layout");
}

double days_elapsed(Day d) {
    switch (d) {
        case Day::d1:
        case Day::d1a: return 0.0;
        case Day::d7: return 6.0;
        case Day::d21: return 20.0;
    }
    return 0.0;
}

std::vector<double> render(const Endmember& e, std::size_t bands, Day day, double drift) {
    std::vector<double> out(bands);
    const double shift = drift * days_elapsed(day);
    const double span = bands > 1 ? static_cast<double>(bands - 1) : 1.0;
    for (std::size_t b = 0; b < bands; ++b) {
        const double x = static_cast<double>(b);
        double v = e.level + e.slope * (x / span - 0.5);
        for (const auto& bump : e.bumps) {
            const double z = (x - bump.center - shift) / bump.width;
            if (std::abs(z) <= 3.0) v += bump.amplitude * std::exp(-0.5 * z * z);
        }
        out[b] = v;
    }
    return out;
}

namespace {

std::size_t endmember_count(const SceneRecipe& r) { return r.classes.size() + (r.include_excluded ? 1 : 0); }

double signature_width(std::size_t bands) { return std::max(1.0, 0.015 * static_cast<double>(bands)); }
double signature_gap(std::size_t bands) { return std::max(3.0, 0.05 * static_cast<double>(bands)); }

}  // namespace

std::vector<Endmember> generate_endmembers(const SceneRecipe& recipe, std::uint64_t seed) {
    recipe.validate();
    const std::size_t k = endmember_count(recipe);
    const double bands = static_cast<double>(recipe.bands);
    const double lo = 0.1 * bands, hi = 0.9 * bands;
    const double slot = (hi - lo) / static_cast<double>(k);
    const double sigma = signature_width(recipe.bands);
    const double gap = signature_gap(recipe.bands);
    std::vector<Endmember> out;
    for (std::size_t c = 0; c < k; ++c) {
        Rng rng(derive_seed(seed, {c}));
        Endmember e;
        e.level = uniform_real(rng, 0.3, 0.5);
        e.slope = uniform_real(rng, -0.1, 0.1);
        const double mid = lo + (static_cast<double>(c) + 0.5) * slot + uniform_real(rng, -0.1, 0.1) * slot;
        e.bumps.push_back({mid - gap / 2, sigma, uniform_real(rng, 0.1, 0.2)});
        e.bumps.push_back({mid + gap / 2, sigma, uniform_real(rng, 0.1, 0.2)});
        const auto extra = uniform_index(rng, 3);
        for (std::uint64_t j = 0; j < extra; ++j)
            e.bumps.push_back({uniform_real(rng, lo, hi), uniform_real(rng, 4.0, 8.0) * sigma,
                               uniform_real(rng, 0.03, 0.08)});
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Endmember> generate_backgrounds(const SceneRecipe& recipe, const std::vector<Endmember>& classes,
                                            std::uint64_t seed) {
    if (recipe.scene == Scene::frame) return std::vector<Endmember>(recipe.background_count, Endmember{0.9, 0.0, {}});
    std::vector<Endmember> out;
    const double contrast = recipe.background_contrast;
    for (std::size_t i = 0; i < recipe.background_count; ++i) {
        Rng rng(derive_seed(seed, {0xb6, i}));
        Endmember e;
        e.level = 0.9 - contrast * uniform_real(rng, 0.1, 0.75);
        e.slope = contrast * uniform_real(rng, -0.3, 0.3);
        const auto bumps = 2 + uniform_index(rng, 2);
        for (std::uint64_t j = 0; j < bumps && !classes.empty(); ++j) {
            const auto& target = classes[uniform_index(rng, classes.size())];
            const auto& sig = target.bumps[uniform_index(rng, 2)];
            e.bumps.push_back({sig.center + uniform_real(rng, -1.0, 1.0), sig.width * uniform_real(rng, 1.0, 1.5),
                               contrast * uniform_real(rng, 0.2, 0.5)});
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Blob> scene_layout(const SceneRecipe& recipe) {
    recipe.validate();
    std::vector<int> labels = recipe.classes;
    if (recipe.include_excluded) labels.push_back(recipe.excluded_class);
    const std::size_t h = recipe.rows / labels.size();
    std::vector<Blob> blobs;
    for (std::size_t s = 0; s < labels.size(); ++s)
        blobs.push_back({labels[s], s * h + 1, (s + 1) * h - 1, 1, recipe.cols - 1});
    return blobs;
}

SceneData generate_scene(const SceneRecipe& recipe, std::uint64_t seed) {
    recipe.validate();
    const auto endmembers = generate_endmembers(recipe, recipe.endmember_seed);
    const auto backgrounds = generate_backgrounds(recipe, endmembers, seed);
    const auto blobs = scene_layout(recipe);

    std::vector<std::vector<double>> class_spectra, background_spectra;
    for (const auto& e : endmembers) class_spectra.push_back(render(e, recipe.bands, recipe.day, recipe.drift));
    for (const auto& e : backgrounds) background_spectra.push_back(render(e, recipe.bands));

    SceneData out{SpectralCube(recipe.rows, recipe.cols, recipe.bands), LabelMap(recipe.rows, recipe.cols)};
    std::vector<double> wl(recipe.bands);
    for (std::size_t b = 0; b < recipe.bands; ++b)
        wl[b] = 377.0 + (1046.0 - 377.0) * static_cast<double>(b) / static_cast<double>(recipe.bands - 1);
    out.cube.set_wavelengths(std::move(wl));

    std::vector<std::ptrdiff_t> endmember_of(recipe.rows * recipe.cols, -1);
    for (std::size_t i = 0; i < blobs.size(); ++i)
        for (std::size_t r = blobs[i].row0; r < blobs[i].row1; ++r)
            for (std::size_t c = blobs[i].col0; c < blobs[i].col1; ++c) {
                out.labels.at(r, c) = static_cast<std::uint16_t>(blobs[i].label);
                endmember_of[r * recipe.cols + c] = static_cast<std::ptrdiff_t>(i);
            }

    Rng field(derive_seed(seed, {0x11}));
    const double phase_r = uniform_real(field, 0.0, 2.0 * std::numbers::pi);
    const double phase_c = uniform_real(field, 0.0, 2.0 * std::numbers::pi);
    const double amp = recipe.illumination_amplitude;
    const double freq = recipe.illumination_frequency;

    Rng rng(derive_seed(seed, {0x22}));
    const std::size_t nb = backgrounds.size();
    for (std::size_t r = 0; r < recipe.rows; ++r)
        for (std::size_t c = 0; c < recipe.cols; ++c) {
            const double illum =
                1.0
                + amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(r) / static_cast<double>(recipe.rows) + phase_r)
                      * std::cos(2.0 * std::numbers::pi * freq * static_cast<double>(c) / static_cast<double>(recipe.cols) + phase_c);
            const auto& bg = background_spectra[std::min(nb - 1, c * nb / recipe.cols)];
            const auto e = endmember_of[r * recipe.cols + c];
            const double a = e >= 0 ? uniform_real(rng, recipe.alpha.first, recipe.alpha.second) : 0.0;
            auto px = out.cube.pixel(r, c);
            for (std::size_t b = 0; b < recipe.bands; ++b) {
                double v = (1.0 - a) * bg[b];
                if (e >= 0) v += a * class_spectra[static_cast<std::size_t>(e)][b];
                v *= illum;
                if (recipe.noise_std > 0.0) v += recipe.noise_std * standard_normal(rng);
                px[b] = static_cast<float>(v);
            }
        }
    return out;
}

std::vector<std::size_t> informative_bands(const SceneRecipe& recipe, const std::vector<Endmember>& endmembers,
                                           std::span<const Day> days) {
    std::set<std::size_t> bands;
    for (std::size_t k = 0; k < std::min(endmembers.size(), recipe.classes.size()); ++k)
        for (Day d : days)
            for (std::size_t j = 0; j < std::min<std::size_t>(2, endmembers[k].bumps.size()); ++j) {
                const auto& bump = endmembers[k].bumps[j];
                const double center = bump.center + recipe.drift * days_elapsed(d);
                const double lo = std::max(0.0, std::ceil(center - 1.5 * bump.width));
                const double hi = std::min(static_cast<double>(recipe.bands) - 1, std::floor(center + 1.5 * bump.width));
                for (double b = lo; b <= hi; b += 1.0) bands.insert(static_cast<std::size_t>(b));
            }
    return {bands.begin(), bands.end()};
}

Suite generate_suite(const SceneRecipe& base, std::uint64_t seed, std::size_t comparison_backgrounds) {
    if (comparison_backgrounds < 3) throw InvalidArgument("Comparison scenes need at least 3 backgrounds");
    struct Slot {
        const char* id;
        Scene scene;
        Day day;
    };
    const Slot slots[] = {{"F1", Scene::frame, Day::d1},       {"F1a", Scene::frame, Day::d1a},
                          {"F7", Scene::frame, Day::d7},       {"F21", Scene::frame, Day::d21},
                          {"C1", Scene::comparison, Day::d1},  {"C7", Scene::comparison, Day::d7},
                          {"C21", Scene::comparison, Day::d21}};
    SceneRecipe recipe = base;
    recipe.endmember_seed = derive_seed(seed, {0xe7});
    Suite suite;
    suite.classes = base.classes;
    for (std::size_t i = 0; i < std::size(slots); ++i) {
        recipe.scene = slots[i].scene;
        recipe.day = slots[i].day;
        recipe.background_count = slots[i].scene == Scene::frame ? 1 : comparison_backgrounds;
        // the excluded class is missing from part of the suite
        recipe.include_excluded = base.include_excluded && (i == 0 || i == 2);
        SceneData scene = generate_scene(recipe, derive_seed(seed, {i}));
        suite.images.push_back({{slots[i].id, slots[i].scene, slots[i].day}, std::move(scene.cube), std::move(scene.labels)});
    }
    recipe.include_excluded = false;
    const Day days[] = {Day::d1, Day::d7, Day::d21};
    suite.informative_bands = informative_bands(recipe, generate_endmembers(recipe, recipe.endmember_seed), days);
    return suite;
}

void save_suite(const std::filesystem::path& dir, const Suite& suite) {
    std::filesystem::create_directories(dir);
    nlohmann::json meta;
    meta["format"] = "hsiga-suite";
    meta["version"] = 1;
    meta["classes"] = suite.classes;
    meta["informative_bands"] = suite.informative_bands;
    meta["images"] = nlohmann::json::array();
    for (const auto& img : suite.images) {
        const std::string cube = img.meta.id + ".cube", labels = img.meta.id + ".labels";
        save_cube(dir / cube, img.cube);
        save_labels(dir / labels, img.labels);
        nlohmann::json entry{{"id", img.meta.id},
                             {"scene", img.meta.scene == Scene::frame ? "Frame" : "Comparison"},
                             {"day", std::string(to_string(img.meta.day))},
                             {"cube", cube},
                             {"labels", labels}};
        if (img.cube.wavelengths()) entry["wavelengths"] = *img.cube.wavelengths();
        meta["images"].push_back(std::move(entry));
    }
    std::ofstream out(dir / "suite.json");
    if (!out) throw Error("cannot write " + (dir / "suite.json").string());
    out << meta.dump(2) << '\n';
}

Suite load_suite(const std::filesystem::path& dir) {
    const auto path = dir / "suite.json";
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(in);
        Suite suite;
        suite.classes = meta.at("classes").get<std::vector<int>>();
        suite.informative_bands = meta.value("informative_bands", std::vector<std::size_t>{});
        for (const auto& entry : meta.at("images")) {
            SuiteImage img;
            img.meta.id = entry.at("id").get<std::string>();
            img.meta.scene = parse_scene(entry.at("scene").get<std::string>());
            img.meta.day = parse_day(entry.at("day").get<std::string>());
            img.cube = load_cube(dir / entry.at("cube").get<std::string>());
            img.labels = load_labels(dir / entry.at("labels").get<std::string>());
            if (entry.contains("wavelengths")) img.cube.set_wavelengths(entry["wavelengths"].get<std::vector<double>>());
            suite.images.push_back(std::move(img));
        }
        return suite;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

LabeledDataset suite_dataset(const Suite& suite, const PreprocessConfig& config, const std::set<int>& excluded) {
    if (suite.images.empty()) throw InsufficientData("suite has no images");
    const std::set<int> classes(suite.classes.begin(), suite.classes.end());
    std::vector<LabeledDataset> parts;
    for (const auto& img : suite.images) {
        config.validate(img.cube.bands());
        const SpectralCube filtered = median_filter(img.cube, config.median_radius);
        LabeledDataset raw = extract_labeled(filtered, img.labels, img.meta, classes, excluded);
        parts.push_back(raw.with_spectra(transform_spectra(raw.spectra(), config)));
    }
    return LabeledDataset::concat(parts);
}

RecoveryData band_recovery_dataset(std::size_t bands, std::size_t informative, std::size_t per_class,
                                   double separation, std::uint64_t seed) {
    if (informative == 0 || informative >= bands) throw InvalidArgument("need 0 < informative < bands");
    if (per_class == 0) throw InvalidArgument("per_class must be >= 1");
    Rng rng(seed);
    std::vector<std::size_t> order(bands);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order.begin(), order.end(), rng);
    RecoveryData out;
    out.informative.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(informative));
    std::sort(out.informative.begin(), out.informative.end());

    const std::size_t classes = informative + 1;
    const std::size_t n = classes * per_class;
    FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(bands));
    std::vector<int> labels(n);
    std::set<int> class_set;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = i / per_class;
        labels[i] = static_cast<int>(k + 1);
        class_set.insert(labels[i]);
        for (std::size_t b = 0; b < bands; ++b)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) = standard_normal(rng);
        if (k < informative) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out.informative[k])) += separation;
    }
    out.data = LabeledDataset(std::move(x), std::move(labels), std::vector<std::size_t>(n, 0),
                              {ImageMeta{"R", Scene::frame, Day::d1}}, class_set);
    return out;
}

}  // namespace hsiga
