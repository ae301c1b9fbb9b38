#include <doctest.h>

#include <hsiga/classifier.hpp>
#include <hsiga/error.hpp>
#include <hsiga/metrics.hpp>
#include <hsiga/synthgen.hpp>

#include <filesystem>
#include <map>
#include <numeric>

using namespace hsiga;

namespace {

SceneRecipe small_recipe() {
    SceneRecipe r;
    r.bands = 40;
    r.rows = 24;
    r.cols = 20;
    return r;
}

std::filesystem::path temp_dir(const char* name) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("recipe validation") {
    SceneRecipe r;
    CHECK_NOTHROW(r.validate());
    r.bands = 15;
    CHECK_THROWS_AS(r.validate(), InvalidArgument);
    r = SceneRecipe{};
    r.alpha = {0.0, 0.5};
    CHECK_THROWS_AS(r.validate(), InvalidArgument);
    r.alpha = {0.5, 1.1};
    CHECK_THROWS_AS(r.validate(), InvalidArgument);
    r = SceneRecipe{};
    r.noise_std = -1;
    CHECK_THROWS_AS(r.validate(), InvalidArgument);
}

TEST_CASE("endmembers: length, signature pair and drift") {
    const auto r = small_recipe();
    const auto em = generate_endmembers(r, 3);
    REQUIRE(em.size() == r.classes.size());
    for (const auto& e : em) {
        CHECK(e.bumps.size() >= 2);
        CHECK(e.bumps.size() <= 4);
        CHECK(render(e, r.bands).size() == r.bands);
        CHECK(render(e, r.bands, Day::d21, 0.0) == render(e, r.bands, Day::d1, 0.0));
        CHECK(render(e, r.bands, Day::d1a, 0.5) == render(e, r.bands, Day::d1, 0.5));
        CHECK(render(e, r.bands, Day::d21, 0.5) != render(e, r.bands, Day::d1, 0.5));
    }
    // signature centers differ between classes
    for (std::size_t a = 0; a < em.size(); ++a)
        for (std::size_t b = a + 1; b < em.size(); ++b) CHECK(em[a].bumps[0].center != em[b].bumps[0].center);
    CHECK(days_elapsed(Day::d7) == 6.0);
}

TEST_CASE("bumps with disjoint supports are orthogonal") {
    Endmember a{0.0, 0.0, {{10.0, 2.0, 1.0}}};
    Endmember b{0.0, 0.0, {{30.0, 2.0, 0.7}}};
    const auto x = render(a, 40), y = render(b, 40);
    CHECK(std::inner_product(x.begin(), x.end(), y.begin(), 0.0) == 0.0);
    CHECK(x[10] == doctest::Approx(1.0));
    CHECK(x[17] == 0.0);  // beyond three widths
}

TEST_CASE("noise-free unmixed pixels reproduce the endmembers") {
    auto r = small_recipe();
    r.alpha = {1.0, 1.0};
    r.noise_std = 0.0;
    r.illumination_amplitude = 0.0;
    r.day = Day::d7;
    const auto scene = generate_scene(r, 8);
    const auto em = generate_endmembers(r, r.endmember_seed);
    std::map<int, std::vector<double>> spectra;
    for (std::size_t k = 0; k < r.classes.size(); ++k) spectra[r.classes[k]] = render(em[k], r.bands, r.day, r.drift);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < r.rows; ++i)
        for (std::size_t j = 0; j < r.cols; ++j) {
            const int label = scene.labels.at(i, j);
            if (label == 0) continue;
            const auto px = scene.cube.pixel(i, j);
            for (std::size_t b = 0; b < r.bands; ++b) REQUIRE(px[b] == static_cast<float>(spectra[label][b]));
            ++checked;
        }
    CHECK(checked > 0);
}

TEST_CASE("scene generation is deterministic and matches the layout") {
    auto r = small_recipe();
    r.include_excluded = true;
    const auto a = generate_scene(r, 5), b = generate_scene(r, 5), c = generate_scene(r, 6);
    CHECK(a.cube == b.cube);
    CHECK(a.labels.labels() == b.labels.labels());
    CHECK(!(a.cube == c.cube));

    std::map<int, std::size_t> expected, counted;
    for (const auto& blob : scene_layout(r)) expected[blob.label] += blob.area();
    for (auto l : a.labels.labels())
        if (l != 0) ++counted[l];
    CHECK(counted == expected);
    CHECK(expected.count(4) == 1);
    CHECK(expected.size() == 7);
    CHECK(a.cube.wavelengths().has_value());
}

TEST_CASE("suite structure and round trip") {
    const auto suite = generate_suite(small_recipe(), 21);
    REQUIRE(suite.images.size() == 7);
    std::size_t frames = 0;
    for (const auto& img : suite.images) frames += img.meta.scene == Scene::frame;
    CHECK(frames == 4);
    CHECK(suite.images[1].meta.day == Day::d1a);
    CHECK(!suite.informative_bands.empty());

    // Frame(1) and Comparison(1) share class endmembers: noise-free unmixed
    // pixels of the same class agree across scenes.
    const auto again = generate_suite(small_recipe(), 21);
    CHECK(again.images[6].cube == suite.images[6].cube);

    const auto dir = temp_dir("hsiga_suite_test");
    save_suite(dir, suite);
    const auto loaded = load_suite(dir);
    REQUIRE(loaded.images.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(loaded.images[i].meta == suite.images[i].meta);
        CHECK(loaded.images[i].cube == suite.images[i].cube);
        CHECK(loaded.images[i].labels.labels() == suite.images[i].labels.labels());
    }
    CHECK(loaded.informative_bands == suite.informative_bands);
    CHECK(loaded.classes == suite.classes);
    std::filesystem::remove(dir / "suite.json");
    CHECK_THROWS(load_suite(dir));
    std::filesystem::remove_all(dir);
}

TEST_CASE("suite scenes share endmembers") {
    auto r = small_recipe();
    r.alpha = {1.0, 1.0};
    r.noise_std = 0.0;
    r.illumination_amplitude = 0.0;
    const auto suite = generate_suite(r, 4);
    const auto& frame = suite.images[0];
    const auto& comparison = suite.images[4];
    REQUIRE(comparison.meta.scene == Scene::comparison);
    REQUIRE(comparison.meta.day == Day::d1);
    for (std::size_t i = 0; i < r.rows; ++i)
        for (std::size_t j = 0; j < r.cols; ++j)
            if (frame.labels.at(i, j) != 0 && frame.labels.at(i, j) == comparison.labels.at(i, j)) {
                const auto a = frame.cube.pixel(i, j), b = comparison.cube.pixel(i, j);
                CHECK(std::equal(a.begin(), a.end(), b.begin()));
            }
}

TEST_CASE("a Frame-trained classifier loses accuracy on the Comparison scene") {
    SceneRecipe r;
    r.rows = 36;
    r.cols = 24;
    const auto suite = generate_suite(r, 17);
    const auto data = suite_dataset(suite, PreprocessConfig{});
    std::vector<std::size_t> frame1, comparison1;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.image_of()[i] == 0) frame1.push_back(i);
        if (data.image_of()[i] == 4) comparison1.push_back(i);
    }
    const auto split = stratified_sample(data, 40, GroupBy::label, 3, frame1);
    SvmSpec spec;
    spec.kernel.kind = KernelKind::rbf;
    spec.kernel.gamma = 1.0;
    spec.nu = 0.1;
    std::vector<int> ytrain;
    for (auto i : split.train) ytrain.push_back(data.labels()[i]);
    const auto model = train_model(spec, gather_rows(data.spectra(), split.train), ytrain);
    const auto score = [&](const std::vector<std::size_t>& rows) {
        std::vector<int> truth;
        for (auto i : rows) truth.push_back(data.labels()[i]);
        return accuracy(predict(model, gather_rows(data.spectra(), rows)), truth);
    };
    const double held_out = score(split.test), other_scene = score(comparison1);
    MESSAGE("held-out Frame " << held_out << ", Comparison " << other_scene);
    CHECK(held_out > other_scene);
}

TEST_CASE("band recovery dataset") {
    const auto r = band_recovery_dataset(40, 5, 30, 3.0, 2);
    CHECK(r.data.size() == 6 * 30);
    CHECK(r.data.dims() == 40);
    CHECK(r.informative.size() == 5);
    CHECK(r.data.classes().size() == 6);
    // each informative band carries a mean shift for exactly its class
    for (std::size_t k = 0; k < 5; ++k) {
        double in = 0, out = 0;
        std::size_t nin = 0, nout = 0;
        for (std::size_t i = 0; i < r.data.size(); ++i) {
            const double v = r.data.spectra()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r.informative[k]));
            if (r.data.labels()[i] == static_cast<int>(k) + 1) {
                in += v;
                ++nin;
            } else {
                out += v;
                ++nout;
            }
        }
        CHECK(in / static_cast<double>(nin) - out / static_cast<double>(nout) > 2.0);
    }
}
