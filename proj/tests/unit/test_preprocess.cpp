#include <doctest.h>

#include <hsiga/error.hpp>
#include <hsiga/preprocess.hpp>
#include <hsiga/random.hpp>

#include <algorithm>
#include <cmath>

using namespace hsiga;

namespace {

// Independent window oracle: collect, sort, pick the middle (or mean of the
// two middles).
double window_median(const SpectralCube& cube, std::size_t r, std::size_t c, std::size_t b, std::size_t radius) {
    std::vector<double> v;
    const long rr = static_cast<long>(r), cc = static_cast<long>(c), rad = static_cast<long>(radius);
    for (long i = rr - rad; i <= rr + rad; ++i)
        for (long j = cc - rad; j <= cc + rad; ++j)
            if (i >= 0 && j >= 0 && i < static_cast<long>(cube.rows()) && j < static_cast<long>(cube.cols()))
                v.push_back(cube.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j), b));
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> random_spectrum(std::size_t n, Rng& rng) {
    std::vector<double> s(n);
    for (auto& x : s) x = uniform_real(rng, 0.05, 2.0);
    return s;
}

}  // namespace

TEST_CASE("median filter radius 0 is the identity") {
    Rng rng(1);
    std::vector<float> v(4 * 5 * 3);
    for (auto& x : v) x = static_cast<float>(uniform01(rng));
    const SpectralCube cube(4, 5, 3, v);
    CHECK(median_filter(cube, 0) == cube);
}

TEST_CASE("median of a 3x3 window of 1..9 is 5") {
    SpectralCube cube(3, 3, 1, {9, 1, 8, 2, 7, 3, 6, 4, 5});
    CHECK(median_filter(cube, 1).at(1, 1, 0) == 5.0f);
}

TEST_CASE("median filter matches a brute-force window oracle") {
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<float> v(5 * 5 * 4);
        for (auto& x : v) x = static_cast<float>(uniform_real(rng, -3, 3));
        const SpectralCube cube(5, 5, 4, v);
        for (std::size_t radius : {1, 2}) {
            const auto out = median_filter(cube, radius);
            for (std::size_t r = 0; r < 5; ++r)
                for (std::size_t c = 0; c < 5; ++c)
                    for (std::size_t b = 0; b < 4; ++b) {
                        CHECK(out.at(r, c, b) == static_cast<float>(window_median(cube, r, c, b, radius)));
                    }
        }
    }
}

TEST_CASE("filtered values stay within the window range") {
    Rng rng(4);
    std::vector<float> v(6 * 4 * 2);
    for (auto& x : v) x = static_cast<float>(uniform_real(rng, 0, 10));
    const SpectralCube cube(6, 4, 2, v);
    const auto out = median_filter(cube, 1);
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            for (std::size_t b = 0; b < 2; ++b) {
                float lo = 1e9f, hi = -1e9f;
                for (std::size_t i = r ? r - 1 : 0; i <= std::min<std::size_t>(5, r + 1); ++i)
                    for (std::size_t j = c ? c - 1 : 0; j <= std::min<std::size_t>(3, c + 1); ++j) {
                        lo = std::min(lo, cube.at(i, j, b));
                        hi = std::max(hi, cube.at(i, j, b));
                    }
                CHECK(out.at(r, c, b) >= lo);
                CHECK(out.at(r, c, b) <= hi);
            }
}

TEST_CASE("median normalization") {
    CHECK(median_normalize(std::vector<double>{2, 4, 6}) == std::vector<double>{0.5, 1.0, 1.5});
    CHECK(median_normalize(std::vector<double>{3.5, 3.5, 3.5}) == std::vector<double>{1, 1, 1});
    CHECK(median(std::vector<double>{4, 1, 3, 2}) == 2.5);
    CHECK_THROWS_AS(median_normalize(std::vector<double>{-1, 0, 1}), InvalidArgument);

    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = random_spectrum(113, rng);
        CHECK(std::abs(median(median_normalize(s)) - 1.0) <= 1e-12);
        // scale invariance with exactly representable factors
        for (double k : {2.0, 0.25, 8.0}) {
            std::vector<double> scaled(s);
            for (auto& x : scaled) x *= k;
            CHECK(median_normalize(scaled) == median_normalize(s));
        }
    }
}

TEST_CASE("band removal") {
    CHECK(default_removed_bands().size() == 15);
    std::vector<double> s(128, 1.0);
    CHECK(remove_bands(s, default_removed_bands()).size() == 113);
    CHECK(remove_bands(std::vector<double>{7, 8, 9}, std::vector<std::size_t>{}) == std::vector<double>{7, 8, 9});
    CHECK(remove_bands(std::vector<double>{7, 8, 9}, std::vector<std::size_t>{0}) == std::vector<double>{8, 9});
    CHECK_THROWS_AS(remove_bands(std::vector<double>{7, 8, 9}, std::vector<std::size_t>{3}), InvalidArgument);

    const auto t = band_translation(128, default_removed_bands());
    CHECK(t.kept.size() == 113);
    CHECK(t.kept.front() == 5);
    CHECK(t.old_to_new[5] == 0);
    CHECK(t.old_to_new[48] == -1);
    CHECK(t.kept[static_cast<std::size_t>(t.old_to_new[51])] == 51);
}

TEST_CASE("derivative") {
    CHECK(derivative(std::vector<double>{1, 3, 6}) == std::vector<double>{2, 3});
    CHECK(derivative(std::vector<double>{4, 4, 4, 4}) == std::vector<double>{0, 0, 0});
    CHECK_THROWS_AS(derivative(std::vector<double>{1}), InvalidArgument);
    std::vector<double> ramp(113);
    for (std::size_t b = 0; b < ramp.size(); ++b) ramp[b] = 0.5 * static_cast<double>(b) + 3.0;
    const auto d = derivative(ramp);
    CHECK(d.size() == 112);
    for (double v : d) CHECK(v == 0.5);
}

TEST_CASE("derivative is translation invariant") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        // dyadic values keep every sum exact
        std::vector<double> s(40);
        for (auto& x : s) x = static_cast<double>(uniform_index(rng, 1024)) / 64.0;
        const double c = static_cast<double>(uniform_index(rng, 64)) / 8.0;
        std::vector<double> shifted(s);
        for (auto& x : shifted) x += c;
        CHECK(derivative(shifted) == derivative(s));
    }
}

TEST_CASE("default chain maps 128 bands to 112 features") {
    PreprocessConfig config;
    Rng rng(10);
    FeatureMatrix x(3, 128);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = uniform_real(rng, 0.1, 1.0);
    CHECK(transform_spectra(x, config).cols() == 112);
    config.apply_derivative = false;
    CHECK(transform_spectra(x, config).cols() == 113);
    const auto origin = feature_origin(128, PreprocessConfig{});
    CHECK(origin.size() == 112);
    CHECK(origin.front() == 5);
    CHECK(origin[42] == 47);  // difference 51 - 47 is reported under 47
    CHECK(origin[43] == 51);
}

TEST_CASE("config validation") {
    PreprocessConfig config;
    CHECK_NOTHROW(config.validate(128));
    CHECK_THROWS_AS(config.validate(100), InvalidArgument);
    config.removed_bands = {0, 1};
    CHECK_THROWS_AS(config.validate(3), InvalidArgument);
}

TEST_CASE("preprocess_cube runs the whole chain") {
    Rng rng(12);
    std::vector<float> v(3 * 3 * 128);
    for (auto& x : v) x = static_cast<float>(uniform_real(rng, 0.2, 1.0));
    const SpectralCube cube(3, 3, 128, v);
    const auto out = preprocess_cube(cube, PreprocessConfig{});
    CHECK(out.rows() == 3);
    CHECK(out.bands() == 112);
}
