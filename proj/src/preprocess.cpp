#include "hsiga/preprocess.hpp"

#include "hsiga/error.hpp"

#include <algorithm>
#include <string>

namespace hsiga {

std::vector<std::size_t> default_removed_bands() {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b <= 4; ++b) out.push_back(b);
    for (std::size_t b = 48; b <= 50; ++b) out.push_back(b);
    for (std::size_t b = 121; b <= 127; ++b) out.push_back(b);
    return out;
}

void PreprocessConfig::validate(std::size_t bands) const {
    const auto t = band_translation(bands, removed_bands);
    const std::size_t need = apply_derivative ? 2 : 1;
    if (t.kept.size() < need)
        throw InvalidArgument("band removal leaves " + std::to_string(t.kept.size()) + " bands, at least "
                              + std::to_string(need) + " required");
}

SpectralCube median_filter(const SpectralCube& cube, std::size_t radius) {
    if (radius == 0) return cube;
    const auto rows = cube.rows(), cols = cube.cols(), bands = cube.bands();
    std::vector<float> out(cube.values().size());
    std::vector<float> window;
    window.reserve((2 * radius + 1) * (2 * radius + 1));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t r0 = r >= radius ? r - radius : 0, r1 = std::min(rows - 1, r + radius);
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t c0 = c >= radius ? c - radius : 0, c1 = std::min(cols - 1, c + radius);
            for (std::size_t b = 0; b < bands; ++b) {
                window.clear();
                for (std::size_t rr = r0; rr <= r1; ++rr)
                    for (std::size_t cc = c0; cc <= c1; ++cc) window.push_back(cube.at(rr, cc, b));
                const auto mid = window.size() / 2;
                std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(mid), window.end());
                float m = window[mid];
                if (window.size() % 2 == 0) {
                    const float lo = *std::max_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(mid));
                    m = static_cast<float>((static_cast<double>(lo) + m) / 2.0);
                }
                out[(r * cols + c) * bands + b] = m;
            }
        }
    }
    return SpectralCube(rows, cols, bands, std::move(out), cube.wavelengths());
}

double median(std::span<const double> values) {
    if (values.empty()) throw InvalidArgument("median of an empty sequence");
    std::vector<double> v(values.begin(), values.end());
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    if (v.size() % 2 == 1) return v[mid];
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lo + v[mid]) / 2.0;
}

std::vector<double> median_normalize(std::span<const double> spectrum) {
    const double m = median(spectrum);
    if (m == 0.0) throw InvalidArgument("spectrum has zero median; cannot normalize a degenerate pixel");
    std::vector<double> out(spectrum.size());
    std::transform(spectrum.begin(), spectrum.end(), out.begin(), [m](double x) { return x / m; });
    return out;
}

BandTranslation band_translation(std::size_t bands, std::span<const std::size_t> removed) {
    BandTranslation t;
    t.old_to_new.assign(bands, 0);
    for (auto b : removed) {
        if (b >= bands)
            throw InvalidArgument("removed band " + std::to_string(b) + " out of range for " + std::to_string(bands)
                                  + " bands");
        t.old_to_new[b] = -1;
    }
    for (std::size_t b = 0; b < bands; ++b) {
        if (t.old_to_new[b] < 0) continue;
        t.old_to_new[b] = static_cast<std::ptrdiff_t>(t.kept.size());
        t.kept.push_back(b);
    }
    return t;
}

std::vector<double> remove_bands(std::span<const double> spectrum, std::span<const std::size_t> removed) {
    const auto t = band_translation(spectrum.size(), removed);
    std::vector<double> out;
    out.reserve(t.kept.size());
    for (auto b : t.kept) out.push_back(spectrum[b]);
    return out;
}

FeatureMatrix remove_bands(const FeatureMatrix& spectra, std::span<const std::size_t> removed) {
    const auto t = band_translation(static_cast<std::size_t>(spectra.cols()), removed);
    return select_columns(spectra, t.kept);
}

std::vector<double> derivative(std::span<const double> spectrum) {
    if (spectrum.size() < 2) throw InvalidArgument("derivative needs at least 2 bands");
    std::vector<double> out(spectrum.size() - 1);
    for (std::size_t b = 0; b + 1 < spectrum.size(); ++b) out[b] = spectrum[b + 1] - spectrum[b];
    return out;
}

FeatureMatrix transform_spectra(const FeatureMatrix& spectra, const PreprocessConfig& config) {
    const auto bands = static_cast<std::size_t>(spectra.cols());
    config.validate(bands);
    const auto t = band_translation(bands, config.removed_bands);
    const auto kept = static_cast<Eigen::Index>(t.kept.size());
    const Eigen::Index out_cols = config.apply_derivative ? kept - 1 : kept;
    FeatureMatrix out(spectra.rows(), out_cols);
    std::vector<double> reduced(t.kept.size());
    for (Eigen::Index i = 0; i < spectra.rows(); ++i) {
        auto row = row_span(spectra, i);
        double scale = 1.0;
        if (config.apply_normalization) {
            scale = median(row);
            if (scale == 0.0)
                throw InvalidArgument("spectrum " + std::to_string(i) + " has zero median; cannot normalize");
        }
        for (std::size_t k = 0; k < t.kept.size(); ++k) reduced[k] = row[t.kept[k]] / scale;
        double* dst = out.data() + i * out_cols;
        if (config.apply_derivative) {
            for (Eigen::Index k = 0; k < out_cols; ++k) dst[k] = reduced[k + 1] - reduced[k];
        } else {
            std::copy(reduced.begin(), reduced.end(), dst);
        }
    }
    return out;
}

std::vector<std::size_t> feature_origin(std::size_t bands, const PreprocessConfig& config) {
    config.validate(bands);
    auto kept = band_translation(bands, config.removed_bands).kept;
    if (config.apply_derivative) kept.pop_back();
    return kept;
}

SpectralCube preprocess_cube(const SpectralCube& cube, const PreprocessConfig& config) {
    config.validate(cube.bands());
    const auto filtered = median_filter(cube, config.median_radius);
    FeatureMatrix spectra(static_cast<Eigen::Index>(filtered.pixels()), static_cast<Eigen::Index>(filtered.bands()));
    for (std::size_t p = 0; p < filtered.pixels(); ++p) {
        const auto px = filtered.pixel(p / filtered.cols(), p % filtered.cols());
        for (std::size_t b = 0; b < px.size(); ++b)
            spectra(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(b)) = px[b];
    }
    const auto features = transform_spectra(spectra, config);
    std::vector<float> values(static_cast<std::size_t>(features.size()));
    for (Eigen::Index k = 0; k < features.size(); ++k) values[static_cast<std::size_t>(k)] = static_cast<float>(features.data()[k]);
    SpectralCube out(cube.rows(), cube.cols(), static_cast<std::size_t>(features.cols()), std::move(values));
    if (cube.wavelengths()) {
        std::vector<double> nm;
        for (auto b : feature_origin(cube.bands(), config)) nm.push_back((*cube.wavelengths())[b]);
        out.set_wavelengths(std::move(nm));
    }
    return out;
}

}  // namespace hsiga
