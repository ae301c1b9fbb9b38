#pragma once

#include "hsiga/cube.hpp"
#include "hsiga/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace hsiga {

/// Noisy bands dropped by default: {0..4} u {48..50} u {121..127}, leaving
/// 113 of 128 bands.
std::vector<std::size_t> default_removed_bands();

struct PreprocessConfig {
    std::size_t median_radius = 1;  // spatial half-width; 0 disables filtering
    std::vector<std::size_t> removed_bands = default_removed_bands();
    bool apply_normalization = true;
    bool apply_derivative = true;

    /// Throws InvalidArgument if the removal set does not fit `bands` or
    /// leaves too few bands for the derivative.
    void validate(std::size_t bands) const;
};

/// Spatial median per band over a (2r+1)^2 window clipped at the borders.
/// An even-sized window takes the mean of its two central values.
SpectralCube median_filter(const SpectralCube& cube, std::size_t radius);

/// Median with the even-length convention used throughout (mean of the two
/// central order statistics).
double median(std::span<const double> values);

/// Divides a spectrum by its median. Throws InvalidArgument on a zero median.
std::vector<double> median_normalize(std::span<const double> spectrum);

/// Old-to-new band bookkeeping produced by band removal.
struct BandTranslation {
    std::vector<std::size_t> kept;          // new index -> original index
    std::vector<std::ptrdiff_t> old_to_new;  // original index -> new index, -1 if removed
};

BandTranslation band_translation(std::size_t bands, std::span<const std::size_t> removed);

std::vector<double> remove_bands(std::span<const double> spectrum, std::span<const std::size_t> removed);
FeatureMatrix remove_bands(const FeatureMatrix& spectra, std::span<const std::size_t> removed);

/// Forward difference x[b+1] - x[b]; output is one shorter.
std::vector<double> derivative(std::span<const double> spectrum);

/// Per-pixel part of the chain (normalize, remove bands, derivative) applied
/// to every row. Spatial filtering happens on the cube before extraction.
FeatureMatrix transform_spectra(const FeatureMatrix& spectra, const PreprocessConfig& config);

/// Original band index each output feature is reported under. A derivative
/// feature is reported under the lower of its two surviving bands.
std::vector<std::size_t> feature_origin(std::size_t bands, const PreprocessConfig& config);

/// The whole chain on a cube, producing a cube of features.
SpectralCube preprocess_cube(const SpectralCube& cube, const PreprocessConfig& config);

}  // namespace hsiga
