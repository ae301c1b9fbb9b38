#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace hsiga {

/// Reflectance cube stored row-major as (row, col, band), so one pixel's
/// spectrum is a contiguous slice.
class SpectralCube {
public:
    SpectralCube() = default;
    SpectralCube(std::size_t rows, std::size_t cols, std::size_t bands);
    SpectralCube(std::size_t rows, std::size_t cols, std::size_t bands, std::vector<float> values,
                 std::optional<std::vector<double>> wavelengths = std::nullopt);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t bands() const noexcept { return bands_; }
    std::size_t pixels() const noexcept { return rows_ * cols_; }

    float at(std::size_t r, std::size_t c, std::size_t b) const { return values_[index(r, c, b)]; }
    float& at(std::size_t r, std::size_t c, std::size_t b) { return values_[index(r, c, b)]; }

    std::span<const float> pixel(std::size_t r, std::size_t c) const {
        return {values_.data() + index(r, c, 0), bands_};
    }
    std::span<float> pixel(std::size_t r, std::size_t c) { return {values_.data() + index(r, c, 0), bands_}; }

    const std::vector<float>& values() const noexcept { return values_; }
    const std::optional<std::vector<double>>& wavelengths() const noexcept { return wavelengths_; }
    void set_wavelengths(std::vector<double> nm);

    friend bool operator==(const SpectralCube&, const SpectralCube&) = default;

private:
    std::size_t index(std::size_t r, std::size_t c, std::size_t b) const noexcept {
        return (r * cols_ + c) * bands_ + b;
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t bands_ = 0;
    std::vector<float> values_;
    std::optional<std::vector<double>> wavelengths_;
};

/// Per-pixel ground truth; 0 marks unannotated background.
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(std::size_t rows, std::size_t cols);
    LabelMap(std::size_t rows, std::size_t cols, std::vector<std::uint16_t> labels);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::uint16_t at(std::size_t r, std::size_t c) const { return labels_[r * cols_ + c]; }
    std::uint16_t& at(std::size_t r, std::size_t c) { return labels_[r * cols_ + c]; }
    const std::vector<std::uint16_t>& labels() const noexcept { return labels_; }

    friend bool operator==(const LabelMap&, const LabelMap&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint16_t> labels_;
};

enum class CubeFormat { binary, csv };

// Binary: text line "HSCUBE v1 rows cols bands\n" then little-endian float32 values.
SpectralCube load_cube(const std::filesystem::path& path, CubeFormat format = CubeFormat::binary);
void save_cube(const std::filesystem::path& path, const SpectralCube& cube);

// Binary: text line "HSLABL v1 rows cols\n" then little-endian uint16 labels.
LabelMap load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const LabelMap& labels);

// CSV: one pixel per line, "row,col,label,v1,...,vB". Every pixel must appear.
std::pair<SpectralCube, LabelMap> load_csv(const std::filesystem::path& path);
void save_csv(const std::filesystem::path& path, const SpectralCube& cube, const LabelMap& labels);

}  // namespace hsiga
