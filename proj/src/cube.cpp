#include "hsiga/cube.hpp"

#include "hsiga/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace hsiga {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::vector<std::size_t> parse_header(std::istream& in, const std::string& magic, std::size_t dims,
                                      const std::filesystem::path& path) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header");
    std::istringstream hs(line);
    std::string tag, version;
    hs >> tag >> version;
    if (tag != magic || version != "v1") throw FormatError(path.string() + ": expected '" + magic + " v1' header");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dims; ++i) {
        long long v = 0;
        if (!(hs >> v) || v <= 0) throw FormatError(path.string() + ": bad dimension in header");
        out.push_back(static_cast<std::size_t>(v));
    }
    std::string extra;
    if (hs >> extra) throw FormatError(path.string() + ": trailing tokens in header");
    return out;
}

template <class T>
std::vector<T> read_payload(std::istream& in, std::size_t count, const std::filesystem::path& path) {
    std::vector<T> values(count);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(T)));
    const auto got = static_cast<std::size_t>(in.gcount()) / sizeof(T);
    if (got != count)
        throw TruncationError(path.string() + ": expected " + std::to_string(count) + " values, found "
                              + std::to_string(got));
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError(path.string() + ": trailing data");
    for (auto& v : values) v = to_little(v);
    return values;
}

template <class T>
void write_payload(std::ostream& out, const std::vector<T>& values) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(T)));
    } else {
        for (T v : values) {
            v = to_little(v);
            out.write(reinterpret_cast<const char*>(&v), sizeof(T));
        }
    }
}

}  // namespace

SpectralCube::SpectralCube(std::size_t rows, std::size_t cols, std::size_t bands)
    : SpectralCube(rows, cols, bands, std::vector<float>(rows * cols * bands, 0.0f)) {}

SpectralCube::SpectralCube(std::size_t rows, std::size_t cols, std::size_t bands, std::vector<float> values,
                           std::optional<std::vector<double>> wavelengths)
    : rows_(rows), cols_(cols), bands_(bands), values_(std::move(values)) {
    if (rows == 0 || cols == 0 || bands == 0) throw InvalidArgument("cube dimensions must be positive");
    if (values_.size() != rows * cols * bands)
        throw InvalidArgument("cube value count " + std::to_string(values_.size()) + " != rows*cols*bands");
    if (wavelengths) set_wavelengths(std::move(*wavelengths));
}

void SpectralCube::set_wavelengths(std::vector<double> nm) {
    if (nm.size() != bands_) throw InvalidArgument("wavelength count must equal band count");
    for (std::size_t i = 1; i < nm.size(); ++i)
        if (!(nm[i] > nm[i - 1])) throw InvalidArgument("wavelengths must be strictly increasing");
    wavelengths_ = std::move(nm);
}

LabelMap::LabelMap(std::size_t rows, std::size_t cols)
    : LabelMap(rows, cols, std::vector<std::uint16_t>(rows * cols, 0)) {}

LabelMap::LabelMap(std::size_t rows, std::size_t cols, std::vector<std::uint16_t> labels)
    : rows_(rows), cols_(cols), labels_(std::move(labels)) {
    if (rows == 0 || cols == 0) throw InvalidArgument("label map dimensions must be positive");
    if (labels_.size() != rows * cols) throw InvalidArgument("label count != rows*cols");
}

SpectralCube load_cube(const std::filesystem::path& path, CubeFormat format) {
    if (format == CubeFormat::csv) return load_csv(path).first;
    auto in = open_in(path);
    const auto dims = parse_header(in, "HSCUBE", 3, path);
    auto values = read_payload<float>(in, dims[0] * dims[1] * dims[2], path);
    return SpectralCube(dims[0], dims[1], dims[2], std::move(values));
}

void save_cube(const std::filesystem::path& path, const SpectralCube& cube) {
    auto out = open_out(path);
    out << "HSCUBE v1 " << cube.rows() << ' ' << cube.cols() << ' ' << cube.bands() << '\n';
    write_payload(out, cube.values());
    if (!out) throw Error("write failed: " + path.string());
}

LabelMap load_labels(const std::filesystem::path& path) {
    auto in = open_in(path);
    const auto dims = parse_header(in, "HSLABL", 2, path);
    auto labels = read_payload<std::uint16_t>(in, dims[0] * dims[1], path);
    return LabelMap(dims[0], dims[1], std::move(labels));
}

void save_labels(const std::filesystem::path& path, const LabelMap& labels) {
    auto out = open_out(path);
    out << "HSLABL v1 " << labels.rows() << ' ' << labels.cols() << '\n';
    write_payload(out, labels.labels());
    if (!out) throw Error("write failed: " + path.string());
}

std::pair<SpectralCube, LabelMap> load_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    struct Pixel {
        std::size_t row, col;
        std::uint16_t label;
        std::vector<float> values;
    };
    std::vector<Pixel> pixels;
    std::size_t rows = 0, cols = 0, bands = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        const auto where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() < 4) throw FormatError(where + ": expected row,col,label,v1,...");
        auto parse_uint = [&](std::string_view f) {
            unsigned long long v = 0;
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || p != f.data() + f.size()) throw FormatError(where + ": bad integer field");
            return static_cast<std::size_t>(v);
        };
        Pixel px{parse_uint(fields[0]), parse_uint(fields[1]), 0, {}};
        const auto label = parse_uint(fields[2]);
        if (label > std::numeric_limits<std::uint16_t>::max()) throw FormatError(where + ": label out of range");
        px.label = static_cast<std::uint16_t>(label);
        for (std::size_t i = 3; i < fields.size(); ++i) {
            // from_chars for floating point is available in libstdc++ 11.
            float v = 0;
            auto [p, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
            if (ec != std::errc{} || p != fields[i].data() + fields[i].size())
                throw FormatError(where + ": bad value field");
            px.values.push_back(v);
        }
        if (bands == 0) bands = px.values.size();
        if (px.values.size() != bands) throw FormatError(where + ": inconsistent band count");
        rows = std::max(rows, px.row + 1);
        cols = std::max(cols, px.col + 1);
        pixels.push_back(std::move(px));
    }
    if (pixels.empty()) throw FormatError(path.string() + ": no pixels");
    if (pixels.size() != rows * cols)
        throw TruncationError(path.string() + ": " + std::to_string(pixels.size()) + " pixels for a "
                              + std::to_string(rows) + "x" + std::to_string(cols) + " grid");
    SpectralCube cube(rows, cols, bands);
    LabelMap labels(rows, cols);
    std::vector<bool> seen(rows * cols, false);
    for (const auto& px : pixels) {
        const auto k = px.row * cols + px.col;
        if (seen[k]) throw FormatError(path.string() + ": duplicate pixel");
        seen[k] = true;
        std::copy(px.values.begin(), px.values.end(), cube.pixel(px.row, px.col).begin());
        labels.at(px.row, px.col) = px.label;
    }
    return {std::move(cube), std::move(labels)};
}

void save_csv(const std::filesystem::path& path, const SpectralCube& cube, const LabelMap& labels) {
    if (cube.rows() != labels.rows() || cube.cols() != labels.cols())
        throw InvalidArgument("label map does not match cube dimensions");
    auto out = open_out(path);
    out.precision(std::numeric_limits<float>::max_digits10);
    for (std::size_t r = 0; r < cube.rows(); ++r)
        for (std::size_t c = 0; c < cube.cols(); ++c) {
            out << r << ',' << c << ',' << labels.at(r, c);
            for (float v : cube.pixel(r, c)) out << ',' << v;
            out << '\n';
        }
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace hsiga
