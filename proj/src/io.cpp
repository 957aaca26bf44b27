#include "hsic/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hsic {

namespace le {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

double get_f64(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace le

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

constexpr char kCubeMagic[4] = {'H', 'S', 'I', 'C'};
constexpr std::size_t kCubeHeader = 16;

std::string encode_cube(std::size_t h, std::size_t w, std::size_t d, const std::vector<double>& values) {
    std::string out;
    out.reserve(kCubeHeader + values.size() * 8);
    out.append(kCubeMagic, 4);
    le::put_u32(out, static_cast<std::uint32_t>(h));
    le::put_u32(out, static_cast<std::uint32_t>(w));
    le::put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : values) le::put_f64(out, v);
    return out;
}

HsiCube decode_cube(const std::string& bytes) {
    if (bytes.size() < 4) throw FormatError("cube file shorter than its magic", bytes.size());
    if (!std::equal(kCubeMagic, kCubeMagic + 4, bytes.begin())) throw FormatError("bad cube magic", 0);
    if (bytes.size() < kCubeHeader) throw FormatError("truncated cube header", bytes.size());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint64_t h = le::get_u32(p + 4);
    const std::uint64_t w = le::get_u32(p + 8);
    const std::uint64_t d = le::get_u32(p + 12);
    if (h == 0 || w == 0 || d == 0) throw FormatError("cube header declares a zero dimension", 4);
    const std::uint64_t count = h * w * d;
    const std::uint64_t expected = kCubeHeader + count * 8;
    if (bytes.size() < expected)
        throw FormatError("truncated cube payload: expected " + std::to_string(count) + " values", bytes.size());
    if (bytes.size() > expected) throw FormatError("trailing bytes after cube payload", expected);
    std::vector<double> values(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        values[i] = le::get_f64(p + kCubeHeader + 8 * i);
        if (!std::isfinite(values[i])) throw FormatError("non-finite value in cube payload", kCubeHeader + 8 * i);
    }
    return HsiCube(h, w, d, std::move(values));
}

}  // namespace

void write_cube(const std::filesystem::path& path, const HsiCube& cube) {
    write_file_bytes(path, encode_cube(cube.height(), cube.width(), cube.bands(), cube.values()));
}

HsiCube read_cube(const std::filesystem::path& path) { return decode_cube(read_file_bytes(path)); }

void write_labels(const std::filesystem::path& path, const LabelMap& labels) {
    std::string out;
    for (std::size_t r = 0; r < labels.height(); ++r) {
        for (std::size_t c = 0; c < labels.width(); ++c) {
            if (c) out.push_back(',');
            out += std::to_string(labels.at(r, c));
        }
        out.push_back('\n');
    }
    write_file_bytes(path, out);
}

LabelMap read_labels(const std::filesystem::path& path, int num_classes) {
    const std::string text = read_file_bytes(path);
    std::vector<int> labels;
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::size_t line_end = end;
        if (line_end > pos && text[line_end - 1] == '\r') --line_end;
        if (line_end == pos) {
            // blank lines are only tolerated at the end of the file
            if (text.find_first_not_of("\r\n", end) != std::string::npos) throw FormatError("blank line inside label file", pos);
            break;
        }
        std::size_t row_width = 0;
        std::size_t field = pos;
        while (true) {
            std::size_t comma = text.find(',', field);
            if (comma == std::string::npos || comma > line_end) comma = line_end;
            int value = 0;
            const char* first = text.data() + field;
            const char* last = text.data() + comma;
            while (first < last && *first == ' ') ++first;
            while (last > first && last[-1] == ' ') --last;
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc() || ptr != last || first == last || value < 0)
                throw FormatError("invalid label value", field);
            labels.push_back(value);
            ++row_width;
            if (comma == line_end) break;
            field = comma + 1;
        }
        if (height == 0) width = row_width;
        else if (row_width != width)
            throw FormatError("row " + std::to_string(height) + " has " + std::to_string(row_width) + " values, expected " +
                                  std::to_string(width),
                              pos);
        ++height;
        pos = end + 1;
    }
    if (height == 0) throw FormatError("empty label file", 0);
    const int max_label = *std::max_element(labels.begin(), labels.end());
    if (num_classes == 0) num_classes = std::max(1, max_label);
    if (max_label > num_classes)
        throw FormatError("label " + std::to_string(max_label) + " exceeds class count " + std::to_string(num_classes), 0);
    return LabelMap(height, width, num_classes, std::move(labels));
}

void write_probmap(const std::filesystem::path& path, const ProbMap& probs, std::size_t height, std::size_t width) {
    if (height * width != probs.rows()) throw std::invalid_argument("write_probmap: grid does not match row count");
    write_file_bytes(path, encode_cube(height, width, static_cast<std::size_t>(probs.classes()), probs.values()));
}

ProbMap read_probmap(const std::filesystem::path& path, std::size_t* height, std::size_t* width) {
    HsiCube cube = decode_cube(read_file_bytes(path));
    if (height) *height = cube.height();
    if (width) *width = cube.width();
    ProbMap probs(cube.pixels(), static_cast<int>(cube.bands()), std::move(cube.values()));
    return probs;
}

}  // namespace hsic
