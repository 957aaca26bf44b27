#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "hsic/data.hpp"

namespace hsic {

/// Malformed file content. `offset` is the byte position where parsing failed.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::uint64_t offset() const { return offset_; }

private:
    std::uint64_t offset_;
};

// Cube file: "HSIC", u32 h, u32 w, u32 d (little endian), then h*w*d
// little-endian f64 values, row-major with the band index fastest.
void write_cube(const std::filesystem::path& path, const HsiCube& cube);
HsiCube read_cube(const std::filesystem::path& path);

// Label file: h lines of w comma-separated non-negative integers.
// `num_classes` = 0 infers K from the largest label present.
void write_labels(const std::filesystem::path& path, const LabelMap& labels);
LabelMap read_labels(const std::filesystem::path& path, int num_classes = 0);

// Posteriors are stored as an h x w x K cube.
void write_probmap(const std::filesystem::path& path, const ProbMap& probs, std::size_t height, std::size_t width);
ProbMap read_probmap(const std::filesystem::path& path, std::size_t* height = nullptr, std::size_t* width = nullptr);

namespace le {
void put_u32(std::string& out, std::uint32_t v);
void put_f64(std::string& out, double v);
std::uint32_t get_u32(const unsigned char* p);
double get_f64(const unsigned char* p);
}  // namespace le

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace hsic
