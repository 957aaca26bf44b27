#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "hsic/data.hpp"

namespace hsic::pipeline {

using Rgb = std::array<unsigned char, 3>;

/// Index 0 (unlabeled) is black, then 16 distinct colors.
const std::vector<Rgb>& default_palette();

/// Palette file: one "r g b" triple (0..255) per line, starting at index 0.
std::vector<Rgb> read_palette(const std::filesystem::path& path);

/// Binary PPM (P6) bytes. Throws when a label has no palette entry.
std::string encode_ppm(const LabelMap& labels, const std::vector<Rgb>& palette = default_palette());

void write_ppm(const std::filesystem::path& path, const LabelMap& labels, const std::vector<Rgb>& palette = default_palette());

}  // namespace hsic::pipeline
