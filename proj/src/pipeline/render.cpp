#include "hsic/pipeline/render.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hsic/io.hpp"

namespace hsic::pipeline {

const std::vector<Rgb>& default_palette() {
    static const std::vector<Rgb> palette = {
        {0, 0, 0},       {230, 25, 75},   {60, 180, 75},  {255, 225, 25}, {0, 130, 200},   {245, 130, 48},
        {145, 30, 180},  {70, 240, 240},  {240, 50, 230}, {210, 245, 60}, {250, 190, 212}, {0, 128, 128},
        {220, 190, 255}, {170, 110, 40},  {255, 250, 200}, {128, 0, 0},   {170, 255, 195},
    };
    return palette;
}

std::vector<Rgb> read_palette(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read palette file " + path.string());
    std::vector<Rgb> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        int r, g, b;
        std::string rest;
        if (!(ss >> r >> g >> b) || (ss >> rest) || r < 0 || g < 0 || b < 0 || r > 255 || g > 255 || b > 255)
            throw std::invalid_argument("palette line " + std::to_string(lineno) + ": expected three integers in 0..255");
        out.push_back({static_cast<unsigned char>(r), static_cast<unsigned char>(g), static_cast<unsigned char>(b)});
    }
    if (out.empty()) throw std::invalid_argument("palette file " + path.string() + " is empty");
    return out;
}

std::string encode_ppm(const LabelMap& labels, const std::vector<Rgb>& palette) {
    if (static_cast<std::size_t>(labels.num_classes()) >= palette.size())
        throw std::invalid_argument("render: " + std::to_string(labels.num_classes()) + " classes but the palette has only " +
                                    std::to_string(palette.size() - 1) + " colors");
    std::string out = "P6\n" + std::to_string(labels.width()) + " " + std::to_string(labels.height()) + "\n255\n";
    out.reserve(out.size() + 3 * labels.pixels());
    for (int y : labels.labels()) {
        const Rgb& c = palette[static_cast<std::size_t>(y)];
        out.append(reinterpret_cast<const char*>(c.data()), 3);
    }
    return out;
}

void write_ppm(const std::filesystem::path& path, const LabelMap& labels, const std::vector<Rgb>& palette) {
    write_file_bytes(path, encode_ppm(labels, palette));
}

}  // namespace hsic::pipeline
