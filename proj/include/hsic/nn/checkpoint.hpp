#pragma once

#include <filesystem>
#include <string>

#include "hsic/nn/network.hpp"

namespace hsic::nn {

// Layout: "CNNW", u32 version, u32 patch_size, u32 bands, u32 conv1_filters,
// u32 conv1_kernel, u32 conv2_filters, u32 conv2_kernel, u32 classes,
// u32 init mode, f64 dropout, f64 init gain, u32 hidden count, u32 hidden widths...,
// then per layer (conv1, conv2, hidden..., output) the row-major weights
// followed by the biases, all f64 little endian.
std::string encode_network(const Network& net);
Network decode_network(const std::string& bytes);

void write_network(const std::filesystem::path& path, const Network& net);
Network read_network(const std::filesystem::path& path);

}  // namespace hsic::nn
