#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsic/mrf/energy.hpp"
#include "hsic/nn/network.hpp"
#include "hsic/nn/train.hpp"
#include "hsic/synth.hpp"

namespace hsic::pipeline {

class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& key, const std::string& message)
        : std::invalid_argument("config key '" + key + "': " + message), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Per-band input scaling applied when the cube is loaded.
enum class Normalization { MinMax, ZScore };

enum class Method { Cnn, CnnMrf, CnnMedian, CnnMajority };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct RunConfig {
    /// Input files; when `cube_path` is empty a synthetic scene is generated
    /// from `synth` (its seed follows `seed`).
    std::string cube_path;
    std::string labels_path;
    std::string output_dir = "run";

    nn::NetworkConfig network;  // bands and classes are filled in from the data
    nn::TrainConfig train;
    synth::GbmConfig synth;

    Normalization normalize = Normalization::ZScore;
    Method method = Method::CnnMrf;
    double mu = 20.0;
    mrf::Neighborhood neighborhood = mrf::Neighborhood::Four;
    std::size_t mrf_sweeps = 5;
    std::size_t window = 3;  // median / majority window side
    std::size_t initial_epochs = 30;
    std::size_t period = 10;
    std::size_t max_epochs = 60;
    /// Cap on the patches visited per retraining epoch.
    std::size_t retrain_subsample = 20000;
    double train_fraction = 0.01;
    std::size_t repeats = 1;
    std::uint64_t seed = 0;
};

/// Keys accepted in config files, in echo order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Throws ConfigError naming the key on an
/// unknown key or a malformed value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Checks cross-field constraints (max_epochs >= initial_epochs, period >= 1, ...).
void validate(const RunConfig& cfg);

/// `key = value` lines; blank lines and lines starting with '#' are skipped.
/// Settings are applied on top of `base`.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig parse_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Fully resolved configuration in the same `key = value` format.
std::string echo_config(const RunConfig& cfg);

}  // namespace hsic::pipeline
