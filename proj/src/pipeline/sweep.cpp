#include "hsic/pipeline/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hsic::pipeline {

namespace {

std::size_t as_size(const std::string& parameter, double value) {
    if (!(value >= 0.0) || value != std::floor(value))
        throw std::invalid_argument("sweep " + parameter + ": value must be a non-negative integer");
    return static_cast<std::size_t>(value);
}

}  // namespace

const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names = {"kernel1", "conv2_width", "depth_preset", "patch_size", "mu"};
    return names;
}

RunConfig sweep_config(const RunConfig& base, const std::string& parameter, double value) {
    RunConfig cfg = base;
    if (parameter == "kernel1") {
        cfg.network.conv1_kernel = as_size(parameter, value);
    } else if (parameter == "conv2_width") {
        cfg.network.conv2_filters = as_size(parameter, value);
    } else if (parameter == "depth_preset") {
        cfg.network = nn::with_depth(cfg.network, static_cast<int>(as_size(parameter, value)));
    } else if (parameter == "patch_size") {
        cfg.network.patch_size = as_size(parameter, value);
        cfg.network = nn::fit_kernels_to_patch(cfg.network);
    } else if (parameter == "mu") {
        cfg.mu = value;
    } else {
        std::string valid;
        for (const auto& p : sweep_parameters()) valid += (valid.empty() ? "" : ", ") + p;
        throw std::invalid_argument("unknown sweep parameter '" + parameter + "' (valid: " + valid + ")");
    }
    return cfg;
}

std::vector<SweepRow> run_sweep(const RunConfig& base, const Dataset& data, const std::string& parameter,
                                const std::vector<double>& values, const Progress& progress) {
    std::vector<RunConfig> configs;
    for (double v : values) configs.push_back(sweep_config(base, parameter, v));
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (progress) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%s = %g", parameter.c_str(), values[i]);
            progress(buf);
        }
        const auto r = run_algorithm1(configs[i], data, progress);
        rows.push_back({values[i], r.final_scores, r.timings.total_seconds});
    }
    return rows;
}

std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows) {
    std::string out = parameter + ",oa,aa,kappa\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%g,%.4f,%.4f,%.4f\n", r.value, 100.0 * r.scores.oa, 100.0 * r.scores.aa, 100.0 * r.scores.kappa);
        out += buf;
    }
    return out;
}

}  // namespace hsic::pipeline
