#pragma once

#include <string>
#include <vector>

#include "hsic/pipeline/pipeline.hpp"

namespace hsic::pipeline {

/// Parameters a sweep can vary.
const std::vector<std::string>& sweep_parameters();

/// `base` with `parameter` set to `value`. patch_size also shrinks the conv
/// kernels so tiny patches stay valid; depth_preset rebuilds the hidden stack.
RunConfig sweep_config(const RunConfig& base, const std::string& parameter, double value);

struct SweepRow {
    double value = 0.0;
    Scores scores;
    double seconds = 0.0;
};

/// One run per value, all with the base seed. Throws std::invalid_argument
/// listing the valid names for an unknown parameter.
std::vector<SweepRow> run_sweep(const RunConfig& base, const Dataset& data, const std::string& parameter,
                                const std::vector<double>& values, const Progress& progress = {});

std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows);

}  // namespace hsic::pipeline
