#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsic/data.hpp"
#include "hsic/metrics.hpp"
#include "hsic/nn/network.hpp"
#include "hsic/pipeline/config.hpp"

namespace hsic::pipeline {

/// Error raised inside a pipeline stage; what() starts with "[stage] ".
class StageError : public std::runtime_error {
public:
    StageError(const std::string& stage, const std::string& message)
        : std::runtime_error("[" + stage + "] " + message), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct Dataset {
    HsiCube cube;  // bands rescaled to [0, 1]
    LabelMap truth;
};

/// Reads cube and labels, or generates the synthetic scene when no cube path is set.
Dataset load_dataset(const RunConfig& cfg);

struct Scores {
    double oa = 0.0;
    double aa = 0.0;
    double kappa = 0.0;
    std::vector<double> per_class;
};

/// Scores of `pred` over the labeled pixels of `truth`.
Scores score(const LabelMap& truth, const LabelMap& pred);

struct Checkpoint {
    std::size_t epoch = 0;
    Scores final_scores;  // regularized labels
    Scores cnn_scores;    // argmax of the posteriors
};

struct Timings {
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
    double regularize_seconds = 0.0;
    double total_seconds = 0.0;
};

struct RunResult {
    LabelMap final_labels;
    LabelMap cnn_labels;
    ProbMap probs;
    LabelMap test_truth;  // ground truth restricted to the test pixels
    std::vector<Checkpoint> checkpoints;
    std::vector<double> loss_curve;  // mean training loss per epoch
    Timings timings;
    Scores final_scores;
};

using Progress = std::function<void(const std::string&)>;

/// Epochs at which scores are recorded: multiples of the period, the end of
/// the initial phase and the last epoch.
std::vector<std::size_t> checkpoint_epochs(const RunConfig& cfg);

/// Applies the method's label regularizer to the posteriors.
LabelMap regularize(const RunConfig& cfg, const ProbMap& probs, std::size_t height, std::size_t width);

/// Trains the CNN on the training split, then alternates label updates with
/// retraining on all pixels until `max_epochs`.
RunResult run_algorithm1(const RunConfig& cfg, const Dataset& data, const Progress& progress = {});

/// Writes config.txt, labels.csv, cnn_labels.csv, metrics.csv, checkpoints.csv,
/// loss.csv, timings.csv and PPM maps into `dir`.
void write_run_artifacts(const std::filesystem::path& dir, const RunConfig& cfg, const Dataset& data, const RunResult& result);

std::string metrics_csv_header(int classes);
std::string metrics_csv_row(const std::string& method, std::uint64_t seed, std::size_t repeat, const Scores& s);

}  // namespace hsic::pipeline
