#include "hsic/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>

#include "hsic/io.hpp"
#include "hsic/mrf/expansion.hpp"
#include "hsic/nn/train.hpp"
#include "hsic/pipeline/render.hpp"
#include "hsic/regularizers.hpp"
#include "hsic/rng.hpp"
#include "hsic/synth.hpp"

namespace hsic::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

// Runs `fn`, re-raising any failure tagged with `stage`.
template <typename Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", 100.0 * v);
    return buf;
}

HsiCube scale_bands(const RunConfig& cfg, const HsiCube& cube) {
    return cfg.normalize == Normalization::ZScore ? standardize_bands(cube) : normalize_bands(cube);
}

}  // namespace

Dataset load_dataset(const RunConfig& cfg) {
    return staged("load", [&] {
        if (cfg.cube_path.empty()) {
            synth::GbmConfig g = cfg.synth;
            g.seed = cfg.seed;
            auto scene = synth::generate_synthetic(g);
            return Dataset{scale_bands(cfg, scene.cube), std::move(scene.truth)};
        }
        HsiCube cube = read_cube(cfg.cube_path);
        LabelMap truth = read_labels(cfg.labels_path);
        if (truth.height() != cube.height() || truth.width() != cube.width())
            throw std::invalid_argument("labels are " + std::to_string(truth.height()) + "x" + std::to_string(truth.width()) +
                                        " but the cube is " + std::to_string(cube.height()) + "x" + std::to_string(cube.width()));
        return Dataset{scale_bands(cfg, cube), std::move(truth)};
    });
}

Scores score(const LabelMap& truth, const LabelMap& pred) {
    const auto cm = confusion(truth, pred, truth.num_classes());
    return Scores{oa(cm), aa(cm), kappa(cm), per_class_accuracy(cm)};
}

std::vector<std::size_t> checkpoint_epochs(const RunConfig& cfg) {
    std::vector<std::size_t> out;
    for (std::size_t e = 1; e <= cfg.max_epochs; ++e)
        if (e % cfg.period == 0 || e == cfg.initial_epochs || e == cfg.max_epochs) out.push_back(e);
    return out;
}

LabelMap regularize(const RunConfig& cfg, const ProbMap& probs, std::size_t height, std::size_t width) {
    LabelMap argmax = probs.argmax(height, width);
    switch (cfg.method) {
        case Method::Cnn: return argmax;
        case Method::CnnMedian: return median_filter_labels(argmax, WindowSpec(cfg.window));
        case Method::CnnMajority: return majority_vote_labels(argmax, WindowSpec(cfg.window));
        case Method::CnnMrf: {
            const auto model = mrf::build_energy(probs, height, width, cfg.mu, cfg.neighborhood);
            auto r = mrf::alpha_expansion(model, argmax.labels(), cfg.mrf_sweeps);
            return LabelMap(height, width, probs.classes(), std::move(r.labels));
        }
    }
    return argmax;
}

RunResult run_algorithm1(const RunConfig& cfg, const Dataset& data, const Progress& progress) {
    const auto t_start = Clock::now();
    staged("config", [&] { validate(cfg); });
    auto say = [&](const std::string& msg) {
        if (progress) progress(msg);
    };

    const std::size_t h = data.truth.height();
    const std::size_t w = data.truth.width();
    const std::size_t n = h * w;
    const int classes = data.truth.num_classes();

    RunResult result;
    auto [train, test] = staged("split", [&] { return stratified_split(data.truth, SplitFraction{cfg.train_fraction}, hash_combine(cfg.seed, 11)); });
    if (train.size() == 0) throw StageError("split", "training split is empty");
    result.test_truth = LabelMap(h, w, classes);
    for (const auto& s : test.samples) result.test_truth[s.pixel] = s.label;

    nn::NetworkConfig net_cfg = cfg.network;
    net_cfg.bands = data.cube.bands();
    net_cfg.classes = classes;
    nn::Network net = staged("config", [&] { return nn::init_network(net_cfg, hash_combine(cfg.seed, 12)); });
    const nn::PatchSource source(data.cube, net_cfg.patch_size);

    nn::TrainConfig tcfg = cfg.train;
    tcfg.dropout = net_cfg.dropout > 0.0;
    Rng shuffle_rng = make_rng(cfg.seed, 13);
    Rng subsample_rng = make_rng(cfg.seed, 14);

    auto train_on = [&](const std::vector<Sample>& samples, std::size_t epochs) {
        const auto t0 = Clock::now();
        staged("train", [&] {
            for (const auto& st : nn::train_epochs(net, samples, source, tcfg, epochs, shuffle_rng)) result.loss_curve.push_back(st.mean_loss);
        });
        result.timings.train_seconds += seconds_since(t0);
    };

    // Posteriors, CNN labels and regularized labels for the current network.
    auto update_labels = [&] {
        const auto t0 = Clock::now();
        result.probs = staged("predict", [&] { return nn::predict_probmap(net, source); });
        result.cnn_labels = result.probs.argmax(h, w);
        result.timings.predict_seconds += seconds_since(t0);
        const auto t1 = Clock::now();
        result.final_labels = staged("regularize", [&] { return regularize(cfg, result.probs, h, w); });
        result.timings.regularize_seconds += seconds_since(t1);
    };

    auto record = [&](std::size_t epoch) {
        Checkpoint cp;
        cp.epoch = epoch;
        cp.final_scores = staged("evaluate", [&] { return score(result.test_truth, result.final_labels); });
        cp.cnn_scores = staged("evaluate", [&] { return score(result.test_truth, result.cnn_labels); });
        say("epoch " + std::to_string(epoch) + ": OA " + pct(cp.final_scores.oa) + " (cnn " + pct(cp.cnn_scores.oa) + ")");
        result.checkpoints.push_back(std::move(cp));
    };

    const auto checkpoints = checkpoint_epochs(cfg);
    std::size_t epoch = 0;
    auto next_stop = [&](std::size_t limit) {
        for (std::size_t e : checkpoints)
            if (e > epoch) return std::min(e, limit);
        return limit;
    };

    // initial supervised phase
    while (epoch < cfg.initial_epochs) {
        const std::size_t stop = next_stop(cfg.initial_epochs);
        train_on(train.samples, stop - epoch);
        epoch = stop;
        update_labels();
        record(epoch);
    }
    if (cfg.initial_epochs == 0) update_labels();

    std::vector<bool> is_train(n, false);
    for (const auto& s : train.samples) is_train[s.pixel] = true;

    while (epoch < cfg.max_epochs) {
        const std::size_t stop = next_stop(cfg.max_epochs);
        if (cfg.method == Method::Cnn) {
            train_on(train.samples, stop - epoch);
        } else {
            // {X, y_hat}: every pixel labeled by the current update, training
            // pixels keep their ground truth
            std::vector<Sample> all(n);
            for (std::size_t i = 0; i < n; ++i) all[i] = Sample{i, is_train[i] ? data.truth[i] : result.final_labels[i]};
            const std::size_t per_epoch = std::min(n, cfg.retrain_subsample);
            for (std::size_t e = epoch; e < stop; ++e) {
                if (per_epoch == n) {
                    train_on(all, 1);
                } else {
                    shuffle(all, subsample_rng);
                    train_on(std::vector<Sample>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(per_epoch)), 1);
                }
            }
        }
        epoch = stop;
        update_labels();
        record(epoch);
    }

    result.final_scores = result.checkpoints.empty() ? score(result.test_truth, result.final_labels) : result.checkpoints.back().final_scores;
    result.timings.total_seconds = seconds_since(t_start);
    return result;
}

std::string metrics_csv_header(int classes) {
    std::string out = "method,seed,repeat,oa,aa,kappa";
    for (int k = 1; k <= classes; ++k) out += ",class_" + std::to_string(k);
    return out + "\n";
}

std::string metrics_csv_row(const std::string& method, std::uint64_t seed, std::size_t repeat, const Scores& s) {
    std::string out = method + "," + std::to_string(seed) + "," + std::to_string(repeat) + "," + pct(s.oa) + "," + pct(s.aa) + "," + pct(s.kappa);
    for (double a : s.per_class) out += "," + (a == a ? pct(a) : std::string("nan"));
    return out + "\n";
}

void write_run_artifacts(const std::filesystem::path& dir, const RunConfig& cfg, const Dataset& data, const RunResult& result) {
    staged("write", [&] {
        std::filesystem::create_directories(dir);
        write_file_bytes(dir / "config.txt", echo_config(cfg));
        write_labels(dir / "labels.csv", result.final_labels);
        write_labels(dir / "cnn_labels.csv", result.cnn_labels);
        write_probmap(dir / "probs.bin", result.probs, data.truth.height(), data.truth.width());
        write_labels(dir / "test_truth.csv", result.test_truth);

        const int k = data.truth.num_classes();
        write_file_bytes(dir / "metrics.csv", metrics_csv_header(k) + metrics_csv_row(to_string(cfg.method), cfg.seed, 0, result.final_scores));

        std::string cps = "epoch,oa,aa,kappa,cnn_oa,cnn_aa,cnn_kappa\n";
        for (const auto& c : result.checkpoints)
            cps += std::to_string(c.epoch) + "," + pct(c.final_scores.oa) + "," + pct(c.final_scores.aa) + "," + pct(c.final_scores.kappa) + "," +
                   pct(c.cnn_scores.oa) + "," + pct(c.cnn_scores.aa) + "," + pct(c.cnn_scores.kappa) + "\n";
        write_file_bytes(dir / "checkpoints.csv", cps);

        std::string loss = "epoch,loss\n";
        char buf[64];
        for (std::size_t e = 0; e < result.loss_curve.size(); ++e) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e + 1, result.loss_curve[e]);
            loss += buf;
        }
        write_file_bytes(dir / "loss.csv", loss);

        const auto& t = result.timings;
        std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.3f,%.3f\n", t.train_seconds, t.predict_seconds, t.regularize_seconds, t.total_seconds);
        write_file_bytes(dir / "timings.csv", std::string("train_s,predict_s,regularize_s,total_s\n") + buf);

        write_ppm(dir / "truth.ppm", data.truth);
        write_ppm(dir / "labels.ppm", result.final_labels);
        write_ppm(dir / "cnn_labels.ppm", result.cnn_labels);
    });
}

}  // namespace hsic::pipeline
