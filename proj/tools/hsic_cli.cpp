// Command-line front end: synthetic data, training, inference, label
// regularization, evaluation, rendering, sweeps and full runs.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include "hsic/io.hpp"
#include "hsic/metrics.hpp"
#include "hsic/mrf/expansion.hpp"
#include "hsic/nn/checkpoint.hpp"
#include "hsic/nn/train.hpp"
#include "hsic/pipeline/config.hpp"
#include "hsic/pipeline/pipeline.hpp"
#include "hsic/pipeline/render.hpp"
#include "hsic/pipeline/sweep.hpp"
#include "hsic/regularizers.hpp"
#include "hsic/synth.hpp"

using namespace hsic;
using pipeline::RunConfig;

namespace {

// HSIC_VERBOSE: 0 quiet, 1 progress (default), 2 adds per-epoch losses.
int verbosity() {
    const char* v = std::getenv("HSIC_VERBOSE");
    return v ? std::atoi(v) : 1;
}

void log(const std::string& msg) {
    if (verbosity() >= 1) std::cerr << msg << "\n";
}

std::string dashed(std::string key) {
    for (char& c : key)
        if (c == '_') c = '-';
    return key;
}

/// Config file plus one override flag per config key.
struct ConfigOptions {
    std::string file;
    std::map<std::string, std::string> values;

    void attach(CLI::App* app) {
        app->add_option("--config", file, "key = value config file")->check(CLI::ExistingFile);
        for (const auto& key : pipeline::config_keys()) app->add_option("--" + dashed(key), values[key], "override '" + key + "'");
    }

    RunConfig resolve(CLI::App* app) const {
        RunConfig cfg = file.empty() ? RunConfig{} : pipeline::parse_config_file(file);
        for (const auto& key : pipeline::config_keys())
            if (app->count("--" + dashed(key)) > 0) pipeline::apply_setting(cfg, key, values.at(key));
        pipeline::validate(cfg);
        return cfg;
    }
};

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
    return buf;
}

void print_scores(const pipeline::Scores& s) {
    std::cout << "OA " << pct(s.oa) << "  AA " << pct(s.aa) << "  kappa " << pct(s.kappa) << "\n";
    for (std::size_t k = 0; k < s.per_class.size(); ++k)
        std::cout << "  class " << k + 1 << ": " << (s.per_class[k] == s.per_class[k] ? pct(s.per_class[k]) : std::string("n/a")) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral-spatial hyperspectral classification with a CNN and a Potts MRF"};
    app.require_subcommand(1);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic GBM scene");
    synth::GbmConfig gbm;
    std::string synth_cube, synth_labels, gamma_mode = "per-pixel";
    bool no_noise = false;
    synth_cmd->add_option("--height", gbm.height)->capture_default_str();
    synth_cmd->add_option("--width", gbm.width)->capture_default_str();
    synth_cmd->add_option("--bands", gbm.bands)->capture_default_str();
    synth_cmd->add_option("--classes", gbm.classes)->capture_default_str();
    synth_cmd->add_option("--snr-db", gbm.snr_db)->capture_default_str();
    synth_cmd->add_option("--smoothness", gbm.field_smoothness)->capture_default_str();
    synth_cmd->add_option("--contrast", gbm.abundance_contrast)->capture_default_str();
    synth_cmd->add_option("--gamma", gamma_mode, "per-pixel or global")->check(CLI::IsMember({"per-pixel", "global"}));
    synth_cmd->add_flag("--no-noise", no_noise);
    synth_cmd->add_option("--seed", gbm.seed)->capture_default_str();
    synth_cmd->add_option("--out-cube", synth_cube)->required();
    synth_cmd->add_option("--out-labels", synth_labels)->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "train the CNN on a stratified split");
    ConfigOptions train_opts;
    train_opts.attach(train_cmd);
    std::string train_out;
    std::size_t train_epochs = 0;
    train_cmd->add_option("--out-network", train_out)->required();
    train_cmd->add_option("--epochs", train_epochs, "defaults to initial_epochs");

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "posteriors and argmax labels from a trained network");
    std::string cls_net, cls_cube, cls_probs, cls_labels;
    classify_cmd->add_option("--network", cls_net)->required()->check(CLI::ExistingFile);
    classify_cmd->add_option("--cube", cls_cube)->required()->check(CLI::ExistingFile);
    classify_cmd->add_option("--out-probs", cls_probs)->required();
    classify_cmd->add_option("--out-labels", cls_labels);
    std::string cls_normalize = "zscore";
    classify_cmd->add_option("--normalize", cls_normalize, "band scaling used in training")
        ->check(CLI::IsMember({"minmax", "zscore"}))
        ->capture_default_str();

    // regularize
    auto* reg_cmd = app.add_subcommand("regularize", "label regularization of a posterior map");
    std::string reg_probs, reg_out, reg_method = "mrf";
    std::size_t reg_window = 3;
    double reg_mu = 20.0;
    reg_cmd->add_option("--probs", reg_probs)->required()->check(CLI::ExistingFile);
    reg_cmd->add_option("--method", reg_method)->check(CLI::IsMember({"mrf", "median", "majority"}))->capture_default_str();
    reg_cmd->add_option("--window", reg_window)->check(CLI::IsMember({3, 5, 7}))->capture_default_str();
    reg_cmd->add_option("--mu", reg_mu)->check(CLI::NonNegativeNumber)->capture_default_str();
    reg_cmd->add_option("--out", reg_out)->required();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "OA / AA / kappa of a label map");
    std::string eval_truth, eval_pred;
    eval_cmd->add_option("--truth", eval_truth)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--pred", eval_pred)->required()->check(CLI::ExistingFile);

    // render
    auto* render_cmd = app.add_subcommand("render", "write a label map as a PPM image");
    std::string render_labels, render_out, render_palette;
    render_cmd->add_option("--labels", render_labels)->required()->check(CLI::ExistingFile);
    render_cmd->add_option("--out", render_out)->required();
    render_cmd->add_option("--palette", render_palette)->check(CLI::ExistingFile);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "one run per parameter value");
    ConfigOptions sweep_opts;
    sweep_opts.attach(sweep_cmd);
    std::string sweep_param, sweep_out;
    std::vector<double> sweep_values;
    sweep_cmd->add_option("--parameter", sweep_param)->required();
    sweep_cmd->add_option("--values", sweep_values)->required()->delimiter(',');
    sweep_cmd->add_option("--out", sweep_out, "CSV path (default: stdout)");

    // run
    auto* run_cmd = app.add_subcommand("run", "full alternating CNN / label-update training");
    ConfigOptions run_opts;
    run_opts.attach(run_cmd);

    CLI11_PARSE(app, argc, argv);

    const pipeline::Progress progress = [](const std::string& m) { log(m); };
    try {
        if (*synth_cmd) {
            gbm.add_noise = !no_noise;
            gbm.gamma_mode = gamma_mode == "global" ? synth::GammaMode::Global : synth::GammaMode::PerPixel;
            const auto scene = synth::generate_synthetic(gbm);
            write_cube(synth_cube, scene.cube);
            write_labels(synth_labels, scene.truth);
            log("wrote " + synth_cube + " and " + synth_labels);
        } else if (*train_cmd) {
            RunConfig cfg = train_opts.resolve(train_cmd);
            cfg.method = pipeline::Method::Cnn;
            cfg.initial_epochs = cfg.max_epochs = train_epochs > 0 ? train_epochs : cfg.initial_epochs;
            const auto data = pipeline::load_dataset(cfg);
            // plain supervised run; the network itself is retrained here so it can be saved
            auto [train, test] = stratified_split(data.truth, SplitFraction{cfg.train_fraction}, hash_combine(cfg.seed, 11));
            nn::NetworkConfig net_cfg = cfg.network;
            net_cfg.bands = data.cube.bands();
            net_cfg.classes = data.truth.num_classes();
            auto net = nn::init_network(net_cfg, hash_combine(cfg.seed, 12));
            const nn::PatchSource source(data.cube, net_cfg.patch_size);
            nn::TrainConfig tcfg = cfg.train;
            tcfg.dropout = net_cfg.dropout > 0.0;
            Rng rng = make_rng(cfg.seed, 13);
            const auto stats = nn::train_epochs(net, train.samples, source, tcfg, cfg.max_epochs, rng);
            if (verbosity() >= 2)
                for (std::size_t e = 0; e < stats.size(); ++e) log("epoch " + std::to_string(e + 1) + " loss " + std::to_string(stats[e].mean_loss));
            nn::write_network(train_out, net);
            log("wrote " + train_out);
        } else if (*classify_cmd) {
            const auto net = nn::read_network(cls_net);
            const auto raw = read_cube(cls_cube);
            const auto cube = cls_normalize == "zscore" ? standardize_bands(raw) : normalize_bands(raw);
            const auto probs = nn::predict_probmap(net, cube, net.config().patch_size);
            write_probmap(cls_probs, probs, cube.height(), cube.width());
            if (!cls_labels.empty()) write_labels(cls_labels, probs.argmax(cube.height(), cube.width()));
        } else if (*reg_cmd) {
            std::size_t h = 0, w = 0;
            const auto probs = read_probmap(reg_probs, &h, &w);
            RunConfig cfg;
            cfg.mu = reg_mu;
            cfg.window = reg_window;
            cfg.method = reg_method == "mrf" ? pipeline::Method::CnnMrf
                         : reg_method == "median" ? pipeline::Method::CnnMedian
                                                  : pipeline::Method::CnnMajority;
            write_labels(reg_out, pipeline::regularize(cfg, probs, h, w));
        } else if (*eval_cmd) {
            const auto truth = read_labels(eval_truth);
            const auto pred = read_labels(eval_pred, truth.num_classes());
            print_scores(pipeline::score(truth, pred));
        } else if (*render_cmd) {
            const auto labels = read_labels(render_labels);
            if (render_palette.empty())
                pipeline::write_ppm(render_out, labels);
            else
                pipeline::write_ppm(render_out, labels, pipeline::read_palette(render_palette));
        } else if (*sweep_cmd) {
            const RunConfig cfg = sweep_opts.resolve(sweep_cmd);
            const auto data = pipeline::load_dataset(cfg);
            const auto rows = pipeline::run_sweep(cfg, data, sweep_param, sweep_values, progress);
            const std::string csv = pipeline::sweep_csv(sweep_param, rows);
            if (sweep_out.empty())
                std::cout << csv;
            else
                write_file_bytes(sweep_out, csv);
        } else if (*run_cmd) {
            const RunConfig base = run_opts.resolve(run_cmd);
            std::string metrics;
            std::string timings = "method,seed,repeat,seconds\n";
            for (std::size_t r = 0; r < base.repeats; ++r) {
                RunConfig cfg = base;
                cfg.seed = base.seed + r;
                const std::filesystem::path dir =
                    base.repeats == 1 ? std::filesystem::path(base.output_dir) : std::filesystem::path(base.output_dir) / ("repeat_" + std::to_string(r));
                const auto data = pipeline::load_dataset(cfg);
                const auto result = pipeline::run_algorithm1(cfg, data, progress);
                pipeline::write_run_artifacts(dir, cfg, data, result);
                if (metrics.empty()) metrics = pipeline::metrics_csv_header(data.truth.num_classes());
                metrics += pipeline::metrics_csv_row(pipeline::to_string(cfg.method), cfg.seed, r, result.final_scores);
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.3f", result.timings.total_seconds);
                timings += pipeline::to_string(cfg.method) + "," + std::to_string(cfg.seed) + "," + std::to_string(r) + "," + buf + "\n";
                std::cout << pipeline::to_string(cfg.method) << " seed " << cfg.seed << ": ";
                print_scores(result.final_scores);
            }
            if (base.repeats > 1) {
                std::filesystem::create_directories(base.output_dir);
                write_file_bytes(std::filesystem::path(base.output_dir) / "metrics.csv", metrics);
                write_file_bytes(std::filesystem::path(base.output_dir) / "timings.csv", timings);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
