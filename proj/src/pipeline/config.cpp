#include "hsic/pipeline/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace hsic::pipeline {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || text.empty()) throw ConfigError(key, "cannot parse '" + text + "' as a number");
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(v)) throw ConfigError(key, "value must be finite");
    return v;
}

std::size_t parse_size(const std::string& key, const std::string& text) {
    if (!text.empty() && text[0] == '-') throw ConfigError(key, "value must be non-negative");
    return parse_number<std::size_t>(key, text);
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::string fmt(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define HSIC_SIZE_KEY(name, field) \
    Key { name, [](RunConfig& c, const std::string& v) { c.field = parse_size(name, v); }, [](const RunConfig& c) { return fmt(c.field); } }
#define HSIC_REAL_KEY(name, field) \
    Key { name, [](RunConfig& c, const std::string& v) { c.field = parse_number<double>(name, v); }, [](const RunConfig& c) { return fmt(c.field); } }
#define HSIC_TEXT_KEY(name, field) \
    Key { name, [](RunConfig& c, const std::string& v) { c.field = v; }, [](const RunConfig& c) { return c.field; } }

const std::vector<Key>& key_table() {
    static const std::vector<Key> keys = {
        HSIC_TEXT_KEY("cube", cube_path),
        HSIC_TEXT_KEY("labels", labels_path),
        HSIC_TEXT_KEY("output", output_dir),
        Key{"method", [](RunConfig& c, const std::string& v) {
                try {
                    c.method = parse_method(v);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError("method", e.what());
                }
            },
            [](const RunConfig& c) { return to_string(c.method); }},
        HSIC_REAL_KEY("mu", mu),
        Key{"neighborhood",
            [](RunConfig& c, const std::string& v) {
                if (v == "4")
                    c.neighborhood = mrf::Neighborhood::Four;
                else if (v == "8")
                    c.neighborhood = mrf::Neighborhood::Eight;
                else
                    throw ConfigError("neighborhood", "expected 4 or 8, got '" + v + "'");
            },
            [](const RunConfig& c) { return std::string(c.neighborhood == mrf::Neighborhood::Four ? "4" : "8"); }},
        HSIC_SIZE_KEY("mrf_sweeps", mrf_sweeps),
        HSIC_SIZE_KEY("window", window),
        HSIC_SIZE_KEY("initial_epochs", initial_epochs),
        HSIC_SIZE_KEY("period", period),
        HSIC_SIZE_KEY("max_epochs", max_epochs),
        HSIC_SIZE_KEY("retrain_subsample", retrain_subsample),
        HSIC_REAL_KEY("train_fraction", train_fraction),
        HSIC_SIZE_KEY("repeats", repeats),
        Key{"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>("seed", v); },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
        HSIC_REAL_KEY("learning_rate", train.learning_rate),
        HSIC_SIZE_KEY("batch_size", train.batch_size),
        Key{"augment", [](RunConfig& c, const std::string& v) { c.train.augment = parse_bool("augment", v); },
            [](const RunConfig& c) { return fmt(c.train.augment); }},
        HSIC_SIZE_KEY("patch_size", network.patch_size),
        HSIC_SIZE_KEY("conv1_filters", network.conv1_filters),
        HSIC_SIZE_KEY("conv1_kernel", network.conv1_kernel),
        HSIC_SIZE_KEY("conv2_filters", network.conv2_filters),
        HSIC_SIZE_KEY("conv2_kernel", network.conv2_kernel),
        Key{"hidden",
            [](RunConfig& c, const std::string& v) {
                std::vector<std::size_t> widths;
                std::stringstream ss(v);
                std::string item;
                while (std::getline(ss, item, ',')) widths.push_back(parse_size("hidden", trim(item)));
                c.network.hidden = widths;
            },
            [](const RunConfig& c) {
                std::string out;
                for (std::size_t i = 0; i < c.network.hidden.size(); ++i) out += (i ? "," : "") + std::to_string(c.network.hidden[i]);
                return out;
            }},
        HSIC_REAL_KEY("dropout", network.dropout),
        Key{"init",
            [](RunConfig& c, const std::string& v) {
                if (v == "scaled")
                    c.network.init = nn::InitMode::Scaled;
                else if (v == "raw")
                    c.network.init = nn::InitMode::Raw;
                else
                    throw ConfigError("init", "expected scaled or raw, got '" + v + "'");
            },
            [](const RunConfig& c) { return std::string(c.network.init == nn::InitMode::Scaled ? "scaled" : "raw"); }},
        HSIC_REAL_KEY("init_gain", network.init_gain),
        Key{"normalize",
            [](RunConfig& c, const std::string& v) {
                if (v == "minmax")
                    c.normalize = Normalization::MinMax;
                else if (v == "zscore")
                    c.normalize = Normalization::ZScore;
                else
                    throw ConfigError("normalize", "expected minmax or zscore, got '" + v + "'");
            },
            [](const RunConfig& c) { return std::string(c.normalize == Normalization::MinMax ? "minmax" : "zscore"); }},
        HSIC_SIZE_KEY("synth_height", synth.height),
        HSIC_SIZE_KEY("synth_width", synth.width),
        HSIC_SIZE_KEY("synth_bands", synth.bands),
        Key{"synth_classes", [](RunConfig& c, const std::string& v) { c.synth.classes = static_cast<int>(parse_size("synth_classes", v)); },
            [](const RunConfig& c) { return std::to_string(c.synth.classes); }},
        HSIC_REAL_KEY("synth_snr", synth.snr_db),
        HSIC_REAL_KEY("synth_smoothness", synth.field_smoothness),
        HSIC_REAL_KEY("synth_contrast", synth.abundance_contrast),
    };
    return keys;
}

#undef HSIC_SIZE_KEY
#undef HSIC_REAL_KEY
#undef HSIC_TEXT_KEY

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::Cnn: return "cnn";
        case Method::CnnMrf: return "cnn-mrf";
        case Method::CnnMedian: return "cnn-median";
        case Method::CnnMajority: return "cnn-majority";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    for (Method m : {Method::Cnn, Method::CnnMrf, Method::CnnMedian, Method::CnnMajority})
        if (to_string(m) == name) return m;
    throw std::invalid_argument("unknown method '" + name + "' (expected cnn, cnn-mrf, cnn-median or cnn-majority)");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& k : key_table()) out.push_back(k.name);
        return out;
    }();
    return names;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& k : key_table())
        if (k.name == key) {
            k.set(cfg, value);
            return;
        }
    throw ConfigError(key, "unknown key");
}

void validate(const RunConfig& cfg) {
    if (cfg.period < 1) throw ConfigError("period", "must be >= 1");
    if (cfg.max_epochs < cfg.initial_epochs) throw ConfigError("max_epochs", "must be >= initial_epochs");
    if (!(cfg.mu >= 0.0)) throw ConfigError("mu", "must be >= 0");
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction <= 1.0)) throw ConfigError("train_fraction", "must be in (0, 1]");
    if (cfg.window < 3 || cfg.window % 2 == 0) throw ConfigError("window", "must be odd and >= 3");
    if (!(cfg.train.learning_rate > 0.0)) throw ConfigError("learning_rate", "must be > 0");
    if (cfg.train.batch_size < 1) throw ConfigError("batch_size", "must be >= 1");
    if (!(cfg.network.dropout >= 0.0 && cfg.network.dropout < 1.0)) throw ConfigError("dropout", "must be in [0, 1)");
    if (cfg.repeats < 1) throw ConfigError("repeats", "must be >= 1");
    if (cfg.retrain_subsample < 1) throw ConfigError("retrain_subsample", "must be >= 1");
    if (cfg.cube_path.empty() != cfg.labels_path.empty()) throw ConfigError("labels", "cube and labels must be given together");
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    std::stringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
        apply_setting(base, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return base;
}

RunConfig parse_config_file(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), std::move(base));
}

std::string echo_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& k : key_table()) out += k.name + " = " + k.get(cfg) + "\n";
    return out;
}

}  // namespace hsic::pipeline
