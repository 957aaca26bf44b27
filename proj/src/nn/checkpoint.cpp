#include "hsic/nn/checkpoint.hpp"

#include <algorithm>
#include <cmath>

#include "hsic/io.hpp"

namespace hsic::nn {

namespace {

constexpr char kMagic[4] = {'C', 'N', 'N', 'W'};
constexpr std::uint32_t kVersion = 1;

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    std::uint32_t u32(const char* what) {
        need(4, what);
        const auto v = le::get_u32(data() + pos_);
        pos_ += 4;
        return v;
    }
    double f64(const char* what) {
        need(8, what);
        const double v = le::get_f64(data() + pos_);
        if (!std::isfinite(v)) throw FormatError(std::string("non-finite ") + what, pos_);
        pos_ += 8;
        return v;
    }
    std::size_t pos() const { return pos_; }
    bool done() const { return pos_ == bytes_.size(); }

private:
    const unsigned char* data() const { return reinterpret_cast<const unsigned char*>(bytes_.data()); }
    void need(std::size_t n, const char* what) {
        if (pos_ + n > bytes_.size()) throw FormatError(std::string("truncated network file while reading ") + what, bytes_.size());
    }
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string encode_network(const Network& net) {
    const auto& cfg = net.config();
    std::string out(kMagic, 4);
    le::put_u32(out, kVersion);
    for (std::size_t v : {cfg.patch_size, cfg.bands, cfg.conv1_filters, cfg.conv1_kernel, cfg.conv2_filters, cfg.conv2_kernel})
        le::put_u32(out, static_cast<std::uint32_t>(v));
    le::put_u32(out, static_cast<std::uint32_t>(cfg.classes));
    le::put_u32(out, cfg.init == InitMode::Scaled ? 0u : 1u);
    le::put_f64(out, cfg.dropout);
    le::put_f64(out, cfg.init_gain);
    le::put_u32(out, static_cast<std::uint32_t>(cfg.hidden.size()));
    for (std::size_t h : cfg.hidden) le::put_u32(out, static_cast<std::uint32_t>(h));
    const auto& p = net.params();
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        const auto& w = p.weights[l];
        for (Eigen::Index i = 0; i < w.size(); ++i) le::put_f64(out, w.data()[i]);
        const auto& b = p.biases[l];
        for (Eigen::Index i = 0; i < b.size(); ++i) le::put_f64(out, b[i]);
    }
    return out;
}

Network decode_network(const std::string& bytes) {
    if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) throw FormatError("bad network magic", 0);
    Reader in(bytes);
    in.u32("magic");
    const std::size_t version_at = in.pos();
    if (in.u32("version") != kVersion) throw FormatError("unsupported network file version", version_at);
    NetworkConfig cfg;
    cfg.patch_size = in.u32("patch_size");
    cfg.bands = in.u32("bands");
    cfg.conv1_filters = in.u32("conv1_filters");
    cfg.conv1_kernel = in.u32("conv1_kernel");
    cfg.conv2_filters = in.u32("conv2_filters");
    cfg.conv2_kernel = in.u32("conv2_kernel");
    cfg.classes = static_cast<int>(in.u32("classes"));
    const std::size_t init_at = in.pos();
    const std::uint32_t init = in.u32("init mode");
    if (init > 1) throw FormatError("unknown init mode", init_at);
    cfg.init = init == 0 ? InitMode::Scaled : InitMode::Raw;
    cfg.dropout = in.f64("dropout");
    cfg.init_gain = in.f64("init gain");
    const std::uint32_t hidden = in.u32("hidden count");
    if (hidden > 64) throw FormatError("implausible hidden layer count", in.pos() - 4);
    cfg.hidden.clear();
    for (std::uint32_t i = 0; i < hidden; ++i) cfg.hidden.push_back(in.u32("hidden width"));

    const std::size_t config_end = in.pos();
    LayerShapes shapes;
    try {
        shapes = derive_shapes(cfg);
    } catch (const ConfigError& e) {
        throw FormatError(std::string("invalid network configuration: ") + e.what(), config_end);
    }
    std::vector<std::pair<std::size_t, std::size_t>> dims = {
        {cfg.conv1_filters, cfg.conv1_kernel * cfg.conv1_kernel * cfg.bands},
        {cfg.conv2_filters, cfg.conv2_kernel * cfg.conv2_kernel * cfg.conv1_filters},
    };
    std::size_t fan_in = shapes.flat;
    for (std::size_t h : cfg.hidden) {
        dims.emplace_back(h, fan_in);
        fan_in = h;
    }
    dims.emplace_back(static_cast<std::size_t>(cfg.classes), fan_in);

    std::size_t expected = config_end;
    for (const auto& [rows, cols] : dims) expected += 8 * (rows * cols + rows);
    if (bytes.size() < expected) throw FormatError("truncated network parameters", bytes.size());
    if (bytes.size() > expected) throw FormatError("trailing bytes after network parameters", expected);

    Parameters p;
    for (const auto& [rows, cols] : dims) {
        Matrix w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = in.f64("weight");
        Vector b(static_cast<Eigen::Index>(rows));
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = in.f64("bias");
        p.weights.push_back(std::move(w));
        p.biases.push_back(std::move(b));
    }
    return Network(cfg, std::move(p));
}

void write_network(const std::filesystem::path& path, const Network& net) { write_file_bytes(path, encode_network(net)); }

Network read_network(const std::filesystem::path& path) { return decode_network(read_file_bytes(path)); }

}  // namespace hsic::nn
