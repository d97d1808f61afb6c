#include "zdt/neural.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

namespace zdt {

namespace {

constexpr char kModelMagic[4] = {'Z', 'D', 'T', 'M'};
constexpr std::uint64_t kFnvOffsetBasis = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// Accumulates FNV-1a over everything written, so the checksum covers the
// whole payload without a second pass.
class ChecksumWriter {
public:
    explicit ChecksumWriter(std::ostream& out) : out_(out) {}

    void write_bytes(const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            checksum_ ^= bytes[i];
            checksum_ *= kFnvPrime;
        }
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }

    template <typename T>
    void write(T value) {
        static_assert(std::is_trivially_copyable_v<T>);
        write_bytes(&value, sizeof(T));
    }

    void write_string(const std::string& s) {
        write(static_cast<std::uint32_t>(s.size()));
        write_bytes(s.data(), s.size());
    }

    std::uint64_t checksum() const { return checksum_; }

private:
    std::ostream& out_;
    std::uint64_t checksum_ = kFnvOffsetBasis;
};

class ChecksumReader {
public:
    explicit ChecksumReader(std::istream& in) : in_(in) {}

    void read_bytes(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw ChecksumMismatchError("model file truncated");
        }
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            checksum_ ^= bytes[i];
            checksum_ *= kFnvPrime;
        }
    }

    template <typename T>
    T read() {
        static_assert(std::is_trivially_copyable_v<T>);
        T value{};
        read_bytes(&value, sizeof(T));
        return value;
    }

    std::string read_string(std::size_t max_len = 1 << 20) {
        auto len = read<std::uint32_t>();
        if (len > max_len) throw ChecksumMismatchError("model file corrupt (string length)");
        std::string s(len, '\0');
        read_bytes(s.data(), len);
        return s;
    }

    std::uint64_t checksum() const { return checksum_; }

private:
    std::istream& in_;
    std::uint64_t checksum_ = kFnvOffsetBasis;
};

} // namespace

NormalizationParams fit_normalizer(const FeatureMatrix& m) {
    if (m.rows == 0) throw EmptyMatrixError("cannot fit normalizer on an empty matrix");
    NormalizationParams p;
    p.min.assign(m.cols, 0.0);
    p.max.assign(m.cols, 0.0);
    for (std::size_t c = 0; c < m.cols; ++c) {
        double lo = m.at(0, c), hi = m.at(0, c);
        for (std::size_t r = 1; r < m.rows; ++r) {
            lo = std::min(lo, m.at(r, c));
            hi = std::max(hi, m.at(r, c));
        }
        p.min[c] = lo;
        p.max[c] = hi;
    }
    return p;
}

void normalize_row_inplace(std::span<double> row, const NormalizationParams& p) {
    if (row.size() != p.dimension()) {
        throw DimensionMismatchError("row width " + std::to_string(row.size()) +
                                     " != normalizer dimension " + std::to_string(p.dimension()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
        const double range = p.max[c] - p.min[c];
        if (range <= 0.0) {
            row[c] = 0.0;
        } else {
            row[c] = std::clamp((row[c] - p.min[c]) / range, 0.0, 1.0);
        }
    }
}

FeatureMatrix normalize(const FeatureMatrix& m, const NormalizationParams& p) {
    if (m.cols != p.dimension()) {
        throw DimensionMismatchError("matrix width " + std::to_string(m.cols) +
                                     " != normalizer dimension " + std::to_string(p.dimension()));
    }
    FeatureMatrix out = m;
    for (std::size_t r = 0; r < out.rows; ++r) {
        normalize_row_inplace({out.values.data() + r * out.cols, out.cols}, p);
    }
    return out;
}

AEArchitecture build_architecture(int input_dim) {
    if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
    constexpr int kLatent = 6;
    std::vector<int> encoder{input_dim};
    if (input_dim > kLatent) {
        int w = input_dim;
        while (true) {
            int next = static_cast<int>(std::lround(w / 1.4));
            if (next <= 8) break;
            encoder.push_back(next);
            w = next;
        }
    }
    AEArchitecture arch;
    arch.widths = encoder;
    arch.widths.push_back(kLatent);
    for (auto it = encoder.rbegin(); it != encoder.rend(); ++it) arch.widths.push_back(*it);
    return arch;
}

template <typename Scalar>
DenseNet<Scalar> make_dense_net(const std::vector<int>& widths, std::uint64_t seed) {
    DenseNet<Scalar> net;
    net.widths = widths;
    net.weights.resize(widths.size() - 1);
    net.biases.resize(widths.size() - 1);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const int fan_in = widths[l];
        const int fan_out = widths[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        net.weights[l].resize(static_cast<std::size_t>(fan_out) * fan_in);
        for (auto& w : net.weights[l]) w = static_cast<Scalar>(dist(rng));
        net.biases[l].assign(fan_out, Scalar{0});
    }
    return net;
}

template <typename Scalar>
void net_forward(const DenseNet<Scalar>& net, const Scalar* x, NetWorkspace<Scalar>& ws) {
    ws.resize(net);
    std::copy(x, x + net.widths[0], ws.activations[0].begin());
    const std::size_t layers = net.layer_count();
    for (std::size_t l = 0; l < layers; ++l) {
        const int in_w = net.widths[l];
        const int out_w = net.widths[l + 1];
        const auto& W = net.weights[l];
        const auto& b = net.biases[l];
        const Scalar* in = ws.activations[l].data();
        Scalar* out = ws.activations[l + 1].data();
        const bool hidden = l + 1 < layers;
        for (int o = 0; o < out_w; ++o) {
            Scalar acc = b[o];
            const Scalar* w_row = W.data() + static_cast<std::size_t>(o) * in_w;
            for (int i = 0; i < in_w; ++i) acc += w_row[i] * in[i];
            out[o] = hidden && acc < Scalar{0} ? Scalar{0} : acc;
        }
    }
}

template <typename Scalar>
double net_row_mse(const DenseNet<Scalar>& net, const Scalar* x, NetWorkspace<Scalar>& ws) {
    net_forward(net, x, ws);
    const auto& out = ws.activations.back();
    double sum = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = static_cast<double>(out[i]) - static_cast<double>(x[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(out.size());
}

template <typename Scalar>
double net_batch_gradients(const DenseNet<Scalar>& net, const std::vector<Scalar>& batch,
                           std::size_t n_rows, NetWorkspace<Scalar>& ws, GradientBuffers& grads) {
    const int dim = net.input_dim();
    const std::size_t layers = net.layer_count();
    grads.reset(net);
    ws.resize(net);

    double total_loss = 0.0;
    const double inv_rows = 1.0 / static_cast<double>(n_rows);
    const double inv_dim = 1.0 / static_cast<double>(dim);

    for (std::size_t r = 0; r < n_rows; ++r) {
        const Scalar* x = batch.data() + r * dim;
        net_forward(net, x, ws);

        const auto& out = ws.activations[layers];
        auto& out_delta = ws.deltas[layers];
        double row_loss = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double diff = static_cast<double>(out[i]) - static_cast<double>(x[i]);
            row_loss += diff * diff;
            // d(row MSE)/d(out_i), averaged over the batch
            out_delta[i] = static_cast<Scalar>(2.0 * diff * inv_dim * inv_rows);
        }
        total_loss += row_loss * inv_dim;

        for (std::size_t l = layers; l-- > 0;) {
            const int in_w = net.widths[l];
            const int out_w = net.widths[l + 1];
            const auto& delta = ws.deltas[l + 1];
            const auto& in = ws.activations[l];
            auto& wg = grads.weight_grads[l];
            auto& bg = grads.bias_grads[l];
            for (int o = 0; o < out_w; ++o) {
                const double d = static_cast<double>(delta[o]);
                bg[o] += d;
                double* wg_row = wg.data() + static_cast<std::size_t>(o) * in_w;
                for (int i = 0; i < in_w; ++i) wg_row[i] += d * static_cast<double>(in[i]);
            }
            if (l > 0) {
                auto& prev_delta = ws.deltas[l];
                const auto& W = net.weights[l];
                for (int i = 0; i < in_w; ++i) prev_delta[i] = Scalar{0};
                for (int o = 0; o < out_w; ++o) {
                    const Scalar d = delta[o];
                    const Scalar* w_row = W.data() + static_cast<std::size_t>(o) * in_w;
                    for (int i = 0; i < in_w; ++i) prev_delta[i] += w_row[i] * d;
                }
                // ReLU mask: layer l's output was zero-clamped
                for (int i = 0; i < in_w; ++i) {
                    if (in[i] <= Scalar{0}) prev_delta[i] = Scalar{0};
                }
            }
        }
    }
    return total_loss * inv_rows;
}

template DenseNet<float> make_dense_net<float>(const std::vector<int>&, std::uint64_t);
template DenseNet<double> make_dense_net<double>(const std::vector<int>&, std::uint64_t);
template void net_forward<float>(const DenseNet<float>&, const float*, NetWorkspace<float>&);
template void net_forward<double>(const DenseNet<double>&, const double*, NetWorkspace<double>&);
template double net_row_mse<float>(const DenseNet<float>&, const float*, NetWorkspace<float>&);
template double net_row_mse<double>(const DenseNet<double>&, const double*, NetWorkspace<double>&);
template double net_batch_gradients<float>(const DenseNet<float>&, const std::vector<float>&,
                                           std::size_t, NetWorkspace<float>&, GradientBuffers&);
template double net_batch_gradients<double>(const DenseNet<double>&, const std::vector<double>&,
                                            std::size_t, NetWorkspace<double>&, GradientBuffers&);

namespace {

struct AdamState {
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
    long long t = 0;

    void init(const DenseNet<float>& net) {
        m_w.resize(net.weights.size());
        v_w.resize(net.weights.size());
        m_b.resize(net.biases.size());
        v_b.resize(net.biases.size());
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            m_w[l].assign(net.weights[l].size(), 0.0);
            v_w[l].assign(net.weights[l].size(), 0.0);
            m_b[l].assign(net.biases[l].size(), 0.0);
            v_b[l].assign(net.biases[l].size(), 0.0);
        }
    }

    void step(DenseNet<float>& net, const GradientBuffers& grads, double lr) {
        ++t;
        const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t));
        auto update = [&](std::vector<float>& params, std::vector<double>& m,
                          std::vector<double>& v, const std::vector<double>& g) {
            for (std::size_t i = 0; i < params.size(); ++i) {
                m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g[i];
                v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
                const double step_i = lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + kAdamEps);
                params[i] = static_cast<float>(static_cast<double>(params[i]) - step_i);
            }
        };
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            update(net.weights[l], m_w[l], v_w[l], grads.weight_grads[l]);
            update(net.biases[l], m_b[l], v_b[l], grads.bias_grads[l]);
        }
    }
};

double mean_loss_over(const DenseNet<float>& net, const std::vector<float>& rows,
                      std::size_t n_rows, NetWorkspace<float>& ws) {
    if (n_rows == 0) return 0.0;
    const int dim = net.input_dim();
    double sum = 0.0;
    for (std::size_t r = 0; r < n_rows; ++r) {
        sum += net_row_mse(net, rows.data() + r * dim, ws);
    }
    return sum / static_cast<double>(n_rows);
}

} // namespace

TrainResult train_autoencoder(const FeatureMatrix& normalized, const AEArchitecture& arch,
                              const TrainConfig& cfg) {
    if (cfg.learning_rate <= 0.0 || cfg.batch_size == 0 || cfg.max_epochs <= 0 ||
        cfg.patience <= 0 || !(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
        throw ConfigError("invalid training configuration");
    }
    if (static_cast<std::size_t>(arch.input_dim()) != normalized.cols) {
        throw DimensionMismatchError("architecture input dim does not match matrix width");
    }
    if (normalized.rows < cfg.batch_size) {
        throw InsufficientDataError("need at least batch_size rows, have " +
                                    std::to_string(normalized.rows));
    }

    const std::size_t n = normalized.rows;
    const int dim = arch.input_dim();
    std::mt19937_64 rng(cfg.seed);

    // Fixed rng draw order: validation split, weight init, per-epoch shuffles.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t val_n = static_cast<std::size_t>(
        std::floor(cfg.validation_fraction * static_cast<double>(n)));

    std::vector<std::size_t> val_idx(order.begin(), order.begin() + val_n);
    std::vector<std::size_t> train_idx(order.begin() + val_n, order.end());
    const bool val_aliases_train = val_idx.empty();
    if (val_aliases_train) val_idx = train_idx;

    auto gather = [&](const std::vector<std::size_t>& idx) {
        std::vector<float> rows(idx.size() * dim);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const auto src = normalized.row(idx[r]);
            for (int c = 0; c < dim; ++c) rows[r * dim + c] = static_cast<float>(src[c]);
        }
        return rows;
    };
    std::vector<float> train_rows = gather(train_idx);
    std::vector<float> val_rows = gather(val_idx);
    const std::size_t train_n = train_idx.size();

    TrainResult result;
    result.model.arch = arch;
    result.model.net = make_dense_net<float>(arch.widths, rng());
    result.model.meta.seed = cfg.seed;

    AdamState adam;
    adam.init(result.model.net);
    NetWorkspace<float> ws;
    GradientBuffers grads;

    DenseNet<float> best_net = result.model.net;
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    int epochs_since_improvement = 0;

    std::vector<std::size_t> batch_order(train_n);
    std::iota(batch_order.begin(), batch_order.end(), 0);
    std::vector<float> batch;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        std::shuffle(batch_order.begin(), batch_order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < train_n; begin += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, train_n - begin);
            batch.resize(count * dim);
            for (std::size_t r = 0; r < count; ++r) {
                const float* src = train_rows.data() + batch_order[begin + r] * dim;
                std::copy(src, src + dim, batch.data() + r * dim);
            }
            const double batch_loss = net_batch_gradients(result.model.net, batch, count, ws, grads);
            if (!std::isfinite(batch_loss)) {
                throw NonFiniteLossError("training diverged at epoch " + std::to_string(epoch + 1));
            }
            adam.step(result.model.net, grads, cfg.learning_rate);
            epoch_loss += batch_loss;
            ++batches;
        }
        epoch_loss /= static_cast<double>(batches);
        const double val_loss = mean_loss_over(result.model.net, val_rows, val_idx.size(), ws);
        if (!std::isfinite(val_loss)) {
            throw NonFiniteLossError("validation loss diverged at epoch " + std::to_string(epoch + 1));
        }
        result.history.push_back({epoch_loss, val_loss});

        if (val_loss < best_val) {
            best_val = val_loss;
            best_net = result.model.net;
            best_epoch = epoch;
            epochs_since_improvement = 0;
        } else {
            ++epochs_since_improvement;
            if (epochs_since_improvement >= cfg.patience) break;
        }
    }

    result.model.net = std::move(best_net);
    result.best_epoch = best_epoch;
    result.model.meta.epochs_run = static_cast<int>(result.history.size());
    result.model.meta.final_train_loss = result.history[best_epoch].train_loss;
    result.model.meta.final_val_loss = result.history[best_epoch].val_loss;
    return result;
}

double reconstruction_loss(std::span<const double> x, std::span<const double> x_hat) {
    if (x.size() != x_hat.size()) {
        throw DimensionMismatchError("reconstruction_loss operands differ in size");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - x_hat[i];
        sum += d * d;
    }
    return sum / static_cast<double>(x.size());
}

std::vector<double> model_forward(const AEModel& model, std::span<const double> normalized_row) {
    if (normalized_row.size() != static_cast<std::size_t>(model.net.input_dim())) {
        throw DimensionMismatchError("input row width does not match model input dim");
    }
    std::vector<float> x(normalized_row.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(normalized_row[i]);
    NetWorkspace<float> ws;
    net_forward(model.net, x.data(), ws);
    const auto& out = ws.activations.back();
    return std::vector<double>(out.begin(), out.end());
}

std::vector<double> reconstruction_losses(const AEModel& model, const FeatureMatrix& normalized) {
    if (normalized.cols != static_cast<std::size_t>(model.net.input_dim())) {
        throw DimensionMismatchError("matrix width does not match model input dim");
    }
    std::vector<double> losses(normalized.rows);
    NetWorkspace<float> ws;
    std::vector<float> x(normalized.cols);
    for (std::size_t r = 0; r < normalized.rows; ++r) {
        const auto row = normalized.row(r);
        for (std::size_t c = 0; c < x.size(); ++c) x[c] = static_cast<float>(row[c]);
        losses[r] = net_row_mse(model.net, x.data(), ws);
    }
    return losses;
}

std::vector<double> score_raw(const AEModel& model, const FeatureMatrix& raw) {
    if (!model.feature_names.empty() && !raw.column_names.empty() &&
        raw.column_names != model.feature_names) {
        throw SchemaMismatchError("feature schema does not match the model's schema");
    }
    if (raw.cols != static_cast<std::size_t>(model.net.input_dim())) {
        throw SchemaMismatchError("feature width does not match the model's input dim");
    }
    return reconstruction_losses(model, normalize(raw, model.normalization));
}

void save_model(const AEModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open model file for writing: " + path);

    out.write(kModelMagic, sizeof(kModelMagic));
    const std::uint32_t version = kModelFormatVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));

    ChecksumWriter w(out);
    w.write(static_cast<std::uint32_t>(model.arch.widths.size()));
    for (int width : model.arch.widths) w.write(static_cast<std::uint32_t>(width));
    w.write(model.meta.seed);
    w.write(static_cast<std::uint32_t>(model.meta.epochs_run));
    w.write(model.meta.final_train_loss);
    w.write(model.meta.final_val_loss);
    w.write(static_cast<std::uint8_t>(model.threshold.has_value() ? 1 : 0));
    w.write(model.threshold.value_or(0.0));
    w.write(static_cast<std::uint32_t>(model.feature_names.size()));
    for (const auto& name : model.feature_names) w.write_string(name);
    w.write(static_cast<std::uint32_t>(model.class_tags.size()));
    for (const auto& tag : model.class_tags) w.write_string(tag);
    w.write(static_cast<std::uint32_t>(model.normalization.dimension()));
    for (double v : model.normalization.min) w.write(v);
    for (double v : model.normalization.max) w.write(v);
    w.write(static_cast<std::uint32_t>(model.net.weights.size()));
    for (std::size_t l = 0; l < model.net.weights.size(); ++l) {
        w.write(static_cast<std::uint32_t>(model.net.weights[l].size()));
        w.write_bytes(model.net.weights[l].data(), model.net.weights[l].size() * sizeof(float));
        w.write(static_cast<std::uint32_t>(model.net.biases[l].size()));
        w.write_bytes(model.net.biases[l].data(), model.net.biases[l].size() * sizeof(float));
    }
    const std::uint64_t checksum = w.checksum();
    out.write(reinterpret_cast<const char*>(&checksum), sizeof(checksum));
    if (!out) throw IoError("model write failed: " + path);
}

AEModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);

    char magic[4];
    in.read(magic, sizeof(magic));
    if (in.gcount() != sizeof(magic) || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
        throw VersionMismatchError("not a model file: " + path);
    }
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (in.gcount() != sizeof(version)) throw ChecksumMismatchError("model file truncated");
    if (version != kModelFormatVersion) {
        throw VersionMismatchError("unsupported model format version " + std::to_string(version));
    }

    ChecksumReader r(in);
    AEModel model;
    const auto n_widths = r.read<std::uint32_t>();
    if (n_widths == 0 || n_widths > 1024) throw ChecksumMismatchError("model file corrupt (widths)");
    model.arch.widths.resize(n_widths);
    for (auto& width : model.arch.widths) width = static_cast<int>(r.read<std::uint32_t>());
    model.meta.seed = r.read<std::uint64_t>();
    model.meta.epochs_run = static_cast<int>(r.read<std::uint32_t>());
    model.meta.final_train_loss = r.read<double>();
    model.meta.final_val_loss = r.read<double>();
    const auto has_threshold = r.read<std::uint8_t>();
    const double threshold = r.read<double>();
    if (has_threshold) model.threshold = threshold;
    const auto n_names = r.read<std::uint32_t>();
    for (std::uint32_t i = 0; i < n_names; ++i) model.feature_names.push_back(r.read_string());
    const auto n_tags = r.read<std::uint32_t>();
    for (std::uint32_t i = 0; i < n_tags; ++i) model.class_tags.push_back(r.read_string());
    const auto norm_dim = r.read<std::uint32_t>();
    model.normalization.min.resize(norm_dim);
    model.normalization.max.resize(norm_dim);
    for (auto& v : model.normalization.min) v = r.read<double>();
    for (auto& v : model.normalization.max) v = r.read<double>();
    const auto n_layers = r.read<std::uint32_t>();
    if (n_layers + 1 != n_widths) throw ChecksumMismatchError("model file corrupt (layers)");
    model.net.widths = model.arch.widths;
    model.net.weights.resize(n_layers);
    model.net.biases.resize(n_layers);
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        const auto w_size = r.read<std::uint32_t>();
        const auto expected_w = static_cast<std::size_t>(model.arch.widths[l]) *
                                static_cast<std::size_t>(model.arch.widths[l + 1]);
        if (w_size != expected_w) throw ChecksumMismatchError("model file corrupt (weight shape)");
        model.net.weights[l].resize(w_size);
        r.read_bytes(model.net.weights[l].data(), w_size * sizeof(float));
        const auto b_size = r.read<std::uint32_t>();
        if (b_size != static_cast<std::size_t>(model.arch.widths[l + 1])) {
            throw ChecksumMismatchError("model file corrupt (bias shape)");
        }
        model.net.biases[l].resize(b_size);
        r.read_bytes(model.net.biases[l].data(), b_size * sizeof(float));
    }
    std::uint64_t stored = 0;
    in.read(reinterpret_cast<char*>(&stored), sizeof(stored));
    if (in.gcount() != sizeof(stored)) throw ChecksumMismatchError("model file truncated");
    if (stored != r.checksum()) throw ChecksumMismatchError("model checksum mismatch: " + path);
    return model;
}

} // namespace zdt
