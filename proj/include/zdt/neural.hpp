#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zdt/errors.hpp"
#include "zdt/features.hpp"

namespace zdt {

// Per-feature min/max fitted on training data only.
struct NormalizationParams {
    std::vector<double> min;
    std::vector<double> max;

    std::size_t dimension() const { return min.size(); }
    bool operator==(const NormalizationParams&) const = default;
};

NormalizationParams fit_normalizer(const FeatureMatrix& m);

// x' = (x - min) / (max - min), clipped to [0,1]; constant features map to 0.
FeatureMatrix normalize(const FeatureMatrix& m, const NormalizationParams& p);
void normalize_row_inplace(std::span<double> row, const NormalizationParams& p);

// Symmetric dense autoencoder widths: encoder shrinks by the 1.4-divisor rule
// (stopping before any width <= 8), a latent layer of 6, then an exact mirror.
struct AEArchitecture {
    std::vector<int> widths;

    int input_dim() const { return widths.front(); }
    int latent_width() const { return widths[widths.size() / 2]; }
    bool operator==(const AEArchitecture&) const = default;
};

AEArchitecture build_architecture(int input_dim);

// Fully connected net, ReLU on hidden layers, linear output. Instantiated
// with float for models and with double for gradient checks.
template <typename Scalar>
struct DenseNet {
    std::vector<int> widths;
    std::vector<std::vector<Scalar>> weights; // [l]: widths[l+1] x widths[l], row-major
    std::vector<std::vector<Scalar>> biases;  // [l]: widths[l+1]

    std::size_t layer_count() const { return weights.size(); }
    int input_dim() const { return widths.front(); }
    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
        return n;
    }
};

// Weight init: uniform in +-1/sqrt(fan_in), biases zero; draws are consumed
// in a fixed layer-major order from the given rng state.
template <typename Scalar>
DenseNet<Scalar> make_dense_net(const std::vector<int>& widths, std::uint64_t seed);

// Scratch space reused across forward/backward calls.
template <typename Scalar>
struct NetWorkspace {
    std::vector<std::vector<Scalar>> activations; // a[0] = input, a[L] = output
    std::vector<std::vector<Scalar>> deltas;

    void resize(const DenseNet<Scalar>& net) {
        activations.resize(net.widths.size());
        deltas.resize(net.widths.size());
        for (std::size_t i = 0; i < net.widths.size(); ++i) {
            activations[i].resize(net.widths[i]);
            deltas[i].resize(net.widths[i]);
        }
    }
};

template <typename Scalar>
void net_forward(const DenseNet<Scalar>& net, const Scalar* x, NetWorkspace<Scalar>& ws);

// Mean squared error between input and reconstruction, accumulated in double.
template <typename Scalar>
double net_row_mse(const DenseNet<Scalar>& net, const Scalar* x, NetWorkspace<Scalar>& ws);

// Gradients of the batch-mean reconstruction MSE, accumulated in double.
struct GradientBuffers {
    std::vector<std::vector<double>> weight_grads;
    std::vector<std::vector<double>> bias_grads;

    template <typename Scalar>
    void reset(const DenseNet<Scalar>& net) {
        weight_grads.resize(net.weights.size());
        bias_grads.resize(net.biases.size());
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            weight_grads[l].assign(net.weights[l].size(), 0.0);
            bias_grads[l].assign(net.biases[l].size(), 0.0);
        }
    }
};

template <typename Scalar>
double net_batch_gradients(const DenseNet<Scalar>& net, const std::vector<Scalar>& batch,
                           std::size_t n_rows, NetWorkspace<Scalar>& ws, GradientBuffers& grads);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 256;
    int max_epochs = 50;
    int patience = 5;
    double validation_fraction = 0.1;
    std::uint64_t seed = 0;
};

struct TrainMeta {
    std::uint64_t seed = 0;
    int epochs_run = 0;
    double final_train_loss = 0.0;
    double final_val_loss = 0.0;
};

// A trained autoencoder bound to its normalization parameters and schema.
struct AEModel {
    AEArchitecture arch;
    DenseNet<float> net;
    NormalizationParams normalization;
    std::vector<std::string> feature_names;
    TrainMeta meta;
    std::optional<double> threshold;      // set by calibration
    std::vector<std::string> class_tags;  // novelty detector: known attack classes
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainResult {
    AEModel model;
    std::vector<EpochStats> history;
    int best_epoch = 0; // 0-based index into history
};

// Mini-batch Adam on normalized data with seeded init/shuffles and early
// stopping on validation loss; returns the best-validation weights.
TrainResult train_autoencoder(const FeatureMatrix& normalized, const AEArchitecture& arch,
                              const TrainConfig& cfg);

double reconstruction_loss(std::span<const double> x, std::span<const double> x_hat);

// Reconstruction of one already-normalized row.
std::vector<double> model_forward(const AEModel& model, std::span<const double> normalized_row);

// Per-row MSE losses over an already-normalized matrix.
std::vector<double> reconstruction_losses(const AEModel& model, const FeatureMatrix& normalized);

// Normalizes raw features with the model's own parameters, then scores.
// Throws SchemaMismatchError when column names disagree with the model.
std::vector<double> score_raw(const AEModel& model, const FeatureMatrix& raw);

constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const AEModel& model, const std::string& path);
AEModel load_model(const std::string& path);

} // namespace zdt
