#ifndef BYZFUSE_NEURAL_HPP
#define BYZFUSE_NEURAL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "byzfuse/genesis.hpp"
#include "byzfuse/types.hpp"

namespace byzfuse {

struct NetworkSpec {
    int input_size = 1;                    // n * m
    std::vector<int> hidden_sizes;
    int output_size = 1;                   // m
    std::vector<std::uint8_t> batch_norm;  // one flag per hidden layer
    std::uint64_t seed = 1;

    /// Reduced stack for CPU-budget runs: [256, 128, 64], all batch-normed.
    static NetworkSpec desk_scale(int n, int m, std::uint64_t seed);
    /// Full stack: [2048, 1024, 512, 256, 128, 64], all batch-normed.
    static NetworkSpec paper_scale(int n, int m, std::uint64_t seed);

    bool operator==(const NetworkSpec&) const = default;
};

struct TrainConfig {
    int epochs = 150;
    int batch_size = 512;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t shuffle_seed = 1;
    /// Stop once the epoch mean training loss drops below this (0 = off).
    double early_stop_loss = 0.0;
};

struct BatchNormState {
    Eigen::VectorXd gamma, beta, running_mean, running_var;
};

struct DenseLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
    std::optional<BatchNormState> bn;
};

struct NetworkParams {
    NetworkSpec spec;
    std::vector<DenseLayer> hidden;
    DenseLayer output;
    std::int64_t step_count = 0;
};

/// Per-layer tensors mirroring NetworkParams shapes (gradients, moments).
struct ParamTensors {
    struct Layer {
        Eigen::MatrixXd weight;
        Eigen::VectorXd bias, gamma, beta;
    };
    std::vector<Layer> hidden;
    Layer output;

    static ParamTensors zeros_like(const NetworkParams& params);
};

using Gradients = ParamTensors;

struct AdamState {
    ParamTensors m, v;
    std::int64_t t = 0;

    static AdamState init(const NetworkParams& params);
};

enum class RunMode { train, infer };

struct ForwardCache {
    struct LayerCache {
        Eigen::MatrixXd input;       // batch x in
        Eigen::MatrixXd pre_norm;    // affine output
        Eigen::MatrixXd normalized;  // x-hat (batch-norm layers only)
        Eigen::VectorXd batch_mean, batch_var;
        Eigen::MatrixXd activated;   // post-rectifier
    };
    std::vector<LayerCache> layers;
    Eigen::MatrixXd output_input;  // input to the output affine
    Eigen::MatrixXd outputs;       // sigmoid outputs
    std::int64_t step_stamp = -1;
    std::int64_t batch_rows = 0;
};

struct EpochStats {
    double train_loss = 0.0;
    std::optional<double> holdout_loss;
    std::optional<double> holdout_accuracy;
};

using TrainHistory = std::vector<EpochStats>;

struct TrainResult {
    NetworkParams params;
    TrainHistory history;
};

/// He-style fan-in initialization (uniform, variance 2/fan_in), zero
/// biases, identity batch-norm, running stats (0, 1). Deterministic in
/// spec.seed.
NetworkParams init_network(const NetworkSpec& spec);

/// Hidden layers: affine -> optional batch norm -> rectifier; output:
/// affine -> sigmoid. Train mode normalizes with batch statistics and
/// folds them into the running stats (momentum 0.9); infer mode uses the
/// running stats and leaves params untouched.
Eigen::MatrixXd forward(NetworkParams& params, const Eigen::MatrixXd& batch, RunMode mode,
                        ForwardCache* cache = nullptr);
/// Infer-mode forward; pure.
Eigen::MatrixXd forward(const NetworkParams& params, const Eigen::MatrixXd& batch);

double mse_loss(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets);

/// Exact MSE gradients for every parameter, including the batch-norm
/// batch-statistics chain rule. The cache must come from a train-mode
/// forward with the current params.
Gradients backward(const NetworkParams& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& targets);

/// Bias-corrected adaptive-moment update; increments the step counters.
void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config);

/// Flatten dataset reports row-major (time-major) into inputs X and truth
/// bits into targets Y.
void dataset_to_matrices(const Dataset& dataset, Eigen::MatrixXd& inputs,
                         Eigen::MatrixXd& targets);

TrainResult train(const Dataset& train_data, const NetworkSpec& spec, const TrainConfig& config,
                  const Dataset* holdout = nullptr);

/// Infer-mode forward on one flattened matrix; estimate_i = 1 iff the
/// sigmoid output is >= 0.5.
FusionDecision predict(const NetworkParams& params, const ReportMatrix& reports);

/// Batched prediction returning thresholded estimates.
std::vector<StateVector> predict_batch(const NetworkParams& params, const Dataset& dataset);

struct GradientCheckReport {
    struct Group {
        int layer = 0;            // hidden index, or -1 for the output layer
        std::string group;        // weight / bias / gamma / beta
        double max_rel_error = 0.0;
    };
    std::vector<Group> groups;
    double worst = 0.0;
    bool passed = false;
};

/// Central-difference verification of backward on a seeded random batch.
GradientCheckReport gradient_check(const NetworkSpec& spec, double tolerance);

}  // namespace byzfuse

#endif
