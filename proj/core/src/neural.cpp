#include "byzfuse/neural.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "byzfuse/rng.hpp"

namespace byzfuse {

namespace {

constexpr double kBnEpsilon = 1e-5;
constexpr double kBnMomentum = 0.9;  // retained fraction of the running stats

void check_spec(const NetworkSpec& spec) {
    if (spec.input_size < 1 || spec.output_size < 1)
        throw std::invalid_argument("NetworkSpec: sizes must be >= 1");
    for (int w : spec.hidden_sizes)
        if (w < 1) throw std::invalid_argument("NetworkSpec: widths must be >= 1");
    if (spec.batch_norm.size() != spec.hidden_sizes.size())
        throw std::invalid_argument("NetworkSpec: one batch_norm flag per hidden layer");
}

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
    return 1.0 / (1.0 + (-z.array()).exp());
}

Eigen::MatrixXd affine(const DenseLayer& layer, const Eigen::MatrixXd& x) {
    return (x * layer.weight.transpose()).rowwise() + layer.bias.transpose();
}

}  // namespace

NetworkSpec NetworkSpec::desk_scale(int n, int m, std::uint64_t seed) {
    return NetworkSpec{n * m, {256, 128, 64}, m, {1, 1, 1}, seed};
}

NetworkSpec NetworkSpec::paper_scale(int n, int m, std::uint64_t seed) {
    return NetworkSpec{n * m, {2048, 1024, 512, 256, 128, 64}, m, {1, 1, 1, 1, 1, 1}, seed};
}

ParamTensors ParamTensors::zeros_like(const NetworkParams& params) {
    ParamTensors t;
    t.hidden.resize(params.hidden.size());
    for (std::size_t l = 0; l < params.hidden.size(); ++l) {
        const auto& layer = params.hidden[l];
        t.hidden[l].weight = Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols());
        t.hidden[l].bias = Eigen::VectorXd::Zero(layer.bias.size());
        if (layer.bn) {
            t.hidden[l].gamma = Eigen::VectorXd::Zero(layer.bn->gamma.size());
            t.hidden[l].beta = Eigen::VectorXd::Zero(layer.bn->beta.size());
        }
    }
    t.output.weight = Eigen::MatrixXd::Zero(params.output.weight.rows(), params.output.weight.cols());
    t.output.bias = Eigen::VectorXd::Zero(params.output.bias.size());
    return t;
}

AdamState AdamState::init(const NetworkParams& params) {
    return AdamState{ParamTensors::zeros_like(params), ParamTensors::zeros_like(params), 0};
}

NetworkParams init_network(const NetworkSpec& spec) {
    check_spec(spec);
    Rng root(spec.seed);

    NetworkParams params;
    params.spec = spec;
    int fan_in = spec.input_size;
    for (std::size_t l = 0; l < spec.hidden_sizes.size(); ++l) {
        const int width = spec.hidden_sizes[l];
        DenseLayer layer;
        layer.weight.resize(width, fan_in);
        // uniform with variance 2 / fan_in
        const double bound = std::sqrt(6.0 / fan_in);
        Rng stream = root.fork(l);
        for (int r = 0; r < width; ++r)
            for (int c = 0; c < fan_in; ++c) layer.weight(r, c) = stream.symmetric_uniform(bound);
        layer.bias = Eigen::VectorXd::Zero(width);
        if (spec.batch_norm[l]) {
            layer.bn = BatchNormState{Eigen::VectorXd::Ones(width), Eigen::VectorXd::Zero(width),
                                      Eigen::VectorXd::Zero(width), Eigen::VectorXd::Ones(width)};
        }
        params.hidden.push_back(std::move(layer));
        fan_in = width;
    }
    params.output.weight.resize(spec.output_size, fan_in);
    const double bound = std::sqrt(6.0 / fan_in);
    Rng stream = root.fork(spec.hidden_sizes.size());
    for (int r = 0; r < spec.output_size; ++r)
        for (int c = 0; c < fan_in; ++c) params.output.weight(r, c) = stream.symmetric_uniform(bound);
    params.output.bias = Eigen::VectorXd::Zero(spec.output_size);
    return params;
}

Eigen::MatrixXd forward(NetworkParams& params, const Eigen::MatrixXd& batch, RunMode mode,
                        ForwardCache* cache) {
    if (batch.cols() != params.spec.input_size)
        throw std::invalid_argument("forward: batch width " + std::to_string(batch.cols()) +
                                    " != input size " + std::to_string(params.spec.input_size));
    if (cache) {
        cache->layers.assign(params.hidden.size(), {});
        cache->step_stamp = params.step_count;
        cache->batch_rows = batch.rows();
    }

    Eigen::MatrixXd x = batch;
    for (std::size_t l = 0; l < params.hidden.size(); ++l) {
        auto& layer = params.hidden[l];
        ForwardCache::LayerCache* lc = cache ? &cache->layers[l] : nullptr;
        if (lc) lc->input = x;

        Eigen::MatrixXd z = affine(layer, x);
        if (lc) lc->pre_norm = z;

        if (layer.bn) {
            auto& bn = *layer.bn;
            Eigen::VectorXd mean, var;
            if (mode == RunMode::train) {
                const double rows = static_cast<double>(z.rows());
                mean = z.colwise().mean();
                var = (z.rowwise() - mean.transpose()).array().square().colwise().mean();
                bn.running_mean = kBnMomentum * bn.running_mean + (1.0 - kBnMomentum) * mean;
                bn.running_var = kBnMomentum * bn.running_var + (1.0 - kBnMomentum) * var;
                (void)rows;
            } else {
                mean = bn.running_mean;
                var = bn.running_var;
            }
            Eigen::ArrayXd inv_std = (var.array() + kBnEpsilon).sqrt().inverse();
            Eigen::MatrixXd xhat =
                ((z.rowwise() - mean.transpose()).array().rowwise() * inv_std.transpose()).matrix();
            if (lc) {
                lc->normalized = xhat;
                lc->batch_mean = mean;
                lc->batch_var = var;
            }
            z = (xhat.array().rowwise() * bn.gamma.transpose().array()).matrix().rowwise() +
                bn.beta.transpose();
        }
        x = z.cwiseMax(0.0);
        if (lc) lc->activated = x;
    }

    if (cache) cache->output_input = x;
    Eigen::MatrixXd out = sigmoid(affine(params.output, x));
    if (cache) cache->outputs = out;
    return out;
}

Eigen::MatrixXd forward(const NetworkParams& params, const Eigen::MatrixXd& batch) {
    return forward(const_cast<NetworkParams&>(params), batch, RunMode::infer, nullptr);
}

double mse_loss(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) {
    if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols())
        throw std::invalid_argument("mse_loss: shape mismatch");
    const double denom = static_cast<double>(outputs.rows()) * static_cast<double>(outputs.cols());
    return (outputs - targets).squaredNorm() / denom;
}

Gradients backward(const NetworkParams& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& targets) {
    if (cache.step_stamp != params.step_count)
        throw std::logic_error("backward: cache is stale (params stepped since forward)");
    if (cache.outputs.rows() != targets.rows() || cache.outputs.cols() != targets.cols())
        throw std::invalid_argument("backward: target shape mismatch");

    Gradients grads = ParamTensors::zeros_like(params);
    const double denom =
        static_cast<double>(targets.rows()) * static_cast<double>(targets.cols());

    // d loss / d sigmoid-input
    Eigen::MatrixXd d_z = (2.0 / denom) * (cache.outputs - targets).array() *
                          cache.outputs.array() * (1.0 - cache.outputs.array());

    grads.output.weight = d_z.transpose() * cache.output_input;
    grads.output.bias = d_z.colwise().sum();
    Eigen::MatrixXd d_x = d_z * params.output.weight;

    for (std::size_t li = params.hidden.size(); li-- > 0;) {
        const auto& layer = params.hidden[li];
        const auto& lc = cache.layers[li];

        // rectifier gate
        Eigen::MatrixXd d_h =
            (d_x.array() * (lc.activated.array() > 0.0).cast<double>()).matrix();

        Eigen::MatrixXd d_pre;
        if (layer.bn) {
            const auto& bn = *layer.bn;
            const double rows = static_cast<double>(d_h.rows());
            Eigen::ArrayXd inv_std = (lc.batch_var.array() + kBnEpsilon).sqrt().inverse();

            grads.hidden[li].gamma = (d_h.array() * lc.normalized.array()).colwise().sum();
            grads.hidden[li].beta = d_h.colwise().sum();

            Eigen::MatrixXd d_xhat =
                (d_h.array().rowwise() * bn.gamma.transpose().array()).matrix();
            Eigen::MatrixXd centered = lc.pre_norm.rowwise() - lc.batch_mean.transpose();

            Eigen::ArrayXd d_var = (d_xhat.array() * centered.array()).colwise().sum().transpose() *
                                   (-0.5) * inv_std.pow(3);
            Eigen::ArrayXd d_mean =
                (d_xhat.array().rowwise() * (-inv_std).transpose()).colwise().sum().transpose() +
                d_var * (-2.0 / rows) * centered.array().colwise().sum().transpose();

            d_pre = ((d_xhat.array().rowwise() * inv_std.transpose()) +
                     (centered.array().rowwise() * (2.0 / rows * d_var).transpose()))
                        .matrix();
            d_pre = (d_pre.array().rowwise() + (d_mean / rows).transpose()).matrix();
        } else {
            d_pre = d_h;
        }

        grads.hidden[li].weight = d_pre.transpose() * lc.input;
        grads.hidden[li].bias = d_pre.colwise().sum();
        if (li > 0) d_x = d_pre * layer.weight;
    }
    return grads;
}

namespace {

void adam_update(Eigen::Ref<Eigen::MatrixXd> p, const Eigen::MatrixXd& g, Eigen::MatrixXd& m,
                 Eigen::MatrixXd& v, const TrainConfig& c, double bias1, double bias2) {
    m = c.adam_beta1 * m + (1.0 - c.adam_beta1) * g;
    v = (c.adam_beta2 * v.array() + (1.0 - c.adam_beta2) * g.array().square()).matrix();
    p.array() -=
        c.learning_rate * (m.array() / bias1) / ((v.array() / bias2).sqrt() + c.adam_epsilon);
}

void adam_update_vec(Eigen::Ref<Eigen::VectorXd> p, const Eigen::VectorXd& g, Eigen::VectorXd& m,
                     Eigen::VectorXd& v, const TrainConfig& c, double bias1, double bias2) {
    m = c.adam_beta1 * m + (1.0 - c.adam_beta1) * g;
    v = (c.adam_beta2 * v.array() + (1.0 - c.adam_beta2) * g.array().square()).matrix();
    p.array() -=
        c.learning_rate * (m.array() / bias1) / ((v.array() / bias2).sqrt() + c.adam_epsilon);
}

}  // namespace

void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config) {
    state.t += 1;
    const double bias1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(state.t));

    for (std::size_t l = 0; l < params.hidden.size(); ++l) {
        auto& layer = params.hidden[l];
        adam_update(layer.weight, grads.hidden[l].weight, state.m.hidden[l].weight,
                    state.v.hidden[l].weight, config, bias1, bias2);
        adam_update_vec(layer.bias, grads.hidden[l].bias, state.m.hidden[l].bias,
                        state.v.hidden[l].bias, config, bias1, bias2);
        if (layer.bn) {
            adam_update_vec(layer.bn->gamma, grads.hidden[l].gamma, state.m.hidden[l].gamma,
                            state.v.hidden[l].gamma, config, bias1, bias2);
            adam_update_vec(layer.bn->beta, grads.hidden[l].beta, state.m.hidden[l].beta,
                            state.v.hidden[l].beta, config, bias1, bias2);
        }
    }
    adam_update(params.output.weight, grads.output.weight, state.m.output.weight,
                state.v.output.weight, config, bias1, bias2);
    adam_update_vec(params.output.bias, grads.output.bias, state.m.output.bias,
                    state.v.output.bias, config, bias1, bias2);
    params.step_count += 1;
}

void dataset_to_matrices(const Dataset& dataset, Eigen::MatrixXd& inputs,
                         Eigen::MatrixXd& targets) {
    if (dataset.samples.empty()) throw ConfigError("dataset_to_matrices: empty dataset");
    const auto m = dataset.samples.front().reports.rows();
    const auto n = dataset.samples.front().reports.cols();
    inputs.resize(static_cast<Eigen::Index>(dataset.samples.size()),
                  static_cast<Eigen::Index>(m * n));
    targets.resize(static_cast<Eigen::Index>(dataset.samples.size()),
                   static_cast<Eigen::Index>(m));
    for (std::size_t s = 0; s < dataset.samples.size(); ++s) {
        const auto& sample = dataset.samples[s];
        if (sample.reports.rows() != m || sample.reports.cols() != n)
            throw ConfigError("dataset_to_matrices: mixed sample dimensions");
        const auto row = static_cast<Eigen::Index>(s);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                inputs(row, static_cast<Eigen::Index>(i * n + j)) = sample.reports.at(i, j);
        for (std::size_t i = 0; i < m; ++i)
            targets(row, static_cast<Eigen::Index>(i)) = sample.truth[i];
    }
}

TrainResult train(const Dataset& train_data, const NetworkSpec& spec, const TrainConfig& config,
                  const Dataset* holdout) {
    if (train_data.samples.empty()) throw ConfigError("train: empty training set");
    if (config.epochs < 1 || config.batch_size < 1 || config.learning_rate <= 0.0)
        throw ConfigError("train: epochs, batch_size and learning_rate must be positive");

    Eigen::MatrixXd inputs, targets;
    dataset_to_matrices(train_data, inputs, targets);
    if (inputs.cols() != spec.input_size || targets.cols() != spec.output_size)
        throw ConfigError("train: dataset dimensions disagree with the network spec");

    Eigen::MatrixXd holdout_in, holdout_tgt;
    if (holdout) dataset_to_matrices(*holdout, holdout_in, holdout_tgt);

    NetworkParams params = init_network(spec);
    AdamState opt = AdamState::init(params);
    const Rng shuffle_root(config.shuffle_seed);

    const auto count = static_cast<std::size_t>(inputs.rows());
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);

    TrainHistory history;
    Eigen::MatrixXd batch_x, batch_y;
    ForwardCache cache;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle = shuffle_root.fork(static_cast<std::uint64_t>(epoch));
        for (std::size_t i = count - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(shuffle.uniform_below(i + 1));
            std::swap(order[i], order[j]);
        }

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < count; start += static_cast<std::size_t>(config.batch_size)) {
            const auto rows = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size),
                                                    count - start);
            batch_x.resize(static_cast<Eigen::Index>(rows), inputs.cols());
            batch_y.resize(static_cast<Eigen::Index>(rows), targets.cols());
            for (std::size_t r = 0; r < rows; ++r) {
                batch_x.row(static_cast<Eigen::Index>(r)) =
                    inputs.row(static_cast<Eigen::Index>(order[start + r]));
                batch_y.row(static_cast<Eigen::Index>(r)) =
                    targets.row(static_cast<Eigen::Index>(order[start + r]));
            }
            forward(params, batch_x, RunMode::train, &cache);
            loss_sum += mse_loss(cache.outputs, batch_y) * static_cast<double>(rows);
            const Gradients grads = backward(params, cache, batch_y);
            adam_step(params, grads, opt, config);
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(count);
        if (holdout) {
            const Eigen::MatrixXd out = forward(params, holdout_in);
            stats.holdout_loss = mse_loss(out, holdout_tgt);
            std::size_t correct = 0;
            for (Eigen::Index r = 0; r < out.rows(); ++r) {
                bool all = true;
                for (Eigen::Index c = 0; c < out.cols(); ++c)
                    all = all && ((out(r, c) >= 0.5 ? 1.0 : 0.0) == holdout_tgt(r, c));
                correct += all;
            }
            stats.holdout_accuracy = static_cast<double>(correct) / static_cast<double>(out.rows());
        }
        history.push_back(stats);
        if (config.early_stop_loss > 0.0 && stats.train_loss < config.early_stop_loss) break;
    }
    return TrainResult{std::move(params), std::move(history)};
}

FusionDecision predict(const NetworkParams& params, const ReportMatrix& reports) {
    const auto m = reports.rows(), n = reports.cols();
    if (static_cast<int>(m * n) != params.spec.input_size ||
        static_cast<int>(m) != params.spec.output_size)
        throw std::invalid_argument("predict: report dimensions disagree with the network spec");

    Eigen::MatrixXd x(1, static_cast<Eigen::Index>(m * n));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            x(0, static_cast<Eigen::Index>(i * n + j)) = reports.at(i, j);
    const Eigen::MatrixXd out = forward(params, x);

    std::vector<Bit> est(m);
    std::vector<double> scores(m);
    for (std::size_t i = 0; i < m; ++i) {
        scores[i] = out(0, static_cast<Eigen::Index>(i));
        est[i] = scores[i] >= 0.5 ? 1 : 0;
    }
    return FusionDecision{StateVector(std::move(est)), std::move(scores), "dl"};
}

std::vector<StateVector> predict_batch(const NetworkParams& params, const Dataset& dataset) {
    Eigen::MatrixXd inputs, targets;
    dataset_to_matrices(dataset, inputs, targets);
    if (inputs.cols() != params.spec.input_size)
        throw std::invalid_argument("predict_batch: dataset width disagrees with the spec");
    const Eigen::MatrixXd out = forward(params, inputs);
    std::vector<StateVector> result;
    result.reserve(static_cast<std::size_t>(out.rows()));
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        std::vector<Bit> bits(static_cast<std::size_t>(out.cols()));
        for (Eigen::Index c = 0; c < out.cols(); ++c)
            bits[static_cast<std::size_t>(c)] = out(r, c) >= 0.5 ? 1 : 0;
        result.emplace_back(std::move(bits));
    }
    return result;
}

namespace {

double loss_for_params(NetworkParams& params, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    ForwardCache cache;
    forward(params, x, RunMode::train, &cache);
    return mse_loss(cache.outputs, y);
}

double rel_error(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-5});
    return std::abs(a - b) / scale;
}

double check_tensor(NetworkParams& params, double* data, const double* analytic, Eigen::Index size,
                    const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    constexpr double h = 1e-5;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < size; ++i) {
        const double saved = data[i];
        data[i] = saved + h;
        const double up = loss_for_params(params, x, y);
        data[i] = saved - h;
        const double down = loss_for_params(params, x, y);
        data[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        worst = std::max(worst, rel_error(analytic[i], numeric));
    }
    return worst;
}

}  // namespace

GradientCheckReport gradient_check(const NetworkSpec& spec, double tolerance) {
    check_spec(spec);
    std::size_t param_count = 0;
    int fan_in = spec.input_size;
    for (std::size_t l = 0; l < spec.hidden_sizes.size(); ++l) {
        param_count += static_cast<std::size_t>(spec.hidden_sizes[l]) *
                           static_cast<std::size_t>(fan_in) +
                       static_cast<std::size_t>(spec.hidden_sizes[l]) * (spec.batch_norm[l] ? 3 : 1);
        fan_in = spec.hidden_sizes[l];
    }
    param_count += static_cast<std::size_t>(spec.output_size) * static_cast<std::size_t>(fan_in + 1);
    if (param_count > 10000)
        throw CapacityError("gradient_check: spec has " + std::to_string(param_count) +
                            " parameters; finite differences are capped at 10000");

    NetworkParams params = init_network(spec);

    constexpr int kBatch = 16;
    Rng data_rng(spec.seed ^ 0x5eedULL);
    Eigen::MatrixXd x(kBatch, spec.input_size), y(kBatch, spec.output_size);
    for (Eigen::Index r = 0; r < x.rows(); ++r)
        for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = data_rng.bernoulli(0.5) ? 1.0 : 0.0;
    for (Eigen::Index r = 0; r < y.rows(); ++r)
        for (Eigen::Index c = 0; c < y.cols(); ++c) y(r, c) = data_rng.bernoulli(0.5) ? 1.0 : 0.0;

    ForwardCache cache;
    forward(params, x, RunMode::train, &cache);
    const Gradients grads = backward(params, cache, y);

    GradientCheckReport report;
    auto add = [&](int layer, const char* name, double worst) {
        report.groups.push_back({layer, name, worst});
        report.worst = std::max(report.worst, worst);
    };
    for (std::size_t l = 0; l < params.hidden.size(); ++l) {
        auto& layer = params.hidden[l];
        add(static_cast<int>(l), "weight",
            check_tensor(params, layer.weight.data(), grads.hidden[l].weight.data(),
                         layer.weight.size(), x, y));
        add(static_cast<int>(l), "bias",
            check_tensor(params, layer.bias.data(), grads.hidden[l].bias.data(),
                         layer.bias.size(), x, y));
        if (layer.bn) {
            add(static_cast<int>(l), "gamma",
                check_tensor(params, layer.bn->gamma.data(), grads.hidden[l].gamma.data(),
                             layer.bn->gamma.size(), x, y));
            add(static_cast<int>(l), "beta",
                check_tensor(params, layer.bn->beta.data(), grads.hidden[l].beta.data(),
                             layer.bn->beta.size(), x, y));
        }
    }
    add(-1, "weight",
        check_tensor(params, params.output.weight.data(), grads.output.weight.data(),
                     params.output.weight.size(), x, y));
    add(-1, "bias",
        check_tensor(params, params.output.bias.data(), grads.output.bias.data(),
                     params.output.bias.size(), x, y));

    report.passed = report.worst < tolerance;
    return report;
}

}  // namespace byzfuse
