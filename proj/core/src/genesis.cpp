#include "byzfuse/genesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>

namespace byzfuse {

namespace {

// fork tags inside one sample stream
constexpr std::uint64_t kStateStream = 1;
constexpr std::uint64_t kHonestyStream = 2;
constexpr std::uint64_t kFakeStream = 3;
constexpr std::uint64_t kCellStreamBase = 16;
// dataset-level tags for the frozen-class honesty machinery
constexpr std::uint64_t kFrozenCountTag = 0xb1a5edc0de;
constexpr std::uint64_t kCorruptionOrderTag = 0xc0de0d0e;

std::string format_two(const char* prefix, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%.2f", prefix, v);
    return buf;
}

std::string format_int(const char* prefix, int v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%02d", prefix, v);
    return buf;
}

/// Uniform size-k subset of {0..n-1} marked false (Byzantine).
std::vector<bool> byzantine_subset(int n, int k, Rng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    std::vector<bool> honest(static_cast<std::size_t>(n), true);
    for (int i = 0; i < k; ++i) honest[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = false;
    return honest;
}

}  // namespace

const ScenarioConfig* Dataset::find_config(const std::string& label) const {
    for (const auto& c : configs)
        if (c.label == label) return &c;
    return nullptr;
}

StateVector sample_state_vector(const StatePrior& prior, int m, Rng& rng) {
    if (m < 1) throw std::invalid_argument("sample_state_vector: m must be >= 1");
    std::vector<Bit> bits(static_cast<std::size_t>(m));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, IidPrior>) {
                for (auto& b : bits) b = rng.bernoulli(p.p0) ? 0 : 1;
            } else {
                bits[0] = rng.bernoulli(p.initial_p0) ? 0 : 1;
                for (int i = 1; i < m; ++i) {
                    const Bit prev = bits[static_cast<std::size_t>(i - 1)];
                    bits[static_cast<std::size_t>(i)] =
                        rng.bernoulli(p.rho) ? prev : static_cast<Bit>(1 - prev);
                }
            }
        },
        prior);
    return StateVector(std::move(bits));
}

HonestyVector sample_honesty(const HonestyModel& model, int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_honesty: n must be >= 1");
    std::vector<bool> honest(static_cast<std::size_t>(n), true);
    std::visit(
        [&](const auto& mdl) {
            using T = std::decay_t<decltype(mdl)>;
            if constexpr (std::is_same_v<T, IndependentAlpha>) {
                for (int j = 0; j < n; ++j)
                    honest[static_cast<std::size_t>(j)] = !rng.bernoulli(mdl.alpha);
            } else if constexpr (std::is_same_v<T, UnconstrainedMaxEntropy>) {
                for (int j = 0; j < n; ++j)
                    honest[static_cast<std::size_t>(j)] = !rng.bernoulli(0.5);
            } else if constexpr (std::is_same_v<T, FixedK>) {
                if (mdl.k < 0 || mdl.k > n) throw ConfigError("sample_honesty: k out of range");
                honest = byzantine_subset(n, mdl.k, rng);
            } else {
                // uniform over all vectors with Byzantine count < h: pick the
                // count with weight C(n,c), then a uniform subset of that size
                if (mdl.h < 1 || mdl.h > n + 1) throw ConfigError("sample_honesty: h out of range");
                std::vector<double> w(static_cast<std::size_t>(mdl.h));
                double binom = 1.0, total = 0.0;
                for (int c = 0; c < mdl.h; ++c) {
                    w[static_cast<std::size_t>(c)] = binom;
                    total += binom;
                    binom = binom * (n - c) / (c + 1);
                }
                double u = rng.next_double() * total;
                int count = mdl.h - 1;
                for (int c = 0; c < mdl.h; ++c) {
                    if (u < w[static_cast<std::size_t>(c)]) {
                        count = c;
                        break;
                    }
                    u -= w[static_cast<std::size_t>(c)];
                }
                honest = byzantine_subset(n, count, rng);
            }
        },
        model);
    return HonestyVector(std::move(honest));
}

Bit honest_report(Bit s_i, double epsilon, Rng& rng) {
    return rng.bernoulli(epsilon) ? static_cast<Bit>(1 - s_i) : s_i;
}

Bit byzantine_report_unsync(Bit s_i, const ChannelParams& channel, Rng& rng) {
    return rng.bernoulli(channel.p_mal) ? static_cast<Bit>(1 - s_i) : s_i;
}

Bit byzantine_report_sync(Bit fake_bit, double epsilon, Rng& rng) {
    return rng.bernoulli(epsilon) ? static_cast<Bit>(1 - fake_bit) : fake_bit;
}

namespace detail {

LabeledSample generate_sample_impl(const ScenarioConfig& config, Rng& rng,
                                   const HonestyVector* frozen_honesty) {
    const auto violations = validate_config(config);
    if (!violations.empty())
        throw ConfigError("generate_sample: invalid config '" + config.label +
                          "': " + violations.front());

    // one key per sample so repeated calls on the same stream differ
    Rng sample(rng.next_u64());
    Rng state_rng = sample.fork(kStateStream);
    Rng honesty_rng = sample.fork(kHonestyStream);

    const StateVector truth = sample_state_vector(config.state_prior, config.m, state_rng);
    const HonestyVector honesty = frozen_honesty
                                      ? *frozen_honesty
                                      : sample_honesty(config.honesty_model, config.n, honesty_rng);

    const auto* sync = std::get_if<Synchronized>(&config.attack_mode);
    std::optional<StateVector> fake;
    if (sync) {
        Rng fake_rng = sample.fork(kFakeStream);
        fake = sample_state_vector(sync->fake_prior, config.m, fake_rng);
    }

    const auto n = static_cast<std::size_t>(config.n);
    const auto m = static_cast<std::size_t>(config.m);
    ReportMatrix reports(m, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            Rng cell = sample.fork(kCellStreamBase + i * n + j);
            Bit r;
            if (honesty.honest(j)) {
                r = honest_report(truth[i], config.channel.epsilon, cell);
            } else if (sync) {
                r = byzantine_report_sync((*fake)[i], config.channel.epsilon, cell);
            } else if (config.flip_noisy_observation) {
                const Bit observed = honest_report(truth[i], config.channel.epsilon, cell);
                r = byzantine_report_unsync(observed, config.channel, cell);
            } else {
                r = byzantine_report_unsync(truth[i], config.channel, cell);
            }
            reports.set(i, j, r);
        }
    }
    return LabeledSample{std::move(reports), truth, config.label, std::move(fake)};
}

}  // namespace detail

LabeledSample generate_sample(const ScenarioConfig& config, Rng& rng) {
    return detail::generate_sample_impl(config, rng, nullptr);
}

HonestyVector frozen_class_honesty(const ScenarioConfig& config, std::size_t config_index,
                                   std::uint64_t master_seed) {
    const Rng master(master_seed);
    const int n = config.n;

    int byz_count = 0;
    std::visit(
        [&](const auto& mdl) {
            using T = std::decay_t<decltype(mdl)>;
            if constexpr (std::is_same_v<T, IndependentAlpha>) {
                byz_count = static_cast<int>(std::llround(mdl.alpha * n));
            } else if constexpr (std::is_same_v<T, FixedK>) {
                byz_count = mdl.k;
            } else if constexpr (std::is_same_v<T, UnconstrainedMaxEntropy>) {
                byz_count = static_cast<int>(std::llround(0.5 * n));
            } else {
                // realized count draw, once per class
                Rng count_rng = master.fork(config_index, kFrozenCountTag);
                const HonestyVector draw = sample_honesty(config.honesty_model, n, count_rng);
                byz_count = static_cast<int>(draw.byzantine_count());
            }
        },
        config.honesty_model);

    // nested Byzantine sets: first byz_count nodes of the dataset-wide order
    Rng order_rng = master.fork(kCorruptionOrderTag);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(order_rng.uniform_below(i + 1));
        std::swap(order[i], order[j]);
    }
    std::vector<bool> honest(static_cast<std::size_t>(n), true);
    for (int i = 0; i < byz_count; ++i)
        honest[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = false;
    return HonestyVector(std::move(honest));
}

std::vector<LabeledSample> generate_eval_samples(const ScenarioConfig& config, int count,
                                                 std::uint64_t seed,
                                                 const HonestyVector* frozen) {
    if (count < 1) throw ConfigError("generate_eval_samples: count must be >= 1");
    std::vector<LabeledSample> out;
    out.reserve(static_cast<std::size_t>(count));
    const Rng root(seed);
    for (int i = 0; i < count; ++i) {
        Rng sample_rng = root.fork(static_cast<std::uint64_t>(i));
        out.push_back(detail::generate_sample_impl(config, sample_rng, frozen));
    }
    return out;
}

Dataset build_dataset(const std::vector<ScenarioConfig>& configs, int samples_per_class,
                      std::uint64_t master_seed, const DatasetOptions& options) {
    if (configs.empty()) throw ConfigError("build_dataset: no configs");
    if (samples_per_class < 1) throw ConfigError("build_dataset: samples_per_class must be >= 1");
    const int n = configs.front().n, m = configs.front().m;
    for (const auto& c : configs) {
        if (c.n != n || c.m != m)
            throw ConfigError("build_dataset: mixed (n, m) across configs");
        const auto v = validate_config(c);
        if (!v.empty())
            throw ConfigError("build_dataset: invalid config '" + c.label + "': " + v.front());
        const auto same =
            std::count_if(configs.begin(), configs.end(),
                          [&](const ScenarioConfig& o) { return o.label == c.label; });
        if (same != 1) throw ConfigError("build_dataset: duplicate label '" + c.label + "'");
    }

    Dataset ds;
    ds.configs = configs;
    ds.master_seed = master_seed;
    ds.samples.reserve(configs.size() * static_cast<std::size_t>(samples_per_class));
    const Rng master(master_seed);
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        std::optional<HonestyVector> frozen;
        if (options.freeze_honesty_per_class)
            frozen = frozen_class_honesty(configs[ci], ci, master_seed);
        for (int si = 0; si < samples_per_class; ++si) {
            Rng sample_rng = master.fork(ci, static_cast<std::uint64_t>(si));
            ds.samples.push_back(detail::generate_sample_impl(
                configs[ci], sample_rng, frozen ? &*frozen : nullptr));
        }
    }
    return ds;
}

std::vector<ScenarioConfig> global_recipe(int n, int m) {
    if (n < 1 || m < 1) throw ConfigError("global_recipe: n and m must be >= 1");
    std::vector<ScenarioConfig> out;
    const ChannelParams base{0.1, 1.0};

    auto push = [&](ScenarioConfig c) {
        c.n = n;
        c.m = m;
        out.push_back(std::move(c));
    };

    // unsynchronized i.i.d. alpha sweep, step 0.05
    for (int i = 0; i <= 20; ++i) {
        const double a = i * 5 / 100.0;
        ScenarioConfig c;
        c.honesty_model = IndependentAlpha{a};
        c.channel = base;
        c.label = format_two("iid-alpha-", a);
        push(std::move(c));
    }
    // synchronized i.i.d. sweep: honest-majority regime
    for (int i = 1; i <= 9; ++i) {
        const double a = i * 5 / 100.0;
        ScenarioConfig c;
        c.honesty_model = IndependentAlpha{a};
        c.attack_mode = Synchronized{IidPrior{0.5}};
        c.channel = base;
        c.label = format_two("sync-alpha-", a);
        push(std::move(c));
    }
    // unbalanced priors (alpha and P_mal as in the three-case comparison)
    for (const double p0 : {0.3, 0.7}) {
        ScenarioConfig c;
        c.state_prior = IidPrior{p0};
        c.honesty_model = IndependentAlpha{0.4};
        c.channel = {0.1, 0.1};
        c.label = format_two("prior-p0-", p0);
        push(std::move(c));
    }
    // fixed Byzantine counts
    for (int k = 1; k <= n; ++k) {
        ScenarioConfig c;
        c.honesty_model = FixedK{k};
        c.channel = {0.1, 0.1};
        c.label = format_int("fixed-k-", k);
        push(std::move(c));
    }
    // bounded maximum entropy, h in {n/4, n/3, n/2} floored and deduped
    std::vector<int> hs;
    for (const int h : {n / 4, n / 3, n / 2}) {
        const int hc = std::max(1, h);
        if (std::find(hs.begin(), hs.end(), hc) == hs.end()) hs.push_back(hc);
    }
    for (const int h : hs) {
        ScenarioConfig c;
        c.honesty_model = MaxEntropyBounded{h};
        c.channel = base;
        c.label = format_int("maxent-h-", h);
        push(std::move(c));
    }
    // Markov state persistence sweep, step 0.1
    for (int i = 0; i <= 10; ++i) {
        const double rho = i / 10.0;
        ScenarioConfig c;
        c.state_prior = MarkovPrior{rho, 0.5};
        c.honesty_model = IndependentAlpha{0.3};
        c.channel = base;
        c.label = format_two("markov-rho-", rho);
        push(std::move(c));
    }
    // adaptive attack strength sweep, step 0.1
    for (int i = 1; i <= 10; ++i) {
        const double pm = i / 10.0;
        ScenarioConfig c;
        c.honesty_model = IndependentAlpha{0.4};
        c.channel = {0.1, pm};
        c.label = format_two("pmal-", pm);
        push(std::move(c));
    }
    return out;
}

Dataset build_global_dataset(int n, int m, int samples_per_class, std::uint64_t master_seed,
                             const DatasetOptions& options) {
    return build_dataset(global_recipe(n, m), samples_per_class, master_seed, options);
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double train_fraction,
                                          Rng& rng) {
    if (dataset.samples.empty()) throw ConfigError("split_dataset: empty dataset");
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw ConfigError("split_dataset: train_fraction must be in (0, 1)");

    const std::size_t count = dataset.samples.size();
    const auto train_count =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(count) + 1e-9));

    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = count - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_below(i + 1));
        std::swap(idx[i], idx[j]);
    }
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(train_count));
    std::sort(idx.begin() + static_cast<std::ptrdiff_t>(train_count), idx.end());

    Dataset train{dataset.configs, {}, dataset.master_seed};
    Dataset test{dataset.configs, {}, dataset.master_seed};
    train.samples.reserve(train_count);
    test.samples.reserve(count - train_count);
    for (std::size_t i = 0; i < count; ++i) {
        (i < train_count ? train : test).samples.push_back(dataset.samples[idx[i]]);
    }
    return {std::move(train), std::move(test)};
}

}  // namespace byzfuse
