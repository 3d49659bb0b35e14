#ifndef BYZFUSE_GENESIS_HPP
#define BYZFUSE_GENESIS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "byzfuse/rng.hpp"
#include "byzfuse/types.hpp"

namespace byzfuse {

/// A generated corpus: every sample's config_label refers to an entry of
/// configs; samples are ordered by (config index, sample index).
struct Dataset {
    std::vector<ScenarioConfig> configs;
    std::vector<LabeledSample> samples;
    std::uint64_t master_seed = 0;

    const ScenarioConfig* find_config(const std::string& label) const;
    bool operator==(const Dataset&) const = default;
};

struct DatasetOptions {
    /// Treat node roles as part of the class: each config gets one fixed
    /// Byzantine set, reused for all of its samples. The set is the first
    /// k nodes of a dataset-wide corruption order (a permutation drawn
    /// from the master seed), with k the model's expected count (realized
    /// draw for MaxEntropyBounded). Default off: generate_sample redraws
    /// honesty per sample.
    bool freeze_honesty_per_class = false;
};

// --- elementary draws ---------------------------------------------------

StateVector sample_state_vector(const StatePrior& prior, int m, Rng& rng);
HonestyVector sample_honesty(const HonestyModel& model, int n, Rng& rng);

/// Honest node: report the state with error probability epsilon.
Bit honest_report(Bit s_i, double epsilon, Rng& rng);
/// Unsynchronized Byzantine: flip the true state with probability p_mal.
Bit byzantine_report_unsync(Bit s_i, const ChannelParams& channel, Rng& rng);
/// Synchronized Byzantine: report the shared fake bit through the same
/// epsilon-noisy channel an honest node would use.
Bit byzantine_report_sync(Bit fake_bit, double epsilon, Rng& rng);

// --- sample and dataset construction -------------------------------------

LabeledSample generate_sample(const ScenarioConfig& config, Rng& rng);

Dataset build_dataset(const std::vector<ScenarioConfig>& configs, int samples_per_class,
                      std::uint64_t master_seed, const DatasetOptions& options = {});

/// The documented default recipe behind the paper-style global dataset:
/// unsynchronized i.i.d. alpha sweep, synchronized sweep, unbalanced
/// priors, fixed-k, bounded max-entropy, Markov rho sweep, and a P_mal
/// sweep. For n = 20 this yields 76 configs.
std::vector<ScenarioConfig> global_recipe(int n, int m);

Dataset build_global_dataset(int n, int m, int samples_per_class, std::uint64_t master_seed,
                             const DatasetOptions& options = {});

/// Entry-wise random split; train gets floor(train_fraction * count).
std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double train_fraction,
                                          Rng& rng);

/// The honesty assignment a frozen-class dataset uses for config_index;
/// lets callers generate fresh evaluation samples for the same class.
HonestyVector frozen_class_honesty(const ScenarioConfig& config, std::size_t config_index,
                                   std::uint64_t master_seed);

/// Fresh evaluation samples for one config, seeded independently of any
/// dataset; honesty optionally pinned to the class assignment.
std::vector<LabeledSample> generate_eval_samples(const ScenarioConfig& config, int count,
                                                 std::uint64_t seed,
                                                 const HonestyVector* frozen = nullptr);

}  // namespace byzfuse

#endif
