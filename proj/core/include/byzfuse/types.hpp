#ifndef BYZFUSE_TYPES_HPP
#define BYZFUSE_TYPES_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace byzfuse {

using Bit = std::uint8_t;

/// Raised when a ScenarioConfig (or a derived input) is unusable.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a request exceeds a documented capacity limit
/// (e.g. the 2^m MAP enumeration window).
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hidden binary system state over an observation window of length m.
class StateVector {
public:
    explicit StateVector(std::vector<Bit> bits);
    static StateVector zeros(std::size_t m);
    static StateVector from_string(const std::string& s);  // "0110"

    std::size_t size() const { return bits_.size(); }
    Bit operator[](std::size_t i) const { return bits_[i]; }
    const std::vector<Bit>& bits() const { return bits_; }
    std::string to_string() const;
    StateVector complement() const;

    bool operator==(const StateVector&) const = default;

private:
    std::vector<Bit> bits_;
};

/// m x n binary report matrix. Row i = time step, column j = node.
class ReportMatrix {
public:
    ReportMatrix(std::size_t m, std::size_t n);
    ReportMatrix(std::size_t m, std::size_t n, std::vector<Bit> row_major);

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }
    Bit at(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, Bit v) { data_[i * n_ + j] = check_bit(v); }
    /// Column j gathered into a contiguous vector (length m).
    std::vector<Bit> column(std::size_t j) const;
    const std::vector<Bit>& row_major() const { return data_; }
    ReportMatrix complement() const;

    bool operator==(const ReportMatrix&) const = default;

private:
    static Bit check_bit(Bit v);
    std::size_t m_ = 0, n_ = 0;
    std::vector<Bit> data_;
};

/// Per-node honesty flags (true = honest). Produced by generators only;
/// no fusion-rule signature accepts this type.
class HonestyVector {
public:
    explicit HonestyVector(std::vector<bool> flags);

    std::size_t size() const { return flags_.size(); }
    bool honest(std::size_t j) const { return flags_[j]; }
    std::size_t byzantine_count() const;
    const std::vector<bool>& flags() const { return flags_; }

    bool operator==(const HonestyVector&) const = default;

private:
    std::vector<bool> flags_;
};

/// Honest-node error probability and Byzantine flip probability.
struct ChannelParams {
    double epsilon = 0.1;
    double p_mal = 1.0;

    bool operator==(const ChannelParams&) const = default;
};

// --- State priors -----------------------------------------------------

struct IidPrior {
    double p0 = 0.5;  // P(s_i = 0)
    bool operator==(const IidPrior&) const = default;
};

struct MarkovPrior {
    double rho = 0.5;  // persistence: P(s_i = s_{i-1})
    double initial_p0 = 0.5;
    bool operator==(const MarkovPrior&) const = default;
};

using StatePrior = std::variant<IidPrior, MarkovPrior>;

// --- Honesty models ---------------------------------------------------

struct IndependentAlpha {
    double alpha = 0.0;  // per-node Byzantine probability
    bool operator==(const IndependentAlpha&) const = default;
};

struct FixedK {
    int k = 0;  // exact Byzantine count
    bool operator==(const FixedK&) const = default;
};

struct MaxEntropyBounded {
    int h = 1;  // Byzantine count constrained to < h; uniform over feasible vectors
    bool operator==(const MaxEntropyBounded&) const = default;
};

struct UnconstrainedMaxEntropy {
    bool operator==(const UnconstrainedMaxEntropy&) const = default;
};

using HonestyModel =
    std::variant<IndependentAlpha, FixedK, MaxEntropyBounded, UnconstrainedMaxEntropy>;

// --- Attack modes -----------------------------------------------------

struct Unsynchronized {
    bool operator==(const Unsynchronized&) const = default;
};

/// All Byzantine nodes report noisy copies of one shared fake sequence
/// drawn from fake_prior.
struct Synchronized {
    StatePrior fake_prior = IidPrior{0.5};
    bool operator==(const Synchronized&) const = default;
};

using AttackMode = std::variant<Unsynchronized, Synchronized>;

/// Full generative description of one adversarial configuration.
struct ScenarioConfig {
    int n = 1;
    int m = 1;
    StatePrior state_prior = IidPrior{0.5};
    HonestyModel honesty_model = IndependentAlpha{0.0};
    AttackMode attack_mode = Unsynchronized{};
    ChannelParams channel;
    /// When set, an unsynchronized Byzantine flips its epsilon-noisy
    /// observation instead of the true state; effective flip probability
    /// becomes eps*(1-p_mal) + (1-eps)*p_mal.
    bool flip_noisy_observation = false;
    std::string label;

    bool operator==(const ScenarioConfig&) const = default;
};

/// One (R, s) pair with provenance. fake_sequence present only for
/// synchronized attacks.
struct LabeledSample {
    ReportMatrix reports;
    StateVector truth;
    std::string config_label;
    std::optional<StateVector> fake_sequence;

    bool operator==(const LabeledSample&) const = default;
};

/// Output of any fusion rule: estimate plus per-bit scores.
struct FusionDecision {
    StateVector estimate;
    std::vector<double> scores;
    std::string rule_name;
};

/// Returns every invariant violation; empty means the config is usable.
std::vector<std::string> validate_config(const ScenarioConfig& config);

/// Channel as seen by a fusion rule: identical to config.channel unless
/// flip_noisy_observation is set, in which case p_mal becomes the
/// effective mismatch probability eps*(1-p_mal) + (1-eps)*p_mal.
ChannelParams effective_channel(const ScenarioConfig& config);

/// Per-bit marginal prior P(s_i = 0), i in [0, m). Constant for IID;
/// evolves from initial_p0 for Markov.
std::vector<double> marginal_prior_p0(const StatePrior& prior, int m);

}  // namespace byzfuse

#endif
