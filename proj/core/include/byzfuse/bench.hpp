#ifndef BYZFUSE_BENCH_HPP
#define BYZFUSE_BENCH_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "byzfuse/genesis.hpp"
#include "byzfuse/metrics.hpp"
#include "byzfuse/neural.hpp"
#include "byzfuse/types.hpp"

namespace byzfuse {

inline constexpr const char* kVersion = "0.1.0";

/// Scenario grid plus run protocol. Scenario families expand to one
/// ScenarioConfig each, mirroring the global-recipe structure.
struct ExperimentPlan {
    int schema_version = 1;
    int n = 20;
    int m = 4;
    double epsilon = 0.1;

    std::vector<double> alphas;       // unsynchronized i.i.d. sweep at pmal_default
    std::vector<double> sync_alphas;  // synchronized sweep
    std::vector<int> ks;              // fixed-k family (p_mal = fixed_pmal)
    std::vector<int> hs;              // bounded max-entropy family
    std::vector<double> rhos;         // Markov family (alpha = markov_alpha)
    std::vector<double> p0s;          // unbalanced-prior family
    std::vector<double> pmals;        // adaptive family (alpha = adaptive_alpha)

    double pmal_default = 1.0;
    double fixed_pmal = 0.1;
    double markov_alpha = 0.3;
    double adaptive_alpha = 0.4;
    double unbalanced_alpha = 0.4;
    double unbalanced_pmal = 0.1;

    bool flip_noisy_observation = false;
    bool freeze_honesty_per_class = false;

    std::vector<std::string> rules;  // subset of {maj, hardis, softis, opt, opt-sync, dl}
    int samples_per_class = 200;
    std::uint64_t seed = 1;
    double train_fraction = 0.8;
    /// Fresh Monte Carlo samples per config for evaluation; 0 evaluates on
    /// the config's share of the test split.
    int eval_samples = 0;

    bool paper_architecture = false;
    TrainConfig train;

    std::string out_dir;
    std::string hardware_note;
};

ExperimentPlan load_plan(const std::filesystem::path& path);
void save_plan(const ExperimentPlan& plan, const std::filesystem::path& path);
std::vector<ScenarioConfig> expand_plan(const ExperimentPlan& plan);

struct ResultRow {
    std::string config_label;
    std::string rule;
    double pe = 0.0, ber = 0.0, per_bit_error = 0.0, accuracy = 0.0;
    double stderr_pe = 0.0, stderr_per_bit = 0.0;
    std::size_t sample_count = 0;
    double wall_seconds = 0.0;  // manifest only; kept out of results.csv
};

struct RunOutput {
    std::vector<ResultRow> rows;
    std::optional<std::filesystem::path> results_csv;
    std::optional<std::filesystem::path> manifest_json;
};

/// Generate, (optionally) train, evaluate every (config, rule) pair and
/// write results.csv (deterministic) plus a run manifest (timings, env).
RunOutput run_experiment(const ExperimentPlan& plan);

// --- paper-table reproduction -------------------------------------------

enum class AnchorMode { display, two_sided, upper };

struct ReferenceValue {
    std::string table;     // "table1" | "table2"
    std::string scenario;  // config label
    std::string rule;
    double paper_value = 0.0;
    AnchorMode mode = AnchorMode::display;
    double bound = 0.0;  // tolerance (two_sided) or upper limit (upper)
};

std::vector<ReferenceValue> load_reference_values(const std::filesystem::path& path);

struct TableCell {
    std::string scenario;
    std::string rule;
    double measured = 0.0;      // per-bit error
    double stderr_value = 0.0;
    std::size_t decisions = 0;
    std::optional<ReferenceValue> reference;
    /// set only for anchored cells: pass/fail, or nullopt when refused
    /// because the standard error exceeds half the tolerance band
    std::optional<bool> passed;
    bool refused = false;
};

struct TableReport {
    std::string table;
    std::vector<TableCell> cells;
    bool all_anchors_passed = true;
};

struct TableOptions {
    int samples = 12500;  // Monte Carlo samples per cell (decisions = samples * m)
    std::uint64_t seed = 1;
    std::filesystem::path reference_file;  // empty = compiled-in default path
    std::string out_dir;
};

/// Monte Carlo reproduction of one paper table (classical rules) against
/// the embedded reference values. Generation uses the observation-flip
/// Byzantine channel; the MAP rule receives the matching effective
/// channel. Refuses to run below 10,000 decisions per cell.
TableReport reproduce_table(const std::string& which, const TableOptions& options);

/// The per-table scenario list (n = 20, eps = 0.1, P_mal = 1.0).
std::vector<ScenarioConfig> table_scenarios(const std::string& which);

// --- sweeps ----------------------------------------------------------------

struct SweepAlphaOptions {
    int n = 20, m = 4;
    std::vector<double> rhos;  // Markov families; empty = i.i.d. only
    int samples_per_class = 200;
    std::uint64_t seed = 1;
    int eval_samples = 500;
    bool paper_architecture = false;
    TrainConfig train;
    std::string out_dir;
};

struct SweepAlphaRow {
    std::string family;
    double alpha = 0.0;
    double pe = 0.0, ber = 0.0, accuracy = 0.0;
    double final_train_loss = 0.0;
};

std::vector<SweepAlphaRow> sweep_alpha(const SweepAlphaOptions& options);

struct SweepGridOptions {
    std::vector<int> ns{10, 20};
    std::vector<int> ms{4};
    int samples_per_class = 200;
    std::uint64_t seed = 1;
    bool paper_architecture = false;
    TrainConfig train;
    std::string out_dir;
    // desk budget caps; exceeding them raises CapacityError listing points
    int max_points = 9;
    int max_input_size = 1200;
};

struct SweepGridRow {
    int n = 0, m = 0;
    double pe = 0.0, ber = 0.0, accuracy = 0.0;
    double final_train_loss = 0.0;
};

std::vector<SweepGridRow> sweep_window_and_size(const SweepGridOptions& options);

struct SweepSamplesOptions {
    std::vector<int> counts{50, 100, 250};
    int n = 20, m = 4;
    std::uint64_t seed = 1;
    bool paper_architecture = false;
    TrainConfig train;
    std::string out_dir;
};

struct SweepSamplesRow {
    int samples_per_class = 0;
    double pe = 0.0, ber = 0.0, accuracy = 0.0;
    double final_train_loss = 0.0;
};

std::vector<SweepSamplesRow> sweep_samples_per_class(const SweepSamplesOptions& options);

// --- timing ----------------------------------------------------------------

struct TimingReport {
    double train_seconds = 0.0;
    double inference_total_seconds = 0.0;
    double inference_per_sample_seconds = 0.0;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::string hardware_note;
    // hardware-specific paper figures, shown for reference only
    double paper_train_seconds = 431.5482;
    double paper_inference_per_sample_seconds = 1.048e-5;
};

struct TimingOptions {
    int n = 20, m = 4;
    int samples_per_class = 200;
    std::uint64_t seed = 1;
    bool paper_architecture = false;
    TrainConfig train;
    std::string hardware_note;
    std::string out_dir;
};

TimingReport timing_report(const TimingOptions& options);

// --- helpers shared with the CLI and tests ---------------------------------

/// Assumed Byzantine fraction a rule without honesty knowledge should use
/// for a model (expected count / n).
double assumed_alpha_for(const HonestyModel& model, int n);

/// Apply one named classical rule to a sample; "dl" is handled separately.
StateVector apply_classical_rule(const std::string& rule, const LabeledSample& sample,
                                 const ScenarioConfig& config);

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

}  // namespace byzfuse

#endif
