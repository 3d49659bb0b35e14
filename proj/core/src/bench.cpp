#include "byzfuse/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "byzfuse/fusion_classic.hpp"
#include "byzfuse/serialize.hpp"

#ifndef BYZFUSE_DATA_DIR
#define BYZFUSE_DATA_DIR "data"
#endif

namespace byzfuse {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSplitTag = 0x5011;
constexpr std::uint64_t kEvalTag = 0xe7a1;

std::string fmt2(const char* prefix, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%.2f", prefix, v);
    return buf;
}

std::string fmt_int2(const char* prefix, int v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%02d", prefix, v);
    return buf;
}

std::string num(double v) {
    if (std::isnan(v)) return "-";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void to_json(json& j, const TrainConfig& c) {
    j = json{{"epochs", c.epochs},
             {"batch_size", c.batch_size},
             {"learning_rate", c.learning_rate},
             {"adam_beta1", c.adam_beta1},
             {"adam_beta2", c.adam_beta2},
             {"adam_epsilon", c.adam_epsilon},
             {"shuffle_seed", c.shuffle_seed},
             {"early_stop_loss", c.early_stop_loss}};
}

void from_json(const json& j, TrainConfig& c) {
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
    c.shuffle_seed = j.value("shuffle_seed", c.shuffle_seed);
    c.early_stop_loss = j.value("early_stop_loss", c.early_stop_loss);
}

json plan_to_json(const ExperimentPlan& p) {
    json jt;
    to_json(jt, p.train);
    return json{{"schema_version", p.schema_version},
                {"n", p.n},
                {"m", p.m},
                {"epsilon", p.epsilon},
                {"alphas", p.alphas},
                {"sync_alphas", p.sync_alphas},
                {"ks", p.ks},
                {"hs", p.hs},
                {"rhos", p.rhos},
                {"p0s", p.p0s},
                {"pmals", p.pmals},
                {"pmal_default", p.pmal_default},
                {"fixed_pmal", p.fixed_pmal},
                {"markov_alpha", p.markov_alpha},
                {"adaptive_alpha", p.adaptive_alpha},
                {"unbalanced_alpha", p.unbalanced_alpha},
                {"unbalanced_pmal", p.unbalanced_pmal},
                {"flip_noisy_observation", p.flip_noisy_observation},
                {"freeze_honesty_per_class", p.freeze_honesty_per_class},
                {"rules", p.rules},
                {"samples_per_class", p.samples_per_class},
                {"seed", p.seed},
                {"train_fraction", p.train_fraction},
                {"eval_samples", p.eval_samples},
                {"paper_architecture", p.paper_architecture},
                {"train", jt},
                {"out_dir", p.out_dir},
                {"hardware_note", p.hardware_note}};
}

ExperimentPlan plan_from_json(const json& j) {
    ExperimentPlan p;
    const int version = j.value("schema_version", 0);
    if (version != 1)
        throw ConfigError("plan schema_version " + std::to_string(version) + " unsupported");
    p.n = j.value("n", p.n);
    p.m = j.value("m", p.m);
    p.epsilon = j.value("epsilon", p.epsilon);
    p.alphas = j.value("alphas", p.alphas);
    p.sync_alphas = j.value("sync_alphas", p.sync_alphas);
    p.ks = j.value("ks", p.ks);
    p.hs = j.value("hs", p.hs);
    p.rhos = j.value("rhos", p.rhos);
    p.p0s = j.value("p0s", p.p0s);
    p.pmals = j.value("pmals", p.pmals);
    p.pmal_default = j.value("pmal_default", p.pmal_default);
    p.fixed_pmal = j.value("fixed_pmal", p.fixed_pmal);
    p.markov_alpha = j.value("markov_alpha", p.markov_alpha);
    p.adaptive_alpha = j.value("adaptive_alpha", p.adaptive_alpha);
    p.unbalanced_alpha = j.value("unbalanced_alpha", p.unbalanced_alpha);
    p.unbalanced_pmal = j.value("unbalanced_pmal", p.unbalanced_pmal);
    p.flip_noisy_observation = j.value("flip_noisy_observation", false);
    p.freeze_honesty_per_class = j.value("freeze_honesty_per_class", false);
    p.rules = j.value("rules", p.rules);
    p.samples_per_class = j.value("samples_per_class", p.samples_per_class);
    p.seed = j.value("seed", p.seed);
    p.train_fraction = j.value("train_fraction", p.train_fraction);
    p.eval_samples = j.value("eval_samples", p.eval_samples);
    p.paper_architecture = j.value("paper_architecture", false);
    if (j.contains("train")) from_json(j.at("train"), p.train);
    p.out_dir = j.value("out_dir", std::string{});
    p.hardware_note = j.value("hardware_note", std::string{});
    return p;
}

const std::set<std::string> kKnownRules{"maj", "hardis", "softis", "opt", "opt-sync", "dl"};

std::vector<StateVector> truths_of(const std::vector<LabeledSample>& samples) {
    std::vector<StateVector> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.truth);
    return out;
}

ResultRow row_from_report(const std::string& label, const std::string& rule,
                          const MetricsReport& r, double seconds) {
    return ResultRow{label,       rule,          r.pe,           r.ber,
                     r.per_bit_error, r.accuracy, r.stderr_pe,   r.stderr_per_bit,
                     r.sample_count,  seconds};
}

}  // namespace

double assumed_alpha_for(const HonestyModel& model, int n) {
    return std::visit(
        [&](const auto& mdl) -> double {
            using T = std::decay_t<decltype(mdl)>;
            if constexpr (std::is_same_v<T, IndependentAlpha>) {
                return mdl.alpha;
            } else if constexpr (std::is_same_v<T, FixedK>) {
                return static_cast<double>(mdl.k) / n;
            } else if constexpr (std::is_same_v<T, UnconstrainedMaxEntropy>) {
                return 0.5;
            } else {
                double binom = 1.0, total = 0.0, weighted = 0.0;
                for (int c = 0; c < mdl.h; ++c) {
                    total += binom;
                    weighted += c * binom;
                    binom = binom * (n - c) / (c + 1);
                }
                return weighted / total / n;
            }
        },
        model);
}

StateVector apply_classical_rule(const std::string& rule, const LabeledSample& sample,
                                 const ScenarioConfig& config) {
    if (rule == "maj") return majority_fuse(sample.reports, config.state_prior).estimate;
    if (rule == "hardis")
        return hardis_fuse(sample.reports, config.state_prior, config.channel).estimate;
    if (rule == "softis")
        return softis_fuse(sample.reports, config.state_prior, config.channel,
                           assumed_alpha_for(config.honesty_model, config.n))
            .estimate;
    if (rule == "opt")
        return map_fuse(sample.reports, config.state_prior, config.honesty_model,
                        effective_channel(config))
            .estimate;
    if (rule == "opt-sync") {
        const auto* sync = std::get_if<Synchronized>(&config.attack_mode);
        const StatePrior fake = sync ? sync->fake_prior : config.state_prior;
        return map_fuse_sync(sample.reports, config.state_prior, fake, config.honesty_model,
                             config.channel)
            .decision.estimate;
    }
    throw ConfigError("unknown rule '" + rule + "'");
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open plan: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("unparseable plan: ") + e.what());
    }
    return plan_from_json(j);
}

void save_plan(const ExperimentPlan& plan, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write plan: " + path.string());
    out << plan_to_json(plan).dump(2) << '\n';
}

std::vector<ScenarioConfig> expand_plan(const ExperimentPlan& plan) {
    std::vector<ScenarioConfig> out;
    const ChannelParams sweep_channel{plan.epsilon, plan.pmal_default};

    auto push = [&](ScenarioConfig c) {
        c.n = plan.n;
        c.m = plan.m;
        c.flip_noisy_observation = plan.flip_noisy_observation;
        out.push_back(std::move(c));
    };

    for (double a : plan.alphas) {
        ScenarioConfig c;
        c.honesty_model = IndependentAlpha{a};
        c.channel = sweep_channel;
        c.label = fmt2("iid-alpha-", a);
        push(std::move(c));
    }
    for (double a : plan.sync_alphas) {
        ScenarioConfig c;
        c.honesty_model = IndependentAlpha{a};
        c.attack_mode = Synchronized{IidPrior{0.5}};
        c.channel = sweep_channel;
        c.label = fmt2("sync-alpha-", a);
        push(std::move(c));
    }
    for (double p0 : plan.p0s) {
        ScenarioConfig c;
        c.state_prior = IidPrior{p0};
        c.honesty_model = IndependentAlpha{plan.unbalanced_alpha};
        c.channel = {plan.epsilon, plan.unbalanced_pmal};
        c.label = fmt2("prior-p0-", p0);
        push(std::move(c));
    }
    for (int k : plan.ks) {
        ScenarioConfig c;
        c.honesty_model = FixedK{k};
        c.channel = {plan.epsilon, plan.fixed_pmal};
        c.label = fmt_int2("fixed-k-", k);
        push(std::move(c));
    }
    for (int h : plan.hs) {
        ScenarioConfig c;
        c.honesty_model = MaxEntropyBounded{h};
        c.channel = sweep_channel;
        c.label = fmt_int2("maxent-h-", h);
        push(std::move(c));
    }
    for (double rho : plan.rhos) {
        ScenarioConfig c;
        c.state_prior = MarkovPrior{rho, 0.5};
        c.honesty_model = IndependentAlpha{plan.markov_alpha};
        c.channel = sweep_channel;
        c.label = fmt2("markov-rho-", rho);
        push(std::move(c));
    }
    for (double pm : plan.pmals) {
        ScenarioConfig c;
        c.honesty_model = IndependentAlpha{plan.adaptive_alpha};
        c.channel = {plan.epsilon, pm};
        c.label = fmt2("pmal-", pm);
        push(std::move(c));
    }
    return out;
}

RunOutput run_experiment(const ExperimentPlan& plan) {
    const auto configs = expand_plan(plan);
    if (configs.empty()) throw ConfigError("run_experiment: plan expands to no configs");
    if (plan.rules.empty()) throw ConfigError("run_experiment: no rules selected");
    for (const auto& r : plan.rules)
        if (!kKnownRules.count(r)) throw ConfigError("run_experiment: unknown rule '" + r + "'");
    for (const auto& c : configs) {
        const auto v = validate_config(c);
        if (!v.empty())
            throw ConfigError("run_experiment: config '" + c.label + "': " + v.front());
    }
    const bool wants_dl =
        std::find(plan.rules.begin(), plan.rules.end(), "dl") != plan.rules.end();
    const bool wants_opt_sync =
        std::find(plan.rules.begin(), plan.rules.end(), "opt-sync") != plan.rules.end();
    if (std::find(plan.rules.begin(), plan.rules.end(), "opt") != plan.rules.end() &&
        plan.m > MapOptions{}.max_window)
        throw CapacityError("run_experiment: m exceeds the MAP enumeration window");
    if (wants_opt_sync && plan.m > SyncMapOptions{}.max_window)
        throw CapacityError("run_experiment: m exceeds the synchronized MAP window");

    const Dataset full = build_dataset(configs, plan.samples_per_class, plan.seed,
                                       {plan.freeze_honesty_per_class});

    std::optional<NetworkParams> model;
    double train_seconds = 0.0;
    Dataset train_split, test_split;
    const bool have_split = wants_dl || plan.eval_samples == 0;
    if (have_split) {
        Rng split_rng = Rng(plan.seed).fork(kSplitTag);
        std::tie(train_split, test_split) = split_dataset(full, plan.train_fraction, split_rng);
    }
    if (wants_dl) {
        if (train_split.samples.empty())
            throw ConfigError("run_experiment: dl selected but the train split is empty");
        const NetworkSpec spec = plan.paper_architecture
                                     ? NetworkSpec::paper_scale(plan.n, plan.m, plan.seed)
                                     : NetworkSpec::desk_scale(plan.n, plan.m, plan.seed);
        const double t0 = now_seconds();
        model = train(train_split, spec, plan.train).params;
        train_seconds = now_seconds() - t0;
    }

    std::vector<ResultRow> rows;
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        const auto& config = configs[ci];

        std::vector<LabeledSample> eval_set;
        if (plan.eval_samples > 0) {
            std::optional<HonestyVector> frozen;
            if (plan.freeze_honesty_per_class)
                frozen = frozen_class_honesty(config, ci, plan.seed);
            eval_set = generate_eval_samples(config, plan.eval_samples,
                                             Rng::mix(Rng::mix(plan.seed, kEvalTag), ci),
                                             frozen ? &*frozen : nullptr);
        } else {
            for (const auto& s : test_split.samples)
                if (s.config_label == config.label) eval_set.push_back(s);
        }
        if (eval_set.empty())
            throw ConfigError("run_experiment: no evaluation samples for '" + config.label + "'");
        const auto truths = truths_of(eval_set);

        for (const auto& rule : plan.rules) {
            const double t0 = now_seconds();
            std::vector<StateVector> estimates;
            estimates.reserve(eval_set.size());
            if (rule == "dl") {
                Dataset view{ {config}, eval_set, plan.seed };
                estimates = predict_batch(*model, view);
            } else {
                for (const auto& s : eval_set)
                    estimates.push_back(apply_classical_rule(rule, s, config));
            }
            const auto report = evaluate(estimates, truths);
            rows.push_back(row_from_report(config.label, rule, report, now_seconds() - t0));
        }
    }

    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.config_label, a.rule) < std::tie(b.config_label, b.rule);
    });

    RunOutput out;
    out.rows = std::move(rows);
    if (!plan.out_dir.empty()) {
        const std::filesystem::path dir(plan.out_dir);
        std::filesystem::create_directories(dir);
        const auto csv = dir / "results.csv";
        write_results_csv(out.rows, csv);
        out.results_csv = csv;

        json manifest;
        manifest["schema_version"] = 1;
        manifest["byzfuse_version"] = kVersion;
        manifest["seed"] = plan.seed;
        manifest["hardware_note"] = plan.hardware_note;
        manifest["train_seconds"] = train_seconds;
        manifest["plan"] = plan_to_json(plan);
        json timings = json::array();
        for (const auto& r : out.rows)
            timings.push_back(json{{"config", r.config_label},
                                   {"rule", r.rule},
                                   {"seconds", r.wall_seconds}});
        manifest["timings"] = std::move(timings);
        const auto mf = dir / "manifest.json";
        std::ofstream mout(mf);
        mout << manifest.dump(2) << '\n';
        out.manifest_json = mf;
    }
    return out;
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write results: " + path.string());
    out << "config,rule,pe,ber,per_bit_error,accuracy,stderr_pe,stderr_per_bit,samples\n";
    for (const auto& r : rows) {
        out << r.config_label << ',' << r.rule << ',' << num(r.pe) << ',' << num(r.ber) << ','
            << num(r.per_bit_error) << ',' << num(r.accuracy) << ',' << num(r.stderr_pe) << ','
            << num(r.stderr_per_bit) << ',' << r.sample_count << '\n';
    }
}

// --- table reproduction ------------------------------------------------

std::vector<ScenarioConfig> table_scenarios(const std::string& which) {
    if (which != "table1" && which != "table2")
        throw ConfigError("unknown table '" + which + "' (expected table1 or table2)");
    const int n = 20;
    const int m = which == "table1" ? 4 : 10;
    std::vector<ScenarioConfig> out;

    auto push = [&](HonestyModel model, std::string label) {
        ScenarioConfig c;
        c.n = n;
        c.m = m;
        c.honesty_model = std::move(model);
        c.channel = {0.1, 1.0};
        c.flip_noisy_observation = true;  // Byzantines flip their noisy observations
        c.label = std::move(label);
        out.push_back(std::move(c));
    };

    for (double a : {0.3, 0.4, 0.45}) push(IndependentAlpha{a}, fmt2("iid-alpha-", a));
    for (int k : {6, 8, 9}) push(FixedK{k}, fmt_int2("fixed-k-", k));
    push(MaxEntropyBounded{n / 2}, fmt_int2("maxent-h-", n / 2));
    push(MaxEntropyBounded{n / 3}, fmt_int2("maxent-h-", n / 3));
    return out;
}

std::vector<ReferenceValue> load_reference_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open reference values: " + path.string());
    std::vector<ReferenceValue> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        ReferenceValue v;
        char mode[32] = {0};
        char table[32] = {0}, scenario[64] = {0}, rule[32] = {0};
        double bound = 0.0;
        const int got = std::sscanf(line.c_str(), "%31s %63s %31s %lf %31s %lf", table, scenario,
                                    rule, &v.paper_value, mode, &bound);
        if (got < 5) throw ConfigError("malformed reference line: " + line);
        v.table = table;
        v.scenario = scenario;
        v.rule = rule;
        const std::string mode_s = mode;
        if (mode_s == "display") {
            v.mode = AnchorMode::display;
        } else if (mode_s == "two_sided" || mode_s == "upper") {
            if (got != 6) throw ConfigError("anchored reference line needs a bound: " + line);
            v.mode = mode_s == "two_sided" ? AnchorMode::two_sided : AnchorMode::upper;
            v.bound = bound;
        } else {
            throw ConfigError("unknown anchor mode '" + mode_s + "' in: " + line);
        }
        out.push_back(std::move(v));
    }
    return out;
}

TableReport reproduce_table(const std::string& which, const TableOptions& options) {
    const auto scenarios = table_scenarios(which);
    const int m = scenarios.front().m;
    const long decisions = static_cast<long>(options.samples) * m;
    if (decisions < 10000)
        throw ConfigError("reproduce_table: " + std::to_string(options.samples) +
                          " samples give only " + std::to_string(decisions) +
                          " decisions per cell; need >= 10000 (use --samples >= " +
                          std::to_string((10000 + m - 1) / m) + ")");

    const std::filesystem::path ref_path = options.reference_file.empty()
                                               ? std::filesystem::path(BYZFUSE_DATA_DIR) /
                                                     "paper_reference_values.tsv"
                                               : options.reference_file;
    const auto references = load_reference_values(ref_path);
    auto find_ref = [&](const std::string& scenario,
                        const std::string& rule) -> std::optional<ReferenceValue> {
        for (const auto& r : references)
            if (r.table == which && r.scenario == scenario && r.rule == rule) return r;
        return std::nullopt;
    };

    const std::vector<std::string> rules{"maj", "hardis", "softis", "opt"};
    TableReport report;
    report.table = which;

    for (std::size_t si = 0; si < scenarios.size(); ++si) {
        const auto& config = scenarios[si];
        const auto samples = generate_eval_samples(
            config, options.samples, Rng::mix(options.seed, si));
        const auto truths = truths_of(samples);

        for (const auto& rule : rules) {
            std::vector<StateVector> estimates;
            estimates.reserve(samples.size());
            for (const auto& s : samples)
                estimates.push_back(apply_classical_rule(rule, s, config));
            const auto metrics = evaluate(estimates, truths);

            TableCell cell;
            cell.scenario = config.label;
            cell.rule = rule;
            cell.measured = metrics.per_bit_error;
            cell.stderr_value = metrics.stderr_per_bit;
            cell.decisions = metrics.sample_count * static_cast<std::size_t>(m);
            cell.reference = find_ref(config.label, rule);
            if (cell.reference && cell.reference->mode != AnchorMode::display) {
                const auto& ref = *cell.reference;
                if (cell.stderr_value > ref.bound / 2.0) {
                    cell.refused = true;
                    report.all_anchors_passed = false;
                } else if (ref.mode == AnchorMode::two_sided) {
                    cell.passed = std::abs(cell.measured - ref.paper_value) <= ref.bound;
                } else {
                    cell.passed = cell.measured <= ref.bound;
                }
                if (cell.passed && !*cell.passed) report.all_anchors_passed = false;
            }
            report.cells.push_back(std::move(cell));
        }
        // reference-only columns (neural results from the paper)
        for (const char* rule : {"dl", "dl-ber"}) {
            if (auto ref = find_ref(config.label, rule)) {
                TableCell cell;
                cell.scenario = config.label;
                cell.rule = rule;
                cell.measured = std::nan("");
                cell.reference = ref;
                report.cells.push_back(std::move(cell));
            }
        }
    }

    if (!options.out_dir.empty()) {
        const std::filesystem::path dir(options.out_dir);
        std::filesystem::create_directories(dir);
        std::ofstream out(dir / (which + ".csv"));
        out << "scenario,rule,measured_per_bit,stderr,decisions,paper_value,mode,bound,status\n";
        for (const auto& c : report.cells) {
            out << c.scenario << ',' << c.rule << ',' << num(c.measured) << ','
                << num(c.stderr_value) << ',' << c.decisions << ',';
            if (c.reference) {
                const char* mode = c.reference->mode == AnchorMode::display ? "display"
                                   : c.reference->mode == AnchorMode::two_sided ? "two_sided"
                                                                                : "upper";
                out << num(c.reference->paper_value) << ',' << mode << ','
                    << num(c.reference->bound) << ',';
            } else {
                out << "-,-,-,";
            }
            out << (c.refused ? "refused" : !c.passed ? "display" : *c.passed ? "pass" : "FAIL")
                << '\n';
        }
    }
    return report;
}

// --- sweeps ----------------------------------------------------------------

namespace {

struct TrainedModel {
    NetworkParams params;
    double final_loss = 0.0;
    Dataset train_split, test_split;
};

TrainedModel train_on(const std::vector<ScenarioConfig>& configs, int samples_per_class,
                      std::uint64_t seed, bool paper_architecture, const TrainConfig& tc) {
    const Dataset full = build_dataset(configs, samples_per_class, seed, {true});
    Rng split_rng = Rng(seed).fork(kSplitTag);
    auto [train_split, test_split] = split_dataset(full, 0.8, split_rng);
    const int n = configs.front().n, m = configs.front().m;
    const NetworkSpec spec = paper_architecture ? NetworkSpec::paper_scale(n, m, seed)
                                                : NetworkSpec::desk_scale(n, m, seed);
    auto result = train(train_split, spec, tc);
    return TrainedModel{std::move(result.params), result.history.back().train_loss,
                        std::move(train_split), std::move(test_split)};
}

MetricsReport eval_on_split(const NetworkParams& model, const Dataset& split) {
    const auto estimates = predict_batch(model, split);
    return evaluate(estimates, truths_of(split.samples));
}

}  // namespace

std::vector<SweepAlphaRow> sweep_alpha(const SweepAlphaOptions& options) {
    struct Family {
        std::string name;
        StatePrior prior;
    };
    std::vector<Family> families{{"iid", IidPrior{0.5}}};
    for (double rho : options.rhos) families.push_back({fmt2("markov-rho-", rho), MarkovPrior{rho, 0.5}});

    std::vector<SweepAlphaRow> rows;
    for (std::size_t fi = 0; fi < families.size(); ++fi) {
        const auto& family = families[fi];
        std::vector<ScenarioConfig> configs;
        for (int i = 0; i <= 20; ++i) {
            const double a = i * 5 / 100.0;
            ScenarioConfig c;
            c.n = options.n;
            c.m = options.m;
            c.state_prior = family.prior;
            c.honesty_model = IndependentAlpha{a};
            c.channel = {0.1, 1.0};
            c.label = fmt2("alpha-", a);
            configs.push_back(std::move(c));
        }
        const std::uint64_t family_seed = Rng::mix(options.seed, fi);
        const auto model = train_on(configs, options.samples_per_class, family_seed,
                                    options.paper_architecture, options.train);

        for (std::size_t ci = 0; ci < configs.size(); ++ci) {
            const auto frozen = frozen_class_honesty(configs[ci], ci, family_seed);
            const auto eval_set = generate_eval_samples(
                configs[ci], options.eval_samples, Rng::mix(Rng::mix(family_seed, kEvalTag), ci),
                &frozen);
            Dataset view{configs, eval_set, family_seed};
            const auto estimates = predict_batch(model.params, view);
            const auto report = evaluate(estimates, truths_of(eval_set));
            rows.push_back({family.name, static_cast<double>(ci) * 5 / 100.0, report.pe,
                            report.ber, report.accuracy, model.final_loss});
        }
    }

    if (!options.out_dir.empty()) {
        std::filesystem::create_directories(options.out_dir);
        std::ofstream out(std::filesystem::path(options.out_dir) / "sweep_alpha.csv");
        out << "family,alpha,pe,ber,accuracy,final_train_loss\n";
        for (const auto& r : rows)
            out << r.family << ',' << num(r.alpha) << ',' << num(r.pe) << ',' << num(r.ber) << ','
                << num(r.accuracy) << ',' << num(r.final_train_loss) << '\n';
    }
    return rows;
}

std::vector<SweepGridRow> sweep_window_and_size(const SweepGridOptions& options) {
    std::vector<std::pair<int, int>> points;
    for (int n : options.ns)
        for (int m : options.ms) points.emplace_back(n, m);

    std::string offenders;
    if (static_cast<int>(points.size()) > options.max_points)
        throw CapacityError("sweep-grid: " + std::to_string(points.size()) +
                            " grid points exceed the budget of " +
                            std::to_string(options.max_points));
    for (const auto& [n, m] : points)
        if (n * m > options.max_input_size)
            offenders += " (n=" + std::to_string(n) + ",m=" + std::to_string(m) + ")";
    if (!offenders.empty())
        throw CapacityError("sweep-grid: points exceed the input-size budget of " +
                            std::to_string(options.max_input_size) + ":" + offenders);

    std::vector<SweepGridRow> rows;
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const auto [n, m] = points[pi];
        const auto model = train_on(global_recipe(n, m), options.samples_per_class,
                                    Rng::mix(options.seed, pi), options.paper_architecture,
                                    options.train);
        const auto report = eval_on_split(model.params, model.test_split);
        rows.push_back({n, m, report.pe, report.ber, report.accuracy, model.final_loss});
    }

    if (!options.out_dir.empty()) {
        std::filesystem::create_directories(options.out_dir);
        std::ofstream out(std::filesystem::path(options.out_dir) / "sweep_grid.csv");
        out << "n,m,pe,ber,accuracy,final_train_loss\n";
        for (const auto& r : rows)
            out << r.n << ',' << r.m << ',' << num(r.pe) << ',' << num(r.ber) << ','
                << num(r.accuracy) << ',' << num(r.final_train_loss) << '\n';
    }
    return rows;
}

std::vector<SweepSamplesRow> sweep_samples_per_class(const SweepSamplesOptions& options) {
    if (options.counts.empty()) throw ConfigError("sweep-samples: empty counts");
    std::vector<SweepSamplesRow> rows;
    for (std::size_t i = 0; i < options.counts.size(); ++i) {
        const int count = options.counts[i];
        const auto model =
            train_on(global_recipe(options.n, options.m), count, Rng::mix(options.seed, i),
                     options.paper_architecture, options.train);
        const auto report = eval_on_split(model.params, model.test_split);
        rows.push_back({count, report.pe, report.ber, report.accuracy, model.final_loss});
    }

    if (!options.out_dir.empty()) {
        std::filesystem::create_directories(options.out_dir);
        std::ofstream out(std::filesystem::path(options.out_dir) / "sweep_samples.csv");
        out << "samples_per_class,pe,ber,accuracy,final_train_loss\n";
        for (const auto& r : rows)
            out << r.samples_per_class << ',' << num(r.pe) << ',' << num(r.ber) << ','
                << num(r.accuracy) << ',' << num(r.final_train_loss) << '\n';
    }
    return rows;
}

TimingReport timing_report(const TimingOptions& options) {
    const Dataset full = build_global_dataset(options.n, options.m, options.samples_per_class,
                                              options.seed, {true});
    Rng split_rng = Rng(options.seed).fork(kSplitTag);
    auto [train_split, test_split] = split_dataset(full, 0.8, split_rng);
    const NetworkSpec spec = options.paper_architecture
                                 ? NetworkSpec::paper_scale(options.n, options.m, options.seed)
                                 : NetworkSpec::desk_scale(options.n, options.m, options.seed);

    TimingReport report;
    report.hardware_note = options.hardware_note;
    report.train_count = train_split.samples.size();
    report.test_count = test_split.samples.size();

    double t0 = now_seconds();
    const auto result = train(train_split, spec, options.train);
    report.train_seconds = now_seconds() - t0;

    t0 = now_seconds();
    const auto estimates = predict_batch(result.params, test_split);
    report.inference_total_seconds = now_seconds() - t0;
    report.inference_per_sample_seconds =
        report.inference_total_seconds / static_cast<double>(test_split.samples.size());
    (void)estimates;

    if (!options.out_dir.empty()) {
        std::filesystem::create_directories(options.out_dir);
        json j{{"train_seconds", report.train_seconds},
               {"inference_total_seconds", report.inference_total_seconds},
               {"inference_per_sample_seconds", report.inference_per_sample_seconds},
               {"train_count", report.train_count},
               {"test_count", report.test_count},
               {"hardware_note", report.hardware_note},
               {"paper_train_seconds_reference", report.paper_train_seconds},
               {"paper_inference_per_sample_reference",
                report.paper_inference_per_sample_seconds}};
        std::ofstream out(std::filesystem::path(options.out_dir) / "timing.json");
        out << j.dump(2) << '\n';
    }
    return report;
}

}  // namespace byzfuse
