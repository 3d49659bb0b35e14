// byzfuse CLI: dataset generation, training, evaluation, paper-table
// reproduction, sweeps, timing, and gradient checking.
//
// Exit codes: 0 success, 2 configuration error, 3 capacity refusal,
// 4 acceptance failure (an anchored table cell missed its band or a
// gradient check exceeded tolerance), 1 anything else.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdio>
#include <iostream>

#include "byzfuse/bench.hpp"
#include "byzfuse/checkpoint.hpp"
#include "byzfuse/dataset_io.hpp"
#include "byzfuse/fusion_classic.hpp"
#include "byzfuse/genesis.hpp"
#include "byzfuse/metrics.hpp"
#include "byzfuse/neural.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitAcceptance = 4;

using namespace byzfuse;

std::vector<ScenarioConfig> configs_for(const std::string& plan_path, int n, int m,
                                        std::uint64_t /*seed*/) {
    if (!plan_path.empty()) return expand_plan(load_plan(plan_path));
    return global_recipe(n, m);
}

void print_metrics_line(const std::string& label, const std::string& rule,
                        const MetricsReport& r) {
    std::printf("%-18s %-8s pe=%.5f ber=%.5f per_bit=%.5f acc=%.5f (N=%zu)\n", label.c_str(),
                rule.c_str(), r.pe, r.ber, r.per_bit_error, r.accuracy, r.sample_count);
}

int cmd_generate(const std::string& plan_path, int n, int m, int samples_per_class,
                 std::uint64_t seed, bool freeze, const std::string& out) {
    const auto configs = configs_for(plan_path, n, m, seed);
    const Dataset ds = build_dataset(configs, samples_per_class, seed, {freeze});
    save_dataset(ds, out.empty() ? "dataset.txt" : out);
    std::printf("wrote %zu samples (%zu configs) to %s\n", ds.samples.size(), ds.configs.size(),
                out.empty() ? "dataset.txt" : out.c_str());
    return 0;
}

int cmd_train(const std::string& data_path, bool paper_arch, const TrainConfig& tc,
              double holdout_fraction, std::uint64_t seed, const std::string& out) {
    const Dataset full = load_dataset(data_path);
    Rng split_rng = Rng(seed).fork(0x5011);
    Dataset train_split = full, holdout;
    const Dataset* holdout_ptr = nullptr;
    if (holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        std::tie(train_split, holdout) = split_dataset(full, 1.0 - holdout_fraction, split_rng);
        holdout_ptr = &holdout;
    }
    const int n = full.configs.front().n, m = full.configs.front().m;
    const NetworkSpec spec =
        paper_arch ? NetworkSpec::paper_scale(n, m, seed) : NetworkSpec::desk_scale(n, m, seed);
    const auto result = train(train_split, spec, tc, holdout_ptr);

    const std::string ckpt = out.empty() ? "model.ckpt.json" : out;
    save_checkpoint(result.params, ckpt);
    std::ofstream hist(ckpt + ".history.csv");
    hist << "epoch,train_loss,holdout_loss,holdout_accuracy\n";
    for (std::size_t e = 0; e < result.history.size(); ++e) {
        const auto& s = result.history[e];
        hist << e + 1 << ',' << s.train_loss << ',';
        if (s.holdout_loss) hist << *s.holdout_loss;
        hist << ',';
        if (s.holdout_accuracy) hist << *s.holdout_accuracy;
        hist << '\n';
    }
    std::printf("trained %zu epochs, final loss %.6g; checkpoint: %s\n", result.history.size(),
                result.history.back().train_loss, ckpt.c_str());
    if (holdout_ptr && result.history.back().holdout_accuracy)
        std::printf("holdout accuracy %.4f\n", *result.history.back().holdout_accuracy);
    return 0;
}

int cmd_evaluate(const std::string& plan_path, const std::string& data_path,
                 const std::string& checkpoint_path, std::vector<std::string> rules,
                 const std::string& out_dir) {
    if (!plan_path.empty()) {
        ExperimentPlan plan = load_plan(plan_path);
        if (!out_dir.empty()) plan.out_dir = out_dir;
        const auto output = run_experiment(plan);
        for (const auto& r : output.rows)
            std::printf("%-18s %-8s pe=%.5f ber=%.5f per_bit=%.5f acc=%.5f (N=%zu)\n",
                        r.config_label.c_str(), r.rule.c_str(), r.pe, r.ber, r.per_bit_error,
                        r.accuracy, r.sample_count);
        if (output.results_csv)
            std::printf("results: %s\n", output.results_csv->string().c_str());
        return 0;
    }
    if (data_path.empty()) throw ConfigError("evaluate: need --plan or --data");
    const Dataset ds = load_dataset(data_path);
    if (rules.empty()) rules = {"maj"};
    std::optional<NetworkParams> model;
    if (std::find(rules.begin(), rules.end(), "dl") != rules.end()) {
        if (checkpoint_path.empty()) throw ConfigError("evaluate: rule dl needs --checkpoint");
        model = load_checkpoint(checkpoint_path);
    }

    std::vector<ResultRow> rows;
    for (const auto& config : ds.configs) {
        std::vector<LabeledSample> subset;
        for (const auto& s : ds.samples)
            if (s.config_label == config.label) subset.push_back(s);
        if (subset.empty()) continue;
        std::vector<StateVector> truths;
        for (const auto& s : subset) truths.push_back(s.truth);
        for (const auto& rule : rules) {
            std::vector<StateVector> estimates;
            if (rule == "dl") {
                Dataset view{ds.configs, subset, ds.master_seed};
                estimates = predict_batch(*model, view);
            } else {
                for (const auto& s : subset)
                    estimates.push_back(apply_classical_rule(rule, s, config));
            }
            const auto report = evaluate(estimates, truths);
            print_metrics_line(config.label, rule, report);
            rows.push_back({config.label, rule, report.pe, report.ber, report.per_bit_error,
                            report.accuracy, report.stderr_pe, report.stderr_per_bit,
                            report.sample_count, 0.0});
        }
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_results_csv(rows, std::filesystem::path(out_dir) / "results.csv");
    }
    return 0;
}

int cmd_reproduce_table(const std::string& which, const TableOptions& options) {
    const auto report = reproduce_table(which, options);
    std::printf("%s (per-bit error, %d samples per cell)\n", report.table.c_str(),
                options.samples);
    for (const auto& c : report.cells) {
        std::string status = "display";
        if (c.refused) status = "REFUSED (stderr too large for this band)";
        else if (c.passed) status = *c.passed ? "pass" : "FAIL";
        if (std::isnan(c.measured)) {
            std::printf("  %-16s %-7s measured=-        paper=%-9.4g %s\n", c.scenario.c_str(),
                        c.rule.c_str(), c.reference->paper_value, status.c_str());
        } else {
            std::printf("  %-16s %-7s measured=%.5f  paper=%-9.4g %s\n", c.scenario.c_str(),
                        c.rule.c_str(), c.measured,
                        c.reference ? c.reference->paper_value : std::nan(""), status.c_str());
        }
    }
    std::printf("anchored cells: %s\n", report.all_anchors_passed ? "all passed" : "FAILURES");
    return report.all_anchors_passed ? 0 : kExitAcceptance;
}

int cmd_gradcheck(std::vector<int> widths, int input_size, int output_size, bool no_batch_norm,
                  double tolerance, std::uint64_t seed) {
    NetworkSpec spec;
    spec.input_size = input_size;
    spec.hidden_sizes = std::move(widths);
    spec.output_size = output_size;
    spec.batch_norm.assign(spec.hidden_sizes.size(), no_batch_norm ? 0 : 1);
    spec.seed = seed;
    const auto report = gradient_check(spec, tolerance);
    for (const auto& g : report.groups) {
        std::printf("  layer %-3d %-7s max_rel_error=%.3e\n", g.layer, g.group.c_str(),
                    g.max_rel_error);
    }
    std::printf("worst %.3e (tolerance %.1e): %s\n", report.worst, tolerance,
                report.passed ? "pass" : "FAIL");
    return report.passed ? 0 : kExitAcceptance;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<int> parse_ints(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"byzfuse: Byzantine-resilient decision fusion workbench"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::string out;
    std::string plan_path;
    int samples = 12500;
    bool paper_architecture = false;
    int threads = 1;
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out, "output file or directory");
    app.add_option("--plan", plan_path, "experiment plan (JSON, schema 1)");
    app.add_option("--samples", samples, "Monte Carlo samples per table cell");
    app.add_flag("--paper-architecture", paper_architecture,
                 "use the full 2048..64 stack instead of the desk-scale 256/128/64");
    app.add_option("--threads", threads, "linear-algebra thread cap");

    // generate
    auto* gen = app.add_subcommand("generate", "generate a dataset file");
    int n = 20, m = 4, samples_per_class = 200;
    bool freeze = false;
    gen->add_option("--n", n, "node count");
    gen->add_option("--m", m, "window length");
    gen->add_option("--samples-per-class", samples_per_class, "samples per config");
    gen->add_flag("--freeze-honesty", freeze, "fix each config's Byzantine set (class roles)");

    // train
    auto* tr = app.add_subcommand("train", "train the neural engine on a dataset file");
    std::string data_path;
    TrainConfig tc;
    double holdout_fraction = 0.2;
    tr->add_option("--data", data_path, "dataset file")->required();
    tr->add_option("--epochs", tc.epochs, "training epochs");
    tr->add_option("--batch-size", tc.batch_size, "mini-batch size");
    tr->add_option("--lr", tc.learning_rate, "Adam learning rate");
    tr->add_option("--shuffle-seed", tc.shuffle_seed, "epoch shuffling seed");
    tr->add_option("--early-stop-loss", tc.early_stop_loss, "stop below this train loss (0=off)");
    tr->add_option("--holdout-fraction", holdout_fraction, "held-out fraction for history");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "run fusion rules over a plan or dataset");
    std::string eval_data, checkpoint_path, rules_csv = "maj,opt";
    ev->add_option("--data", eval_data, "dataset file (when no --plan)");
    ev->add_option("--checkpoint", checkpoint_path, "checkpoint for the dl rule");
    ev->add_option("--rules", rules_csv, "comma-separated rules");

    // reproduce-table
    auto* rt = app.add_subcommand("reproduce-table", "Monte Carlo reproduction of a paper table");
    std::string which = "table1";
    std::string reference_file;
    rt->add_option("table", which, "table1 or table2");
    rt->add_option("--reference-file", reference_file, "override the reference-values file");

    // sweep-alpha
    auto* sa = app.add_subcommand("sweep-alpha", "accuracy-vs-alpha curves for the neural engine");
    std::string rhos_csv;
    SweepAlphaOptions sa_opts;
    sa->add_option("--n", sa_opts.n);
    sa->add_option("--m", sa_opts.m);
    sa->add_option("--rhos", rhos_csv, "Markov rho list, e.g. 0.1,0.95");
    sa->add_option("--samples-per-class", sa_opts.samples_per_class);
    sa->add_option("--eval-samples", sa_opts.eval_samples);
    sa->add_option("--epochs", sa_opts.train.epochs);
    sa->add_option("--early-stop-loss", sa_opts.train.early_stop_loss);

    // sweep-grid
    auto* sg = app.add_subcommand("sweep-grid", "accuracy over (n, m) grid on the global recipe");
    std::string ns_csv = "10,20", ms_csv = "4";
    SweepGridOptions sg_opts;
    sg->add_option("--ns", ns_csv, "node counts, e.g. 10,20,40");
    sg->add_option("--ms", ms_csv, "window lengths, e.g. 4,10");
    sg->add_option("--samples-per-class", sg_opts.samples_per_class);
    sg->add_option("--max-points", sg_opts.max_points, "grid budget cap");
    sg->add_option("--max-input-size", sg_opts.max_input_size, "n*m budget cap");
    sg->add_option("--epochs", sg_opts.train.epochs);
    sg->add_option("--early-stop-loss", sg_opts.train.early_stop_loss);

    // sweep-samples
    auto* ss = app.add_subcommand("sweep-samples", "performance vs samples per class");
    std::string counts_csv = "50,100,250";
    SweepSamplesOptions ss_opts;
    ss->add_option("--counts", counts_csv, "samples-per-class list");
    ss->add_option("--n", ss_opts.n);
    ss->add_option("--m", ss_opts.m);
    ss->add_option("--epochs", ss_opts.train.epochs);
    ss->add_option("--early-stop-loss", ss_opts.train.early_stop_loss);

    // timing
    auto* tm = app.add_subcommand("timing", "training / inference wall-clock report");
    TimingOptions tm_opts;
    tm->add_option("--n", tm_opts.n);
    tm->add_option("--m", tm_opts.m);
    tm->add_option("--samples-per-class", tm_opts.samples_per_class);
    tm->add_option("--hardware-note", tm_opts.hardware_note, "free-form hardware description");
    tm->add_option("--epochs", tm_opts.train.epochs);

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient verification");
    std::string widths_csv = "8,4";
    int gc_input = 16, gc_output = 4;
    bool gc_no_bn = false;
    double gc_tol = 1e-4;
    gc->add_option("--widths", widths_csv, "hidden widths, e.g. 8,4");
    gc->add_option("--input-size", gc_input);
    gc->add_option("--output-size", gc_output);
    gc->add_flag("--no-batch-norm", gc_no_bn);
    gc->add_option("--tolerance", gc_tol);

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();
    CLI11_PARSE(app, argc, argv);
    Eigen::setNbThreads(threads);

    try {
        if (*gen) return cmd_generate(plan_path, n, m, samples_per_class, seed, freeze, out);
        if (*tr) return cmd_train(data_path, paper_architecture, tc, holdout_fraction, seed, out);
        if (*ev) {
            std::vector<std::string> rules;
            std::stringstream ssr(rules_csv);
            std::string tok;
            while (std::getline(ssr, tok, ',')) rules.push_back(tok);
            return cmd_evaluate(plan_path, eval_data, checkpoint_path, rules, out);
        }
        if (*rt) {
            TableOptions opts;
            opts.samples = samples;
            opts.seed = seed;
            if (!reference_file.empty()) opts.reference_file = reference_file;
            opts.out_dir = out;
            return cmd_reproduce_table(which, opts);
        }
        if (*sa) {
            if (!rhos_csv.empty()) sa_opts.rhos = parse_doubles(rhos_csv);
            sa_opts.seed = seed;
            sa_opts.out_dir = out;
            sa_opts.paper_architecture = paper_architecture;
            const auto rows = sweep_alpha(sa_opts);
            double min_acc = 1.0;
            for (const auto& r : rows) {
                std::printf("%-16s alpha=%.2f acc=%.4f pe=%.4f ber=%.4f\n", r.family.c_str(),
                            r.alpha, r.accuracy, r.pe, r.ber);
                min_acc = std::min(min_acc, r.accuracy);
            }
            std::printf("minimum accuracy across the sweep: %.4f\n", min_acc);
            return 0;
        }
        if (*sg) {
            sg_opts.ns = parse_ints(ns_csv);
            sg_opts.ms = parse_ints(ms_csv);
            sg_opts.seed = seed;
            sg_opts.out_dir = out;
            sg_opts.paper_architecture = paper_architecture;
            for (const auto& r : sweep_window_and_size(sg_opts))
                std::printf("n=%-3d m=%-3d acc=%.4f pe=%.4f ber=%.4f\n", r.n, r.m, r.accuracy,
                            r.pe, r.ber);
            return 0;
        }
        if (*ss) {
            ss_opts.counts = parse_ints(counts_csv);
            ss_opts.seed = seed;
            ss_opts.out_dir = out;
            ss_opts.paper_architecture = paper_architecture;
            for (const auto& r : sweep_samples_per_class(ss_opts))
                std::printf("samples/class=%-5d acc=%.4f pe=%.4f ber=%.4f loss=%.5f\n",
                            r.samples_per_class, r.accuracy, r.pe, r.ber, r.final_train_loss);
            return 0;
        }
        if (*tm) {
            tm_opts.seed = seed;
            tm_opts.out_dir = out;
            tm_opts.paper_architecture = paper_architecture;
            const auto r = timing_report(tm_opts);
            std::printf("training: %.3f s over %zu samples\n", r.train_seconds, r.train_count);
            std::printf("inference: %.6f s total, %.9f s/sample over %zu samples\n",
                        r.inference_total_seconds, r.inference_per_sample_seconds, r.test_count);
            std::printf("hardware: %s\n",
                        r.hardware_note.empty() ? "(unspecified)" : r.hardware_note.c_str());
            std::printf("paper reference (different hardware, not a target): %.4f s train, "
                        "%.3e s/sample inference\n",
                        r.paper_train_seconds, r.paper_inference_per_sample_seconds);
            return 0;
        }
        if (*gc)
            return cmd_gradcheck(parse_ints(widths_csv), gc_input, gc_output, gc_no_bn, gc_tol,
                                 seed);
    } catch (const CapacityError& e) {
        std::fprintf(stderr, "capacity refusal: %s\n", e.what());
        return kExitCapacity;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
