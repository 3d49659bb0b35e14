#include "byzfuse/fusion_classic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace byzfuse {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

/// count * logv with the 0 * (-inf) corner pinned to 0.
double scaled_log(int count, double logv) { return count == 0 ? 0.0 : count * logv; }

/// Per-mismatch-count tables log P(column | d mismatches) for a symmetric
/// bit channel with flip probability p, window m.
std::vector<double> channel_table(int m, double p) {
    const double log_match = safe_log(1.0 - p), log_miss = safe_log(p);
    std::vector<double> t(static_cast<std::size_t>(m) + 1);
    for (int d = 0; d <= m; ++d)
        t[static_cast<std::size_t>(d)] = scaled_log(m - d, log_match) + scaled_log(d, log_miss);
    return t;
}

std::uint32_t column_mask(const ReportMatrix& r, std::size_t j) {
    const auto m = r.rows();
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < m; ++i)
        mask |= static_cast<std::uint32_t>(r.at(i, j)) << (m - 1 - i);
    return mask;
}

StateVector candidate_vector(std::uint32_t c, int m) {
    std::vector<Bit> bits(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        bits[static_cast<std::size_t>(i)] = static_cast<Bit>((c >> (m - 1 - i)) & 1u);
    return StateVector(std::move(bits));
}

Bit tie_break_bit(double p0) {
    if (p0 > 0.5) return 0;  // state 0 has the larger prior
    if (p0 < 0.5) return 1;
    return 0;
}

double binom_pmf(int count, int trials, double p) {
    double c = 1.0;
    for (int i = 0; i < count; ++i) c = c * (trials - i) / (i + 1);
    return c * std::pow(p, count) * std::pow(1.0 - p, trials - count);
}

FusionDecision majority_over(const ReportMatrix& reports, const std::vector<bool>& active,
                             const StatePrior& prior, std::string rule_name) {
    const auto m = reports.rows(), n = reports.cols();
    const auto p0 = marginal_prior_p0(prior, static_cast<int>(m));
    std::size_t active_count = 0;
    for (bool a : active) active_count += a;

    std::vector<Bit> est(m);
    std::vector<double> scores(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (active[j] && reports.at(i, j)) ++ones;
        const std::size_t zeros = active_count - ones;
        if (ones > zeros) est[i] = 1;
        else if (zeros > ones) est[i] = 0;
        else est[i] = tie_break_bit(p0[i]);
        scores[i] = active_count ? static_cast<double>(ones) / static_cast<double>(active_count) : 0.5;
    }
    return FusionDecision{StateVector(std::move(est)), std::move(scores), std::move(rule_name)};
}

}  // namespace

FusionDecision majority_fuse(const ReportMatrix& reports, const StatePrior& prior) {
    return majority_over(reports, std::vector<bool>(reports.cols(), true), prior, "maj");
}

LogLikelihoodPair node_column_loglik(const std::vector<Bit>& column, const StateVector& candidate,
                                     const ChannelParams& channel) {
    if (column.size() != candidate.size())
        throw std::invalid_argument("node_column_loglik: length mismatch");
    int d = 0;
    for (std::size_t i = 0; i < column.size(); ++i) d += column[i] != candidate[i];
    const int m = static_cast<int>(column.size());
    LogLikelihoodPair pair;
    pair.log_a = scaled_log(m - d, safe_log(1.0 - channel.epsilon)) +
                 scaled_log(d, safe_log(channel.epsilon));
    pair.log_b = scaled_log(m - d, safe_log(1.0 - channel.p_mal)) +
                 scaled_log(d, safe_log(channel.p_mal));
    return pair;
}

namespace {

/// Elementary-symmetric DP over nodes: dp[c] = log sum over size-c subsets
/// S of prefix nodes of prod_{j in S} B_j prod_{j not in S} A_j.
void subset_dp(const std::vector<LogLikelihoodPair>& pairs, int kmax, std::vector<double>& dp) {
    dp.assign(static_cast<std::size_t>(kmax) + 1, kNegInf);
    dp[0] = 0.0;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const int top = std::min<int>(kmax, static_cast<int>(j) + 1);
        for (int c = top; c >= 1; --c) {
            dp[static_cast<std::size_t>(c)] =
                log_sum_exp(dp[static_cast<std::size_t>(c)] + pairs[j].log_a,
                            dp[static_cast<std::size_t>(c - 1)] + pairs[j].log_b);
        }
        dp[0] += pairs[j].log_a;
    }
}

}  // namespace

double subset_marginal(const std::vector<LogLikelihoodPair>& log_pairs, const HonestyModel& model) {
    const int n = static_cast<int>(log_pairs.size());
    return std::visit(
        [&](const auto& mdl) -> double {
            using T = std::decay_t<decltype(mdl)>;
            if constexpr (std::is_same_v<T, IndependentAlpha>) {
                const double log_honest = safe_log(1.0 - mdl.alpha);
                const double log_byz = safe_log(mdl.alpha);
                double total = 0.0;
                for (const auto& p : log_pairs)
                    total += log_sum_exp(log_honest + p.log_a, log_byz + p.log_b);
                return total;
            } else if constexpr (std::is_same_v<T, UnconstrainedMaxEntropy>) {
                return subset_marginal(log_pairs, IndependentAlpha{0.5});
            } else if constexpr (std::is_same_v<T, FixedK>) {
                if (mdl.k < 0 || mdl.k > n) throw ConfigError("subset_marginal: k out of range");
                std::vector<double> dp;
                subset_dp(log_pairs, mdl.k, dp);
                return dp[static_cast<std::size_t>(mdl.k)];
            } else {
                if (mdl.h < 1 || mdl.h > n + 1) throw ConfigError("subset_marginal: h out of range");
                std::vector<double> dp;
                subset_dp(log_pairs, mdl.h - 1, dp);
                double total = kNegInf;
                for (double v : dp) total = log_sum_exp(total, v);
                return total;  // uniform normalization constant omitted
            }
        },
        model);
}

double state_log_prior(const StateVector& candidate, const StatePrior& prior) {
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, IidPrior>) {
                const double log_p0 = safe_log(p.p0), log_p1 = safe_log(1.0 - p.p0);
                double total = 0.0;
                for (std::size_t i = 0; i < candidate.size(); ++i)
                    total += candidate[i] == 0 ? log_p0 : log_p1;
                return total;
            } else {
                const double log_stay = safe_log(p.rho), log_flip = safe_log(1.0 - p.rho);
                double total = candidate[0] == 0 ? safe_log(p.initial_p0)
                                                 : safe_log(1.0 - p.initial_p0);
                for (std::size_t i = 1; i < candidate.size(); ++i)
                    total += candidate[i] == candidate[i - 1] ? log_stay : log_flip;
                return total;
            }
        },
        prior);
}

FusionDecision map_fuse(const ReportMatrix& reports, const StatePrior& prior,
                        const HonestyModel& model, const ChannelParams& channel,
                        const MapOptions& options) {
    const int m = static_cast<int>(reports.rows());
    const auto n = reports.cols();
    if (m > options.max_window)
        throw CapacityError("map_fuse: window " + std::to_string(m) +
                            " exceeds the 2^m enumeration limit max_window=" +
                            std::to_string(options.max_window));

    const auto table_a = channel_table(m, channel.epsilon);
    const auto table_b = channel_table(m, channel.p_mal);
    std::vector<std::uint32_t> masks(n);
    for (std::size_t j = 0; j < n; ++j) masks[j] = column_mask(reports, j);

    const std::uint32_t count = 1u << m;
    std::vector<LogLikelihoodPair> pairs(n);
    std::uint32_t best = 0;
    double best_obj = kNegInf;
    double log_z = kNegInf;
    std::vector<double> log_bit1(static_cast<std::size_t>(m), kNegInf);

    for (std::uint32_t c = 0; c < count; ++c) {
        for (std::size_t j = 0; j < n; ++j) {
            const int d = std::popcount(masks[j] ^ c);
            pairs[j] = {table_a[static_cast<std::size_t>(d)], table_b[static_cast<std::size_t>(d)]};
        }
        const double obj =
            subset_marginal(pairs, model) + state_log_prior(candidate_vector(c, m), prior);
        if (obj > best_obj) {
            best_obj = obj;
            best = c;
        }
        log_z = log_sum_exp(log_z, obj);
        for (int i = 0; i < m; ++i)
            if ((c >> (m - 1 - i)) & 1u)
                log_bit1[static_cast<std::size_t>(i)] =
                    log_sum_exp(log_bit1[static_cast<std::size_t>(i)], obj);
    }

    std::vector<double> scores(static_cast<std::size_t>(m), 0.5);
    if (log_z != kNegInf)
        for (int i = 0; i < m; ++i)
            scores[static_cast<std::size_t>(i)] =
                std::exp(log_bit1[static_cast<std::size_t>(i)] - log_z);
    return FusionDecision{candidate_vector(best, m), std::move(scores), "opt"};
}

SyncMapResult map_fuse_sync(const ReportMatrix& reports, const StatePrior& prior,
                            const StatePrior& fake_prior, const HonestyModel& model,
                            const ChannelParams& channel, const SyncMapOptions& options) {
    const int m = static_cast<int>(reports.rows());
    const auto n = reports.cols();
    if (m > options.max_window)
        throw CapacityError("map_fuse_sync: window " + std::to_string(m) +
                            " exceeds the 4^m enumeration limit max_window=" +
                            std::to_string(options.max_window));

    // both honest and Byzantine reports pass through the epsilon channel;
    // they differ only in the reference sequence (s vs s-hat)
    const auto table_eps = channel_table(m, channel.epsilon);
    std::vector<std::uint32_t> masks(n);
    for (std::size_t j = 0; j < n; ++j) masks[j] = column_mask(reports, j);

    const std::uint32_t count = 1u << m;
    std::vector<double> state_prior_logs(count), fake_prior_logs(count);
    for (std::uint32_t c = 0; c < count; ++c) {
        state_prior_logs[c] = state_log_prior(candidate_vector(c, m), prior);
        fake_prior_logs[c] = state_log_prior(candidate_vector(c, m), fake_prior);
    }

    std::vector<LogLikelihoodPair> pairs(n);
    std::uint32_t best_s = 0, best_f = 0;
    double best_obj = kNegInf;
    double log_z = kNegInf;
    std::vector<double> log_bit1(static_cast<std::size_t>(m), kNegInf);

    for (std::uint32_t cs = 0; cs < count; ++cs) {
        for (std::uint32_t cf = 0; cf < count; ++cf) {
            for (std::size_t j = 0; j < n; ++j) {
                pairs[j] = {table_eps[static_cast<std::size_t>(std::popcount(masks[j] ^ cs))],
                            table_eps[static_cast<std::size_t>(std::popcount(masks[j] ^ cf))]};
            }
            const double obj =
                subset_marginal(pairs, model) + state_prior_logs[cs] + fake_prior_logs[cf];
            if (obj > best_obj) {
                best_obj = obj;
                best_s = cs;
                best_f = cf;
            }
            log_z = log_sum_exp(log_z, obj);
            for (int i = 0; i < m; ++i)
                if ((cs >> (m - 1 - i)) & 1u)
                    log_bit1[static_cast<std::size_t>(i)] =
                        log_sum_exp(log_bit1[static_cast<std::size_t>(i)], obj);
        }
    }

    std::vector<double> scores(static_cast<std::size_t>(m), 0.5);
    if (log_z != kNegInf)
        for (int i = 0; i < m; ++i)
            scores[static_cast<std::size_t>(i)] =
                std::exp(log_bit1[static_cast<std::size_t>(i)] - log_z);
    return SyncMapResult{
        FusionDecision{candidate_vector(best_s, m), std::move(scores), "opt-sync"},
        candidate_vector(best_f, m)};
}

FusionDecision hardis_fuse(const ReportMatrix& reports, const StatePrior& prior,
                           const ChannelParams& channel, double threshold_margin) {
    const auto m = reports.rows(), n = reports.cols();
    const FusionDecision prelim = majority_fuse(reports, prior);

    const double eps = channel.epsilon;
    const double threshold = static_cast<double>(m) * eps +
                             threshold_margin * std::sqrt(static_cast<double>(m) * eps * (1.0 - eps));
    std::vector<bool> keep(n, true);
    std::size_t kept = 0;
    for (std::size_t j = 0; j < n; ++j) {
        int eta = 0;
        for (std::size_t i = 0; i < m; ++i) eta += reports.at(i, j) != prelim.estimate[i];
        keep[j] = !(static_cast<double>(eta) > threshold);
        kept += keep[j];
    }
    if (kept == 0)
        return FusionDecision{prelim.estimate, prelim.scores, "hardis"};
    return majority_over(reports, keep, prior, "hardis");
}

FusionDecision softis_fuse(const ReportMatrix& reports, const StatePrior& prior,
                           const ChannelParams& channel, double assumed_alpha) {
    const auto m = reports.rows(), n = reports.cols();
    const FusionDecision prelim = majority_fuse(reports, prior);
    const auto p0 = marginal_prior_p0(prior, static_cast<int>(m));

    const double eps = channel.epsilon;
    const double q = channel.p_mal * (1.0 - eps) + (1.0 - channel.p_mal) * eps;
    std::vector<double> w(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        int eta = 0;
        for (std::size_t i = 0; i < m; ++i) eta += reports.at(i, j) != prelim.estimate[i];
        const double honest = (1.0 - assumed_alpha) * binom_pmf(eta, static_cast<int>(m), eps);
        const double byz = assumed_alpha * binom_pmf(eta, static_cast<int>(m), q);
        w[j] = (honest + byz) > 0.0 ? honest / (honest + byz) : 0.0;
    }

    double total_w = 0.0;
    for (double v : w) total_w += v;

    std::vector<Bit> est(m);
    std::vector<double> scores(m, 0.5);
    for (std::size_t i = 0; i < m; ++i) {
        double vote = 0.0, ones_w = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            vote += w[j] * (2.0 * reports.at(i, j) - 1.0);
            if (reports.at(i, j)) ones_w += w[j];
        }
        if (vote > 0.0) est[i] = 1;
        else if (vote < 0.0) est[i] = 0;
        else est[i] = tie_break_bit(p0[i]);
        if (total_w > 0.0) scores[i] = ones_w / total_w;
    }
    return FusionDecision{StateVector(std::move(est)), std::move(scores), "softis"};
}

}  // namespace byzfuse
