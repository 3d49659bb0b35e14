#ifndef BYZFUSE_FUSION_CLASSIC_HPP
#define BYZFUSE_FUSION_CLASSIC_HPP

#include <vector>

#include "byzfuse/types.hpp"

namespace byzfuse {

/// Per-node column log likelihoods under a candidate state: log_a assumes
/// the node honest, log_b Byzantine. Zero-probability factors are kept as
/// explicit -infinity.
struct LogLikelihoodPair {
    double log_a = 0.0;
    double log_b = 0.0;
};

/// Per time step: the bit reported by a strict majority; exact ties go to
/// the state with the larger marginal prior, then to 0. scores_i =
/// fraction of nodes reporting 1.
FusionDecision majority_fuse(const ReportMatrix& reports, const StatePrior& prior);

LogLikelihoodPair node_column_loglik(const std::vector<Bit>& column, const StateVector& candidate,
                                     const ChannelParams& channel);

/// log P(R | s) marginalized over node honesty, up to a model constant:
/// IndependentAlpha mixes per node; FixedK and MaxEntropyBounded use an
/// elementary-symmetric-polynomial recurrence over Byzantine count in log
/// domain (O(n*k)).
double subset_marginal(const std::vector<LogLikelihoodPair>& log_pairs, const HonestyModel& model);

double state_log_prior(const StateVector& candidate, const StatePrior& prior);

struct MapOptions {
    int max_window = 16;  // enumeration cap: 2^m candidates
};

/// Joint MAP over the window: argmax_s [subset_marginal + state_log_prior],
/// ties toward the lexicographically smallest bit string. scores_i is the
/// exact posterior marginal P(s_i = 1 | R) from the same enumeration.
FusionDecision map_fuse(const ReportMatrix& reports, const StatePrior& prior,
                        const HonestyModel& model, const ChannelParams& channel,
                        const MapOptions& options = {});

struct SyncMapOptions {
    int max_window = 10;  // enumeration cap: 4^m (s, s-hat) pairs
};

struct SyncMapResult {
    FusionDecision decision;
    StateVector fake_estimate;  // diagnostic: the s-hat of the best pair
};

/// Joint MAP over (s, s-hat) for synchronized attacks: honest factors use
/// the epsilon channel against s, Byzantine factors the epsilon channel
/// against s-hat; honesty is marginalized per subset_marginal.
SyncMapResult map_fuse_sync(const ReportMatrix& reports, const StatePrior& prior,
                            const StatePrior& fake_prior, const HonestyModel& model,
                            const ChannelParams& channel, const SyncMapOptions& options = {});

/// Two-stage isolation baseline: nodes whose mismatch count against a
/// preliminary majority decision exceeds m*eps + margin*sqrt(m*eps*(1-eps))
/// are removed, then majority over the survivors.
FusionDecision hardis_fuse(const ReportMatrix& reports, const StatePrior& prior,
                           const ChannelParams& channel, double threshold_margin = 2.0);

/// Soft isolation baseline: per-node posterior honesty weights from the
/// binomial mismatch statistic, then weighted voting.
FusionDecision softis_fuse(const ReportMatrix& reports, const StatePrior& prior,
                           const ChannelParams& channel, double assumed_alpha);

}  // namespace byzfuse

#endif
