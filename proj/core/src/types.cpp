#include "byzfuse/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace byzfuse {

StateVector::StateVector(std::vector<Bit> bits) : bits_(std::move(bits)) {
    if (bits_.empty()) throw std::invalid_argument("StateVector: window length must be >= 1");
    for (Bit b : bits_)
        if (b != 0 && b != 1) throw std::invalid_argument("StateVector: elements must be 0 or 1");
}

StateVector StateVector::zeros(std::size_t m) {
    return StateVector(std::vector<Bit>(m, 0));
}

StateVector StateVector::from_string(const std::string& s) {
    std::vector<Bit> bits;
    bits.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("StateVector: expected 0/1 string");
        bits.push_back(static_cast<Bit>(c - '0'));
    }
    return StateVector(std::move(bits));
}

std::string StateVector::to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
    return s;
}

StateVector StateVector::complement() const {
    std::vector<Bit> out(bits_.size());
    for (std::size_t i = 0; i < bits_.size(); ++i) out[i] = static_cast<Bit>(1 - bits_[i]);
    return StateVector(std::move(out));
}

Bit ReportMatrix::check_bit(Bit v) {
    if (v != 0 && v != 1) throw std::invalid_argument("ReportMatrix: entries must be 0 or 1");
    return v;
}

ReportMatrix::ReportMatrix(std::size_t m, std::size_t n) : m_(m), n_(n), data_(m * n, 0) {
    if (m < 1 || n < 1) throw std::invalid_argument("ReportMatrix: dimensions must be >= 1");
}

ReportMatrix::ReportMatrix(std::size_t m, std::size_t n, std::vector<Bit> row_major)
    : m_(m), n_(n), data_(std::move(row_major)) {
    if (m < 1 || n < 1) throw std::invalid_argument("ReportMatrix: dimensions must be >= 1");
    if (data_.size() != m * n)
        throw std::invalid_argument("ReportMatrix: data size does not match m*n");
    for (Bit b : data_) check_bit(b);
}

std::vector<Bit> ReportMatrix::column(std::size_t j) const {
    std::vector<Bit> col(m_);
    for (std::size_t i = 0; i < m_; ++i) col[i] = data_[i * n_ + j];
    return col;
}

ReportMatrix ReportMatrix::complement() const {
    std::vector<Bit> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<Bit>(1 - data_[i]);
    return ReportMatrix(m_, n_, std::move(out));
}

HonestyVector::HonestyVector(std::vector<bool> flags) : flags_(std::move(flags)) {
    if (flags_.empty()) throw std::invalid_argument("HonestyVector: need at least one node");
}

std::size_t HonestyVector::byzantine_count() const {
    return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), false));
}

namespace {

bool is_prob(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void check_prior(const StatePrior& prior, std::vector<std::string>& out, const char* what) {
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, IidPrior>) {
                if (!is_prob(p.p0)) out.push_back(std::string(what) + ": p0 out of range");
            } else {
                if (!is_prob(p.rho)) out.push_back(std::string(what) + ": rho out of range");
                if (!is_prob(p.initial_p0))
                    out.push_back(std::string(what) + ": initial_p0 out of range");
            }
        },
        prior);
}

}  // namespace

std::vector<std::string> validate_config(const ScenarioConfig& c) {
    std::vector<std::string> v;
    if (c.n < 1) v.push_back("n must be >= 1");
    if (c.m < 1) v.push_back("m must be >= 1");
    if (!is_prob(c.channel.epsilon)) v.push_back("epsilon out of range");
    if (!is_prob(c.channel.p_mal)) v.push_back("p_mal out of range");
    check_prior(c.state_prior, v, "state_prior");
    std::visit(
        [&](const auto& model) {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, IndependentAlpha>) {
                if (!is_prob(model.alpha)) v.push_back("alpha out of range");
            } else if constexpr (std::is_same_v<T, FixedK>) {
                if (model.k < 0) v.push_back("k must be >= 0");
                if (c.n >= 1 && model.k > c.n) v.push_back("k exceeds n");
            } else if constexpr (std::is_same_v<T, MaxEntropyBounded>) {
                if (model.h < 1) v.push_back("h must be >= 1");
                if (c.n >= 1 && model.h > c.n + 1) v.push_back("h exceeds n+1");
            }
        },
        c.honesty_model);
    if (const auto* sync = std::get_if<Synchronized>(&c.attack_mode))
        check_prior(sync->fake_prior, v, "fake_prior");
    if (c.label.empty()) v.push_back("label must be non-empty");
    return v;
}

ChannelParams effective_channel(const ScenarioConfig& config) {
    ChannelParams ch = config.channel;
    if (config.flip_noisy_observation) {
        const double e = ch.epsilon, p = ch.p_mal;
        ch.p_mal = e * (1.0 - p) + (1.0 - e) * p;
    }
    return ch;
}

std::vector<double> marginal_prior_p0(const StatePrior& prior, int m) {
    std::vector<double> out(static_cast<std::size_t>(m), 0.5);
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, IidPrior>) {
                std::fill(out.begin(), out.end(), p.p0);
            } else {
                double q = p.initial_p0;
                for (int i = 0; i < m; ++i) {
                    out[static_cast<std::size_t>(i)] = q;
                    q = q * p.rho + (1.0 - q) * (1.0 - p.rho);
                }
            }
        },
        prior);
    return out;
}

}  // namespace byzfuse
