#include "byzfuse/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace byzfuse {

MetricsReport evaluate(const std::vector<StateVector>& predictions,
                       const std::vector<StateVector>& truths) {
    if (predictions.empty()) throw std::invalid_argument("evaluate: empty input");
    if (predictions.size() != truths.size())
        throw std::invalid_argument("evaluate: prediction/truth count mismatch");

    std::size_t wrong_vectors = 0, wrong_bits = 0, total_bits = 0;
    double ber_sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto& p = predictions[i];
        const auto& t = truths[i];
        if (p.size() != t.size())
            throw std::invalid_argument("evaluate: window length mismatch at sample " +
                                        std::to_string(i));
        std::size_t wrong = 0;
        for (std::size_t b = 0; b < p.size(); ++b) wrong += p[b] != t[b];
        wrong_vectors += wrong > 0;
        wrong_bits += wrong;
        total_bits += p.size();
        ber_sum += static_cast<double>(wrong) / static_cast<double>(p.size());
    }

    const auto count = predictions.size();
    MetricsReport r;
    r.sample_count = count;
    r.pe = static_cast<double>(wrong_vectors) / static_cast<double>(count);
    r.accuracy = 1.0 - r.pe;
    r.ber = ber_sum / static_cast<double>(count);
    r.per_bit_error = static_cast<double>(wrong_bits) / static_cast<double>(total_bits);
    r.stderr_pe = std::sqrt(r.pe * (1.0 - r.pe) / static_cast<double>(count));
    r.stderr_per_bit =
        std::sqrt(r.per_bit_error * (1.0 - r.per_bit_error) / static_cast<double>(total_bits));
    return r;
}

}  // namespace byzfuse
