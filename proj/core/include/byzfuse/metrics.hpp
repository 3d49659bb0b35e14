#ifndef BYZFUSE_METRICS_HPP
#define BYZFUSE_METRICS_HPP

#include <cstddef>
#include <vector>

#include "byzfuse/types.hpp"

namespace byzfuse {

struct MetricsReport {
    double pe = 0.0;             // misclassified-vector fraction
    double ber = 0.0;            // mean per-sample wrong-bit fraction
    double accuracy = 1.0;       // 1 - pe, exactly
    double per_bit_error = 0.0;  // wrong bits / (samples * m)
    std::size_t sample_count = 0;
    double stderr_pe = 0.0;
    double stderr_per_bit = 0.0;
};

/// Vector error, bit error rate, accuracy and binomial standard errors.
/// A vector counts as misclassified when any bit differs.
MetricsReport evaluate(const std::vector<StateVector>& predictions,
                       const std::vector<StateVector>& truths);

}  // namespace byzfuse

#endif
