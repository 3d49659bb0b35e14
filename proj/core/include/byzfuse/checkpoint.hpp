#ifndef BYZFUSE_CHECKPOINT_HPP
#define BYZFUSE_CHECKPOINT_HPP

#include <filesystem>
#include <stdexcept>

#include "byzfuse/neural.hpp"

namespace byzfuse {

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CheckpointVersionError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

class CheckpointCorruptionError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

class CheckpointShapeError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

enum class CheckpointPrecision { float64, float32 };

// Versioned self-describing JSON document: spec, every tensor as hexfloat
// strings (bit-exact round trip at float64), running statistics, step
// counter, and an FNV-1a checksum over the payload.

void save_checkpoint(const NetworkParams& params, const std::filesystem::path& path,
                     CheckpointPrecision precision = CheckpointPrecision::float64);

NetworkParams load_checkpoint(const std::filesystem::path& path);

}  // namespace byzfuse

#endif
