#ifndef BYZFUSE_DATASET_IO_HPP
#define BYZFUSE_DATASET_IO_HPP

#include <filesystem>
#include <iosfwd>

#include "byzfuse/genesis.hpp"

namespace byzfuse {

/// Raised on malformed or version-incompatible dataset files.
class DatasetIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dataset file layout (text, schema version 1):
//   BYZFUSE-DATASET v1
//   <pretty-printed JSON metadata: master_seed, n, m, sample_count, configs>
//   RECORDS v1
//   <label> TAB <truth bits> TAB <report bits, row-major> TAB <fake bits or "-">
// one record line per sample, bits written as 0/1 characters.

void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
void write_dataset(const Dataset& dataset, std::ostream& out);

Dataset load_dataset(const std::filesystem::path& path);
Dataset read_dataset(std::istream& in);

}  // namespace byzfuse

#endif
