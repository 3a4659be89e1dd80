#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "rrf/dataset.hpp"

namespace rrf {

struct LibsvmOptions {
    int dim = 0;               // 0: width is the largest index seen
    std::optional<Task> task;  // unset: 2 labels -> binary, integral -> multiclass, else regression
};

/// Parses "label idx:value ..." lines (1-based indices) into dense rows.
/// Classification labels are mapped to -1/+1 (binary, by sorted order) or to
/// class indices 0..K-1 (multiclass, by sorted order).
Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options = {}, std::string name = {});

Dataset load_libsvm(const std::string& path, const LibsvmOptions& options = {});

/// Writes nonzero entries in shortest round-trip form.
void write_libsvm(const Dataset& data, std::ostream& out);

}  // namespace rrf
