#pragma once

#include <cstdint>
#include <random>

namespace rrf {

using Rng = std::mt19937_64;

/// Seed of substream `stream` under master seed `seed`. Substreams are
/// statistically independent and depend only on (seed, stream), so work split
/// across threads draws exactly what a sequential loop would.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(substream_seed(seed, stream));
}

}  // namespace rrf
