#pragma once

#include <cstdint>
#include <random>

namespace dpp {

using Rng = std::mt19937_64;

// One independent, reproducible stream per (seed, stream_id). Worker pools
// hand stream_id = worker index so partitioned runs stay deterministic.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream_id = 0) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
        0x9e3779b9u};
    return Rng(seq);
}

} // namespace dpp
