#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace netmfg {

using Rng = std::mt19937_64;

// Substreams are keyed by (seed, stream id). Agents use their index as the
// stream id; simulator-level draws use the reserved ids below.
inline constexpr std::uint64_t kInitialStateStream = 0xFFFF'FFFF'0000'0001ULL;
inline constexpr std::uint64_t kFailureStream = 0xFFFF'FFFF'0000'0002ULL;
inline constexpr std::uint64_t kPopulationStream = 0xFFFF'FFFF'0000'0003ULL;

Rng make_stream(std::uint64_t seed, std::uint64_t stream_id);

/// Uniform double in [0, 1).
double uniform01(Rng& rng);

/// Inverse-CDF draw from a probability row. Falls back to the last index with
/// positive mass when rounding leaves the draw past the cumulative sum.
std::size_t sample_categorical(std::span<const double> probs, Rng& rng);

}  // namespace netmfg
