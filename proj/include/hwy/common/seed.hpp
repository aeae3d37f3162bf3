#pragma once

#include <cstdint>
#include <string_view>

namespace hwy {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based seed splitting: a child seed is a pure function of the
/// parent seed, a stream label and an index, so independent consumers
/// (tracks, episodes, evaluation runs) never share a generator.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view stream, std::uint64_t index = 0);

}  // namespace hwy
