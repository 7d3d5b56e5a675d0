#pragma once

#include <cstdint>
#include <vector>

namespace seoe {

// Deterministic Fisher-Yates permutation of [0, n). std::shuffle's draw
// sequence is not pinned by the standard, and sampling must reproduce across
// platforms.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

}  // namespace seoe
