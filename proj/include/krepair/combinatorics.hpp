#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace krepair {

std::uint64_t binomial(std::size_t n, std::size_t r);

// Colex rank of a strictly increasing sequence: sum_i C(s_i, i+1).
std::uint64_t colex_rank(std::span<const int> sorted_subset);
// Inverse of colex_rank for r-subsets of {0, 1, ...}.
std::vector<int> colex_unrank(std::uint64_t rank, std::size_t r);

// Advances `c` (increasing indices into [0, n)) to the next r-combination in
// lexicographic order; false after the last one.
bool next_combination(std::vector<std::size_t>& c, std::size_t n);

} // namespace krepair
