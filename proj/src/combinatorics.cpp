#include "krepair/combinatorics.hpp"

#include "krepair/errors.hpp"

namespace krepair {

std::uint64_t binomial(std::size_t n, std::size_t r)
{
    if (r > n)
        return 0;
    if (r > n - r)
        r = n - r;
    std::uint64_t result = 1;
    for (std::size_t i = 1; i <= r; ++i)
        result = result * (n - r + i) / i;
    return result;
}

std::uint64_t colex_rank(std::span<const int> sorted_subset)
{
    std::uint64_t rank = 0;
    for (std::size_t i = 0; i < sorted_subset.size(); ++i)
        rank += binomial(static_cast<std::size_t>(sorted_subset[i]), i + 1);
    return rank;
}

std::vector<int> colex_unrank(std::uint64_t rank, std::size_t r)
{
    std::vector<int> out(r);
    for (std::size_t i = r; i > 0; --i) {
        std::size_t v = i - 1;
        while (binomial(v + 1, i) <= rank)
            ++v;
        out[i - 1] = static_cast<int>(v);
        rank -= binomial(v, i);
    }
    return out;
}

bool next_combination(std::vector<std::size_t>& c, std::size_t n)
{
    const std::size_t r = c.size();
    std::size_t i = r;
    while (i > 0 && c[i - 1] == n - r + i - 1)
        --i;
    if (i == 0)
        return false;
    ++c[i - 1];
    for (std::size_t j = i; j < r; ++j)
        c[j] = c[j - 1] + 1;
    return true;
}

} // namespace krepair
