#pragma once

// Shared fixtures for the unit and acceptance tests: random kernels and a
// counting oracle for density masses that shares no code with the library's
// interval-intersection routine.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "krepair/constraint.hpp"
#include "krepair/density.hpp"
#include "krepair/kernel.hpp"
#include "krepair/rng.hpp"

namespace krepair::testing {

inline Rational q(const char* text)
{
    return parse_rational(text);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline ValueSpace random_space(Rng& rng)
{
    switch (pick(rng, 0, 2)) {
    case 0:
        return ValueSpace::discrete({"0", "1", "2"});
    case 1:
        return ValueSpace::bounded_interval(1.0);
    default:
        return ValueSpace::compactified_ray();
    }
}

inline Value random_value(const ValueSpace& space, Rng& rng)
{
    if (space.variant() == ValueSpace::Variant::FiniteMetric)
        return Value::label(pick(rng, 0, space.label_count() - 1));
    return Value::real(0.25 * static_cast<double>(pick(rng, 0, 4)));
}

// Row-major enumeration of all blocks of {0..m0-1}^k.
inline std::vector<std::vector<std::size_t>> all_blocks(std::size_t k, std::size_t m0)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> b(k, 0);
    while (true) {
        out.push_back(b);
        std::size_t i = k;
        while (i > 0 && ++b[i - 1] == m0)
            b[--i] = 0;
        if (i == 0)
            return out;
    }
}

inline std::vector<Value> random_base(const ValueSpace& space, std::size_t k, std::size_t m0, bool symmetric,
                                      Rng& rng)
{
    const auto blocks = all_blocks(k, m0);
    std::vector<Value> base(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto sorted = blocks[i];
        std::sort(sorted.begin(), sorted.end());
        if (symmetric && sorted != blocks[i]) {
            const auto j = static_cast<std::size_t>(std::find(blocks.begin(), blocks.end(), sorted) - blocks.begin());
            base[i] = base[j];
        } else {
            base[i] = random_value(space, rng);
        }
    }
    return base;
}

// Dyadic constants with small denominators, so pieces sometimes sit on grid lines.
inline Rational random_constant(Rng& rng)
{
    return Rational(static_cast<long>(pick(rng, 0, 31)), 32);
}

inline ExceptionPiece random_piece(const ValueSpace& space, std::size_t k, Rng& rng)
{
    ExceptionPiece piece;
    const std::size_t atoms = pick(rng, 1, 2);
    for (std::size_t a = 0; a < atoms; ++a) {
        if (k >= 2 && pick(rng, 0, 2) == 0) {
            const std::size_t i = pick(rng, 0, k - 1);
            std::size_t j = pick(rng, 0, k - 2);
            if (j >= i)
                ++j;
            piece.atoms.push_back(CoordEqualsCoord{i, j});
        } else {
            piece.atoms.push_back(CoordEqualsConstant{pick(rng, 0, k - 1), random_constant(rng)});
        }
    }
    piece.value = random_value(space, rng);
    return piece;
}

inline PerturbedStepKernel random_kernel(Rng& rng, std::size_t k, std::size_t m0, bool symmetric,
                                         std::size_t max_pieces)
{
    ValueSpace space = random_space(rng);
    auto base = random_base(space, k, m0, symmetric, rng);
    std::vector<ExceptionPiece> pieces;
    const std::size_t count = max_pieces ? pick(rng, 0, max_pieces) : 0;
    for (std::size_t i = 0; i < count; ++i)
        pieces.push_back(random_piece(space, k, rng));
    return PerturbedStepKernel(k, m0, std::move(space), std::move(base), std::move(pieces), symmetric);
}

// A point whose coordinates avoid every line s/L for the given L.
inline Point interior_point(Rng& rng, std::size_t k, std::size_t lcm_grid)
{
    Point p;
    for (std::size_t i = 0; i < k; ++i) {
        const auto s = static_cast<long>(pick(rng, 0, lcm_grid - 1));
        const auto num = static_cast<long>(pick(rng, 1, 99));
        p.push_back(Rational(s, static_cast<long>(lcm_grid)) + Rational(num, 100 * static_cast<long>(lcm_grid)));
    }
    return p;
}

// Counting oracle: refine to the common grid L = lcm(m, m0), count fine boxes
// inside prod Δ_m(x_i) whose base value (read at the box centre) lies in the
// target, and divide by the number of fine boxes.
inline Rational density_mass_by_counting(const PerturbedStepKernel& kernel, const Point& point,
                                         const OpenTarget& target, std::size_t m)
{
    const std::size_t k = kernel.arity();
    const std::size_t big = std::lcm(m, kernel.resolution());
    const std::size_t per = big / m;
    std::vector<std::size_t> first(k);
    for (std::size_t i = 0; i < k; ++i)
        first[i] = static_cast<std::size_t>(floor_of(point[i] * m).convert_to<long long>()) * per;

    std::size_t hits = 0;
    std::size_t total = 0;
    for (const auto& offset : all_blocks(k, per)) {
        Point centre;
        for (std::size_t i = 0; i < k; ++i)
            centre.push_back(Rational(2 * static_cast<long>(first[i] + offset[i]) + 1, 2 * static_cast<long>(big)));
        ++total;
        if (target.contains(kernel.space(), kernel.base_value_at(centre)))
            ++hits;
    }
    return Rational(static_cast<long>(hits), static_cast<long>(total));
}

} // namespace krepair::testing
