#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "krepair/kernel.hpp"
#include "krepair/rational.hpp"
#include "krepair/value_space.hpp"

namespace krepair {

/// An open subset U of K: an open eps-ball around a value, or a union of
/// cells of a partition.
class OpenTarget {
public:
    static OpenTarget ball(Value centre, double radius);
    static OpenTarget cells(const CellPartition& partition, std::set<std::size_t> ids);

    bool contains(const ValueSpace& space, Value v) const;

private:
    OpenTarget() = default;

    bool is_ball_ = true;
    Value centre_;
    double radius_ = 0.0;
    const CellPartition* partition_ = nullptr;
    std::set<std::size_t> ids_;
};

// m^k * mu(f^{-1}(U) ∩ prod_i Δ_m(x_i)), computed exactly. Exception pieces
// are null and contribute nothing.
Rational density_mass(const PerturbedStepKernel& kernel, std::span<const Rational> point,
                      const OpenTarget& target, std::size_t m);

struct DensityVerdict {
    bool density = false;
    // Some coordinate sits on a base-grid line and the blocks it touches
    // carry values outside the ball.
    bool boundary_failure = false;
    bool aligned_masses_one = false;
    std::vector<std::size_t> resolutions; // aligned resolutions that were checked
};

// Decides whether the tuple is a density point for the open eps-ball around
// its pointwise value. Aligned resolutions m0*2^j <= m_max must give mass
// exactly 1, and the limit over all m must be 1 (no straddled grid line
// leading to other values).
DensityVerdict classify_density_tuple(const PerturbedStepKernel& kernel, std::span<const Rational> point,
                                      double epsilon, std::size_t m_max);

bool is_density_tuple(const PerturbedStepKernel& kernel, std::span<const Rational> point, double epsilon,
                      std::size_t m_max);

} // namespace krepair
