#include "krepair/density.hpp"

#include <algorithm>

#include "krepair/errors.hpp"

namespace krepair {

OpenTarget OpenTarget::ball(Value centre, double radius)
{
    if (!(radius > 0.0))
        throw ContractError("ball radius must be positive");
    OpenTarget t;
    t.is_ball_ = true;
    t.centre_ = centre;
    t.radius_ = radius;
    return t;
}

OpenTarget OpenTarget::cells(const CellPartition& partition, std::set<std::size_t> ids)
{
    OpenTarget t;
    t.is_ball_ = false;
    t.partition_ = &partition;
    t.ids_ = std::move(ids);
    return t;
}

bool OpenTarget::contains(const ValueSpace& space, Value v) const
{
    if (is_ball_)
        return space.dist(centre_, v) < radius_;
    return ids_.contains(partition_->cell_of(v));
}

namespace {

struct Overlap {
    std::size_t block;
    Rational length;
};

// Base blocks met by [s/m, (s+1)/m) and the lengths of the intersections.
std::vector<Overlap> overlaps(const Rational& x, std::size_t m, std::size_t m0)
{
    const std::size_t s = block_of(x, m);
    const Rational lo(s, m);
    const Rational hi(s + 1, m);
    std::vector<Overlap> out;
    for (std::size_t t = block_of(lo, m0); t < m0; ++t) {
        const Rational block_lo(t, m0);
        const Rational block_hi(t + 1, m0);
        if (block_lo >= hi)
            break;
        Rational len = std::min(hi, block_hi) - std::max(lo, block_lo);
        if (len > 0)
            out.push_back({t, len});
    }
    return out;
}

} // namespace

Rational density_mass(const PerturbedStepKernel& kernel, std::span<const Rational> point,
                      const OpenTarget& target, std::size_t m)
{
    const std::size_t k = kernel.arity();
    if (point.size() != k)
        throw ContractError("point arity does not match the kernel");
    if (m == 0)
        throw ContractError("resolution must be positive");

    std::vector<std::vector<Overlap>> per_coord;
    for (const auto& x : point)
        per_coord.push_back(overlaps(x, m, kernel.resolution()));

    Rational mass = 0;
    std::vector<std::size_t> pick(k, 0);
    std::vector<std::size_t> block(k);
    while (true) {
        Rational volume = 1;
        for (std::size_t i = 0; i < k; ++i) {
            block[i] = per_coord[i][pick[i]].block;
            volume *= per_coord[i][pick[i]].length;
        }
        if (target.contains(kernel.space(), kernel.base_at(block)))
            mass += volume;

        std::size_t i = k;
        while (i > 0 && pick[i - 1] + 1 == per_coord[i - 1].size()) {
            pick[i - 1] = 0;
            --i;
        }
        if (i == 0)
            break;
        ++pick[i - 1];
    }
    for (std::size_t i = 0; i < k; ++i)
        mass *= m;
    return mass;
}

DensityVerdict classify_density_tuple(const PerturbedStepKernel& kernel, std::span<const Rational> point,
                                      double epsilon, std::size_t m_max)
{
    if (!(epsilon > 0.0))
        throw ContractError("epsilon must be positive");
    const std::size_t k = kernel.arity();
    const std::size_t m0 = kernel.resolution();
    const Value value = kernel.eval(point);
    const auto target = OpenTarget::ball(value, epsilon);

    DensityVerdict verdict;
    verdict.aligned_masses_one = true;
    for (std::size_t m = m0; m <= m_max; m *= 2) {
        verdict.resolutions.push_back(m);
        if (density_mass(kernel, point, target, m) != 1) {
            verdict.aligned_masses_one = false;
            break;
        }
    }

    // For large m the cell of x_i eventually meets block floor(x_i m0), and
    // also block t-1 when x_i = t/m0 sits on a grid line (non-aligned m).
    std::vector<std::vector<std::size_t>> touched(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t t = block_of(point[i], m0);
        touched[i].push_back(t);
        if (t > 0 && point[i] * m0 == Rational(t))
            touched[i].push_back(t - 1);
    }
    bool limit_ok = true;
    std::vector<std::size_t> pick(k, 0);
    std::vector<std::size_t> block(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i)
            block[i] = touched[i][pick[i]];
        if (!target.contains(kernel.space(), kernel.base_at(block)))
            limit_ok = false;
        std::size_t i = k;
        while (i > 0 && pick[i - 1] + 1 == touched[i - 1].size()) {
            pick[i - 1] = 0;
            --i;
        }
        if (i == 0)
            break;
        ++pick[i - 1];
    }
    for (std::size_t i = 0; i < k; ++i)
        block[i] = touched[i].front();
    const bool floor_ok = target.contains(kernel.space(), kernel.base_at(block));
    verdict.boundary_failure = floor_ok && !limit_ok;
    verdict.density = verdict.aligned_masses_one && limit_ok;
    return verdict;
}

bool is_density_tuple(const PerturbedStepKernel& kernel, std::span<const Rational> point, double epsilon,
                      std::size_t m_max)
{
    return classify_density_tuple(kernel, point, epsilon, m_max).density;
}

} // namespace krepair
