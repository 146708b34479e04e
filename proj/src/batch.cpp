#include "krepair/batch.hpp"

#include <algorithm>
#include <exception>

#include "krepair/combinatorics.hpp"
#include "krepair/errors.hpp"
#include "krepair/rng.hpp"

namespace krepair::batch {

namespace {

// Runs body(i) for i in [0, count); the first exception thrown in a worker is
// rethrown on the calling thread.
template <typename Body>
void for_range(std::int64_t count, Exec exec, Body&& body)
{
    if (exec == Exec::Serial) {
        for (std::int64_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(krepair_batch_failure)
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace

std::vector<Color> color_subsets(const PerturbedStepKernel& kernel, std::span<const Rational> elements,
                                 const CellPartition& partition, Exec exec)
{
    const std::size_t k = kernel.arity();
    const auto count = binomial(elements.size(), k);
    std::vector<Color> colors(count);
    for_range(static_cast<std::int64_t>(count), exec, [&](std::int64_t rank) {
        const auto subset = colex_unrank(static_cast<std::uint64_t>(rank), k);
        Point point;
        point.reserve(k);
        for (int e : subset)
            point.push_back(elements[static_cast<std::size_t>(e)]);
        colors[static_cast<std::size_t>(rank)] = static_cast<Color>(partition.cell_of(kernel.eval(point)));
    });
    return colors;
}

std::vector<DensityVerdict> classify_tuples(const PerturbedStepKernel& kernel, std::span<const Point> tuples,
                                            double epsilon, std::size_t m_max, Exec exec)
{
    std::vector<DensityVerdict> out(tuples.size());
    for_range(static_cast<std::int64_t>(tuples.size()), exec, [&](std::int64_t i) {
        out[static_cast<std::size_t>(i)] = classify_density_tuple(kernel, tuples[static_cast<std::size_t>(i)],
                                                                  epsilon, m_max);
    });
    return out;
}

std::vector<Rational> density_masses(const PerturbedStepKernel& kernel, std::span<const Point> points,
                                     const OpenTarget& target, std::size_t m, Exec exec)
{
    std::vector<Rational> out(points.size());
    for_range(static_cast<std::int64_t>(points.size()), exec, [&](std::int64_t i) {
        out[static_cast<std::size_t>(i)] = density_mass(kernel, points[static_cast<std::size_t>(i)], target, m);
    });
    return out;
}

std::size_t audit_violations(const PerturbedStepKernel& kernel, std::span<const GroundAtom> atoms,
                             std::size_t variables, std::size_t trials, std::uint64_t seed, Exec exec)
{
    const std::size_t k = kernel.arity();
    if (variables < k)
        throw ContractError("audit needs at least k sample points per trial");
    std::vector<unsigned char> violated(trials, 0);
    const auto tuples = enumerate_tuples(variables, k, IndexMode::Distinct);
    for_range(static_cast<std::int64_t>(trials), exec, [&](std::int64_t t) {
        Rng rng = make_stream(seed, static_cast<std::uint64_t>(t));
        std::vector<Rational> points;
        while (points.size() < variables) {
            Rational x = uniform_unit(rng);
            if (std::find(points.begin(), points.end(), x) == points.end())
                points.push_back(std::move(x));
        }
        Assignment a(variables, k, IndexMode::Distinct);
        Point p(k);
        for (const auto& tuple : tuples) {
            for (std::size_t i = 0; i < k; ++i)
                p[i] = points[tuple[i] - 1];
            a.set(tuple, kernel.eval(p));
        }
        violated[static_cast<std::size_t>(t)] = satisfies(a, atoms, kernel.space()) ? 0 : 1;
    });
    std::size_t total = 0;
    for (unsigned char v : violated)
        total += v;
    return total;
}

std::uint64_t complete_graph_sweep(std::size_t order, std::size_t clique, Exec exec)
{
    const std::size_t pairs = order * (order - 1) / 2;
    if (pairs > 40)
        throw ContractError("complete_graph_sweep is limited to 40 pairs");
    const std::uint64_t colorings = std::uint64_t{1} << pairs;
    std::vector<Element> part(order);
    for (std::size_t i = 0; i < order; ++i)
        part[i] = static_cast<Element>(i);

    std::vector<unsigned char> found(colorings, 0);
    for_range(static_cast<std::int64_t>(colorings), exec, [&](std::int64_t code) {
        RamseyInstance instance;
        instance.parts = {part};
        instance.sizes = {2};
        instance.targets = {clique};
        instance.coloring = [code](const Array& array) {
            const auto& e = array[0];
            const int bit = static_cast<int>(colex_rank(e));
            return static_cast<Color>(code >> bit & 1);
        };
        auto outcome = ramsey_extract(instance, ExhaustiveStrategy{});
        if (outcome.status == RamseyStatus::Found && verify_extraction(instance, *outcome.extraction))
            found[static_cast<std::size_t>(code)] = 1;
    });
    std::uint64_t total = 0;
    for (unsigned char f : found)
        total += f;
    return total;
}

} // namespace krepair::batch
