#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "krepair/batch.hpp"
#include "krepair/combinatorics.hpp"
#include "krepair/demos.hpp"
#include "krepair/errors.hpp"
#include "krepair/ramsey.hpp"
#include "support.hpp"

using namespace krepair;

namespace {

// All r-subsets of `set`, via a selection mask.
std::vector<std::vector<Element>> subsets_of(const std::vector<Element>& set, std::size_t r)
{
    std::vector<std::vector<Element>> out;
    if (r > set.size())
        return out;
    std::vector<bool> mask(set.size(), false);
    std::fill(mask.end() - static_cast<std::ptrdiff_t>(r), mask.end(), true);
    do {
        std::vector<Element> s;
        for (std::size_t i = 0; i < set.size(); ++i)
            if (mask[i])
                s.push_back(set[i]);
        out.push_back(s);
    } while (std::next_permutation(mask.begin(), mask.end()));
    return out;
}

// Cartesian product of per-part subset lists.
std::vector<Array> arrays_over(const std::vector<std::vector<Element>>& sets, const std::vector<std::size_t>& sizes)
{
    std::vector<Array> out{Array{}};
    for (std::size_t i = 0; i < sets.size(); ++i) {
        std::vector<Array> next;
        for (const auto& prefix : out)
            for (const auto& b : subsets_of(sets[i], sizes[i])) {
                auto a = prefix;
                a.push_back(b);
                next.push_back(a);
            }
        out = std::move(next);
    }
    return out;
}

bool brute_force_exists(const RamseyInstance& inst)
{
    for (const auto& choice : arrays_over(inst.parts, inst.targets)) {
        std::set<Color> seen;
        for (const auto& a : arrays_over(choice, inst.sizes))
            seen.insert(inst.coloring(a));
        if (seen.size() <= 1)
            return true;
    }
    return false;
}

RamseyInstance graph_instance(std::size_t order, std::size_t clique, std::map<std::pair<int, int>, Color> edges)
{
    RamseyInstance inst;
    inst.parts = {{}};
    for (std::size_t i = 0; i < order; ++i)
        inst.parts[0].push_back(static_cast<Element>(i));
    inst.sizes = {2};
    inst.targets = {clique};
    inst.coloring = [edges](const Array& a) { return edges.at({a[0][0], a[0][1]}); };
    return inst;
}

RamseyInstance pentagon()
{
    std::map<std::pair<int, int>, Color> edges;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
            edges[{i, j}] = (j - i == 1 || j - i == 4) ? 1 : 2;
    return graph_instance(5, 3, edges);
}

// Random table colouring over arrays, keyed by the flattened array.
RamseyInstance random_instance(Rng& rng)
{
    RamseyInstance inst;
    const std::size_t nu = krepair::testing::pick(rng, 1, 2);
    Element next = 0;
    for (std::size_t i = 0; i < nu; ++i) {
        const std::size_t r = krepair::testing::pick(rng, 2, nu == 1 ? 7 : 5);
        std::vector<Element> part;
        for (std::size_t j = 0; j < r; ++j)
            part.push_back(next++);
        inst.parts.push_back(part);
        const std::size_t k = krepair::testing::pick(rng, 1, std::min<std::size_t>(2, r));
        inst.sizes.push_back(k);
        inst.targets.push_back(krepair::testing::pick(rng, k, std::min(r, k + 2)));
    }
    const Color colors = static_cast<Color>(krepair::testing::pick(rng, 1, 3));
    auto table = std::make_shared<std::map<Array, Color>>();
    for (const auto& a : arrays_over(inst.parts, inst.sizes))
        (*table)[a] = static_cast<Color>(krepair::testing::pick(rng, 1, static_cast<std::size_t>(colors)));
    inst.coloring = [table](const Array& a) { return table->at(a); };
    return inst;
}

} // namespace

TEST_CASE("pigeonhole: one part, singletons, two colours")
{
    Rng rng = make_stream(51, 0);
    for (int mask = 0; mask < 8; ++mask) {
        RamseyInstance inst;
        inst.parts = {{10, 11, 12}};
        inst.sizes = {1};
        inst.targets = {2};
        inst.coloring = [mask](const Array& a) { return ((mask >> (a[0][0] - 10)) & 1) + 1; };
        const auto out = ramsey_extract(inst, ExhaustiveStrategy{});
        REQUIRE(out.status == RamseyStatus::Found);
        CHECK(verify_extraction(inst, *out.extraction));
        const auto r = ramsey_extract(inst, RandomizedStrategy{4, rng(), 1000});
        CHECK(r.status == RamseyStatus::Found);
    }
}

TEST_CASE("every 2-colouring of K6 has a monochromatic triangle")
{
    CHECK(batch::complete_graph_sweep(6, 3, batch::Exec::Serial) == 32768);
    CHECK(batch::complete_graph_sweep(5, 3, batch::Exec::Serial) < 1024);
}

TEST_CASE("pentagon colouring has no monochromatic triangle")
{
    const auto inst = pentagon();
    const auto out = ramsey_extract(inst, ExhaustiveStrategy{});
    CHECK(out.status == RamseyStatus::NotFound);
    CHECK(out.proven);
    CHECK_FALSE(brute_force_exists(inst));
    for (const auto& c : subsets_of(inst.parts[0], 3))
        for (Color color : {1, 2})
            CHECK_FALSE(verify_extraction(inst, Extraction{{c}, color}));
}

TEST_CASE("budget exhaustion is distinct from a proof")
{
    const auto inst = pentagon();
    const auto out = ramsey_extract(inst, ExhaustiveStrategy{2});
    CHECK(out.status == RamseyStatus::BudgetExhausted);
    CHECK_FALSE(out.proven);
}

TEST_CASE("verify_extraction rejects a recoloured array")
{
    std::map<std::pair<int, int>, Color> edges;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            edges[{i, j}] = 1;
    const auto inst = graph_instance(6, 4, edges);
    const auto out = ramsey_extract(inst, ExhaustiveStrategy{});
    REQUIRE(out.status == RamseyStatus::Found);
    CHECK(verify_extraction(inst, *out.extraction));

    const auto c = out.extraction->subsets[0];
    auto mutated = edges;
    mutated[{c[1], c[2]}] = 2;
    CHECK_FALSE(verify_extraction(graph_instance(6, 4, mutated), *out.extraction));

    Extraction wrong_size = *out.extraction;
    wrong_size.subsets[0].pop_back();
    CHECK_FALSE(verify_extraction(inst, wrong_size));
}

TEST_CASE("instance validation")
{
    RamseyInstance inst = pentagon();
    inst.targets = {6};
    CHECK_THROWS_AS(inst.validate(), ContractError);
    inst = pentagon();
    inst.parts.push_back({0, 9});
    inst.sizes.push_back(1);
    inst.targets.push_back(1);
    CHECK_THROWS_AS(inst.validate(), ContractError);
}

TEST_CASE("exhaustive search agrees with brute force on small random instances")
{
    Rng rng = make_stream(52, 0);
    int found = 0, missing = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const auto inst = random_instance(rng);
        const bool exists = brute_force_exists(inst);
        const auto out = ramsey_extract(inst, ExhaustiveStrategy{});
        REQUIRE(out.status != RamseyStatus::BudgetExhausted);
        CHECK((out.status == RamseyStatus::Found) == exists);
        if (out.status == RamseyStatus::Found) {
            ++found;
            CHECK(verify_extraction(inst, *out.extraction));
            for (std::size_t i = 0; i < inst.parts.size(); ++i) {
                CHECK(out.extraction->subsets[i].size() == inst.targets[i]);
                for (Element e : out.extraction->subsets[i])
                    CHECK(std::count(inst.parts[i].begin(), inst.parts[i].end(), e) == 1);
            }
        } else {
            ++missing;
            CHECK(out.proven);
        }
        const auto randomized = ramsey_extract(inst, RandomizedStrategy{4, 7, 100'000});
        if (randomized.status == RamseyStatus::Found)
            CHECK(verify_extraction(inst, *randomized.extraction));
        else
            CHECK_FALSE((exists && randomized.proven));
    }
    CHECK(found > 0);
    CHECK(missing > 0);
}

TEST_CASE("randomized strategy is deterministic for a fixed seed")
{
    Rng rng = make_stream(53, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = random_instance(rng);
        const auto a = ramsey_extract(inst, RandomizedStrategy{5, 99, 5000});
        const auto b = ramsey_extract(inst, RandomizedStrategy{5, 99, 5000});
        CHECK(a.status == b.status);
        CHECK(a.nodes == b.nodes);
        if (a.extraction && b.extraction) {
            CHECK(a.extraction->subsets == b.extraction->subsets);
            CHECK(a.extraction->color == b.extraction->color);
        }
    }
}

TEST_CASE("type enumeration")
{
    const auto types = enumerate_types(2, 2);
    CHECK(types == std::vector<TypeVector>{{0, 2}, {1, 1}, {2, 0}});
    CHECK(enumerate_types(3, 2).size() == 6);
    CHECK(enumerate_types(3, 3).size() == 10);
    CHECK(to_string(TypeVector{1, 0, 2}) == "(1,0,2)");
}

TEST_CASE("multi-type extraction: constant colouring takes a single sweep")
{
    const std::vector<std::vector<Element>> parts{{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}};
    const SubsetColoring constant = [](std::span<const Element>) { return 3; };
    const auto out = multi_type_extract(parts, 2, constant, 3, ExhaustiveStrategy{});
    REQUIRE(out.status == RamseyStatus::Found);
    CHECK(out.extraction->passes == 1);
    CHECK(out.extraction->xi == std::vector<std::vector<Element>>{{0, 1, 2}, {4, 5, 6}, {8, 9, 10}});
    CHECK(verify_multi_type(parts, 2, constant, *out.extraction, 3));
}

TEST_CASE("multi-type extraction processes types in lexicographic order")
{
    const std::vector<std::vector<Element>> parts{{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}};
    // Parity of the smallest element, so a single sweep fails.
    const SubsetColoring parity = [](std::span<const Element> s) { return s[0] % 2; };
    const auto out = multi_type_extract(parts, 2, parity, 2, ExhaustiveStrategy{});
    REQUIRE(out.status == RamseyStatus::Found);
    CHECK(out.extraction->pass_order == std::vector<TypeVector>{{0, 2}, {1, 1}, {2, 0}});
    CHECK(out.extraction->passes == 3);
    CHECK(verify_multi_type(parts, 2, parity, *out.extraction, 2));
    for (std::size_t z = 0; z < parts.size(); ++z) {
        CHECK(out.extraction->xi[z].size() == 2);
        for (Element e : out.extraction->xi[z])
            CHECK(std::count(parts[z].begin(), parts[z].end(), e) == 1);
    }
}

TEST_CASE("multi-type extraction reports the failing type")
{
    // Pentagon inside the first part; type (2,0) cannot be made monochromatic at size 3.
    const std::vector<std::vector<Element>> parts{{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}};
    const SubsetColoring coloring = [](std::span<const Element> s) {
        if (s[1] < 5) {
            const int d = s[1] - s[0];
            return (d == 1 || d == 4) ? 1 : 2;
        }
        return 1;
    };
    const auto out = multi_type_extract(parts, 2, coloring, 3, ExhaustiveStrategy{});
    CHECK(out.status == RamseyStatus::NotFound);
    REQUIRE(out.failing_type.has_value());
    CHECK(*out.failing_type == TypeVector{2, 0});
}

TEST_CASE("verify_multi_type catches a recoloured subset")
{
    const std::vector<std::vector<Element>> parts{{0, 1, 2, 3}, {4, 5, 6, 7}};
    const SubsetColoring constant = [](std::span<const Element>) { return 1; };
    const auto out = multi_type_extract(parts, 2, constant, 3, ExhaustiveStrategy{});
    REQUIRE(out.status == RamseyStatus::Found);
    const auto& xi = out.extraction->xi;
    const Element a = xi[0][0], b = xi[1][1];
    const SubsetColoring mutated = [a, b](std::span<const Element> s) { return (s[0] == a && s[1] == b) ? 2 : 1; };
    CHECK_FALSE(verify_multi_type(parts, 2, mutated, *out.extraction, 3));
}

TEST_CASE("step-kernel colouring is already type-monochromatic")
{
    const auto kernel = bipartite_graphon(false);
    const auto partition = epsilon_partition(kernel.space(), 0.5);
    // Three points of A, four samples each, every sample inside one base block.
    const std::vector<Rational> centres{parse_rational("0.1"), parse_rational("0.3"), parse_rational("0.7")};
    Rng rng = make_stream(54, 0);
    std::vector<Rational> elements;
    std::vector<std::vector<Element>> parts;
    for (const auto& c : centres) {
        std::vector<Element> part;
        for (int j = 0; j < 4; ++j) {
            part.push_back(static_cast<Element>(elements.size()));
            elements.push_back(sample_in_cell(c, 8, rng));
        }
        parts.push_back(part);
    }
    const auto colors = batch::color_subsets(kernel, elements, partition, batch::Exec::Serial);
    const SubsetColoring coloring = [&](std::span<const Element> s) { return colors[colex_rank(s)]; };
    const auto out = multi_type_extract(parts, 2, coloring, 3, ExhaustiveStrategy{});
    REQUIRE(out.status == RamseyStatus::Found);
    CHECK(out.extraction->passes == 1);
    for (std::size_t z = 0; z < parts.size(); ++z)
        CHECK(out.extraction->xi[z] == std::vector<Element>(parts[z].begin(), parts[z].begin() + 3));
}

TEST_CASE("multi-type extraction agrees between strategies on random colourings")
{
    Rng rng = make_stream(55, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t nparts = krepair::testing::pick(rng, 1, 3);
        const std::size_t size = krepair::testing::pick(rng, 3, 5);
        std::vector<std::vector<Element>> parts;
        for (std::size_t z = 0; z < nparts; ++z) {
            parts.emplace_back();
            for (std::size_t j = 0; j < size; ++j)
                parts.back().push_back(static_cast<Element>(z * size + j));
        }
        const std::size_t total = nparts * size;
        auto colors = std::make_shared<std::vector<Color>>();
        for (std::uint64_t r = 0; r < binomial(total, 2); ++r)
            colors->push_back(static_cast<Color>(krepair::testing::pick(rng, 0, 1)));
        const SubsetColoring coloring = [colors](std::span<const Element> s) { return (*colors)[colex_rank(s)]; };
        const auto a = multi_type_extract(parts, 2, coloring, 2, ExhaustiveStrategy{});
        const auto b = multi_type_extract(parts, 2, coloring, 2, RandomizedStrategy{8, 5, 100'000});
        if (a.status == RamseyStatus::Found)
            CHECK(verify_multi_type(parts, 2, coloring, *a.extraction, 2));
        if (b.status == RamseyStatus::Found)
            CHECK(verify_multi_type(parts, 2, coloring, *b.extraction, 2));
    }
}
