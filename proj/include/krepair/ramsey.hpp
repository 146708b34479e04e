#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace krepair {

using Element = int;
using Color = int;

// One block B_i per part; each block sorted ascending.
using Array = std::vector<std::vector<Element>>;
using ArrayColoring = std::function<Color(const Array&)>;

/// Disjoint parts A_1..A_nu, block sizes k_i, targets N_i and a colouring of
/// every array (B_1, ..., B_nu) with B_i ⊆ A_i, |B_i| = k_i.
struct RamseyInstance {
    std::vector<std::vector<Element>> parts;
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> targets;
    ArrayColoring coloring;

    // Throws ContractError unless parts are disjoint and 1 <= k_i <= N_i <= |A_i|.
    void validate() const;
};

/// Subsets C_i ⊆ A_i with |C_i| = N_i on which every array has `color`.
struct Extraction {
    std::vector<std::vector<Element>> subsets;
    Color color = 0;
};

enum class RamseyStatus { Found, NotFound, BudgetExhausted };

const char* to_string(RamseyStatus status);

struct ExhaustiveStrategy {
    std::uint64_t budget = 50'000'000;
};

// Backtracking over shuffled candidate orders, restarted with fresh streams.
struct RandomizedStrategy {
    std::size_t restarts = 16;
    std::uint64_t seed = 0;
    std::uint64_t budget_per_restart = 200'000;
};

using Strategy = std::variant<ExhaustiveStrategy, RandomizedStrategy>;

struct RamseyOutcome {
    RamseyStatus status = RamseyStatus::NotFound;
    std::optional<Extraction> extraction;
    // NotFound backed by a complete search.
    bool proven = false;
    std::uint64_t nodes = 0;
};

RamseyOutcome ramsey_extract(const RamseyInstance& instance, const Strategy& strategy);

// Independent re-enumeration of all arrays inside the extraction.
bool verify_extraction(const RamseyInstance& instance, const Extraction& extraction);

// ---- repeated extraction over set types ---------------------------------

// Type of a k-subset S of the union of parts: z -> |S ∩ part z|.
using TypeVector = std::vector<std::size_t>;
// Colour of a k-subset given in ascending order.
using SubsetColoring = std::function<Color(std::span<const Element>)>;

// Count vectors over `parts` summing to k, lexicographically ascending.
std::vector<TypeVector> enumerate_types(std::size_t parts, std::size_t k);

// Printed as "(c_1,...,c_n)"; shares the overload for vector<size_t>.
std::string to_string(const std::vector<std::size_t>& counts);

struct MultiTypeExtraction {
    std::vector<std::vector<Element>> xi;
    // Types in processing order; empty when the input was already
    // type-monochromatic and a single sweep sufficed.
    std::vector<TypeVector> pass_order;
    std::vector<std::pair<TypeVector, Color>> type_colors;
    std::size_t passes = 0;
};

struct MultiTypeOutcome {
    RamseyStatus status = RamseyStatus::NotFound;
    std::optional<MultiTypeExtraction> extraction;
    std::optional<TypeVector> failing_type;
    std::uint64_t nodes = 0;
};

// Finds Ξ(z) ⊆ Ω(z), |Ξ(z)| = target, such that the colour of every k-subset
// of the union depends only on its type. Types are processed one at a time in
// lexicographic order, each pass shrinking the candidate sets.
MultiTypeOutcome multi_type_extract(const std::vector<std::vector<Element>>& parts, std::size_t k,
                                    const SubsetColoring& coloring, std::size_t target,
                                    const Strategy& strategy);

// Exhaustive check over all k-subsets of the union of `xi` (at most 64 elements).
bool verify_multi_type(const std::vector<std::vector<Element>>& parts, std::size_t k,
                       const SubsetColoring& coloring, const MultiTypeExtraction& extraction,
                       std::size_t target);

} // namespace krepair
