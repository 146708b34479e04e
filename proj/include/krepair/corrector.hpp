#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "krepair/batch.hpp"
#include "krepair/constraint.hpp"
#include "krepair/kernel.hpp"
#include "krepair/ramsey.hpp"

namespace krepair {

struct CorrectionOptions {
    // Initial resolution m; by default the smallest m0 * 2^j separating A.
    std::optional<std::size_t> resolution;
    // Initial |Ω(z)| for the symmetric corrector; 0 means 2 * max(n, k).
    std::size_t part_size = 0;
    std::size_t max_part_size = 64;
    std::uint64_t seed = 0;
    std::size_t max_escalations = 3;
    std::size_t extraction_restarts = 8;
    std::uint64_t extraction_budget = 200'000;
    batch::Exec exec = batch::Exec::Parallel;
};

/// The finite stage: a kernel, a constraint, the finite point set A and eps.
struct CorrectionProblem {
    PerturbedStepKernel kernel;
    ConstraintSet constraint;
    std::vector<Rational> points;
    double epsilon = 0.1;
    CorrectionOptions options;

    // Throws ContractError on repeated points, eps <= 0 or an arity mismatch.
    void validate() const;
};

struct AtomVerdict {
    std::string atom;
    bool exact = false;
    bool relaxed = false;
};

struct TupleCloseness {
    TupleIndex tuple;
    bool density = false;
    bool boundary = false;
    double distance = 0.0;
    bool close = true; // vacuous off density tuples
};

struct Attempt {
    std::size_t resolution = 0;
    std::size_t part_size = 0;
    std::uint64_t seed = 0;
    std::string outcome;
};

struct CorrectionReport {
    bool success = false;
    std::string failure;
    std::size_t atoms_checked = 0;
    bool relaxed_ok = false;
    bool exact_ok = false;
    bool closeness_ok = false;
    std::vector<AtomVerdict> atoms;
    std::vector<TupleCloseness> closeness;
    std::vector<Attempt> trajectory;
    std::uint64_t seed = 0;
    std::size_t escalations = 0;
    std::size_t resolution = 0;
    std::size_t part_size = 0;
    std::size_t extraction_passes = 0;
    std::optional<TypeVector> failing_type;
};

struct CorrectionResult {
    Assignment g;
    CorrectionReport report;
    // Per point of A: the single resampled point z' (distinct mode) or Ω(z).
    std::vector<std::vector<Rational>> samples;
    // Multiset mode: Ξ(z) as positions into samples[z].
    std::vector<std::vector<std::size_t>> representatives;
};

// Smallest m = m0 * 2^j placing the points of A in pairwise different cells.
std::size_t initial_resolution(const PerturbedStepKernel& kernel, const std::vector<Rational>& points);

// Resamples every z in A once inside Δ_m(z) and reads g off the kernel at the
// resampled points; escalates m on failure.
CorrectionResult correct_nonsymmetric(const CorrectionProblem& problem);

// Draws Ω(z), colours k-subsets by partition cell, extracts type-monochromatic
// Ξ(z) and defines g on every multiset tuple from distinct representatives.
CorrectionResult correct_symmetric(const CorrectionProblem& problem);

// Dispatches on the constraint's index mode.
CorrectionResult correct(const CorrectionProblem& problem);

struct VerificationReport {
    bool clean = false;
    bool complete = false;
    bool relaxed_ok = false;
    bool symmetric_ok = false;
    bool closeness_ok = false;
    std::vector<std::string> issues;
};

// Recomputes every verdict from scratch and flags disagreements with the
// report embedded in `result`.
VerificationReport verify_correction(const CorrectionResult& result, const CorrectionProblem& problem);

// Largest dist_K between g at a multiset tuple and the kernel value obtained
// by swapping one representative for another element of the same Ξ(z).
double representative_swap_spread(const CorrectionResult& result, const CorrectionProblem& problem);

} // namespace krepair
