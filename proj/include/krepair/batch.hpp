#pragma once

// Data-parallel loops used by the corrector, the auditor and the acceptance
// sweeps. Each has an OpenMP path and a plain serial path; the serial path is
// the reference the tests compare against. Results are identical for both.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "krepair/constraint.hpp"
#include "krepair/density.hpp"
#include "krepair/kernel.hpp"
#include "krepair/ramsey.hpp"

namespace krepair::batch {

enum class Exec { Serial, Parallel };

// Colour (partition cell of the kernel value) of every k-subset of
// `elements`, indexed by colex rank; coordinates enter in ascending element order.
std::vector<Color> color_subsets(const PerturbedStepKernel& kernel, std::span<const Rational> elements,
                                 const CellPartition& partition, Exec exec);

std::vector<DensityVerdict> classify_tuples(const PerturbedStepKernel& kernel, std::span<const Point> tuples,
                                            double epsilon, std::size_t m_max, Exec exec);

std::vector<Rational> density_masses(const PerturbedStepKernel& kernel, std::span<const Point> points,
                                     const OpenTarget& target, std::size_t m, Exec exec);

// Trial t draws `variables` distinct uniform points from stream (seed, t),
// evaluates the kernel on every distinct k-tuple of them and checks `atoms`
// exactly. Returns the number of violating trials.
std::size_t audit_violations(const PerturbedStepKernel& kernel, std::span<const GroundAtom> atoms,
                             std::size_t variables, std::size_t trials, std::uint64_t seed, Exec exec);

// Exhaustive extraction (one part of size `order`, pairs, target `clique`) for
// every 2-colouring of the pairs; returns how many colourings admit one.
std::uint64_t complete_graph_sweep(std::size_t order, std::size_t clique, Exec exec);

} // namespace krepair::batch
