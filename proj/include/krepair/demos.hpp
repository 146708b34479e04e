#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "krepair/constraint.hpp"
#include "krepair/corrector.hpp"
#include "krepair/kernel.hpp"

namespace krepair {

// ---- example kernels ----------------------------------------------------

// {0,1}-valued, m0 = 2, value 1 exactly across the two halves. With
// `diagonal_defect` the null diagonal x1 = x2 carries 1.
PerturbedStepKernel bipartite_graphon(bool diagonal_defect = false);
PerturbedStepKernel constant_graphon(std::size_t label);

// m0 = 2 on [0, 1]: d = 0.2 inside a half, 0.3 across, with the single pair
// (0.1, 0.6) stretched to 1.0.
PerturbedStepKernel block_metric_kernel();

// Same blocks on the compactified ray with the row x1 = 0.25 sent to inf.
PerturbedStepKernel ray_metric_kernel();

// ---- triangle removal ---------------------------------------------------

struct TriangleCensus {
    std::size_t triples = 0;
    std::size_t g_triangles = 0;
    std::size_t f_triangles = 0;
    // Ordered triples (with repeats) where the original kernel has a triangle.
    std::vector<TupleIndex> f_defects;
};

struct TriangleRemovalResult {
    CorrectionResult correction;
    TriangleCensus census;
};

// Symmetric correction under Symmetry + TriangleFree, then an exhaustive
// census of all |A|^3 ordered triples for g and for f at the points of A.
TriangleRemovalResult triangle_removal_demo(const PerturbedStepKernel& kernel, const std::vector<Rational>& points,
                                            double epsilon, std::uint64_t seed, CorrectionOptions options = {});

// ---- metric repair ------------------------------------------------------

struct MetricCertificate {
    std::size_t triples = 0;
    std::vector<TupleIndex> violations; // (a, b, c) with d(a,c) > d(a,b) + d(b,c)
    bool diagonal_zero = false;
    bool symmetric = false;
    bool finite = false;
    bool passed = false;
};

struct MetricRepairResult {
    CorrectionResult correction;
    // g after diagonal zeroing and the infinite-row collapse.
    std::optional<Assignment> repaired;
    // Atoms that held exactly before zeroing the diagonal and fail after.
    std::vector<std::string> broken_by_zeroing;
    // 0-based indices of points identified with the anchor.
    std::vector<std::size_t> collapsed;
    std::optional<std::size_t> anchor;
    MetricCertificate certificate;
};

MetricRepairResult metric_repair_demo(const PerturbedStepKernel& kernel, const std::vector<Rational>& points,
                                      double epsilon, std::uint64_t seed, CorrectionOptions options = {});

// Checks every ordered triple over {1..n} exactly; g must be a multiset-mode table.
MetricCertificate semimetric_certificate(const Assignment& g, const ValueSpace& space);

// ---- the two infeasible constraint systems ------------------------------

struct RemarkCase {
    std::string name;
    ConstraintSet constraint;
    std::size_t n = 0;
    FeasibilityResult result;
};

// (a) antisymmetry under symmetrization, (b) diagonal difference over
// multisets, and the distinct-mode antisymmetry control, in that order.
std::vector<RemarkCase> remark_demos();

// ---- a.e. hypothesis audit ----------------------------------------------

struct AuditResult {
    std::size_t trials = 0;
    std::size_t violations = 0;
    std::size_t variables = 0;
    double rate = 0.0;
    double lower = 0.0; // Wilson 95% interval
    double upper = 0.0;
};

// Samples distinct uniform points and checks the distinct-mode restriction of
// the constraint (plus symmetry for multiset constraints) exactly against f.
AuditResult audit_ae_hypothesis(const PerturbedStepKernel& kernel, const ConstraintSet& constraint,
                                std::size_t trials, std::uint64_t seed, batch::Exec exec = batch::Exec::Parallel);

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials);

} // namespace krepair
