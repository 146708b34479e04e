#pragma once

// File formats: kernels, constraints, Ramsey colourings and reports.
// Malformed input raises FormatError with the offending field path.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "krepair/constraint.hpp"
#include "krepair/corrector.hpp"
#include "krepair/demos.hpp"
#include "krepair/kernel.hpp"
#include "krepair/ramsey.hpp"

namespace krepair {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

PerturbedStepKernel kernel_from_json(const Json& doc);
Json kernel_to_json(const PerturbedStepKernel& kernel);

// `arity` applies when the document has no "arity" field.
ConstraintSet constraint_from_json(const Json& doc, const ValueSpace& space, std::size_t arity);
Json constraint_to_json(const ConstraintSet& constraint, const ValueSpace& space);

// Comma-separated exact coordinates, e.g. "0.2,0.7,1/3".
std::vector<Rational> parse_points(std::string_view text);

// Arrays (B_1, ..., B_nu) in canonical order: B_1 varies slowest, each block
// runs through its combinations lexicographically.
std::vector<Array> canonical_arrays(const std::vector<std::vector<Element>>& parts,
                                    const std::vector<std::size_t>& sizes);

// {"parts": [R_1, ...], "sizes": [k_1, ...], "targets": [N_1, ...],
//  "colors": [...]} with one colour per array in canonical order. Elements
// are numbered 0, 1, ... consecutively through the parts.
RamseyInstance ramsey_from_json(const Json& doc);

Json assignment_to_json(const Assignment& g, const ValueSpace& space);
Assignment assignment_from_json(const Json& table, std::size_t n, std::size_t arity, IndexMode mode,
                                const ValueSpace& space);

Json problem_to_json(const CorrectionProblem& problem);
CorrectionProblem problem_from_json(const Json& inputs);

// Everything except "timing" is a function of the inputs and the seed.
Json correction_to_json(const CorrectionProblem& problem, const CorrectionResult& result);
// Reads back what `verify_correction` needs: g, samples, representatives and the verdicts.
CorrectionResult correction_from_json(const Json& report, const CorrectionProblem& problem);

Json verification_to_json(const VerificationReport& report);
Json feasibility_to_json(const FeasibilityResult& result, const ValueSpace& space);
Json audit_to_json(const AuditResult& result);

} // namespace krepair
