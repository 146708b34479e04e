#include "krepair/demos.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "krepair/errors.hpp"

namespace krepair {

namespace {

constexpr double wilson_z = 1.959963984540054;

Rational dec(const char* text)
{
    return parse_rational(text);
}

PerturbedStepKernel two_block_distances(ValueSpace space, std::vector<ExceptionPiece> exceptions)
{
    const Value inside = Value::real(0.2);
    const Value across = Value::real(0.3);
    return PerturbedStepKernel(2, 2, std::move(space), {inside, across, across, inside}, std::move(exceptions),
                               true);
}

double numeric_at(const Assignment& g, const ValueSpace& space, std::size_t i, std::size_t j)
{
    return space.numeric(g.at({i, j}));
}

} // namespace

PerturbedStepKernel bipartite_graphon(bool diagonal_defect)
{
    const Value zero = Value::label(0);
    const Value one = Value::label(1);
    std::vector<ExceptionPiece> exceptions;
    if (diagonal_defect)
        exceptions.push_back({{CoordEqualsCoord{0, 1}}, one});
    return PerturbedStepKernel(2, 2, ValueSpace::discrete({"0", "1"}), {zero, one, one, zero},
                               std::move(exceptions), true);
}

PerturbedStepKernel constant_graphon(std::size_t label)
{
    if (label > 1)
        throw ContractError("graphon labels are 0 and 1");
    return PerturbedStepKernel(2, 1, ValueSpace::discrete({"0", "1"}), {Value::label(label)}, {}, true);
}

PerturbedStepKernel block_metric_kernel()
{
    ExceptionPiece stretched{{CoordEqualsConstant{0, dec("0.1")}, CoordEqualsConstant{1, dec("0.6")}},
                             Value::real(1.0)};
    return two_block_distances(ValueSpace::bounded_interval(1.0), {stretched});
}

PerturbedStepKernel ray_metric_kernel()
{
    ExceptionPiece far_row{{CoordEqualsConstant{0, dec("0.25")}}, Value::infinity()};
    return two_block_distances(ValueSpace::compactified_ray(), {far_row});
}

TriangleRemovalResult triangle_removal_demo(const PerturbedStepKernel& kernel, const std::vector<Rational>& points,
                                            double epsilon, std::uint64_t seed, CorrectionOptions options)
{
    if (kernel.arity() != 2)
        throw ContractError("triangle removal needs a graphon (k = 2)");
    if (kernel.space().variant() != ValueSpace::Variant::FiniteMetric || kernel.space().label_count() != 2)
        throw ContractError("triangle removal needs a {0,1}-valued kernel");

    ConstraintSet constraint(2, IndexMode::Multiset);
    constraint.add_symmetry().add_triangle_free();
    options.seed = seed;
    CorrectionProblem problem{kernel, constraint, points, epsilon, options};

    TriangleRemovalResult out{correct_symmetric(problem), {}};
    const auto& space = kernel.space();
    const auto& g = out.correction.g;
    const std::size_t n = points.size();
    auto edge = [&](Value v) { return space.numeric(v) != 0.0; };
    for (const auto& t : enumerate_tuples(n, 3, IndexMode::Multiset)) {
        ++out.census.triples;
        const std::size_t a = t[0], b = t[1], c = t[2];
        if (g.complete() && edge(g.at({a, b})) && edge(g.at({b, c})) && edge(g.at({a, c})))
            ++out.census.g_triangles;
        auto f = [&](std::size_t i, std::size_t j) { return kernel.eval(Point{points[i - 1], points[j - 1]}); };
        if (edge(f(a, b)) && edge(f(b, c)) && edge(f(a, c))) {
            ++out.census.f_triangles;
            out.census.f_defects.push_back(t);
        }
    }
    return out;
}

MetricCertificate semimetric_certificate(const Assignment& g, const ValueSpace& space)
{
    MetricCertificate cert;
    const std::size_t n = g.size();
    cert.diagonal_zero = true;
    cert.symmetric = true;
    cert.finite = true;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= n; ++j) {
            const double d = numeric_at(g, space, i, j);
            cert.finite = cert.finite && std::isfinite(d);
            cert.symmetric = cert.symmetric && g.at({i, j}) == g.at({j, i});
            if (i == j)
                cert.diagonal_zero = cert.diagonal_zero && d == 0.0;
        }
    for (std::size_t a = 1; a <= n; ++a)
        for (std::size_t b = 1; b <= n; ++b)
            for (std::size_t c = 1; c <= n; ++c) {
                ++cert.triples;
                if (numeric_at(g, space, a, c) > numeric_at(g, space, a, b) + numeric_at(g, space, b, c))
                    cert.violations.push_back({a, b, c});
            }
    cert.passed = cert.violations.empty() && cert.diagonal_zero && cert.symmetric && cert.finite;
    return cert;
}

MetricRepairResult metric_repair_demo(const PerturbedStepKernel& kernel, const std::vector<Rational>& points,
                                      double epsilon, std::uint64_t seed, CorrectionOptions options)
{
    if (kernel.arity() != 2)
        throw ContractError("metric repair needs k = 2");
    const auto& space = kernel.space();
    if (space.variant() == ValueSpace::Variant::FiniteMetric)
        throw ContractError("metric repair needs interval or compactified-ray values");

    ConstraintSet constraint(2, IndexMode::Multiset);
    constraint.add_symmetry().add_triangle_inequality().add_finite();
    options.seed = seed;
    CorrectionProblem problem{kernel, constraint, points, epsilon, options};

    MetricRepairResult out{correct_symmetric(problem), std::nullopt, {}, {}, std::nullopt, {}};
    if (!out.correction.report.success)
        return out;

    const std::size_t n = points.size();
    const auto atoms = restrict(constraint, n);
    Assignment g = out.correction.g;
    Assignment zeroed = g;
    for (std::size_t i = 1; i <= n; ++i)
        zeroed.set({i, i}, space.from_number(0.0));
    for (const auto& atom : atoms)
        if (holds(atom, g, space) && !holds(atom, zeroed, space))
            out.broken_by_zeroing.push_back(atom.describe());

    // Identify every point with an infinite distance with the first point whose row is finite.
    auto row_finite = [&](std::size_t i) {
        for (std::size_t j = 1; j <= n; ++j)
            if (zeroed.at({i, j}).is_infinite())
                return false;
        return true;
    };
    std::vector<std::size_t> image(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        image[i] = i;
        if (row_finite(i)) {
            if (!out.anchor)
                out.anchor = i - 1;
        } else {
            out.collapsed.push_back(i - 1);
        }
    }
    Assignment repaired = zeroed;
    if (!out.collapsed.empty() && out.anchor) {
        for (std::size_t i : out.collapsed)
            image[i + 1] = *out.anchor + 1;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 1; j <= n; ++j)
                repaired.set({i, j}, image[i] == image[j] ? space.from_number(0.0) : zeroed.at({image[i], image[j]}));
    }
    out.certificate = semimetric_certificate(repaired, space);
    out.certificate.passed = out.certificate.passed && out.broken_by_zeroing.empty();
    out.repaired = std::move(repaired);
    return out;
}

std::vector<RemarkCase> remark_demos()
{
    const auto bits = ValueSpace::discrete({"0", "1"});
    const Value zero = Value::label(0);
    const Value one = Value::label(1);
    const ValueRows differ{{zero, one}, {one, zero}};

    std::vector<RemarkCase> cases;

    ConstraintSet oriented(2, IndexMode::Distinct);
    oriented.add_symmetry().add(table_atom("antisym", {{1, 2}, {2, 1}}, differ));
    cases.push_back({"antisymmetry under symmetrization", oriented, 2, feasible(oriented, 2, bits)});

    ConstraintSet diagonal(2, IndexMode::Multiset);
    diagonal.add(table_atom("diagdiff", {{1, 2}, {1, 1}}, differ));
    cases.push_back({"diagonal difference over multisets", diagonal, 1, feasible(diagonal, 1, bits)});

    ConstraintSet plain(2, IndexMode::Distinct);
    plain.add(table_atom("antisym", {{1, 2}, {2, 1}}, differ));
    cases.push_back({"antisymmetry without symmetrization", plain, 2, feasible(plain, 2, bits)});
    return cases;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials)
{
    if (trials == 0)
        return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = wilson_z * wilson_z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = wilson_z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    // The endpoints are exact at 0 and n successes; rounding would leave crumbs.
    const double lower = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    const double upper = successes == trials ? 1.0 : std::min(1.0, centre + half);
    return {lower, upper};
}

AuditResult audit_ae_hypothesis(const PerturbedStepKernel& kernel, const ConstraintSet& constraint,
                                std::size_t trials, std::uint64_t seed, batch::Exec exec)
{
    if (trials == 0)
        throw ContractError("audit needs at least one trial");
    if (constraint.arity() != kernel.arity())
        throw ContractError("constraint and kernel arity differ");
    ConstraintSet distinct = constraint.with_mode(IndexMode::Distinct);
    if (constraint.mode() == IndexMode::Multiset)
        distinct.add_symmetry();

    std::size_t variables = kernel.arity();
    for (const auto& t : distinct.templates())
        variables = std::max(variables, t.variable_count());
    const auto atoms = restrict(distinct, variables);

    AuditResult out;
    out.trials = trials;
    out.variables = variables;
    out.violations = batch::audit_violations(kernel, atoms, variables, trials, seed, exec);
    out.rate = static_cast<double>(out.violations) / static_cast<double>(trials);
    std::tie(out.lower, out.upper) = wilson_interval(out.violations, trials);
    return out;
}

} // namespace krepair
