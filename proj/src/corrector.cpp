#include "krepair/corrector.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "krepair/combinatorics.hpp"
#include "krepair/density.hpp"
#include "krepair/errors.hpp"
#include "krepair/rng.hpp"

namespace krepair {

void CorrectionProblem::validate() const
{
    if (!(epsilon > 0.0))
        throw ContractError("epsilon must be positive");
    if (constraint.arity() != kernel.arity())
        throw ContractError("constraint arity " + std::to_string(constraint.arity()) + " differs from kernel arity "
                            + std::to_string(kernel.arity()));
    if (points.empty())
        throw ContractError("the point set A is empty");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i] < 0 || points[i] >= 1)
            throw DomainError("point " + to_string(points[i]) + " outside [0,1)");
        for (std::size_t j = 0; j < i; ++j)
            if (points[i] == points[j])
                throw ContractError("points of A must be distinct (" + to_string(points[i]) + " repeats)");
    }
}

std::size_t initial_resolution(const PerturbedStepKernel& kernel, const std::vector<Rational>& points)
{
    std::size_t m = kernel.resolution();
    for (int doubling = 0; doubling < 48; ++doubling, m *= 2) {
        std::set<std::size_t> cells;
        for (const auto& x : points)
            cells.insert(block_of(x, m));
        if (cells.size() == points.size())
            return m;
    }
    throw ContractError("points of A are too close to separate");
}

namespace {

Point point_of(const std::vector<Rational>& points, const TupleIndex& tuple)
{
    Point p;
    p.reserve(tuple.size());
    for (std::size_t e : tuple)
        p.push_back(points[e - 1]);
    return p;
}

// Exception constants plus every sample drawn so far; a fresh draw avoids
// them so no exception piece can match a tuple of distinct samples.
class SampleGuard {
public:
    explicit SampleGuard(const PerturbedStepKernel& kernel)
    {
        for (const auto& piece : kernel.exceptions())
            for (const auto& atom : piece.atoms)
                if (const auto* c = std::get_if<CoordEqualsConstant>(&atom))
                    taken_.insert(c->constant);
    }

    Rational draw(const Rational& centre, std::size_t m, Rng& rng)
    {
        while (true) {
            Rational x = sample_in_cell(centre, m, rng);
            if (taken_.insert(x).second)
                return x;
        }
    }

private:
    std::set<Rational> taken_;
};

// Fills atom verdicts and density closeness; returns the success verdict.
bool assess(const CorrectionProblem& problem, const Assignment& g, const std::vector<GroundAtom>& atoms,
            std::size_t m, CorrectionReport& report)
{
    const auto& space = problem.kernel.space();
    report.atoms.clear();
    report.atoms_checked = atoms.size();
    report.relaxed_ok = true;
    report.exact_ok = true;
    for (const auto& atom : atoms) {
        AtomVerdict v{atom.describe(), holds(atom, g, space), holds_relaxed(atom, g, space, problem.epsilon)};
        report.relaxed_ok = report.relaxed_ok && v.relaxed;
        report.exact_ok = report.exact_ok && v.exact;
        report.atoms.push_back(std::move(v));
    }

    const auto tuples = g.tuples();
    std::vector<Point> points;
    for (const auto& t : tuples)
        points.push_back(point_of(problem.points, t));
    const auto verdicts = batch::classify_tuples(problem.kernel, points, problem.epsilon, m, problem.options.exec);

    report.closeness.clear();
    report.closeness_ok = true;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        TupleCloseness c;
        c.tuple = tuples[i];
        c.density = verdicts[i].density;
        c.boundary = verdicts[i].boundary_failure;
        c.distance = space.dist(g.at(tuples[i]), problem.kernel.eval(points[i]));
        c.close = !c.density || c.distance <= problem.epsilon;
        report.closeness_ok = report.closeness_ok && c.close;
        report.closeness.push_back(std::move(c));
    }
    return report.relaxed_ok && report.closeness_ok;
}

std::string failure_summary(const CorrectionReport& report)
{
    std::ostringstream out;
    std::size_t shown = 0;
    for (const auto& a : report.atoms)
        if (!a.relaxed && shown++ < 5)
            out << (shown > 1 ? "; " : "") << a.atom;
    if (shown > 5)
        out << "; ... (" << shown << " violated atoms)";
    if (!report.closeness_ok) {
        for (const auto& c : report.closeness)
            if (!c.close) {
                out << (shown ? "; " : "") << "far from f at density tuple " << to_string(c.tuple);
                break;
            }
    }
    return out.str();
}

std::string cap_message(const CorrectionReport& report)
{
    return "escalation cap reached after " + std::to_string(report.trajectory.size()) + " attempts";
}

} // namespace

CorrectionResult correct_nonsymmetric(const CorrectionProblem& problem)
{
    problem.validate();
    if (problem.constraint.mode() != IndexMode::Distinct)
        throw ContractError("correct_nonsymmetric needs a distinct-mode constraint");
    const auto& kernel = problem.kernel;
    const std::size_t n = problem.points.size();
    const std::size_t k = kernel.arity();
    if (n < k)
        throw ContractError("distinct mode needs at least k points");

    const auto atoms = restrict(problem.constraint, n);
    std::size_t m = problem.options.resolution.value_or(initial_resolution(kernel, problem.points));

    CorrectionResult result{Assignment(n, k, IndexMode::Distinct), {}, {}, {}};
    result.report.seed = problem.options.seed;

    for (std::size_t attempt = 0; attempt <= problem.options.max_escalations; ++attempt, m *= 2) {
        const std::uint64_t seed = derive_seed(problem.options.seed, attempt);
        Rng rng = make_stream(seed, 0);
        SampleGuard guard(kernel);
        std::vector<Rational> moved;
        for (const auto& z : problem.points)
            moved.push_back(guard.draw(z, m, rng));

        Assignment g(n, k, IndexMode::Distinct);
        for (const auto& t : g.tuples())
            g.set(t, kernel.eval(point_of(moved, t)));

        CorrectionReport report;
        report.seed = problem.options.seed;
        report.trajectory = std::move(result.report.trajectory);
        const bool ok = assess(problem, g, atoms, m, report);
        report.trajectory.push_back({m, 0, seed, ok ? "success" : "violation: " + failure_summary(report)});
        report.escalations = attempt;
        report.resolution = m;
        report.success = ok;

        result.g = std::move(g);
        result.samples.clear();
        for (auto& x : moved)
            result.samples.push_back({x});
        result.report = std::move(report);
        if (ok)
            return result;
    }
    result.report.failure = cap_message(result.report) + "; " + failure_summary(result.report);
    return result;
}

CorrectionResult correct_symmetric(const CorrectionProblem& problem)
{
    problem.validate();
    if (problem.constraint.mode() != IndexMode::Multiset)
        throw ContractError("correct_symmetric needs a multiset-mode constraint");
    const auto& kernel = problem.kernel;
    if (!kernel.symmetric_base())
        throw ContractError("correct_symmetric needs a kernel with a symmetric base");

    const std::size_t n = problem.points.size();
    const std::size_t k = kernel.arity();
    const std::size_t target = std::max(n, k);
    const auto atoms = restrict(problem.constraint, n);
    const auto partition = epsilon_partition(kernel.space(), problem.epsilon);

    std::size_t m = problem.options.resolution.value_or(initial_resolution(kernel, problem.points));
    std::size_t part_size = problem.options.part_size ? problem.options.part_size : 2 * target;
    part_size = std::max(part_size, target);
    const std::size_t max_part_size = std::max(problem.options.max_part_size, part_size);

    CorrectionResult result{Assignment(n, k, IndexMode::Multiset), {}, {}, {}};
    result.report.seed = problem.options.seed;

    for (std::size_t attempt = 0; attempt <= problem.options.max_escalations; ++attempt) {
        const std::uint64_t seed = derive_seed(problem.options.seed, attempt);
        Rng rng = make_stream(seed, 0);
        SampleGuard guard(kernel);

        // Element z * R + j is the j-th draw in Δ_m(z).
        std::vector<Rational> elements;
        std::vector<std::vector<Element>> parts(n);
        for (std::size_t z = 0; z < n; ++z)
            for (std::size_t j = 0; j < part_size; ++j) {
                parts[z].push_back(static_cast<Element>(elements.size()));
                elements.push_back(guard.draw(problem.points[z], m, rng));
            }

        const auto colors = batch::color_subsets(kernel, elements, partition, problem.options.exec);
        const SubsetColoring coloring = [&colors](std::span<const Element> subset) {
            return colors[colex_rank(subset)];
        };
        const RandomizedStrategy strategy{problem.options.extraction_restarts, seed, problem.options.extraction_budget};
        const auto extracted = multi_type_extract(parts, k, coloring, target, strategy);

        CorrectionReport report;
        report.seed = problem.options.seed;
        report.trajectory = std::move(result.report.trajectory);
        report.escalations = attempt;
        report.resolution = m;
        report.part_size = part_size;

        result.samples.assign(n, {});
        for (std::size_t z = 0; z < n; ++z)
            result.samples[z].assign(elements.begin() + static_cast<std::ptrdiff_t>(z * part_size),
                                     elements.begin() + static_cast<std::ptrdiff_t>((z + 1) * part_size));

        if (extracted.status != RamseyStatus::Found) {
            report.failing_type = extracted.failing_type;
            report.trajectory.push_back({m, part_size, seed,
                                         std::string("extraction ") + to_string(extracted.status) + " at type "
                                             + to_string(extracted.failing_type.value_or(TypeVector{}))});
            result.representatives.clear();
            result.report = std::move(report);
            part_size = std::min(2 * part_size, max_part_size);
            continue;
        }

        const auto& xi = extracted.extraction->xi;
        report.extraction_passes = extracted.extraction->passes;
        result.representatives.assign(n, {});
        for (std::size_t z = 0; z < n; ++z)
            for (Element e : xi[z])
                result.representatives[z].push_back(static_cast<std::size_t>(e) - z * part_size);

        // g on sorted tuples from mutually distinct representatives, copied to all orderings.
        Assignment g(n, k, IndexMode::Multiset);
        for (const auto& tuple : g.tuples()) {
            if (!std::is_sorted(tuple.begin(), tuple.end()))
                continue;
            std::map<std::size_t, std::size_t> used;
            Point reps;
            for (std::size_t e : tuple) {
                const std::size_t z = e - 1;
                reps.push_back(elements[static_cast<std::size_t>(xi[z][used[z]++])]);
            }
            const Value v = kernel.eval(reps);
            TupleIndex perm = tuple;
            do {
                g.set(perm, v);
            } while (std::next_permutation(perm.begin(), perm.end()));
        }

        const bool ok = assess(problem, g, atoms, m, report);
        report.success = ok;
        report.trajectory.push_back({m, part_size, seed, ok ? "success" : "violation: " + failure_summary(report)});
        result.g = std::move(g);
        result.report = std::move(report);
        if (ok)
            return result;
        m *= 2;
    }
    result.report.failure = cap_message(result.report);
    if (!result.report.trajectory.empty())
        result.report.failure += "; last attempt: " + result.report.trajectory.back().outcome;
    return result;
}

CorrectionResult correct(const CorrectionProblem& problem)
{
    return problem.constraint.mode() == IndexMode::Distinct ? correct_nonsymmetric(problem)
                                                            : correct_symmetric(problem);
}

VerificationReport verify_correction(const CorrectionResult& result, const CorrectionProblem& problem)
{
    VerificationReport out;
    const auto& g = result.g;
    const auto& kernel = problem.kernel;
    const auto& space = kernel.space();
    const std::size_t n = problem.points.size();

    if (g.size() != n || g.arity() != kernel.arity() || g.mode() != problem.constraint.mode()) {
        out.issues.push_back("assignment shape does not match the problem");
        return out;
    }
    out.complete = g.complete();
    if (!out.complete) {
        out.issues.push_back("assignment is not total");
        return out;
    }

    const auto atoms = restrict(problem.constraint, n);
    out.relaxed_ok = true;
    for (const auto& atom : atoms)
        if (!holds_relaxed(atom, g, space, problem.epsilon)) {
            out.relaxed_ok = false;
            out.issues.push_back("relaxed atom fails: " + atom.describe());
        }

    out.symmetric_ok = true;
    if (g.mode() == IndexMode::Multiset) {
        for (const auto& tuple : g.tuples()) {
            TupleIndex perm = tuple;
            std::sort(perm.begin(), perm.end());
            do {
                if (g.at(perm) != g.at(tuple)) {
                    out.symmetric_ok = false;
                    out.issues.push_back("g is not symmetric at " + to_string(tuple) + " vs " + to_string(perm));
                    break;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
    }

    const std::size_t m_max = std::max(result.report.resolution, kernel.resolution());
    out.closeness_ok = true;
    for (const auto& tuple : g.tuples()) {
        const Point p = point_of(problem.points, tuple);
        if (!is_density_tuple(kernel, p, problem.epsilon, m_max))
            continue;
        const double d = space.dist(g.at(tuple), kernel.eval(p));
        if (d > problem.epsilon) {
            out.closeness_ok = false;
            std::ostringstream msg;
            msg << "g is " << d << " away from f at density tuple " << to_string(tuple);
            out.issues.push_back(msg.str());
        }
    }

    const bool success = out.relaxed_ok && out.symmetric_ok && out.closeness_ok;
    if (result.report.relaxed_ok != out.relaxed_ok)
        out.issues.push_back("embedded report disagrees on relaxed satisfaction");
    if (result.report.closeness_ok != out.closeness_ok)
        out.issues.push_back("embedded report disagrees on density closeness");
    if (result.report.success != success)
        out.issues.push_back("embedded report disagrees on overall success");
    out.clean = success && out.issues.empty();
    return out;
}

double representative_swap_spread(const CorrectionResult& result, const CorrectionProblem& problem)
{
    if (result.g.mode() != IndexMode::Multiset || result.representatives.empty())
        throw ContractError("swap spread needs a symmetric correction with representatives");
    const auto& kernel = problem.kernel;
    double spread = 0.0;
    for (const auto& tuple : result.g.tuples()) {
        if (!std::is_sorted(tuple.begin(), tuple.end()))
            continue;
        std::map<std::size_t, std::size_t> used;
        std::vector<std::size_t> chosen;
        for (std::size_t e : tuple) {
            const std::size_t z = e - 1;
            chosen.push_back(result.representatives[z][used[z]++]);
        }
        const Value g = result.g.at(tuple);
        for (std::size_t i = 0; i < tuple.size(); ++i) {
            const std::size_t z = tuple[i] - 1;
            for (std::size_t alt : result.representatives[z]) {
                bool taken = false;
                for (std::size_t j = 0; j < tuple.size(); ++j)
                    taken = taken || (tuple[j] == tuple[i] && chosen[j] == alt);
                if (taken)
                    continue;
                Point p;
                for (std::size_t j = 0; j < tuple.size(); ++j)
                    p.push_back(result.samples[tuple[j] - 1][j == i ? alt : chosen[j]]);
                spread = std::max(spread, kernel.space().dist(g, kernel.eval(p)));
            }
        }
    }
    return spread;
}

} // namespace krepair
