#include "krepair/cli.hpp"

#include <chrono>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "krepair/demos.hpp"
#include "krepair/density.hpp"
#include "krepair/errors.hpp"
#include "krepair/io.hpp"

namespace krepair {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_failure = 2;

struct Options {
    std::string kernel;
    std::string constraint;
    std::string points;
    std::string point;
    std::string report;
    std::string coloring;
    std::string out;
    std::string example;
    std::string strategy = "exhaustive";
    std::string target_value;
    std::string variant;
    std::optional<std::uint64_t> seed;
    double epsilon = 0.1;
    std::optional<std::size_t> m;
    std::size_t m_max = 0;
    std::size_t part_size = 0;
    std::optional<std::size_t> max_escalations;
    std::optional<std::uint64_t> budget;
    std::size_t trials = 10'000;
    bool serial = false;
};

class Clock {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::uint64_t need_seed(const Options& o)
{
    if (!o.seed)
        throw CLI::RequiredError("--seed");
    return *o.seed;
}

CorrectionOptions correction_options(const Options& o)
{
    CorrectionOptions c;
    c.resolution = o.m;
    c.part_size = o.part_size;
    c.seed = need_seed(o);
    if (o.max_escalations)
        c.max_escalations = *o.max_escalations;
    if (o.budget)
        c.extraction_budget = *o.budget;
    c.exec = o.serial ? batch::Exec::Serial : batch::Exec::Parallel;
    return c;
}

void emit(const Options& o, Json doc, const Clock& clock, const std::string& summary, std::ostream& out)
{
    doc["timing"] = {{"seconds", clock.seconds()}};
    if (o.out.empty()) {
        out << doc.dump(2) << "\n";
    } else {
        write_json_file(o.out, doc);
        out << summary << "\n";
    }
}

std::string yes_no(bool b)
{
    return b ? "yes" : "no";
}

std::string correction_summary(const CorrectionResult& r)
{
    const auto& rep = r.report;
    std::string s = rep.success ? "success" : "FAILED: " + rep.failure;
    s += " (m=" + std::to_string(rep.resolution);
    if (rep.part_size)
        s += ", R=" + std::to_string(rep.part_size);
    s += ", escalations=" + std::to_string(rep.escalations) + ", atoms=" + std::to_string(rep.atoms_checked)
         + ", relaxed ok=" + yes_no(rep.relaxed_ok) + ", close at density tuples=" + yes_no(rep.closeness_ok) + ")";
    return s;
}

int cmd_eval(const Options& o, std::ostream& out)
{
    const auto kernel = kernel_from_json(read_json_file(o.kernel));
    const auto point = parse_points(o.point);
    out << kernel.space().format(kernel.eval(point)) << "\n";
    return exit_ok;
}

int cmd_density(const Options& o, std::ostream& out)
{
    const Clock clock;
    const auto kernel = kernel_from_json(read_json_file(o.kernel));
    const auto point = parse_points(o.point);
    const Value centre = o.target_value.empty() ? kernel.eval(point) : kernel.space().parse(o.target_value);
    Json doc;
    doc["point"] = Json::array();
    for (const auto& x : point)
        doc["point"].push_back(to_string(x));
    doc["target"] = {{"centre", kernel.space().format(centre)}, {"radius", o.epsilon}};
    std::string summary;
    if (o.m) {
        const Rational mass = density_mass(kernel, point, OpenTarget::ball(centre, o.epsilon), *o.m);
        doc["m"] = *o.m;
        doc["mass"] = to_string(mass);
        summary = "mass " + to_string(mass);
    }
    const std::size_t m_max = o.m_max ? o.m_max : kernel.resolution() * 8;
    const auto verdict = classify_density_tuple(kernel, point, o.epsilon, m_max);
    doc["density_tuple"] = verdict.density;
    doc["boundary_failure"] = verdict.boundary_failure;
    doc["aligned_resolutions"] = verdict.resolutions;
    summary += (summary.empty() ? "" : "; ") + std::string("density tuple: ") + yes_no(verdict.density);
    emit(o, doc, clock, summary, out);
    return exit_ok;
}

int cmd_correct(const Options& o, std::ostream& out)
{
    const Clock clock;
    auto kernel = kernel_from_json(read_json_file(o.kernel));
    auto constraint = constraint_from_json(read_json_file(o.constraint), kernel.space(), kernel.arity());
    CorrectionProblem problem{std::move(kernel), std::move(constraint), parse_points(o.points), o.epsilon,
                              correction_options(o)};
    const auto result = correct(problem);
    Json doc{{"command", "correct"}};
    doc.update(correction_to_json(problem, result));
    emit(o, doc, clock, correction_summary(result), out);
    return result.report.success ? exit_ok : exit_failure;
}

int cmd_verify(const Options& o, std::ostream& out)
{
    const Json report = read_json_file(o.report);
    if (!report.contains("inputs"))
        throw FormatError(o.report + ": missing field 'inputs'");
    const auto problem = problem_from_json(report["inputs"]);
    const auto result = correction_from_json(report, problem);
    const auto verdict = verify_correction(result, problem);
    out << verification_to_json(verdict).dump(2) << "\n";
    return verdict.clean ? exit_ok : exit_failure;
}

int cmd_ramsey(const Options& o, std::ostream& out)
{
    const Clock clock;
    const auto instance = ramsey_from_json(read_json_file(o.coloring));
    Strategy strategy;
    if (o.strategy == "exhaustive") {
        ExhaustiveStrategy s;
        if (o.budget)
            s.budget = *o.budget;
        strategy = s;
    } else if (o.strategy == "randomized") {
        RandomizedStrategy s;
        s.seed = need_seed(o);
        if (o.budget)
            s.budget_per_restart = *o.budget;
        strategy = s;
    } else {
        throw CLI::ValidationError("--strategy", "expected exhaustive or randomized");
    }
    const auto outcome = ramsey_extract(instance, strategy);
    Json doc{{"command", "ramsey"},
             {"strategy", o.strategy},
             {"status", to_string(outcome.status)},
             {"proven", outcome.proven},
             {"nodes", outcome.nodes}};
    if (outcome.extraction) {
        doc["subsets"] = outcome.extraction->subsets;
        doc["color"] = outcome.extraction->color;
        doc["verified"] = verify_extraction(instance, *outcome.extraction);
    }
    emit(o, doc, clock, std::string("ramsey: ") + to_string(outcome.status), out);
    return outcome.status == RamseyStatus::Found ? exit_ok : exit_failure;
}

int cmd_audit(const Options& o, std::ostream& out)
{
    const Clock clock;
    const auto kernel = kernel_from_json(read_json_file(o.kernel));
    const auto constraint = constraint_from_json(read_json_file(o.constraint), kernel.space(), kernel.arity());
    const auto result = audit_ae_hypothesis(kernel, constraint, o.trials, need_seed(o),
                                            o.serial ? batch::Exec::Serial : batch::Exec::Parallel);
    Json doc{{"command", "audit"}};
    doc.update(audit_to_json(result));
    emit(o, doc, clock, "violation rate " + std::to_string(result.rate), out);
    return exit_ok;
}

PerturbedStepKernel demo_kernel(const Options& o, const std::string& fallback)
{
    if (!o.kernel.empty())
        return kernel_from_json(read_json_file(o.kernel));
    const std::string name = o.example.empty() ? fallback : o.example;
    if (name == "bipartite")
        return bipartite_graphon(true);
    if (name == "complete")
        return constant_graphon(1);
    if (name == "empty")
        return constant_graphon(0);
    if (name == "block")
        return block_metric_kernel();
    if (name == "ray")
        return ray_metric_kernel();
    throw CLI::ValidationError("--example", "unknown example '" + name + "'");
}

std::vector<Rational> demo_points(const Options& o, const char* fallback)
{
    return parse_points(o.points.empty() ? fallback : o.points);
}

Json triangle_census_json(const TriangleCensus& c)
{
    Json defects = Json::array();
    for (const auto& t : c.f_defects)
        defects.push_back(t);
    return {{"triples", c.triples}, {"g_triangles", c.g_triangles}, {"f_triangles", c.f_triangles},
            {"f_defects", defects}};
}

int cmd_demo(const Options& o, std::ostream& out)
{
    const Clock clock;
    Json doc{{"command", "demo"}, {"demo", o.variant}};
    if (o.variant == "triangle-removal") {
        const auto kernel = demo_kernel(o, "bipartite");
        const auto points = demo_points(o, "0.05,0.15,0.3,0.55,0.7,0.9");
        const auto options = correction_options(o);
        const auto r = triangle_removal_demo(kernel, points, o.epsilon, options.seed, options);
        ConstraintSet constraint(2, IndexMode::Multiset);
        constraint.add_symmetry().add_triangle_free();
        doc.update(correction_to_json({kernel, constraint, points, o.epsilon, options}, r.correction));
        doc["census"] = triangle_census_json(r.census);
        const bool ok = r.correction.report.success && r.census.g_triangles == 0;
        emit(o, doc, clock,
             correction_summary(r.correction) + "; g-triangles " + std::to_string(r.census.g_triangles)
                 + ", f-triangles " + std::to_string(r.census.f_triangles),
             out);
        return ok ? exit_ok : exit_failure;
    }
    if (o.variant == "metric-repair") {
        const auto kernel = demo_kernel(o, "block");
        const auto points = demo_points(o, "0.1,0.6,0.9");
        const auto options = correction_options(o);
        const auto r = metric_repair_demo(kernel, points, o.epsilon, options.seed, options);
        ConstraintSet constraint(2, IndexMode::Multiset);
        constraint.add_symmetry().add_triangle_inequality().add_finite();
        doc.update(correction_to_json({kernel, constraint, points, o.epsilon, options}, r.correction));
        Json cert{{"triples", r.certificate.triples},
                  {"violations", r.certificate.violations},
                  {"diagonal_zero", r.certificate.diagonal_zero},
                  {"symmetric", r.certificate.symmetric},
                  {"finite", r.certificate.finite},
                  {"broken_by_zeroing", r.broken_by_zeroing},
                  {"collapsed", r.collapsed},
                  {"anchor", r.anchor ? Json(*r.anchor) : Json(nullptr)},
                  {"passed", r.certificate.passed}};
        doc["certificate"] = cert;
        doc["repaired"] = r.repaired ? assignment_to_json(*r.repaired, kernel.space()) : Json(nullptr);
        emit(o, doc, clock,
             correction_summary(r.correction) + "; semimetric certificate " + (r.certificate.passed ? "passed" : "FAILED"),
             out);
        return r.certificate.passed ? exit_ok : exit_failure;
    }
    if (o.variant == "remark") {
        const auto bits = ValueSpace::discrete({"0", "1"});
        const auto all = remark_demos();
        Json cases = Json::array();
        std::string summary;
        for (const auto& c : all) {
            Json j{{"name", c.name}, {"n", c.n}, {"constraint", constraint_to_json(c.constraint, bits)}};
            j.update(feasibility_to_json(c.result, bits));
            cases.push_back(j);
            summary += c.name + ": " + to_string(c.result.status) + "\n";
        }
        const bool expected = all[0].result.status == FeasibilityResult::Status::Infeasible
                   && all[1].result.status == FeasibilityResult::Status::Infeasible
                   && all[2].result.status == FeasibilityResult::Status::Feasible;
        doc["cases"] = cases;
        emit(o, doc, clock, summary.substr(0, summary.size() - 1), out);
        return expected ? exit_ok : exit_failure;
    }
    if (o.variant == "audit") {
        const auto kernel = demo_kernel(o, "bipartite");
        ConstraintSet constraint(2, IndexMode::Multiset);
        if (!o.constraint.empty())
            constraint = constraint_from_json(read_json_file(o.constraint), kernel.space(), kernel.arity());
        else
            constraint.add_symmetry().add_triangle_free();
        const auto result = audit_ae_hypothesis(kernel, constraint, o.trials, need_seed(o),
                                                o.serial ? batch::Exec::Serial : batch::Exec::Parallel);
        doc.update(audit_to_json(result));
        emit(o, doc, clock, "violation rate " + std::to_string(result.rate), out);
        return exit_ok;
    }
    throw CLI::ValidationError("demo", "unknown demo '" + o.variant + "'");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Constraint repair for step kernels with null-set defects"};
    app.require_subcommand(1);
    Options o;

    auto seed = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "RNG seed (no default randomness)"); };
    auto out_file = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Write the JSON report here"); };

    auto* eval = app.add_subcommand("eval", "Evaluate the kernel at a point");
    eval->add_option("--kernel", o.kernel)->required();
    eval->add_option("--point", o.point, "Comma-separated coordinates")->required();

    auto* density = app.add_subcommand("density", "Density mass and density-tuple test");
    density->add_option("--kernel", o.kernel)->required();
    density->add_option("--point", o.point)->required();
    density->add_option("--m", o.m, "Resolution for the mass");
    density->add_option("--m-max", o.m_max, "Largest aligned resolution for the density test");
    density->add_option("--target-value", o.target_value, "Centre of the open ball (default: f at the point)");
    density->add_option("--epsilon", o.epsilon, "Ball radius");
    out_file(density);

    auto* corr = app.add_subcommand("correct", "Correct the kernel on a finite point set");
    corr->add_option("--kernel", o.kernel)->required();
    corr->add_option("--constraint", o.constraint)->required();
    corr->add_option("--points", o.points)->required();
    corr->add_option("--epsilon", o.epsilon);
    corr->add_option("--m", o.m, "Initial resolution");
    corr->add_option("--R", o.part_size, "Initial |Omega(z)| for the symmetric corrector");
    corr->add_option("--max-escalations", o.max_escalations);
    corr->add_option("--budget", o.budget, "Extraction node budget per restart");
    corr->add_flag("--serial", o.serial, "Use the serial reference loops");
    seed(corr);
    out_file(corr);

    auto* ramsey = app.add_subcommand("ramsey", "Ramsey extraction for an explicit colouring");
    ramsey->add_option("--coloring", o.coloring)->required();
    ramsey->add_option("--strategy", o.strategy)->check(CLI::IsMember({"exhaustive", "randomized"}));
    ramsey->add_option("--budget", o.budget);
    seed(ramsey);
    out_file(ramsey);

    auto* demo = app.add_subcommand("demo", "Worked examples");
    demo->add_option("variant", o.variant)
        ->required()
        ->check(CLI::IsMember({"triangle-removal", "metric-repair", "remark", "audit"}));
    demo->add_option("--kernel", o.kernel);
    demo->add_option("--constraint", o.constraint);
    demo->add_option("--example", o.example, "bipartite, complete, empty, block or ray");
    demo->add_option("--points", o.points);
    demo->add_option("--epsilon", o.epsilon);
    demo->add_option("--m", o.m);
    demo->add_option("--R", o.part_size);
    demo->add_option("--max-escalations", o.max_escalations);
    demo->add_option("--budget", o.budget);
    demo->add_option("--trials", o.trials);
    demo->add_flag("--serial", o.serial);
    seed(demo);
    out_file(demo);

    auto* audit = app.add_subcommand("audit", "Estimate how often f violates the constraint");
    audit->add_option("--kernel", o.kernel)->required();
    audit->add_option("--constraint", o.constraint)->required();
    audit->add_option("--trials", o.trials);
    audit->add_flag("--serial", o.serial);
    seed(audit);
    out_file(audit);

    auto* verify = app.add_subcommand("verify", "Re-check a correction report from scratch");
    verify->add_option("--report", o.report)->required();

    try {
        app.parse(argc, argv);
        if (*eval)
            return cmd_eval(o, out);
        if (*density)
            return cmd_density(o, out);
        if (*corr)
            return cmd_correct(o, out);
        if (*ramsey)
            return cmd_ramsey(o, out);
        if (*demo)
            return cmd_demo(o, out);
        if (*audit)
            return cmd_audit(o, out);
        return cmd_verify(o, out);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::Error& e) {
        app.exit(e, out, err);
        return exit_usage;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

} // namespace krepair
