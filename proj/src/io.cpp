#include "krepair/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include "krepair/combinatorics.hpp"
#include "krepair/errors.hpp"

namespace krepair {

namespace {

// A JSON node together with its path, for error messages.
class Node {
public:
    Node(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

    const Json& json() const { return j_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& what) const { throw FormatError(path_ + ": " + what); }

    bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

    Node at(const char* key) const
    {
        if (!j_.is_object())
            fail("expected an object");
        if (!j_.contains(key))
            fail(std::string("missing field '") + key + "'");
        return {j_[key], path_ + "." + key};
    }

    Node at(std::size_t i) const { return {j_[i], path_ + "[" + std::to_string(i) + "]"}; }

    std::size_t size() const
    {
        if (!j_.is_array())
            fail("expected an array");
        return j_.size();
    }

    std::string str() const
    {
        if (!j_.is_string())
            fail("expected a string");
        return j_.get<std::string>();
    }

    // Strings are taken verbatim; numbers by their JSON spelling.
    std::string text() const
    {
        if (j_.is_string())
            return j_.get<std::string>();
        if (j_.is_number())
            return j_.dump();
        fail("expected a string or a number");
    }

    std::size_t index() const
    {
        if (!j_.is_number_integer() || j_.get<long long>() < 0)
            fail("expected a nonnegative integer");
        return j_.get<std::size_t>();
    }

    std::uint64_t u64() const
    {
        if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<long long>() >= 0))
            fail("expected a nonnegative integer");
        return j_.get<std::uint64_t>();
    }

    double number() const
    {
        if (j_.is_number())
            return j_.get<double>();
        if (j_.is_string())
            return to_double(rational());
        fail("expected a number");
    }

    Rational rational() const
    {
        try {
            return parse_rational(text());
        } catch (const FormatError& e) {
            fail(e.what());
        }
    }

    bool boolean() const
    {
        if (!j_.is_boolean())
            fail("expected true or false");
        return j_.get<bool>();
    }

    Value value(const ValueSpace& space) const
    {
        try {
            return space.parse(text());
        } catch (const DomainError& e) {
            fail(e.what());
        } catch (const FormatError& e) {
            fail(e.what());
        }
    }

    std::vector<std::size_t> indices() const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < size(); ++i)
            out.push_back(at(i).index());
        return out;
    }

private:
    const Json& j_;
    std::string path_;
};

ValueSpace space_from_json(const Node& node)
{
    const std::string variant = node.at("variant").str();
    try {
        if (variant == "finite_metric") {
            std::vector<std::string> labels;
            const Node l = node.at("labels");
            for (std::size_t i = 0; i < l.size(); ++i)
                labels.push_back(l.at(i).text());
            if (!node.has("dist_matrix"))
                return ValueSpace::discrete(std::move(labels));
            std::vector<std::vector<double>> dist;
            const Node d = node.at("dist_matrix");
            for (std::size_t i = 0; i < d.size(); ++i) {
                std::vector<double> row;
                for (std::size_t j = 0; j < d.at(i).size(); ++j)
                    row.push_back(d.at(i).at(j).number());
                dist.push_back(std::move(row));
            }
            return ValueSpace::finite_metric(std::move(labels), std::move(dist));
        }
        if (variant == "bounded_interval")
            return ValueSpace::bounded_interval(node.at("diameter").number());
        if (variant == "compactified_ray")
            return ValueSpace::compactified_ray();
    } catch (const DomainError& e) {
        node.fail(e.what());
    }
    node.at("variant").fail("unknown variant '" + variant + "'");
}

Json space_to_json(const ValueSpace& space)
{
    Json out;
    switch (space.variant()) {
    case ValueSpace::Variant::FiniteMetric: {
        out["variant"] = "finite_metric";
        Json labels = Json::array();
        for (std::size_t i = 0; i < space.label_count(); ++i)
            labels.push_back(space.label_name(i));
        out["labels"] = labels;
        out["dist_matrix"] = space.distance_matrix();
        break;
    }
    case ValueSpace::Variant::BoundedInterval:
        out["variant"] = "bounded_interval";
        out["diameter"] = space.diameter();
        break;
    case ValueSpace::Variant::CompactifiedRay:
        out["variant"] = "compactified_ray";
        break;
    }
    return out;
}

Json tuple_json(const TupleIndex& t)
{
    return Json(t);
}

std::vector<std::vector<std::size_t>> slots_from(const Node& node)
{
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < node.size(); ++i)
        out.push_back(node.at(i).indices());
    return out;
}

} // namespace

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw FormatError(path + ": cannot open");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& doc)
{
    std::ofstream out(path);
    if (!out)
        throw FormatError(path + ": cannot write");
    out << doc.dump(2) << "\n";
}

PerturbedStepKernel kernel_from_json(const Json& doc)
{
    const Node root(doc, "kernel");
    const std::size_t k = root.at("arity").index();
    const std::size_t m0 = root.at("resolution").index();
    const ValueSpace space = space_from_json(root.at("value_space"));

    std::vector<Value> base;
    const Node b = root.at("base");
    for (std::size_t i = 0; i < b.size(); ++i)
        base.push_back(b.at(i).value(space));

    std::vector<ExceptionPiece> exceptions;
    if (root.has("exceptions")) {
        const Node ex = root.at("exceptions");
        for (std::size_t i = 0; i < ex.size(); ++i) {
            const Node piece = ex.at(i);
            ExceptionPiece p;
            const Node atoms = piece.at("atoms");
            for (std::size_t a = 0; a < atoms.size(); ++a) {
                const Node atom = atoms.at(a);
                auto coord = [&](const Node& c) {
                    const std::size_t i1 = c.index();
                    if (i1 < 1 || i1 > k)
                        c.fail("coordinate must lie in 1.." + std::to_string(k));
                    return i1 - 1;
                };
                if (atom.has("coords")) {
                    const Node cs = atom.at("coords");
                    if (cs.size() != 2)
                        cs.fail("expected two coordinates");
                    p.atoms.push_back(CoordEqualsCoord{coord(cs.at(std::size_t{0})), coord(cs.at(std::size_t{1}))});
                } else {
                    p.atoms.push_back(CoordEqualsConstant{coord(atom.at("coord")), atom.at("const").rational()});
                }
            }
            p.value = piece.at("value").value(space);
            exceptions.push_back(std::move(p));
        }
    }
    const bool symmetric = root.has("symmetric_base") && root.at("symmetric_base").boolean();
    try {
        return PerturbedStepKernel(k, m0, space, std::move(base), std::move(exceptions), symmetric);
    } catch (const std::logic_error& e) {
        root.fail(e.what());
    }
}

Json kernel_to_json(const PerturbedStepKernel& kernel)
{
    const auto& space = kernel.space();
    Json out;
    out["arity"] = kernel.arity();
    out["resolution"] = kernel.resolution();
    out["value_space"] = space_to_json(space);
    Json base = Json::array();
    for (Value v : kernel.base())
        base.push_back(space.format(v));
    out["base"] = base;
    Json exceptions = Json::array();
    for (const auto& piece : kernel.exceptions()) {
        Json atoms = Json::array();
        for (const auto& atom : piece.atoms) {
            if (const auto* c = std::get_if<CoordEqualsConstant>(&atom))
                atoms.push_back({{"coord", c->coord + 1}, {"const", to_string(c->constant)}});
            else {
                const auto& e = std::get<CoordEqualsCoord>(atom);
                atoms.push_back({{"coords", {e.first + 1, e.second + 1}}});
            }
        }
        exceptions.push_back({{"atoms", atoms}, {"value", space.format(piece.value)}});
    }
    out["exceptions"] = exceptions;
    out["symmetric_base"] = kernel.symmetric_base();
    return out;
}

ConstraintSet constraint_from_json(const Json& doc, const ValueSpace& space, std::size_t arity)
{
    const Node root(doc, "constraint");
    if (root.has("arity"))
        arity = root.at("arity").index();
    const std::string mode_name = root.at("mode").str();
    IndexMode mode;
    if (mode_name == "distinct")
        mode = IndexMode::Distinct;
    else if (mode_name == "multiset")
        mode = IndexMode::Multiset;
    else
        root.at("mode").fail("expected 'distinct' or 'multiset'");

    ConstraintSet cs(arity, mode);
    const Node atoms = root.at("atoms");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const Node atom = atoms.at(i);
        const std::string type = atom.at("type").str();
        try {
            if (type == "symmetry") {
                cs.add_symmetry();
            } else if (type == "triangle_free") {
                cs.add_triangle_free();
            } else if (type == "triangle_inequality") {
                cs.add_triangle_inequality();
            } else if (type == "finite") {
                cs.add_finite();
            } else {
                AtomTemplate t;
                t.name = atom.has("name") ? atom.at("name").str() : type;
                t.slots = slots_from(atom.at("slots"));
                if (atom.has("unordered"))
                    t.unordered = atom.at("unordered").boolean();
                if (type == "zero_product") {
                    t.kind = AtomKind::ZeroProduct;
                } else if (type == "equality") {
                    t.kind = AtomKind::Equality;
                } else if (type == "linear_ineq") {
                    t.kind = AtomKind::LinearInequality;
                    const Node c = atom.at("coeffs");
                    for (std::size_t j = 0; j < c.size(); ++j)
                        t.coeffs.push_back(c.at(j).number());
                    t.bound = atom.has("bound") ? atom.at("bound").number() : 0.0;
                } else if (type == "table") {
                    t.kind = AtomKind::Table;
                    ValueRows rows;
                    const Node allowed = atom.at("allowed");
                    for (std::size_t r = 0; r < allowed.size(); ++r) {
                        std::vector<Value> row;
                        for (std::size_t c = 0; c < allowed.at(r).size(); ++c)
                            row.push_back(allowed.at(r).at(c).value(space));
                        rows.push_back(std::move(row));
                    }
                    t.allowed = std::make_shared<const ValueRows>(std::move(rows));
                } else {
                    atom.at("type").fail("unknown atom type '" + type + "'");
                }
                cs.add(std::move(t));
            }
        } catch (const ContractError& e) {
            atom.fail(e.what());
        }
    }
    return cs;
}

Json constraint_to_json(const ConstraintSet& constraint, const ValueSpace& space)
{
    Json out;
    out["arity"] = constraint.arity();
    out["mode"] = to_string(constraint.mode());
    Json atoms = Json::array();
    if (constraint.has_symmetry())
        atoms.push_back({{"type", "symmetry"}});
    for (const auto& t : constraint.templates()) {
        if (!t.builtin.empty()) {
            atoms.push_back({{"type", t.builtin}});
            continue;
        }
        Json a;
        switch (t.kind) {
        case AtomKind::Equality:
            a["type"] = "equality";
            break;
        case AtomKind::ZeroProduct:
            a["type"] = "zero_product";
            break;
        case AtomKind::LinearInequality:
            a["type"] = "linear_ineq";
            break;
        case AtomKind::Finite:
            a["type"] = "finite";
            break;
        case AtomKind::Table:
            a["type"] = "table";
            break;
        }
        a["name"] = t.name;
        a["slots"] = t.slots;
        if (t.unordered)
            a["unordered"] = true;
        if (t.kind == AtomKind::LinearInequality) {
            a["coeffs"] = t.coeffs;
            a["bound"] = t.bound;
        }
        if (t.kind == AtomKind::Table) {
            Json rows = Json::array();
            for (const auto& row : *t.allowed) {
                Json r = Json::array();
                for (Value v : row)
                    r.push_back(space.format(v));
                rows.push_back(r);
            }
            a["allowed"] = rows;
        }
        atoms.push_back(a);
    }
    out["atoms"] = atoms;
    return out;
}

std::vector<Rational> parse_points(std::string_view text)
{
    std::vector<Rational> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view item = text.substr(start, end - start);
        while (!item.empty() && item.front() == ' ')
            item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ')
            item.remove_suffix(1);
        if (item.empty())
            throw FormatError("points: empty entry in '" + std::string(text) + "'");
        out.push_back(parse_rational(item));
        start = end + 1;
    }
    return out;
}

std::vector<Array> canonical_arrays(const std::vector<std::vector<Element>>& parts,
                                    const std::vector<std::size_t>& sizes)
{
    const std::size_t nu = parts.size();
    std::vector<std::vector<std::vector<Element>>> blocks(nu);
    for (std::size_t i = 0; i < nu; ++i) {
        const std::size_t r = sizes[i];
        if (r > parts[i].size())
            return {};
        std::vector<std::size_t> c(r);
        std::iota(c.begin(), c.end(), 0);
        do {
            std::vector<Element> block;
            for (std::size_t x : c)
                block.push_back(parts[i][x]);
            blocks[i].push_back(std::move(block));
        } while (next_combination(c, parts[i].size()));
    }
    std::vector<Array> out;
    std::vector<std::size_t> pick(nu, 0);
    while (true) {
        Array a;
        for (std::size_t i = 0; i < nu; ++i)
            a.push_back(blocks[i][pick[i]]);
        out.push_back(std::move(a));
        std::size_t i = nu;
        while (i > 0 && ++pick[i - 1] == blocks[i - 1].size())
            pick[--i] = 0;
        if (i == 0)
            break;
    }
    return out;
}

RamseyInstance ramsey_from_json(const Json& doc)
{
    const Node root(doc, "ramsey");
    const auto part_sizes = root.at("parts").indices();
    RamseyInstance inst;
    inst.sizes = root.at("sizes").indices();
    inst.targets = root.at("targets").indices();
    if (inst.sizes.size() != part_sizes.size() || inst.targets.size() != part_sizes.size())
        root.fail("parts, sizes and targets must have equal length");
    Element next = 0;
    for (std::size_t r : part_sizes) {
        std::vector<Element> part(r);
        std::iota(part.begin(), part.end(), next);
        next += static_cast<Element>(r);
        inst.parts.push_back(std::move(part));
    }
    const auto arrays = canonical_arrays(inst.parts, inst.sizes);
    const Node colors = root.at("colors");
    if (colors.size() != arrays.size())
        colors.fail("expected " + std::to_string(arrays.size()) + " colours, one per array");
    auto table = std::make_shared<std::map<Array, Color>>();
    for (std::size_t i = 0; i < arrays.size(); ++i)
        (*table)[arrays[i]] = static_cast<Color>(colors.at(i).index());
    inst.coloring = [table](const Array& a) { return table->at(a); };
    try {
        inst.validate();
    } catch (const ContractError& e) {
        root.fail(e.what());
    }
    return inst;
}

Json assignment_to_json(const Assignment& g, const ValueSpace& space)
{
    Json out = Json::object();
    for (const auto& t : g.tuples())
        if (g.has(t))
            out[to_string(t)] = space.format(g.at(t));
    return out;
}

Assignment assignment_from_json(const Json& table, std::size_t n, std::size_t arity, IndexMode mode,
                                const ValueSpace& space)
{
    const Node node(table, "report.g");
    Assignment g(n, arity, mode);
    for (const auto& t : g.tuples()) {
        const std::string key = to_string(t);
        if (node.has(key.c_str()))
            g.set(t, node.at(key.c_str()).value(space));
    }
    return g;
}

Json problem_to_json(const CorrectionProblem& problem)
{
    Json out;
    out["kernel"] = kernel_to_json(problem.kernel);
    out["constraint"] = constraint_to_json(problem.constraint, problem.kernel.space());
    Json points = Json::array();
    for (const auto& x : problem.points)
        points.push_back(to_string(x));
    out["points"] = points;
    out["epsilon"] = problem.epsilon;
    const auto& o = problem.options;
    Json options;
    if (o.resolution)
        options["m"] = *o.resolution;
    options["R"] = o.part_size;
    options["max_R"] = o.max_part_size;
    options["seed"] = o.seed;
    options["max_escalations"] = o.max_escalations;
    options["extraction_restarts"] = o.extraction_restarts;
    options["budget"] = o.extraction_budget;
    out["options"] = options;
    return out;
}

CorrectionProblem problem_from_json(const Json& inputs)
{
    const Node root(inputs, "inputs");
    PerturbedStepKernel kernel = kernel_from_json(root.at("kernel").json());
    ConstraintSet constraint = constraint_from_json(root.at("constraint").json(), kernel.space(), kernel.arity());
    std::vector<Rational> points;
    const Node p = root.at("points");
    for (std::size_t i = 0; i < p.size(); ++i)
        points.push_back(p.at(i).rational());
    CorrectionOptions options;
    if (root.has("options")) {
        const Node o = root.at("options");
        if (o.has("m"))
            options.resolution = o.at("m").index();
        if (o.has("R"))
            options.part_size = o.at("R").index();
        if (o.has("max_R"))
            options.max_part_size = o.at("max_R").index();
        if (o.has("seed"))
            options.seed = o.at("seed").u64();
        if (o.has("max_escalations"))
            options.max_escalations = o.at("max_escalations").index();
        if (o.has("extraction_restarts"))
            options.extraction_restarts = o.at("extraction_restarts").index();
        if (o.has("budget"))
            options.extraction_budget = o.at("budget").u64();
    }
    return CorrectionProblem{std::move(kernel), std::move(constraint), std::move(points),
                             root.at("epsilon").number(), options};
}

Json correction_to_json(const CorrectionProblem& problem, const CorrectionResult& result)
{
    const auto& r = result.report;
    const auto& space = problem.kernel.space();
    Json out;
    out["inputs"] = problem_to_json(problem);
    out["seed"] = r.seed;
    out["success"] = r.success;
    out["failure"] = r.failure;
    out["mode"] = to_string(result.g.mode());
    out["resolution"] = r.resolution;
    out["R"] = r.part_size;
    out["escalations"] = r.escalations;
    out["extraction_passes"] = r.extraction_passes;
    out["failing_type"] = r.failing_type ? Json(to_string(*r.failing_type)) : Json(nullptr);

    Json trajectory = Json::array();
    for (const auto& a : r.trajectory)
        trajectory.push_back({{"m", a.resolution}, {"R", a.part_size}, {"seed", a.seed}, {"outcome", a.outcome}});
    out["trajectory"] = trajectory;

    out["g"] = assignment_to_json(result.g, space);

    Json samples = Json::array();
    for (const auto& s : result.samples) {
        Json row = Json::array();
        for (const auto& x : s)
            row.push_back(to_string(x));
        samples.push_back(row);
    }
    out["samples"] = samples;
    out["representatives"] = result.representatives;

    Json verdicts = Json::array();
    for (const auto& a : r.atoms)
        verdicts.push_back({{"atom", a.atom}, {"exact", a.exact}, {"relaxed", a.relaxed}});
    out["atoms"] = {{"checked", r.atoms_checked},
                    {"relaxed_ok", r.relaxed_ok},
                    {"exact_ok", r.exact_ok},
                    {"verdicts", verdicts}};

    Json tuples = Json::array();
    for (const auto& c : r.closeness)
        tuples.push_back({{"tuple", tuple_json(c.tuple)},
                          {"density", c.density},
                          {"boundary", c.boundary},
                          {"distance", c.distance},
                          {"close", c.close}});
    out["closeness"] = {{"ok", r.closeness_ok}, {"tuples", tuples}};
    return out;
}

CorrectionResult correction_from_json(const Json& report, const CorrectionProblem& problem)
{
    const Node root(report, "report");
    const auto& kernel = problem.kernel;
    CorrectionResult result{assignment_from_json(root.at("g").json(), problem.points.size(), kernel.arity(),
                                                 problem.constraint.mode(), kernel.space()),
                            {},
                            {},
                            {}};
    auto& r = result.report;
    r.success = root.at("success").boolean();
    r.seed = root.at("seed").u64();
    r.resolution = root.at("resolution").index();
    r.part_size = root.at("R").index();
    r.relaxed_ok = root.at("atoms").at("relaxed_ok").boolean();
    r.closeness_ok = root.at("closeness").at("ok").boolean();
    if (root.has("samples")) {
        const Node s = root.at("samples");
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::vector<Rational> row;
            for (std::size_t j = 0; j < s.at(i).size(); ++j)
                row.push_back(s.at(i).at(j).rational());
            result.samples.push_back(std::move(row));
        }
    }
    if (root.has("representatives")) {
        const Node x = root.at("representatives");
        for (std::size_t i = 0; i < x.size(); ++i)
            result.representatives.push_back(x.at(i).indices());
    }
    return result;
}

Json verification_to_json(const VerificationReport& report)
{
    return {{"clean", report.clean},
            {"complete", report.complete},
            {"relaxed_ok", report.relaxed_ok},
            {"symmetric_ok", report.symmetric_ok},
            {"closeness_ok", report.closeness_ok},
            {"issues", report.issues}};
}

Json feasibility_to_json(const FeasibilityResult& result, const ValueSpace& space)
{
    Json out;
    out["status"] = to_string(result.status);
    out["assignment"] = result.assignment ? assignment_to_json(*result.assignment, space) : Json(nullptr);
    Json witness = Json::array();
    for (const auto& atom : result.witness)
        witness.push_back(atom.describe());
    out["witness"] = witness;
    out["nodes"] = result.nodes;
    return out;
}

Json audit_to_json(const AuditResult& result)
{
    return {{"trials", result.trials},
            {"violations", result.violations},
            {"variables", result.variables},
            {"rate", result.rate},
            {"wilson95", {result.lower, result.upper}}};
}

} // namespace krepair
