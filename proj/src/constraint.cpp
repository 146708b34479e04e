#include "krepair/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "krepair/errors.hpp"

namespace krepair {

const char* to_string(IndexMode mode)
{
    return mode == IndexMode::Distinct ? "distinct" : "multiset";
}

bool has_distinct_entries(const TupleIndex& tuple)
{
    for (std::size_t i = 0; i < tuple.size(); ++i)
        for (std::size_t j = i + 1; j < tuple.size(); ++j)
            if (tuple[i] == tuple[j])
                return false;
    return true;
}

std::string to_string(const TupleIndex& tuple)
{
    std::string out = "(";
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(tuple[i]);
    }
    return out + ")";
}

std::vector<TupleIndex> enumerate_tuples(std::size_t n, std::size_t arity, IndexMode mode)
{
    std::vector<TupleIndex> out;
    if (n == 0 || arity == 0)
        return out;
    TupleIndex tuple(arity, 1);
    while (true) {
        if (mode == IndexMode::Multiset || has_distinct_entries(tuple))
            out.push_back(tuple);
        std::size_t i = arity;
        while (i > 0 && tuple[i - 1] == n) {
            tuple[i - 1] = 1;
            --i;
        }
        if (i == 0)
            break;
        ++tuple[i - 1];
    }
    return out;
}

Assignment::Assignment(std::size_t n, std::size_t arity, IndexMode mode)
    : n_(n), arity_(arity), mode_(mode)
{
    if (arity == 0)
        throw ContractError("assignment arity must be positive");
    std::size_t cells = 1;
    for (std::size_t i = 0; i < arity; ++i)
        cells *= n;
    table_.assign(cells, std::nullopt);
}

bool Assignment::admissible(const TupleIndex& tuple) const
{
    if (tuple.size() != arity_)
        return false;
    for (std::size_t e : tuple)
        if (e < 1 || e > n_)
            return false;
    return mode_ == IndexMode::Multiset || has_distinct_entries(tuple);
}

std::size_t Assignment::offset(const TupleIndex& tuple) const
{
    if (!admissible(tuple))
        throw ContractError("tuple " + to_string(tuple) + " is not admissible in " + to_string(mode_)
                            + " mode with n=" + std::to_string(n_));
    std::size_t off = 0;
    for (std::size_t e : tuple)
        off = off * n_ + (e - 1);
    return off;
}

void Assignment::set(const TupleIndex& tuple, Value v)
{
    table_[offset(tuple)] = v;
}

bool Assignment::has(const TupleIndex& tuple) const
{
    return admissible(tuple) && table_[offset(tuple)].has_value();
}

Value Assignment::at(const TupleIndex& tuple) const
{
    const auto& slot = table_[offset(tuple)];
    if (!slot)
        throw ContractError("assignment has no value at " + to_string(tuple));
    return *slot;
}

bool Assignment::complete() const
{
    for (const auto& t : tuples())
        if (!table_[offset(t)])
            return false;
    return true;
}

std::size_t AtomTemplate::variable_count() const
{
    std::size_t v = 0;
    for (const auto& slot : slots)
        for (std::size_t var : slot)
            v = std::max(v, var);
    return v;
}

namespace {

std::string slot_list(const std::vector<TupleIndex>& slots, const char* sep)
{
    std::string out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (i)
            out += sep;
        out += to_string(slots[i]);
    }
    return out;
}

} // namespace

std::string GroundAtom::describe() const
{
    std::ostringstream out;
    switch (kind) {
    case AtomKind::Equality:
        out << name << " " << to_string(slots[0]) << "=" << to_string(slots[1]);
        break;
    case AtomKind::ZeroProduct:
        out << name << " " << slot_list(slots, "*") << "=0";
        break;
    case AtomKind::LinearInequality:
        out << name << " ";
        for (std::size_t i = 0; i < slots.size(); ++i)
            out << (i ? " " : "") << (coeffs[i] >= 0 && i ? "+" : "") << coeffs[i] << "*" << to_string(slots[i]);
        out << "<=" << bound;
        break;
    case AtomKind::Finite:
        out << name << " " << to_string(slots[0]) << "<inf";
        break;
    case AtomKind::Table:
        out << name << " [" << slot_list(slots, ",") << "] in table";
        break;
    }
    return out.str();
}

bool operator==(const GroundAtom& a, const GroundAtom& b)
{
    auto rows_equal = [](const auto& x, const auto& y) {
        if (x == y)
            return true;
        return x && y && *x == *y;
    };
    return a.kind == b.kind && a.name == b.name && a.slots == b.slots && a.coeffs == b.coeffs
        && a.bound == b.bound && rows_equal(a.allowed, b.allowed);
}

ConstraintSet::ConstraintSet(std::size_t arity, IndexMode mode) : arity_(arity), mode_(mode)
{
    if (arity == 0)
        throw ContractError("constraint arity must be positive");
}

ConstraintSet& ConstraintSet::add_symmetry()
{
    symmetry_ = true;
    return *this;
}

ConstraintSet& ConstraintSet::add_triangle_free()
{
    if (arity_ != 2)
        throw ContractError("triangle_free needs arity 2");
    AtomTemplate atom;
    atom.kind = AtomKind::ZeroProduct;
    atom.name = "triangle_free";
    atom.slots = {{1, 2}, {2, 3}, {1, 3}};
    atom.unordered = true;
    atom.builtin = "triangle_free";
    return add(std::move(atom));
}

ConstraintSet& ConstraintSet::add_triangle_inequality()
{
    if (arity_ != 2)
        throw ContractError("triangle_inequality needs arity 2");
    AtomTemplate atom;
    atom.kind = AtomKind::LinearInequality;
    atom.name = "triangle_inequality";
    atom.slots = {{1, 3}, {1, 2}, {2, 3}};
    atom.coeffs = {1.0, -1.0, -1.0};
    atom.bound = 0.0;
    atom.builtin = "triangle_inequality";
    return add(std::move(atom));
}

ConstraintSet& ConstraintSet::add_finite()
{
    AtomTemplate atom;
    atom.kind = AtomKind::Finite;
    atom.name = "finite";
    std::vector<std::size_t> slot(arity_);
    std::iota(slot.begin(), slot.end(), 1);
    atom.slots = {slot};
    atom.builtin = "finite";
    return add(std::move(atom));
}

ConstraintSet& ConstraintSet::add(AtomTemplate atom)
{
    if (atom.slots.empty())
        throw ContractError("atom '" + atom.name + "' references no slots");
    for (const auto& slot : atom.slots) {
        if (slot.size() != arity_)
            throw ContractError("atom '" + atom.name + "' has a slot of length " + std::to_string(slot.size())
                                + ", arity is " + std::to_string(arity_));
        for (std::size_t var : slot)
            if (var == 0)
                throw ContractError("atom '" + atom.name + "': template variables are 1-based");
        if (mode_ == IndexMode::Distinct && !has_distinct_entries(slot))
            throw ContractError("atom '" + atom.name + "' repeats a variable inside a slot; needs multiset mode");
    }
    switch (atom.kind) {
    case AtomKind::Equality:
        if (atom.slots.size() != 2)
            throw ContractError("equality atom needs exactly two slots");
        break;
    case AtomKind::LinearInequality:
        if (atom.coeffs.size() != atom.slots.size())
            throw ContractError("linear atom '" + atom.name + "' needs one coefficient per slot");
        break;
    case AtomKind::Finite:
        if (atom.slots.size() != 1)
            throw ContractError("finite atom needs exactly one slot");
        break;
    case AtomKind::Table:
        if (!atom.allowed)
            throw ContractError("table atom '" + atom.name + "' has no allowed rows");
        for (const auto& row : *atom.allowed)
            if (row.size() != atom.slots.size())
                throw ContractError("table atom '" + atom.name + "' has a row of the wrong width");
        break;
    case AtomKind::ZeroProduct:
        break;
    }
    templates_.push_back(std::move(atom));
    return *this;
}

ConstraintSet ConstraintSet::with_mode(IndexMode mode) const
{
    ConstraintSet out(arity_, mode);
    out.symmetry_ = symmetry_;
    for (const auto& t : templates_) {
        bool repeats = std::any_of(t.slots.begin(), t.slots.end(),
                                   [](const auto& s) { return !has_distinct_entries(s); });
        if (mode == IndexMode::Distinct && repeats)
            continue;
        out.templates_.push_back(t);
    }
    return out;
}

AtomTemplate table_atom(std::string name, std::vector<std::vector<std::size_t>> slots, ValueRows allowed)
{
    AtomTemplate atom;
    atom.kind = AtomKind::Table;
    atom.name = std::move(name);
    atom.slots = std::move(slots);
    atom.allowed = std::make_shared<const ValueRows>(std::move(allowed));
    return atom;
}

namespace {

// Calls visit(map) for each substitution {1..v} -> {1..n}; map[0] unused.
template <typename Visit>
void for_each_substitution(std::size_t v, std::size_t n, IndexMode mode, bool increasing, Visit&& visit)
{
    std::vector<std::size_t> map(v + 1, 1);
    if (v == 0) {
        visit(map);
        return;
    }
    auto admissible = [&] {
        if (mode == IndexMode::Multiset)
            return true;
        for (std::size_t i = 1; i <= v; ++i)
            for (std::size_t j = i + 1; j <= v; ++j) {
                if (map[i] == map[j])
                    return false;
                if (increasing && map[i] > map[j])
                    return false;
            }
        return true;
    };
    while (true) {
        if (admissible())
            visit(map);
        std::size_t i = v;
        while (i > 0 && map[i] == n) {
            map[i] = 1;
            --i;
        }
        if (i == 0)
            break;
        ++map[i];
    }
}

TupleIndex permute(const TupleIndex& tuple, const std::vector<std::size_t>& perm)
{
    TupleIndex out(tuple.size());
    for (std::size_t i = 0; i < tuple.size(); ++i)
        out[i] = tuple[perm[i]];
    return out;
}

} // namespace

std::vector<GroundAtom> restrict(const ConstraintSet& constraint, std::size_t n)
{
    const std::size_t k = constraint.arity();
    const IndexMode mode = constraint.mode();
    if (n == 0)
        throw ContractError("restrict needs n >= 1");
    if (mode == IndexMode::Distinct && n < k)
        throw ContractError("distinct mode needs n >= k (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");

    std::vector<GroundAtom> out;
    std::set<std::pair<std::size_t, std::vector<TupleIndex>>> seen;

    for (std::size_t t = 0; t < constraint.templates().size(); ++t) {
        const auto& tmpl = constraint.templates()[t];
        for_each_substitution(tmpl.variable_count(), n, mode, tmpl.unordered, [&](const std::vector<std::size_t>& map) {
            GroundAtom atom;
            atom.kind = tmpl.kind;
            atom.name = tmpl.name;
            atom.coeffs = tmpl.coeffs;
            atom.bound = tmpl.bound;
            atom.allowed = tmpl.allowed;
            for (const auto& slot : tmpl.slots) {
                TupleIndex ground(slot.size());
                for (std::size_t i = 0; i < slot.size(); ++i)
                    ground[i] = map[slot[i]];
                atom.slots.push_back(std::move(ground));
            }
            if (seen.emplace(t, atom.slots).second)
                out.push_back(std::move(atom));
        });
    }

    if (constraint.has_symmetry() || mode == IndexMode::Multiset) {
        std::vector<std::size_t> identity(k);
        std::iota(identity.begin(), identity.end(), 0);
        for (const auto& tuple : enumerate_tuples(n, k, mode)) {
            std::set<TupleIndex> partners;
            auto perm = identity;
            do {
                TupleIndex image = permute(tuple, perm);
                if (image > tuple)
                    partners.insert(std::move(image));
            } while (std::next_permutation(perm.begin(), perm.end()));
            for (const auto& image : partners) {
                GroundAtom atom;
                atom.kind = AtomKind::Equality;
                atom.name = "symmetry";
                atom.slots = {tuple, image};
                out.push_back(std::move(atom));
            }
        }
    }
    return out;
}

namespace {

// Merges repeated slots of a linear atom so each slot moves once.
std::vector<std::pair<TupleIndex, double>> merged_terms(const GroundAtom& atom)
{
    std::vector<std::pair<TupleIndex, double>> terms;
    for (std::size_t i = 0; i < atom.slots.size(); ++i) {
        auto it = std::find_if(terms.begin(), terms.end(), [&](const auto& t) { return t.first == atom.slots[i]; });
        if (it == terms.end())
            terms.emplace_back(atom.slots[i], atom.coeffs[i]);
        else
            it->second += atom.coeffs[i];
    }
    return terms;
}

// sum(positive part) <= sum(negative part) + bound, in extended reals.
bool linear_holds(double positive, double negative, double bound)
{
    if (std::isinf(negative))
        return true;
    if (std::isinf(positive))
        return false;
    return positive <= negative + bound;
}

bool check(const GroundAtom& atom, const Assignment& a, const ValueSpace& space, double eps, bool relaxed)
{
    switch (atom.kind) {
    case AtomKind::Equality: {
        Value x = a.at(atom.slots[0]);
        Value y = a.at(atom.slots[1]);
        return relaxed ? space.can_meet(x, y, eps) : x == y;
    }
    case AtomKind::ZeroProduct:
        for (const auto& slot : atom.slots) {
            Value x = a.at(slot);
            if (relaxed ? space.can_reach_zero(x, eps) : space.numeric(x) == 0.0)
                return true;
        }
        return false;
    case AtomKind::LinearInequality: {
        double positive = 0.0;
        double negative = 0.0;
        for (const auto& [slot, c] : merged_terms(atom)) {
            Value x = a.at(slot);
            if (c > 0.0)
                positive += c * (relaxed ? space.numeric_floor_within(x, eps) : space.numeric(x));
            else if (c < 0.0)
                negative += -c * (relaxed ? space.numeric_ceil_within(x, eps) : space.numeric(x));
        }
        return linear_holds(positive, negative, atom.bound);
    }
    case AtomKind::Finite: {
        Value x = a.at(atom.slots[0]);
        return relaxed ? space.can_be_finite(x, eps) : !x.is_infinite();
    }
    case AtomKind::Table: {
        std::vector<Value> current;
        for (const auto& slot : atom.slots)
            current.push_back(a.at(slot));
        for (const auto& row : *atom.allowed) {
            bool ok = true;
            for (std::size_t i = 0; ok && i < row.size(); ++i) {
                for (std::size_t j = 0; ok && j < i; ++j)
                    if (atom.slots[i] == atom.slots[j] && row[i] != row[j])
                        ok = false;
                if (ok)
                    ok = relaxed ? space.dist(current[i], row[i]) <= eps : current[i] == row[i];
            }
            if (ok)
                return true;
        }
        return false;
    }
    }
    return false;
}

} // namespace

bool holds(const GroundAtom& atom, const Assignment& a, const ValueSpace& space)
{
    return check(atom, a, space, 0.0, false);
}

bool holds_relaxed(const GroundAtom& atom, const Assignment& a, const ValueSpace& space, double eps)
{
    if (!(eps >= 0.0))
        throw ContractError("epsilon must be nonnegative");
    return check(atom, a, space, eps, true);
}

bool satisfies(const Assignment& a, std::span<const GroundAtom> atoms, const ValueSpace& space)
{
    return std::all_of(atoms.begin(), atoms.end(), [&](const auto& atom) { return holds(atom, a, space); });
}

bool satisfies_relaxed(const Assignment& a, std::span<const GroundAtom> atoms, const ValueSpace& space,
                       double eps)
{
    return std::all_of(atoms.begin(), atoms.end(),
                       [&](const auto& atom) { return holds_relaxed(atom, a, space, eps); });
}

const char* to_string(FeasibilityResult::Status status)
{
    switch (status) {
    case FeasibilityResult::Status::Feasible:
        return "feasible";
    case FeasibilityResult::Status::Infeasible:
        return "infeasible";
    case FeasibilityResult::Status::Unknown:
        return "unknown";
    }
    return "unknown";
}

namespace {

class Backtracker {
public:
    Backtracker(const std::vector<const GroundAtom*>& atoms, std::size_t n, std::size_t k, IndexMode mode,
                const ValueSpace& space, const std::vector<Value>& domain, std::uint64_t budget)
        : atoms_(atoms), space_(space), domain_(domain), budget_(budget), assignment_(n, k, mode)
    {
        std::set<TupleIndex> slots;
        for (const auto* atom : atoms_)
            for (const auto& slot : atom->slots)
                slots.insert(slot);
        variables_.assign(slots.begin(), slots.end());
        ready_.resize(variables_.size());
        for (const auto* atom : atoms_) {
            std::size_t last = 0;
            for (const auto& slot : atom->slots) {
                auto pos = static_cast<std::size_t>(
                    std::lower_bound(variables_.begin(), variables_.end(), slot) - variables_.begin());
                last = std::max(last, pos);
            }
            ready_[last].push_back(atom);
        }
    }

    FeasibilityResult::Status run()
    {
        if (variables_.empty())
            return FeasibilityResult::Status::Feasible;
        switch (descend(0)) {
        case Outcome::Found:
            return FeasibilityResult::Status::Feasible;
        case Outcome::Exhausted:
            return FeasibilityResult::Status::Infeasible;
        case Outcome::OutOfBudget:
            break;
        }
        return FeasibilityResult::Status::Unknown;
    }

    std::uint64_t nodes() const { return nodes_; }

    Assignment completed() const
    {
        Assignment out = assignment_;
        for (const auto& t : out.tuples())
            if (!out.has(t))
                out.set(t, domain_.front());
        return out;
    }

private:
    enum class Outcome { Found, Exhausted, OutOfBudget };

    Outcome descend(std::size_t depth)
    {
        for (const Value& v : domain_) {
            if (++nodes_ > budget_)
                return Outcome::OutOfBudget;
            assignment_.set(variables_[depth], v);
            bool ok = std::all_of(ready_[depth].begin(), ready_[depth].end(),
                                  [&](const GroundAtom* atom) { return holds(*atom, assignment_, space_); });
            if (!ok)
                continue;
            if (depth + 1 == variables_.size())
                return Outcome::Found;
            Outcome below = descend(depth + 1);
            if (below != Outcome::Exhausted)
                return below;
        }
        return Outcome::Exhausted;
    }

    const std::vector<const GroundAtom*>& atoms_;
    const ValueSpace& space_;
    const std::vector<Value>& domain_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    Assignment assignment_;
    std::vector<TupleIndex> variables_;
    std::vector<std::vector<const GroundAtom*>> ready_;
};

} // namespace

FeasibilityResult feasible(const ConstraintSet& constraint, std::size_t n, const ValueSpace& space,
                           const FeasibilityOptions& options)
{
    std::vector<Value> domain = space.variant() == ValueSpace::Variant::FiniteMetric ? space.finite_values()
                                                                                     : options.grid;
    if (domain.empty())
        throw ContractError("feasibility search over an interval space needs a value grid");
    for (const Value& v : domain)
        if (!space.contains(v))
            throw DomainError("grid value outside the value space");

    const auto atoms = restrict(constraint, n);
    const std::size_t k = constraint.arity();
    const IndexMode mode = constraint.mode();

    FeasibilityResult result;
    std::vector<const GroundAtom*> active;
    for (const auto& atom : atoms)
        active.push_back(&atom);

    Backtracker full(active, n, k, mode, space, domain, options.budget);
    result.status = full.run();
    result.nodes = full.nodes();
    if (result.status == FeasibilityResult::Status::Feasible) {
        result.assignment = full.completed();
        return result;
    }
    if (result.status == FeasibilityResult::Status::Unknown)
        return result;

    // Deletion filter, last atom first, so the witness keeps the earliest
    // atoms in search order.
    for (std::size_t i = active.size(); i-- > 0;) {
        std::vector<const GroundAtom*> trial = active;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
        Backtracker search(trial, n, k, mode, space, domain, options.budget);
        auto status = search.run();
        result.nodes += search.nodes();
        if (status == FeasibilityResult::Status::Infeasible)
            active = std::move(trial);
    }
    for (const auto* atom : active)
        result.witness.push_back(*atom);
    return result;
}

} // namespace krepair
