#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "krepair/value_space.hpp"

namespace krepair {

enum class IndexMode {
    Distinct, // k-tuples of mutually distinct indices
    Multiset, // repeats allowed
};

const char* to_string(IndexMode mode);

// Entries are 1-based indices into the point set A.
using TupleIndex = std::vector<std::size_t>;

bool has_distinct_entries(const TupleIndex& tuple);
std::string to_string(const TupleIndex& tuple);

// All admissible tuples with entries <= n, lexicographic order.
std::vector<TupleIndex> enumerate_tuples(std::size_t n, std::size_t arity, IndexMode mode);

/// Values of g on the admissible k-tuples over {1..n}.
class Assignment {
public:
    Assignment(std::size_t n, std::size_t arity, IndexMode mode);

    std::size_t size() const { return n_; }
    std::size_t arity() const { return arity_; }
    IndexMode mode() const { return mode_; }

    bool admissible(const TupleIndex& tuple) const;
    void set(const TupleIndex& tuple, Value v);
    bool has(const TupleIndex& tuple) const;
    // Throws ContractError on an unset or inadmissible slot.
    Value at(const TupleIndex& tuple) const;
    std::vector<TupleIndex> tuples() const { return enumerate_tuples(n_, arity_, mode_); }
    bool complete() const;

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    std::size_t offset(const TupleIndex& tuple) const;

    std::size_t n_;
    std::size_t arity_;
    IndexMode mode_;
    std::vector<std::optional<Value>> table_;
};

enum class AtomKind {
    Equality,         // a(I) = a(J)
    ZeroProduct,      // prod a(slot) = 0
    LinearInequality, // sum c_j a(slot_j) <= bound
    Finite,           // a(slot) != inf
    Table,            // (a(slot_1), ...) in allowed
};

using ValueRows = std::vector<std::vector<Value>>;

/// An atom over template variables 1..v; `restrict` substitutes indices.
struct AtomTemplate {
    AtomKind kind = AtomKind::ZeroProduct;
    std::string name;
    std::vector<std::vector<std::size_t>> slots;
    std::vector<double> coeffs;
    double bound = 0.0;
    std::shared_ptr<const ValueRows> allowed;
    // Instantiate over increasing variable maps only (in distinct mode).
    bool unordered = false;
    // Name of the built-in this template came from; empty for user atoms.
    std::string builtin;

    std::size_t variable_count() const;
};

struct GroundAtom {
    AtomKind kind = AtomKind::ZeroProduct;
    std::string name;
    std::vector<TupleIndex> slots;
    std::vector<double> coeffs;
    double bound = 0.0;
    std::shared_ptr<const ValueRows> allowed;

    std::string describe() const;
    friend bool operator==(const GroundAtom& a, const GroundAtom& b);
};

/// The closed constraint system: a conjunction of atom templates plus the
/// symmetry built-in, interpreted over distinct or multiset index tuples.
class ConstraintSet {
public:
    ConstraintSet(std::size_t arity, IndexMode mode);

    ConstraintSet& add_symmetry();
    ConstraintSet& add_triangle_free();
    ConstraintSet& add_triangle_inequality();
    ConstraintSet& add_finite();
    ConstraintSet& add(AtomTemplate atom);

    std::size_t arity() const { return arity_; }
    IndexMode mode() const { return mode_; }
    bool has_symmetry() const { return symmetry_; }
    const std::vector<AtomTemplate>& templates() const { return templates_; }

    // Same atoms under another index mode; templates with repeated variables
    // are dropped when switching to distinct mode.
    ConstraintSet with_mode(IndexMode mode) const;

private:
    std::size_t arity_;
    IndexMode mode_;
    bool symmetry_ = false;
    std::vector<AtomTemplate> templates_;
};

AtomTemplate table_atom(std::string name, std::vector<std::vector<std::size_t>> slots, ValueRows allowed);

// Every atom instantiated over every admissible substitution with indices <= n.
// In multiset mode the symmetry atoms are always included.
std::vector<GroundAtom> restrict(const ConstraintSet& constraint, std::size_t n);

bool holds(const GroundAtom& atom, const Assignment& a, const ValueSpace& space);
// Each referenced slot may move by at most eps in dist_K.
bool holds_relaxed(const GroundAtom& atom, const Assignment& a, const ValueSpace& space, double eps);

bool satisfies(const Assignment& a, std::span<const GroundAtom> atoms, const ValueSpace& space);
bool satisfies_relaxed(const Assignment& a, std::span<const GroundAtom> atoms, const ValueSpace& space,
                       double eps);

struct FeasibilityOptions {
    // Candidate values for interval spaces; finite spaces use all labels.
    std::vector<Value> grid;
    std::uint64_t budget = 1'000'000;
};

struct FeasibilityResult {
    enum class Status { Feasible, Infeasible, Unknown };
    Status status = Status::Unknown;
    std::optional<Assignment> assignment;
    // Irreducible under single-atom deletion, in search order.
    std::vector<GroundAtom> witness;
    std::uint64_t nodes = 0;
};

const char* to_string(FeasibilityResult::Status status);

FeasibilityResult feasible(const ConstraintSet& constraint, std::size_t n, const ValueSpace& space,
                           const FeasibilityOptions& options = {});

} // namespace krepair
