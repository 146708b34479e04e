#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "krepair/rational.hpp"
#include "krepair/rng.hpp"
#include "krepair/value_space.hpp"

namespace krepair {

using Point = std::vector<Rational>;

// Coordinates are 0-based here; files use 1-based numbering.
struct CoordEqualsConstant {
    std::size_t coord;
    Rational constant;
    friend bool operator==(const CoordEqualsConstant&, const CoordEqualsConstant&) = default;
};

struct CoordEqualsCoord {
    std::size_t first;
    std::size_t second;
    friend bool operator==(const CoordEqualsCoord&, const CoordEqualsCoord&) = default;
};

using ExceptionAtom = std::variant<CoordEqualsConstant, CoordEqualsCoord>;

/// A Lebesgue-null piece of [0,1)^k (a conjunction of coordinate equalities)
/// on which the kernel takes `value` instead of its base block value.
struct ExceptionPiece {
    std::vector<ExceptionAtom> atoms;
    Value value;

    bool matches(std::span<const Rational> point) const;
    friend bool operator==(const ExceptionPiece&, const ExceptionPiece&) = default;
};

/// Step function on the uniform m0^k grid of [0,1)^k plus an ordered list of
/// null-set exceptions. Immutable after construction.
class PerturbedStepKernel {
public:
    PerturbedStepKernel(std::size_t arity, std::size_t resolution, ValueSpace space,
                        std::vector<Value> base, std::vector<ExceptionPiece> exceptions = {},
                        bool symmetric_base = false);

    std::size_t arity() const { return arity_; }
    std::size_t resolution() const { return resolution_; }
    const ValueSpace& space() const { return space_; }
    const std::vector<Value>& base() const { return base_; }
    const std::vector<ExceptionPiece>& exceptions() const { return exceptions_; }
    bool symmetric_base() const { return symmetric_base_; }

    // Row-major: the first coordinate varies slowest.
    std::size_t flat_block(std::span<const std::size_t> block) const;
    Value base_at(std::span<const std::size_t> block) const;
    Value base_value_at(std::span<const Rational> point) const;

    // First matching exception wins; otherwise the base block value.
    Value eval(std::span<const Rational> point) const;
    const ExceptionPiece* matching_exception(std::span<const Rational> point) const;

    PerturbedStepKernel with_exceptions(std::vector<ExceptionPiece> exceptions) const;

private:
    void require_point(std::span<const Rational> point) const;

    std::size_t arity_;
    std::size_t resolution_;
    ValueSpace space_;
    std::vector<Value> base_;
    std::vector<ExceptionPiece> exceptions_;
    bool symmetric_base_;
};

// s with x in [s/m, (s+1)/m).
std::size_t block_of(const Rational& x, std::size_t m);

// Uniform draw from [0,1) on the dyadic grid of mesh 2^-53, exactly representable.
Rational uniform_unit(Rng& rng);

// Uniform draw from the cell [s/m, (s+1)/m) containing x.
Rational sample_in_cell(const Rational& x, std::size_t m, Rng& rng);

// True when permuting block indices never changes the base value.
bool base_is_symmetric(std::size_t arity, std::size_t resolution, std::span<const Value> base);

} // namespace krepair
