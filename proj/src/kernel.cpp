#include "krepair/kernel.hpp"

#include <algorithm>
#include <numeric>

#include "krepair/errors.hpp"

namespace krepair {

bool ExceptionPiece::matches(std::span<const Rational> point) const
{
    for (const auto& atom : atoms) {
        bool holds = std::visit(
            [&](const auto& a) {
                using A = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<A, CoordEqualsConstant>)
                    return point[a.coord] == a.constant;
                else
                    return point[a.first] == point[a.second];
            },
            atom);
        if (!holds)
            return false;
    }
    return true;
}

PerturbedStepKernel::PerturbedStepKernel(std::size_t arity, std::size_t resolution, ValueSpace space,
                                         std::vector<Value> base, std::vector<ExceptionPiece> exceptions,
                                         bool symmetric_base)
    : arity_(arity),
      resolution_(resolution),
      space_(std::move(space)),
      base_(std::move(base)),
      exceptions_(std::move(exceptions)),
      symmetric_base_(symmetric_base)
{
    if (arity_ == 0 || resolution_ == 0)
        throw ContractError("kernel arity and resolution must be positive");
    std::size_t blocks = 1;
    for (std::size_t i = 0; i < arity_; ++i)
        blocks *= resolution_;
    if (base_.size() != blocks)
        throw ContractError("base must list " + std::to_string(blocks) + " block values, got "
                            + std::to_string(base_.size()));
    for (const Value& v : base_)
        if (!space_.contains(v))
            throw DomainError("base value outside the value space");

    for (const auto& piece : exceptions_) {
        if (piece.atoms.empty())
            throw ContractError("exception piece without atoms is not a null set");
        if (!space_.contains(piece.value))
            throw DomainError("exception value outside the value space");
        for (const auto& atom : piece.atoms) {
            if (const auto* c = std::get_if<CoordEqualsConstant>(&atom)) {
                if (c->coord >= arity_)
                    throw ContractError("exception coordinate out of range");
                if (c->constant < 0 || c->constant >= 1)
                    throw DomainError("exception constant must lie in [0,1)");
            } else {
                const auto& e = std::get<CoordEqualsCoord>(atom);
                if (e.first >= arity_ || e.second >= arity_ || e.first == e.second)
                    throw ContractError("coordinate equality needs two different coordinates");
            }
        }
    }
    if (symmetric_base_ && !base_is_symmetric(arity_, resolution_, base_))
        throw ContractError("symmetric_base is set but the base grid is not permutation invariant");
}

std::size_t PerturbedStepKernel::flat_block(std::span<const std::size_t> block) const
{
    if (block.size() != arity_)
        throw ContractError("block index has wrong arity");
    std::size_t flat = 0;
    for (std::size_t s : block) {
        if (s >= resolution_)
            throw ContractError("block index out of range");
        flat = flat * resolution_ + s;
    }
    return flat;
}

Value PerturbedStepKernel::base_at(std::span<const std::size_t> block) const
{
    return base_[flat_block(block)];
}

void PerturbedStepKernel::require_point(std::span<const Rational> point) const
{
    if (point.size() != arity_)
        throw ContractError("point has " + std::to_string(point.size()) + " coordinates, kernel arity is "
                            + std::to_string(arity_));
    for (const auto& x : point)
        if (x < 0 || x >= 1)
            throw DomainError("coordinate " + to_string(x) + " outside [0,1)");
}

Value PerturbedStepKernel::base_value_at(std::span<const Rational> point) const
{
    require_point(point);
    std::size_t flat = 0;
    for (const auto& x : point)
        flat = flat * resolution_ + block_of(x, resolution_);
    return base_[flat];
}

const ExceptionPiece* PerturbedStepKernel::matching_exception(std::span<const Rational> point) const
{
    require_point(point);
    for (const auto& piece : exceptions_)
        if (piece.matches(point))
            return &piece;
    return nullptr;
}

Value PerturbedStepKernel::eval(std::span<const Rational> point) const
{
    if (const auto* piece = matching_exception(point))
        return piece->value;
    return base_value_at(point);
}

PerturbedStepKernel PerturbedStepKernel::with_exceptions(std::vector<ExceptionPiece> exceptions) const
{
    return PerturbedStepKernel(arity_, resolution_, space_, base_, std::move(exceptions), symmetric_base_);
}

std::size_t block_of(const Rational& x, std::size_t m)
{
    if (m == 0)
        throw ContractError("resolution must be positive");
    if (x < 0 || x >= 1)
        throw DomainError("coordinate " + to_string(x) + " outside [0,1)");
    return floor_of(x * m).convert_to<std::size_t>();
}

Rational uniform_unit(Rng& rng)
{
    static const BigInt scale = BigInt(1) << 53;
    return Rational(BigInt(rng() >> 11), scale);
}

Rational sample_in_cell(const Rational& x, std::size_t m, Rng& rng)
{
    const std::size_t s = block_of(x, m);
    return (Rational(s) + uniform_unit(rng)) / m;
}

bool base_is_symmetric(std::size_t arity, std::size_t resolution, std::span<const Value> base)
{
    std::vector<std::size_t> block(arity, 0);
    std::vector<std::size_t> perm(arity);
    auto flat = [&](const std::vector<std::size_t>& b) {
        std::size_t f = 0;
        for (std::size_t s : b)
            f = f * resolution + s;
        return f;
    };
    for (std::size_t index = 0; index < base.size(); ++index) {
        std::size_t rest = index;
        for (std::size_t i = arity; i-- > 0;) {
            block[i] = rest % resolution;
            rest /= resolution;
        }
        std::iota(perm.begin(), perm.end(), 0);
        do {
            std::vector<std::size_t> permuted(arity);
            for (std::size_t i = 0; i < arity; ++i)
                permuted[i] = block[perm[i]];
            if (base[flat(permuted)] != base[index])
                return false;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return true;
}

} // namespace krepair
