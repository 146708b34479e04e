#include <doctest.h>

#include <algorithm>

#include "krepair/errors.hpp"
#include "krepair/kernel.hpp"
#include "support.hpp"

using namespace krepair;
using krepair::testing::q;

namespace {

PerturbedStepKernel checkerboard(std::vector<ExceptionPiece> exceptions = {})
{
    const auto bits = ValueSpace::discrete({"0", "1"});
    return PerturbedStepKernel(2, 2, bits, {Value::label(0), Value::label(1), Value::label(1), Value::label(0)},
                               std::move(exceptions), true);
}

} // namespace

TEST_CASE("eval reads the base block")
{
    const auto f = checkerboard();
    CHECK(f.eval(Point{q("0.2"), q("0.7")}) == Value::label(1));
    CHECK(f.eval(Point{q("0.2"), q("0.3")}) == Value::label(0));
    CHECK(f.eval(Point{q("0.5"), q("0.5")}) == Value::label(0));
}

TEST_CASE("first matching exception overrides the base")
{
    const auto f = checkerboard({{{CoordEqualsConstant{0, q("0.2")}, CoordEqualsConstant{1, q("0.7")}}, Value::label(0)}});
    CHECK(f.eval(Point{q("0.2"), q("0.7")}) == Value::label(0));
    CHECK(f.eval(Point{q("0.7"), q("0.2")}) == Value::label(1));

    const auto g = checkerboard({{{CoordEqualsCoord{0, 1}}, Value::label(1)},
                                 {{CoordEqualsConstant{0, q("0.3")}}, Value::label(0)}});
    CHECK(g.eval(Point{q("0.3"), q("0.3")}) == Value::label(1));
    CHECK(g.eval(Point{q("0.3"), q("0.35")}) == Value::label(0));
    CHECK(g.matching_exception(Point{q("0.1"), q("0.35")}) == nullptr);
}

TEST_CASE("eval rejects points outside [0,1)^k")
{
    const auto f = checkerboard();
    CHECK_THROWS_AS(f.eval(Point{q("1"), q("0.5")}), DomainError);
    CHECK_THROWS_AS(f.eval(Point{q("-1/3"), q("0.5")}), DomainError);
    CHECK_THROWS_AS(f.eval(Point{q("0.5")}), ContractError);
}

TEST_CASE("constructor validation")
{
    const auto bits = ValueSpace::discrete({"0", "1"});
    const std::vector<Value> lopsided{Value::label(0), Value::label(1), Value::label(0), Value::label(0)};
    CHECK_THROWS_AS(PerturbedStepKernel(2, 2, bits, lopsided, {}, true), ContractError);
    CHECK_NOTHROW(PerturbedStepKernel(2, 2, bits, lopsided, {}, false));
    CHECK_THROWS_AS(PerturbedStepKernel(2, 2, bits, {Value::label(0)}, {}, false), ContractError);
    CHECK_THROWS(PerturbedStepKernel(2, 1, bits, {Value::label(0)}, {{{CoordEqualsConstant{2, q("0.1")}}, Value::label(1)}}));
    CHECK_THROWS(PerturbedStepKernel(2, 1, bits, {Value::label(0)}, {{{CoordEqualsCoord{0, 0}}, Value::label(1)}}));
    CHECK_THROWS(PerturbedStepKernel(2, 1, bits, {Value::label(0)}, {{{}, Value::label(1)}}));
    CHECK_THROWS(PerturbedStepKernel(2, 1, bits, {Value::label(0)}, {{{CoordEqualsConstant{0, q("1")}}, Value::label(1)}}));
}

TEST_CASE("block_of examples")
{
    CHECK(block_of(q("0.5"), 4) == 2);
    CHECK(block_of(q("0.5"), 3) == 1);
    CHECK(block_of(q("0.999"), 10) == 9);
    CHECK(block_of(q("0"), 7) == 0);
    CHECK(block_of(q("1/3"), 3) == 1);
}

TEST_CASE("block_of is constant on each cell")
{
    for (std::size_t m : {1u, 3u, 4u, 10u})
        for (std::size_t s = 0; s < m; ++s) {
            const long ml = static_cast<long>(m), sl = static_cast<long>(s);
            CHECK(block_of(Rational(sl, ml), m) == s);
            CHECK(block_of(Rational(sl, ml) + Rational(1, 1000 * ml), m) == s);
            CHECK(block_of(Rational(sl + 1, ml) - Rational(1, 1000 * ml), m) == s);
        }
}

TEST_CASE("sample_in_cell stays in the cell and has the uniform mean")
{
    Rng rng = make_stream(21, 0);
    const Rational x = q("0.3");
    double sum = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Rational y = sample_in_cell(x, 10, rng);
        CHECK(y >= q("0.3"));
        CHECK(y < q("0.4"));
        sum += to_double(y);
    }
    CHECK(std::abs(sum / 1000 - 0.35) < 0.01);
}

TEST_CASE("sample_in_cell is reproducible for a fixed seed")
{
    Rng a = make_stream(5, 3), b = make_stream(5, 3), c = make_stream(5, 4);
    std::vector<Rational> xa, xb, xc;
    for (int i = 0; i < 50; ++i) {
        xa.push_back(sample_in_cell(q("0.61"), 8, a));
        xb.push_back(sample_in_cell(q("0.61"), 8, b));
        xc.push_back(sample_in_cell(q("0.61"), 8, c));
    }
    CHECK(xa == xb);
    CHECK(xa != xc);
}

TEST_CASE("eval agrees with the base off the exceptions")
{
    Rng rng = make_stream(22, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t k = krepair::testing::pick(rng, 1, 3);
        const auto f = krepair::testing::random_kernel(rng, k, krepair::testing::pick(rng, 1, 4), false, 3);
        for (int i = 0; i < 50; ++i) {
            Point p;
            for (std::size_t c = 0; c < k; ++c)
                p.push_back(uniform_unit(rng));
            REQUIRE(f.matching_exception(p) == nullptr);
            CHECK(f.eval(p) == f.base_value_at(p));
        }
    }
}

TEST_CASE("symmetric base gives permutation-invariant values on block representatives")
{
    Rng rng = make_stream(23, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t k = krepair::testing::pick(rng, 2, 3);
        const std::size_t m0 = krepair::testing::pick(rng, 1, 4);
        const auto f = krepair::testing::random_kernel(rng, k, m0, true, 0);
        CHECK(base_is_symmetric(k, m0, f.base()));
        for (const auto& block : krepair::testing::all_blocks(k, m0)) {
            Point p;
            for (std::size_t c = 0; c < k; ++c)
                p.push_back(Rational(2 * static_cast<long>(block[c]) + 1, 2 * static_cast<long>(m0))
                            + Rational(static_cast<long>(c), 1000));
            auto perm = p;
            std::sort(perm.begin(), perm.end());
            do {
                CHECK(f.eval(perm) == f.eval(p));
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
    }
}
