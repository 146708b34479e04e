#include <doctest.h>

#include "krepair/density.hpp"
#include "support.hpp"

using namespace krepair;
using krepair::testing::q;

namespace {

PerturbedStepKernel two_step(std::vector<ExceptionPiece> exceptions = {})
{
    return PerturbedStepKernel(1, 2, ValueSpace::discrete({"a", "b"}), {Value::label(0), Value::label(1)},
                               std::move(exceptions), false);
}

Rational mass(const PerturbedStepKernel& f, const Point& p, const OpenTarget& u, std::size_t m)
{
    return density_mass(f, p, u, m);
}

} // namespace

TEST_CASE("constant kernel has mass one for the whole space")
{
    const auto bits = ValueSpace::discrete({"0", "1"});
    const PerturbedStepKernel f(2, 1, bits, {Value::label(1)}, {}, true);
    const auto everything = OpenTarget::ball(Value::label(1), 5.0);
    for (std::size_t m : {1u, 2u, 3u, 7u})
        CHECK(mass(f, {q("0.2"), q("0.9")}, everything, m) == 1);
}

TEST_CASE("two-step kernel straddling its grid line")
{
    const auto f = two_step();
    const auto b = OpenTarget::ball(Value::label(1), 0.05);
    CHECK(mass(f, {q("0.5")}, b, 3) == q("1/2"));
    CHECK(mass(f, {q("0.5")}, b, 4) == 1);
    CHECK(mass(f, {q("0.5")}, b, 1) == q("1/2"));
    const auto a = OpenTarget::ball(Value::label(0), 0.05);
    CHECK(mass(f, {q("0.5")}, a, 3) == q("1/2"));
    CHECK(mass(f, {q("0.1")}, a, 5) == 1);
}

TEST_CASE("exception pieces carry no mass")
{
    const auto f = two_step({{{CoordEqualsConstant{0, q("0.3")}}, Value::label(1)}});
    const auto a = OpenTarget::ball(Value::label(0), 0.5);
    for (std::size_t m : {1u, 2u, 4u, 6u, 10u})
        CHECK(mass(f, {q("0.3")}, a, m) == mass(two_step(), {q("0.3")}, a, m));
    CHECK(mass(f, {q("0.3")}, a, 4) == 1);
    CHECK(f.eval(Point{q("0.3")}) == Value::label(1));
}

TEST_CASE("cell targets")
{
    const auto unit = ValueSpace::bounded_interval(1.0);
    const PerturbedStepKernel f(1, 4, unit, {Value::real(0.0), Value::real(0.25), Value::real(0.5), Value::real(1.0)},
                                {}, false);
    const auto bins = epsilon_partition(unit, 0.3);
    const auto low = OpenTarget::cells(bins, {0, 1});
    CHECK(mass(f, {q("0.1")}, low, 1) == q("1/2"));
    CHECK(mass(f, {q("0.6")}, low, 2) == 0);
    const auto top = OpenTarget::cells(bins, {bins.cell_of(Value::real(1.0))});
    CHECK(mass(f, {q("0.9")}, top, 1) == q("1/4"));
}

TEST_CASE("density_mass matches the counting oracle on random kernels")
{
    Rng rng = make_stream(41, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t k = krepair::testing::pick(rng, 1, 3);
        const std::size_t m0 = krepair::testing::pick(rng, 1, 4);
        const auto f = krepair::testing::random_kernel(rng, k, m0, trial % 2 == 0, 2);
        const auto partition = epsilon_partition(f.space(), 0.3);
        for (int i = 0; i < 6; ++i) {
            const std::size_t m = krepair::testing::pick(rng, 1, 6);
            const auto p = krepair::testing::interior_point(rng, k, std::lcm(m, m0));
            const Value centre = krepair::testing::random_value(f.space(), rng);
            const auto ball = OpenTarget::ball(centre, 0.3);
            const auto cells = OpenTarget::cells(partition, {partition.cell_of(centre)});
            const auto expected_ball = krepair::testing::density_mass_by_counting(f, p, ball, m);
            const auto got_ball = mass(f, p, ball, m);
            CHECK(got_ball == expected_ball);
            CHECK(mass(f, p, cells, m) == krepair::testing::density_mass_by_counting(f, p, cells, m));
            CHECK(got_ball >= 0);
            CHECK(got_ball <= 1);
        }
    }
}

TEST_CASE("mass is invariant under removing exception pieces")
{
    Rng rng = make_stream(42, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t k = krepair::testing::pick(rng, 1, 3);
        const std::size_t m0 = krepair::testing::pick(rng, 1, 3);
        const auto f = krepair::testing::random_kernel(rng, k, m0, false, 4);
        const PerturbedStepKernel bare(k, m0, f.space(), f.base(), {}, false);
        Point p;
        for (std::size_t c = 0; c < k; ++c)
            p.push_back(krepair::testing::random_constant(rng));
        const auto ball = OpenTarget::ball(krepair::testing::random_value(f.space(), rng), 0.4);
        for (std::size_t m = 1; m <= 5; ++m)
            CHECK(mass(f, p, ball, m) == mass(bare, p, ball, m));
    }
}

TEST_CASE("aligned resolutions give mass one around the base value and stay constant")
{
    Rng rng = make_stream(43, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t k = krepair::testing::pick(rng, 1, 3);
        const std::size_t m0 = krepair::testing::pick(rng, 1, 4);
        const auto f = krepair::testing::random_kernel(rng, k, m0, false, 0);
        const auto p = krepair::testing::interior_point(rng, k, m0);
        const auto ball = OpenTarget::ball(f.base_value_at(p), 0.05);
        for (std::size_t mult : {1u, 2u, 3u, 5u})
            CHECK(mass(f, p, ball, m0 * mult) == 1);
        const auto other = OpenTarget::ball(krepair::testing::random_value(f.space(), rng), 0.2);
        const auto first = mass(f, p, other, m0);
        for (std::size_t mult : {2u, 4u, 6u})
            CHECK(mass(f, p, other, m0 * mult) == first);
    }
}

TEST_CASE("is_density_tuple examples")
{
    const auto f = two_step({{{CoordEqualsConstant{0, q("0.3")}}, Value::label(1)}});
    CHECK(is_density_tuple(f, std::vector<Rational>{q("0.1")}, 0.5, 16));
    // pointwise value b sits on an exception whose base is a
    CHECK_FALSE(is_density_tuple(f, std::vector<Rational>{q("0.3")}, 0.5, 16));

    const auto edge = classify_density_tuple(f, std::vector<Rational>{q("0.5")}, 0.05, 16);
    CHECK_FALSE(edge.density);
    CHECK(edge.boundary_failure);
    CHECK(edge.aligned_masses_one);

    const auto inner = classify_density_tuple(f, std::vector<Rational>{q("0.7")}, 0.05, 16);
    CHECK(inner.density);
    CHECK_FALSE(inner.boundary_failure);
    CHECK(inner.resolutions == std::vector<std::size_t>{2, 4, 8, 16});
}

TEST_CASE("grid lines between equal values do not break density")
{
    const auto bits = ValueSpace::discrete({"0", "1"});
    const PerturbedStepKernel f(1, 4, bits, {Value::label(0), Value::label(0), Value::label(1), Value::label(1)}, {},
                                false);
    CHECK(is_density_tuple(f, std::vector<Rational>{q("0.25")}, 0.5, 32));
    CHECK_FALSE(is_density_tuple(f, std::vector<Rational>{q("0.5")}, 0.5, 32));
    CHECK(is_density_tuple(f, std::vector<Rational>{q("0")}, 0.5, 32));
}

TEST_CASE("random interior tuples off exceptions are density tuples")
{
    Rng rng = make_stream(44, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t k = krepair::testing::pick(rng, 1, 3);
        const std::size_t m0 = krepair::testing::pick(rng, 1, 4);
        const auto f = krepair::testing::random_kernel(rng, k, m0, false, 0);
        const auto p = krepair::testing::interior_point(rng, k, m0);
        CHECK(is_density_tuple(f, p, 0.01, 8 * m0));
    }
}
