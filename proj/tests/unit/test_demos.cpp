#include <doctest.h>

#include <algorithm>

#include "krepair/demos.hpp"
#include "krepair/errors.hpp"
#include "support.hpp"

using namespace krepair;
using krepair::testing::q;

namespace {

std::vector<Rational> six_points()
{
    return {q("0.05"), q("0.2"), q("0.4"), q("0.55"), q("0.7"), q("0.9")};
}

// Counts ordered triples (a, b, c) over {1..n}, repeats allowed, whose three pairs all carry 1.
std::size_t triangles(const Assignment& g)
{
    const Value one = Value::label(1);
    std::size_t count = 0;
    const std::size_t n = g.size();
    for (std::size_t a = 1; a <= n; ++a)
        for (std::size_t b = 1; b <= n; ++b)
            for (std::size_t c = 1; c <= n; ++c)
                if (g.at({a, b}) == one && g.at({b, c}) == one && g.at({a, c}) == one)
                    ++count;
    return count;
}

} // namespace

TEST_CASE("triangle removal on the bipartite graphon with a bad diagonal")
{
    const auto f = bipartite_graphon(true);
    const auto r = triangle_removal_demo(f, six_points(), 0.1, 3);
    REQUIRE(r.correction.report.success);
    CHECK(r.census.triples == 216);
    CHECK(r.census.g_triangles == 0);
    CHECK(triangles(r.correction.g) == 0);
    CHECK(r.census.f_triangles > 0);
    CHECK(r.census.f_triangles == r.census.f_defects.size());
    // every defect involves a repeated point, which is where the exception lives
    for (const auto& t : r.census.f_defects)
        CHECK((t[0] == t[1] || t[1] == t[2] || t[0] == t[2]));
}

TEST_CASE("triangle removal on the empty and complete graphons")
{
    const auto empty = triangle_removal_demo(constant_graphon(0), six_points(), 0.1, 4);
    CHECK(empty.correction.report.success);
    CHECK(empty.census.g_triangles == 0);
    CHECK(empty.census.f_triangles == 0);

    const auto complete = triangle_removal_demo(constant_graphon(1), six_points(), 0.1, 4);
    CHECK_FALSE(complete.correction.report.success);
    CHECK_FALSE(complete.correction.report.failure.empty());
}

TEST_CASE("metric repair on the block metric")
{
    const auto f = block_metric_kernel();
    const std::vector<Rational> xs{q("0.1"), q("0.6"), q("0.9")};
    // the raw kernel breaks the triple (0.1, 0.9, 0.6)
    CHECK(f.eval(Point{xs[0], xs[1]}) == Value::real(1.0));
    CHECK(f.eval(Point{xs[0], xs[2]}).raw() + f.eval(Point{xs[2], xs[1]}).raw() < 1.0);

    const auto r = metric_repair_demo(f, xs, 0.05, 11);
    REQUIRE(r.correction.report.success);
    REQUIRE(r.repaired.has_value());
    CHECK(r.correction.g.at({1, 2}) == Value::real(0.3));
    CHECK(r.certificate.triples == 27);
    CHECK(r.certificate.violations.empty());
    CHECK(r.certificate.diagonal_zero);
    CHECK(r.certificate.symmetric);
    CHECK(r.certificate.passed);
    CHECK(r.broken_by_zeroing.empty());
    CHECK(r.collapsed.empty());
    for (std::size_t i = 1; i <= 3; ++i)
        CHECK(r.repaired->at({i, i}) == Value::real(0.0));
}

TEST_CASE("metric repair on the all-zero kernel and on the ray")
{
    const PerturbedStepKernel zero(2, 1, ValueSpace::bounded_interval(1.0), {Value::real(0.0)}, {}, true);
    const auto z = metric_repair_demo(zero, {q("0.2"), q("0.5"), q("0.8")}, 0.05, 12);
    REQUIRE(z.repaired.has_value());
    for (const auto& t : z.repaired->tuples())
        CHECK(z.repaired->at(t) == Value::real(0.0));
    CHECK(z.certificate.passed);

    const auto ray = ray_metric_kernel();
    const std::vector<Rational> xs{q("0.25"), q("0.6"), q("0.9")};
    CHECK(ray.eval(Point{xs[0], xs[1]}).is_infinite());
    const auto r = metric_repair_demo(ray, xs, 0.05, 13);
    REQUIRE(r.correction.report.success);
    CHECK(r.collapsed.empty());
    CHECK(r.certificate.finite);
    CHECK(r.certificate.passed);
}

TEST_CASE("semimetric certificate catches a violation")
{
    const auto unit = ValueSpace::bounded_interval(1.0);
    Assignment g(3, 2, IndexMode::Multiset);
    for (const auto& t : g.tuples())
        g.set(t, Value::real(t[0] == t[1] ? 0.0 : 0.2));
    CHECK(semimetric_certificate(g, unit).passed);
    g.set({1, 3}, Value::real(0.9));
    g.set({3, 1}, Value::real(0.9));
    const auto c = semimetric_certificate(g, unit);
    CHECK_FALSE(c.passed);
    CHECK(std::find(c.violations.begin(), c.violations.end(), TupleIndex{1, 2, 3}) != c.violations.end());
}

TEST_CASE("remark witnesses")
{
    const auto cases = remark_demos();
    REQUIRE(cases.size() == 3);

    const auto& a = cases[0];
    REQUIRE(a.result.status == FeasibilityResult::Status::Infeasible);
    std::vector<std::string> names;
    for (const auto& atom : a.result.witness) {
        names.push_back(atom.name);
        CHECK(atom.slots.size() == 2);
    }
    std::sort(names.begin(), names.end());
    CHECK(names == std::vector<std::string>{"antisym", "symmetry"});

    const auto& b = cases[1];
    REQUIRE(b.result.status == FeasibilityResult::Status::Infeasible);
    REQUIRE(b.result.witness.size() == 1);
    CHECK(b.result.witness[0].slots == std::vector<TupleIndex>{{1, 1}, {1, 1}});

    const auto& control = cases[2];
    REQUIRE(control.result.status == FeasibilityResult::Status::Feasible);
    CHECK(control.result.assignment->at({1, 2}) == Value::label(0));
    CHECK(control.result.assignment->at({2, 1}) == Value::label(1));

    // no seed involved
    const auto again = remark_demos();
    for (std::size_t i = 0; i < cases.size(); ++i)
        CHECK(again[i].result.witness == cases[i].result.witness);
}

TEST_CASE("audit of the a.e. hypothesis")
{
    ConstraintSet tf(2, IndexMode::Multiset);
    tf.add_triangle_free();
    const auto clean = audit_ae_hypothesis(bipartite_graphon(true), tf, 2000, 5);
    CHECK(clean.violations == 0);
    CHECK(clean.variables == 3);
    CHECK(clean.lower == 0.0);
    CHECK(clean.upper < 0.01);

    const auto dirty = audit_ae_hypothesis(constant_graphon(1), tf, 2000, 5);
    CHECK(dirty.rate == 1.0);
    CHECK(dirty.upper == doctest::Approx(1.0));
    CHECK(dirty.lower <= 1.0);
    CHECK(dirty.lower > 0.99);

    ConstraintSet finite(2, IndexMode::Distinct);
    finite.add_finite();
    CHECK(audit_ae_hypothesis(constant_graphon(1), finite, 100, 5).violations == 0);
    CHECK_THROWS_AS(audit_ae_hypothesis(constant_graphon(1), finite, 0, 5), ContractError);
}

TEST_CASE("wilson interval")
{
    const auto [lo, hi] = wilson_interval(0, 10000);
    CHECK(lo == 0.0);
    CHECK(hi == doctest::Approx(3.84e-4).epsilon(0.01));
    const auto [l2, h2] = wilson_interval(50, 100);
    CHECK(l2 == doctest::Approx(0.4038).epsilon(0.001));
    CHECK(h2 == doctest::Approx(0.5962).epsilon(0.001));
}
