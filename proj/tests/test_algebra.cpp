#include <catch2/catch_amalgamated.hpp>

#include "bigtoda/algebra.hpp"
#include "test_support.hpp"

using namespace bigtoda;

namespace {
const AlgebraParams P11{1, 1, 4};
const AlgebraParams P21{2, 1, 4};
} // namespace

TEST_CASE("addition identities")
{
    auto u0 = AlgebraElement::u(P11, 0);
    CHECK(u0 + AlgebraElement::zero(P11) == u0);
    CHECK((u0 + (-u0)).is_zero());
    CHECK(u0.scaled(rat(1, 2)) + u0.scaled(rat(1, 2)) == u0);
}

TEST_CASE("mixed truncation is an error")
{
    AlgebraParams other{1, 1, 3};
    auto a = AlgebraElement::u(P11, 0);
    auto b = AlgebraElement::u(other, 0);
    CHECK_THROWS_AS(a + b, ConfigError);
    CHECK_THROWS_AS(a * b, ConfigError);
}

TEST_CASE("multiplication and the defining relation")
{
    auto v = AlgebraElement::v(P21);
    auto vinv = AlgebraElement::v(P21, -1);
    CHECK(v * vinv == AlgebraElement::constant(P21, Rat(1)));

    // u_{-M} is represented as v^M
    CHECK(AlgebraElement::u(P21, -1) == AlgebraElement::v(P21, 1));
    AlgebraParams p12{1, 2, 3};
    CHECK(AlgebraElement::u(p12, -2) == AlgebraElement::v(p12, 2));

    // eps overflow past K is dropped
    auto u0 = AlgebraElement::u(P11, 0);
    auto a = u0.mul_eps(1);
    auto b = u0.mul_eps(P11.K);
    CHECK((a * b).is_zero());
}

TEST_CASE("x derivative")
{
    auto u0 = AlgebraElement::u(P11, 0);
    auto lhs = (u0 * u0).d_dx();
    auto rhs = AlgebraElement::from_monomial(P11, mono_u(0, 1).times(mono_u(0, 0)), Rat(2));
    CHECK(lhs == rhs);

    // d logu = M v_x v^{-1}
    AlgebraParams p32{3, 2, 3};
    auto dlog = AlgebraElement::logu(p32).d_dx();
    Monomial m = mono_vder(1);
    m.v_exp = -1;
    CHECK(dlog == AlgebraElement::from_monomial(p32, m, Rat(2)));

    CHECK(AlgebraElement::constant(P11, rat(5, 3)).d_dx().is_zero());

    // d(v^j) = j v^{j-1} v_x, including negative j
    auto d = AlgebraElement::v(P11, -2).d_dx();
    Monomial e = mono_vder(1);
    e.v_exp = -3;
    CHECK(d == AlgebraElement::from_monomial(P11, e, Rat(-2)));
}

TEST_CASE("grading of generators")
{
    AlgebraParams p{3, 2, 2};
    auto g = AlgebraElement::u(p, p.N - 1).grading();
    REQUIRE(g.has_value());
    CHECK(*g == rat(1, p.N));

    auto gv = AlgebraElement::v(p).grading();
    REQUIRE(gv.has_value());
    CHECK(*gv == rat(1, p.N) + rat(1, p.M));

    CHECK(*AlgebraElement::logu(p).grading() == Rat(0));

    // inhomogeneous sum: deg u_0 = 1, deg v = 2 at N = M = 1
    auto s = AlgebraElement::u(P11, 0) + AlgebraElement::v(P11);
    CHECK_FALSE(s.grading().has_value());
}

TEST_CASE("grading is additive under multiplication")
{
    testing::Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        auto a = AlgebraElement::from_monomial(P21, rng.monomial(P21), rng.rational());
        auto b = AlgebraElement::from_monomial(P21, rng.monomial(P21), rng.rational());
        if (a.is_zero() || b.is_zero() || (a * b).is_zero()) continue;
        CHECK(*(a * b).grading() == *a.grading() + *b.grading());
        CHECK(*(a * b).grading_partial() == *a.grading_partial() + *b.grading_partial());
    }
}

TEST_CASE("derivative preserves deg and lowers deg_partial by one")
{
    testing::Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        auto a = AlgebraElement::from_monomial(P21, rng.monomial(P21), rng.rational());
        auto d = a.d_dx();
        if (a.is_zero() || d.is_zero()) continue;
        CHECK(*d.grading() == *a.grading());
        CHECK(*d.grading_partial() == *a.grading_partial() - Rat(1));
        // eps d/dx preserves both gradations
        auto ed = a.eps_d_dx();
        if (ed.is_zero()) continue;
        CHECK(*ed.grading() == *a.grading());
        CHECK(*ed.grading_partial() == *a.grading_partial());
    }
}

TEST_CASE("shift is the exponential of the x derivative")
{
    auto u0 = AlgebraElement::u(P11, 0);
    auto s = u0.shift(1);
    AlgebraElement expect = u0;
    expect += AlgebraElement::u(P11, 0, 1).mul_eps(1);
    expect += AlgebraElement::u(P11, 0, 2).mul_eps(2).scaled(rat(1, 2));
    expect += AlgebraElement::u(P11, 0, 3).mul_eps(3).scaled(rat(1, 6));
    expect += AlgebraElement::u(P11, 0, 4).mul_eps(4).scaled(rat(1, 24));
    CHECK(s == expect);

    testing::Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        auto a = rng.element(P21);
        CHECK(a.shift(0) == a);
        CHECK(a.shift(1).shift(-1) == a);
    }
}

TEST_CASE("shift is a ring morphism")
{
    testing::Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        auto a = rng.element(P21, 2);
        auto b = rng.element(P21, 2);
        int m = rng.uniform(-2, 2);
        CHECK((a * b).shift(m) == a.shift(m) * b.shift(m));
    }
}

TEST_CASE("evolve applies the chain rule through the jets")
{
    // flow u_0 -> u_0' on N = M = 1 and the induced v, logu derivatives
    FlowData flow;
    flow.u_dot = {};
    flow.v_dot = AlgebraElement::from_monomial(P11, mono_vder(1));
    flow.logu_dot = flow.v_dot * AlgebraElement::v(P11, -1);
    auto a = AlgebraElement::v(P11, 2) + AlgebraElement::logu(P11);
    auto lhs = evolve(a, flow);
    CHECK(lhs == a.d_dx());
}
