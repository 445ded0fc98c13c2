#include <catch2/catch_amalgamated.hpp>

#include "bigtoda/symbols.hpp"
#include "test_support.hpp"

using namespace bigtoda;

namespace {
const AlgebraParams P11{1, 1, 4};
const AlgebraParams P21{2, 1, 4};

ShiftSymbol bernoulli_generating()
{
    return {ExpPoly::z(), ExpPoly::exp(1) - ExpPoly::constant(Rat(1))};
}
} // namespace

TEST_CASE("bernoulli numbers against the generating function")
{
    auto b = bernoulli_numbers(9);
    CHECK(b[0] == Rat(1));
    CHECK(b[1] == rat(-1, 2));
    CHECK(b[2] == rat(1, 6));
    CHECK(b[3] == Rat(0));
    CHECK(b[4] == rat(-1, 30));

    // independent oracle: series division of z/(e^z - 1)
    auto s = expand_symbol(bernoulli_generating(), 8);
    for (int k = 0; k <= 8; ++k) CHECK(s.at(k) == b[static_cast<std::size_t>(k)] / factorial(static_cast<unsigned>(k)));
}

TEST_CASE("symbol expansion")
{
    auto s = expand_symbol(bernoulli_generating(), 2);
    CHECK(s.at(0) == Rat(1));
    CHECK(s.at(1) == rat(-1, 2));
    CHECK(s.at(2) == rat(1, 12));

    for (int N = 1; N <= 4; ++N) {
        ShiftSymbol t(ExpPoly::exp(1) - ExpPoly::constant(Rat(1)), ExpPoly::exp(N) - ExpPoly::constant(Rat(1)));
        CHECK(expand_symbol(t, 0).at(0) == rat(1, N));
    }

    ShiftSymbol pole(ExpPoly::constant(Rat(1)), ExpPoly::exp(1) - ExpPoly::constant(Rat(1)));
    CHECK_THROWS_AS(expand_symbol(pole, 3), PoleAtZeroError);
}

TEST_CASE("apply symbol")
{
    auto u1 = AlgebraElement::u(P21, 1);
    auto id = expand_symbol(ShiftSymbol::constant(Rat(1)), P21.K);
    CHECK(apply_symbol(id, u1) == u1);

    // e^z - 1 acts as shift minus identity
    ShiftSymbol dif = ShiftSymbol::exp(1) - ShiftSymbol::constant(Rat(1));
    CHECK(apply_symbol(dif, u1) == u1.shift(1) - u1);

    // (1 + Lambda)^{-1} composed with (1 + Lambda) is the identity
    ShiftSymbol half(ExpPoly::constant(Rat(1)), ExpPoly::exp(1) + ExpPoly::constant(Rat(1)));
    auto y = apply_symbol(half, u1);
    CHECK(y.shift(1) + y == u1);
    // leading terms 1/2 u_1 - 1/4 eps u_1'
    CHECK(y.eps_slice(0) == u1.scaled(rat(1, 2)));
    CHECK(y.eps_slice(1) == AlgebraElement::u(P21, 1, 1).scaled(rat(-1, 4)));
}

TEST_CASE("discrete derivative inversion")
{
    // g = eps u_0' -> u_0 - eps/2 u_0' + eps^2/12 u_0'' + ...
    auto g = AlgebraElement::u(P11, 0, 1).mul_eps();
    auto x = invert_discrete_derivative(g, 1);
    CHECK(x.eps_slice(0) == AlgebraElement::u(P11, 0));
    CHECK(x.eps_slice(1) == AlgebraElement::u(P11, 0, 1).scaled(rat(-1, 2)));
    CHECK(x.eps_slice(2) == AlgebraElement::u(P11, 0, 2).scaled(rat(1, 12)));
    CHECK(x.eps_slice(3).is_zero());

    CHECK(invert_discrete_derivative(AlgebraElement::zero(P11), 3).is_zero());
    CHECK_THROWS_AS(invert_discrete_derivative(AlgebraElement::u(P11, 0), 1), NotExactError);

    // defining property: (Lambda^m - 1) x = g through the valid order
    for (int m : {1, -1, 2}) {
        auto xm = invert_discrete_derivative(g, m);
        auto back = xm.shift(m) - xm;
        CHECK(equal_through(back, g, xm.valid_order()));
    }
}

TEST_CASE("inversion inverts the discrete derivative on random elements")
{
    testing::Rng rng(41);
    for (int t = 0; t < 25; ++t) {
        auto a = rng.element(P21, 3);
        for (int m : {1, -2, 3}) {
            auto g = a.shift(m) - a;
            auto x = invert_discrete_derivative(g, m);
            // x = a - const(a) through the valid order
            CHECK(equal_through(x, a - a.constant_part(), x.valid_order()));
        }
    }
}
