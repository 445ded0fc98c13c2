#include <catch2/catch_amalgamated.hpp>

#include "bigtoda/lax.hpp"
#include "test_support.hpp"

using namespace bigtoda;

namespace {

bool op_equal_through(const DifferenceOperator& a, const DifferenceOperator& b, int lo, int hi, int ord)
{
    for (int k = lo; k <= hi; ++k)
        if (!(a.coeff(k) - b.coeff(k)).is_zero_through(ord)) return false;
    return true;
}

} // namespace

TEST_CASE("root_n leading coefficient")
{
    for (int N : {1, 2, 3}) {
        Hierarchy h(N, 1, 3);
        auto R = h.root_n(-2);
        // a_0 = (1 + ... + Lambda^{N-1})^{-1} u_{N-1}
        ShiftSymbol geo(ExpPoly::constant(Rat(1)), ExpPoly::exp_range(0, N - 1));
        auto expect = apply_symbol(geo, AlgebraElement::u(h.params(), N - 1));
        CHECK(R.coeff(0) == expect);
        CHECK(R.coeff(0).eps_slice(0) == AlgebraElement::u(h.params(), N - 1).scaled(rat(1, N)));
        CHECK(R.coeff(1) == AlgebraElement::constant(h.params(), Rat(1)));
    }
}

TEST_CASE("root coefficients vanish with the dependent variables")
{
    Hierarchy h(2, 1, 2);
    auto R = h.root_n(-3);
    for (int k = -3; k <= 0; ++k) {
        CHECK(R.coeff(k).constant_part().is_zero());
        CHECK_FALSE(R.coeff(k).contains_aux());
    }
}

TEST_CASE("root_n to the N-th power returns the Lax operator")
{
    for (auto [N, M] : {std::pair{1, 1}, {2, 1}, {1, 2}}) {
        Hierarchy h(N, M, 3);
        int lo = -M - 2;
        auto R = h.root_n(lo - N + 1);
        auto P = op_pow(R, N);
        for (int k = lo; k <= N; ++k) CHECK(P.coeff(k) == h.lax().coeff(k));
    }
}

TEST_CASE("gauge ratios")
{
    Hierarchy h(2, 3, 3);
    CHECK(h.gauge_ratio(0) == AlgebraElement::constant(h.params(), Rat(1)));
    // Lambda^{-M} q0 / q0 = u_{-M}^{-1} exactly
    CHECK(h.gauge_ratio(-3) == AlgebraElement::v(h.params(), -3));

    for (int k = -2; k <= 2; ++k) {
        auto g = h.gauge_ratio(k);
        auto gi = h.gauge_ratio_inv(k);
        CHECK(g * gi == AlgebraElement::constant(h.params(), Rat(1)));
        auto deg = g.grading();
        REQUIRE(deg.has_value());
        CHECK(*deg == Rat(k) * (rat(1, h.N()) + rat(1, h.M())));
        CHECK(*g.grading_partial() == Rat(0));
    }

    // cocycle identity
    for (int k : {-2, 1, 3}) {
        for (int j : {-1, 2}) {
            CHECK(h.gauge_ratio(k) * h.gauge_ratio(j).shift(k) == h.gauge_ratio(k + j));
        }
    }
}

TEST_CASE("root_m is the Lax operator when M = 1")
{
    Hierarchy h(2, 1, 3);
    auto S = h.root_m(4);
    for (int k = -1; k <= 4; ++k) CHECK(S.coeff(k) == h.lax().coeff(k));
}

TEST_CASE("root_m to the M-th power returns the Lax operator")
{
    for (auto [N, M] : {std::pair{1, 2}, {2, 2}}) {
        Hierarchy h(N, M, 3);
        int hi = N + 2;
        auto S = h.root_m(hi + M - 1);
        auto P = op_pow(S, M);
        for (int k = -M; k <= hi; ++k) CHECK(P.coeff(k) == h.lax().coeff(k));
    }
}

TEST_CASE("root coefficient degrees")
{
    Hierarchy h(2, 3, 2);
    auto R = h.root_n(-3);
    for (int k = -3; k <= 0; ++k) {
        auto a = R.coeff(k);
        if (a.is_zero()) continue;
        CHECK(*a.grading() == rat(1 - k, h.N()));
        CHECK(*a.grading_partial() == Rat(0));
    }
    auto S = h.root_m(3);
    for (int j = -1; j <= 3; ++j) {
        auto b = S.coeff(j);
        if (b.is_zero()) continue;
        CHECK(*b.grading() == rat(1, h.M()) - rat(j, h.N()));
        CHECK(*b.grading_partial() == Rat(0));
    }
}

TEST_CASE("log coefficients match the displayed expansions")
{
    for (auto [N, M] : {std::pair{1, 1}, {2, 1}, {1, 2}, {2, 3}}) {
        Hierarchy h(N, M, 3);
        const auto& P = h.params();

        // w_{-1} = (1/2N) u_{N-1} - (eps/4) (u_{N-1})_x + O(eps^2)
        auto wm1 = h.log_w(-1);
        auto uN1 = AlgebraElement::u(P, N - 1);
        CHECK(wm1.eps_slice(0) == uN1.scaled(rat(1, 2 * N)));
        CHECK(wm1.eps_slice(1) == uN1.d_dx().scaled(rat(-1, 4)));

        // w_0 = (1/2M) logu + (eps/4)(logu)_x + (eps^2 M / 24)(logu)_xx + ...
        auto w0 = h.log_w(0);
        auto lg = AlgebraElement::logu(P);
        CHECK(w0.eps_slice(0) == lg.scaled(rat(1, 2 * M)));
        CHECK(w0.eps_slice(1) == lg.d_dx().scaled(rat(1, 4)));
        CHECK(w0.eps_slice(2) == lg.d_dx().d_dx().scaled(rat(M, 24)));

        // w_1 = (1/2M) u_{-M+1}/u_{-M}
        //     + (eps/4M) (M u_{-M} (u_{-M+1})_x - (M+1) u_{-M+1} (u_{-M})_x) / u_{-M}^2 + ...
        auto w1 = h.log_w(1);
        auto up = AlgebraElement::u(P, -M + 1); // for M = 1 this is u_0
        auto vmM = AlgebraElement::v(P, -M);
        CHECK(w1.eps_slice(0) == up * vmM.scaled(rat(1, 2 * M)));
        auto num = AlgebraElement::v(P, M).scaled(Rat(M)) * up.d_dx() -
                   up.scaled(Rat(M + 1)) * AlgebraElement::v(P, M).d_dx();
        CHECK(w1.eps_slice(1) == num * AlgebraElement::v(P, -2 * M).scaled(rat(1, 4 * M)));
    }
}

TEST_CASE("log coefficient degrees")
{
    Hierarchy h(2, 2, 2);
    for (int l = -3; l <= 3; ++l) {
        auto w = h.log_w(l);
        if (l == 0) continue; // contains logu, degree 0 pieces mix with logu itself
        CHECK(*w.grading() == rat(-l, h.N()));
        CHECK(*w.grading_partial() == Rat(0));
    }
}

TEST_CASE("log_+ commutes with root powers at the residue")
{
    Hierarchy h(2, 1, 3);
    for (int m : {1, 2, 3}) {
        auto Rm = h.root_n_power(m, -1);
        // res [N eps d + 2N W_-, L^{m/N}] = N eps (p_0)_x + res[2N W_-, L^{m/N}]
        AlgebraElement res = Rm.coeff(0).d_dx().mul_eps().scaled(Rat(h.N()));
        for (int k = -m; k <= -1; ++k) {
            auto wk = h.log_w(k).scaled(Rat(2 * h.N()));
            // [w_k Lambda^k, p_{-k} Lambda^{-k}] residue contribution
            res += wk * Rm.coeff(-k).shift(k) - Rm.coeff(-k) * wk.shift(-k);
        }
        CHECK(res.is_zero_through(h.K()));
    }
}

TEST_CASE("exponential generators")
{
    for (auto [N, M] : {std::pair{2, 1}, {1, 2}}) {
        Hierarchy h(N, M, 3);
        const auto& P = h.params();
        int lo = -N - M - 2;
        auto W = h.bch_w_minus(lo);

        // leading terms u_{N-1} Lambda^{-1} + (u_{N-2} - u_{N-1} (Lambda^{-1}u_{N-1})/2) Lambda^{-2}
        auto u1 = AlgebraElement::u(P, N - 1);
        CHECK(W.coeff(-1) == u1);
        auto u2 = AlgebraElement::u(P, N - 2);
        CHECK(W.coeff(-2) == u2 - u1.scaled(rat(1, 2)) * u1.shift(-1));

        // e^{W_-} Lambda^N = L
        auto E = h.exp_series(W, lo, 0) * DifferenceOperator::shift_op(P, N);
        for (int k = lo + N; k <= N; ++k) CHECK(E.coeff(k) == h.lax().coeff(k));

        // e^{W_{>0}} u_{-M} Lambda^{-M} = L
        int hi = N + M + 2;
        auto Wp = h.bch_w_pos(hi);
        auto E2 = h.exp_series(Wp, 0, hi) *
                  DifferenceOperator::monomial(P, -M, AlgebraElement::v(P, M));
        for (int k = -M; k <= hi - M; ++k) CHECK(E2.coeff(k) == h.lax().coeff(k));
    }
}

TEST_CASE("flow generator examples")
{
    Hierarchy h(2, 1, 3);
    const auto& P = h.params();

    // A_{0,0} = L_+
    auto a00 = h.a_op({0, 0});
    for (int k = 0; k <= 2; ++k) CHECK(a00.coeff(k) == h.lax().coeff(k));

    // A_{N-1,0} = Lambda + (Lambda^{N-1} + ... + 1)^{-1} u_{N-1}
    auto atop = h.a_op({h.N() - 1, 0});
    ShiftSymbol geo(ExpPoly::constant(Rat(1)), ExpPoly::exp_range(0, h.N() - 1));
    CHECK(atop.coeff(1) == AlgebraElement::constant(P, Rat(1)));
    CHECK(atop.coeff(0) == apply_symbol(geo, AlgebraElement::u(P, 1)));

    // M = 1: -(L)_- = -u_{-1} Lambda^{-1}
    auto b00 = h.b_op({0, 0}, -1, 2);
    auto aneg = (-b00.soft_project_minus());
    CHECK(aneg.coeff(-1) == -AlgebraElement::v(P, 1));

    // tilde A_{-M,0} = eps d
    auto at0 = h.a_tilde(0);
    CHECK(at0.part(1).coeff(0) == AlgebraElement::constant(P, Rat(1)));
    CHECK(at0.part(0).stored_zero());
    CHECK(at0.parts().size() == 2);
}

TEST_CASE("first negative flow generator for M = 2")
{
    Hierarchy h(1, 2, 3);
    auto a = h.a_op({-1, 0}); // -(L^{1/2})_-
    ShiftSymbol geo(ExpPoly::constant(Rat(1)), ExpPoly::exp_range(-1, 0));
    Hierarchy& hh = h;
    auto expect = -hh.exp_of_symbol_on_logu(geo);
    CHECK(a.coeff(-1) == expect);
    CHECK(a.supp_lo() == -1);
    CHECK(a.supp_hi() == -1);
}

TEST_CASE("the lowest flow is the x translation")
{
    for (auto [N, M] : {std::pair{1, 1}, {2, 1}, {1, 2}}) {
        Hierarchy h(N, M, 3);
        const FlowData& fd = h.flow({-M, 0});
        for (int k = -M + 1; k <= N - 1; ++k) {
            auto expect = AlgebraElement::u(h.params(), k, 1);
            CHECK(equal_through(fd.u_dot.at(k), expect, fd.u_dot.at(k).valid_order()));
        }
        auto vx = AlgebraElement::from_monomial(h.params(), mono_vder(1));
        CHECK(equal_through(fd.v_dot, vx, fd.v_dot.valid_order()));
    }
}

TEST_CASE("flow components are homogeneous of the stated degree")
{
    Hierarchy h(2, 1, 2);
    for (FlowIndex idx : {FlowIndex{1, 0}, {0, 1}, {-1, 1}}) {
        const FlowData& fd = h.flow(idx);
        for (const auto& [k, ud] : fd.u_dot) {
            if (ud.is_zero()) continue;
            auto d = ud.grading();
            REQUIRE(d.has_value());
            CHECK(*d == Rat(idx.p + 2) + h.mu(idx.alpha) - rat(k, h.N()));
        }
    }
}

TEST_CASE("pushed flows act on the roots")
{
    Hierarchy h(2, 1, 3);
    // eps (L^{1/N})_t = [-(B)_-, L^{1/N}] for a sampled flow
    FlowIndex idx{1, 0};
    int lo = -4;
    auto R = h.root_n(lo);
    auto Rdot = R.evolved(h.flow(idx)).mul_eps();
    int e = (idx.p + 1) * h.N() - idx.alpha;
    auto Bm = h.b_op(idx, lo - 2, e).soft_project_minus();
    auto C = commutator(-Bm, R);
    for (int k = lo + 2; k <= 1; ++k) {
        auto diff = Rdot.coeff(k) - C.coeff(k);
        CHECK(diff.is_zero_through(std::min(Rdot.coeff(k).valid_order(), h.K())));
    }
}

TEST_CASE("zakharov-shabat residuals vanish")
{
    SECTION("N = M = 1")
    {
        Hierarchy h(1, 1, 3);
        auto r = h.check_zakharov_shabat({0, 0}, {-1, 0});
        CHECK(r.pass);
        CHECK(r.order_checked >= 2);
        auto same = h.check_zakharov_shabat({0, 1}, {0, 1});
        CHECK(same.pass);
    }
    SECTION("N = 2, M = 1")
    {
        Hierarchy h(2, 1, 3);
        CHECK(h.check_zakharov_shabat({1, 0}, {0, 0}).pass);
        CHECK(h.check_zakharov_shabat({1, 0}, {-1, 0}).pass);
    }
}
