#pragma once

#include <string>
#include <vector>

#include "bigtoda/calculus.hpp"
#include "bigtoda/lax.hpp"

namespace bigtoda {

/// Result of one verified identity.
struct CheckReport {
    std::string id;
    bool pass = true;
    int order_checked = 0;
    std::string detail;
};

namespace hamiltonian {

/// Hamiltonian density h_{alpha, q}: a Gamma-ratio weighted residue of the
/// corresponding power of the root, or of L^{q+1} log L for the lowest row.
inline AlgebraElement density(Hierarchy& h, FlowIndex idx)
{
    const auto [alpha, q] = idx;
    const auto& P = h.params();
    if (alpha >= 0) {
        int e = (q + 2) * P.N - alpha;
        return h.root_n_power(e, 0).residue().scaled(Hierarchy::gamma_ratio(rat(alpha, P.N), q + 1));
    }
    if (alpha != -P.M) {
        int e = (q + 2) * P.M + alpha;
        return h.root_m_power(e, 0).residue().scaled(Hierarchy::gamma_ratio(-rat(alpha, P.M), q + 1));
    }
    return h.b_op({alpha, q + 1}, 0, 0).residue();
}

/// The same density read as res B_{alpha, q+1}; must agree with density().
inline AlgebraElement density_via_b(Hierarchy& h, FlowIndex idx)
{
    return h.b_op({idx.alpha, idx.p + 1}, 0, 0).residue();
}

/// Canonical one-form representative of dH_{alpha, p}: the operator
/// B_{alpha, p} truncated to the window [-N+1, M].
inline DifferenceOperator d_hamiltonian(Hierarchy& h, FlowIndex idx)
{
    const auto& P = h.params();
    return h.b_op(idx, -P.N + 1, P.M).restrict_support(-P.N + 1, P.M).tightened();
}

/// First Hamiltonian operator: P1(X) = [X_+, L]_{<=0} - [X_-, L]_{>0}.
inline DifferenceOperator p1_apply(Hierarchy& h, const DifferenceOperator& X)
{
    const DifferenceOperator& L = h.lax();
    auto plus = X.project(DifferenceOperator::Part::Plus);
    auto minus = X.project(DifferenceOperator::Part::Minus);
    auto r = commutator(plus, L).project(DifferenceOperator::Part::NonPositive) -
             commutator(minus, L).project(DifferenceOperator::Part::Positive);
    return r.tightened();
}

/// The compensating function of the second structure:
/// (Lambda^N + 1)(Lambda^N - 1)^{-1} res [L, X], evaluated through the
/// telescoped preimage of the commutator residue, which keeps the full eps
/// accuracy of the inputs.
inline AlgebraElement p2_nonlocal_function(Hierarchy& h, const DifferenceOperator& X)
{
    const auto& P = h.params();
    const DifferenceOperator& L = h.lax();
    AlgebraElement y(P);
    for (const auto& [k, lk] : L.coeffs()) {
        if (k == 0) continue;
        if (!X.known(-k)) throw WindowError("p2_apply: one-form window too small");
        AlgebraElement z = lk * X.coeff(-k).shift(k);
        if (z.is_zero()) continue;
        // (Lambda^N + 1)(Lambda^N - 1)^{-1} (1 - Lambda^{-k}) z
        ShiftSymbol s((ExpPoly::exp(P.N) + ExpPoly::constant(Rat(1))) *
                          (ExpPoly::constant(Rat(1)) - ExpPoly::exp(-k)),
                      ExpPoly::exp(P.N) - ExpPoly::constant(Rat(1)));
        y += apply_symbol(s, z);
    }
    return y;
}

/// Second Hamiltonian operator:
/// P2(X) = 1/2 [L, (LX + XL)_-] - 1/2 L [L, X]_{<=0} - 1/2 [L, X]_{<=0} L
///       + 1/2 [L, (Lambda^N + 1)(Lambda^N - 1)^{-1} res [L, X]].
inline DifferenceOperator p2_apply(Hierarchy& h, const DifferenceOperator& X)
{
    const auto& P = h.params();
    const DifferenceOperator& L = h.lax();
    auto lx_xl = (L * X + X * L).project(DifferenceOperator::Part::Minus);
    auto c = commutator(L, X).project(DifferenceOperator::Part::NonPositive);
    auto nl = DifferenceOperator::monomial(P, 0, p2_nonlocal_function(h, X));
    auto r = commutator(L, lx_xl) - L * c - c * L + commutator(L, nl);
    return r.scaled(rat(1, 2)).tightened();
}

/// Matrix presentation of a Hamiltonian operator: entry (n, m) is the action
/// on a test function f of the operator defined by
/// P(Lambda^{-m} f) = sum_n (entry_{nm} f) Lambda^n.
struct BracketMatrix {
    int N = 0, M = 0;
    std::vector<std::vector<AlgebraElement>> entries; // [n + M][m + M]

    const AlgebraElement& at(int n, int m) const
    {
        return entries[static_cast<std::size_t>(n + M)][static_cast<std::size_t>(m + M)];
    }
};

inline BracketMatrix bracket_matrix(Hierarchy& h, int which)
{
    if (which != 1 && which != 2) throw ConfigError("bracket_matrix: which must be 1 or 2");
    const auto& P = h.params();
    BracketMatrix mat;
    mat.N = P.N;
    mat.M = P.M;
    int dim = P.N + P.M;
    mat.entries.assign(static_cast<std::size_t>(dim), std::vector<AlgebraElement>());
    AlgebraElement f = AlgebraElement::aux(P, 0);
    std::vector<DifferenceOperator> results;
    for (int m = -P.M; m <= P.N - 1; ++m) {
        DifferenceOperator X = DifferenceOperator::monomial(P, -m, f.shift(-m));
        DifferenceOperator r = which == 1 ? p1_apply(h, X) : p2_apply(h, X);
        for (const auto& [k, c] : r.coeffs()) {
            if ((k < -P.M || k > P.N - 1) && !c.is_zero())
                throw InconsistentFlowError("bracket_matrix: result leaves the tangent window");
        }
        results.push_back(std::move(r));
    }
    for (int n = -P.M; n <= P.N - 1; ++n) {
        auto& row = mat.entries[static_cast<std::size_t>(n + P.M)];
        for (int m = -P.M; m <= P.N - 1; ++m)
            row.push_back(results[static_cast<std::size_t>(m + P.M)].coeff(n));
    }
    return mat;
}

/// Operator recursion: L B_{alpha,p} = (p + 2 + mu_alpha) B_{alpha,p+1}
/// + R_alpha^beta B_{beta,p} with R supported only at (alpha, beta) = (-M, 0).
inline CheckReport check_recursion(Hierarchy& h, FlowIndex idx, int lo, int hi)
{
    const auto& P = h.params();
    const auto [alpha, p] = idx;
    DifferenceOperator lhs = h.lax() * h.b_op(idx, lo - P.N, hi + P.M);
    DifferenceOperator rhs = h.b_op({alpha, p + 1}, lo, hi).scaled(Rat(p + 2) + h.mu(alpha));
    if (alpha == -P.M) rhs = rhs + h.b_op({0, p}, lo, hi).scaled(rat(1, P.N) + rat(1, P.M));
    CheckReport rep;
    rep.id = "recursion alpha=" + std::to_string(alpha) + " p=" + std::to_string(p);
    rep.order_checked = P.K;
    for (int k = lo; k <= hi; ++k) {
        AlgebraElement d = lhs.coeff(k) - rhs.coeff(k);
        int ord = std::min(rep.order_checked, d.valid_order());
        if (!d.is_zero_through(ord)) {
            rep.pass = false;
            rep.detail = "mismatch at order " + std::to_string(k);
            return rep;
        }
    }
    return rep;
}

/// Involution: the bracket density res(dH_1 P_i(dH_2)) must be a total x
/// derivative, so that the integrated bracket {H_1, H_2}_i vanishes.
inline CheckReport check_involution(Hierarchy& h, FlowIndex i1, FlowIndex i2, int which)
{
    DifferenceOperator x1 = d_hamiltonian(h, i1);
    DifferenceOperator x2 = d_hamiltonian(h, i2);
    DifferenceOperator px2 = which == 1 ? p1_apply(h, x2) : p2_apply(h, x2);
    AlgebraElement dens = (x1 * px2).residue();
    CheckReport rep;
    rep.id = "involution {" + std::to_string(i1.alpha) + "," + std::to_string(i1.p) + ";" +
             std::to_string(i2.alpha) + "," + std::to_string(i2.p) + "} bracket " + std::to_string(which);
    rep.order_checked = dens.valid_order();
    rep.pass = calculus::is_exact_x_derivative(dens);
    if (!rep.pass) rep.detail = "density is not a total derivative";
    return rep;
}

/// Bracket-level recursion (the bi-Hamiltonian ladder):
/// P2(dH_{alpha,p}) = (p + 2 + mu) P1(dH_{alpha,p+1}) + R P1(dH_{0,p}).
inline CheckReport check_bihamiltonian_ladder(Hierarchy& h, FlowIndex idx)
{
    const auto& P = h.params();
    DifferenceOperator lhs = p2_apply(h, d_hamiltonian(h, idx));
    DifferenceOperator rhs = p1_apply(h, d_hamiltonian(h, {idx.alpha, idx.p + 1})).scaled(Rat(idx.p + 2) + h.mu(idx.alpha));
    if (idx.alpha == -P.M)
        rhs = rhs + p1_apply(h, d_hamiltonian(h, {0, idx.p})).scaled(rat(1, P.N) + rat(1, P.M));
    CheckReport rep;
    rep.id = "ladder alpha=" + std::to_string(idx.alpha) + " p=" + std::to_string(idx.p);
    rep.order_checked = P.K;
    for (int k = -P.M; k <= P.N - 1; ++k) {
        AlgebraElement d = lhs.coeff(k) - rhs.coeff(k);
        int ord = std::min(rep.order_checked, d.valid_order());
        rep.order_checked = ord;
        if (!d.is_zero_through(ord)) {
            rep.pass = false;
            rep.detail = "mismatch at order " + std::to_string(k);
            return rep;
        }
    }
    return rep;
}

} // namespace hamiltonian
} // namespace bigtoda
