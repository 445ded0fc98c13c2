#pragma once

#include <optional>
#include <vector>

#include "bigtoda/hamiltonian.hpp"

namespace bigtoda {
namespace goldens {

namespace detail {

struct EntryBuilder {
    const AlgebraParams& P;
    AlgebraElement f;

    AlgebraElement u(int k) const { return AlgebraElement::u(P, k); }

    /// g * Lambda^k * rest
    AlgebraElement lam(int k, const AlgebraElement& x) const { return x.shift(k); }

    /// (1 + Lambda)^{-1} x
    AlgebraElement halfinv(const AlgebraElement& x) const
    {
        ShiftSymbol s(ExpPoly::constant(Rat(1)), ExpPoly::exp(1) + ExpPoly::constant(Rat(1)));
        return apply_symbol(s, x);
    }
};

} // namespace detail

/// Reference bracket matrices for the shapes the literature displays
/// explicitly. Entries are the actions on the test function, directly
/// comparable with bracket_matrix(). Returns nullopt for other shapes.
///
/// The (N, M) = (1, 2) second matrix carries one correction relative to the
/// printed source: skew symmetry and the closed-form bracket force the
/// (u_0, u_{-1}) entry to be Lambda^2 u_{-2} - u_{-2} Lambda^{-1}
/// + u_0 (Lambda - 1) u_{-1}.
inline std::optional<hamiltonian::BracketMatrix> golden_bracket_matrix(const AlgebraParams& P, int which)
{
    using hamiltonian::BracketMatrix;
    detail::EntryBuilder b{P, AlgebraElement::aux(P, 0)};
    const AlgebraElement& f = b.f;
    auto Z = AlgebraElement::zero(P);

    BracketMatrix mat;
    mat.N = P.N;
    mat.M = P.M;
    auto set = [&](std::vector<std::vector<AlgebraElement>> rows) { mat.entries = std::move(rows); };

    if (P.N == 1 && P.M == 1) {
        auto u0 = b.u(0), um1 = b.u(-1);
        if (which == 1) {
            set({{Z, um1 * (f - f.shift(-1))},
                 {(um1 * f).shift(1) - um1 * f, Z}});
            return mat;
        }
        set({{um1 * ((um1 * f).shift(1) - (um1 * f).shift(-1)), um1 * (u0 * f - (u0 * f).shift(-1))},
             {u0 * ((um1 * f).shift(1) - um1 * f), (um1 * f).shift(1) - um1 * f.shift(-1)}});
        return mat;
    }

    if (P.N == 2 && P.M == 1) {
        auto u0 = b.u(0), u1 = b.u(1), um1 = b.u(-1);
        if (which == 1) {
            set({{Z, um1 * (f - f.shift(-1)), Z},
                 {(um1 * f).shift(1) - um1 * f, Z, Z},
                 {Z, Z, f.shift(1) - f.shift(-1)}});
            return mat;
        }
        set({{um1 * ((um1 * f).shift(1) - um1 * f - (um1 * f).shift(-1) + b.halfinv(um1 * f).scaled(Rat(2))),
              um1 * (u0 * f - (u0 * f).shift(-1)),
              um1 * (b.halfinv(u1 * f).scaled(Rat(2)) - (u1 * f).shift(-1))},
             {u0 * ((um1 * f).shift(1) - um1 * f),
              u1 * (um1 * f).shift(1) - um1 * (u1 * f).shift(-1),
              (um1 * f).shift(1) - um1 * f.shift(-2)},
             {u1 * ((um1 * f).shift(1) - (um1 * f).scaled(Rat(2)) + b.halfinv(um1 * f).scaled(Rat(2))),
              (um1 * f).shift(2) - um1 * f.shift(-1),
              (u0 * f).shift(1) - u0 * f.shift(-1) - u1 * u1 * f + u1 * b.halfinv(u1 * f).scaled(Rat(2))}});
        return mat;
    }

    if (P.N == 1 && P.M == 2) {
        auto u0 = b.u(0), um1 = b.u(-1), um2 = b.u(-2);
        if (which == 1) {
            set({{Z, Z, um2 * (f - f.shift(-2))},
                 {Z, (um2 * f).shift(1) - um2 * f.shift(-1), um1 * (f - f.shift(-1))},
                 {(um2 * f).shift(2) - um2 * f, (um1 * f).shift(1) - um1 * f, Z}});
            return mat;
        }
        auto p4 = [&](const AlgebraElement& x, int a, int bb, int c, int d, int sa, int sb, int sc, int sd) {
            return x.shift(a).scaled(Rat(sa)) + x.shift(bb).scaled(Rat(sb)) + x.shift(c).scaled(Rat(sc)) +
                   x.shift(d).scaled(Rat(sd));
        };
        set({{um2 * p4(um2 * f, 2, 1, -1, -2, 1, 1, -1, -1),
              um2 * p4(um1 * f, 1, 0, -1, -2, 1, 1, -1, -1),
              um2 * (u0 * f - (u0 * f).shift(-2))},
             {um1 * p4(um2 * f, 2, 1, -1, 0, 1, 1, -1, -1),
              u0 * (um2 * f).shift(1) - um2 * (u0 * f).shift(-1) + um1 * ((um1 * f).shift(1) - (um1 * f).shift(-1)),
              (um2 * f).shift(1) - um2 * f.shift(-2) + um1 * (u0 * f - (u0 * f).shift(-1))},
             {u0 * ((um2 * f).shift(2) - um2 * f),
              (um2 * f).shift(2) - um2 * f.shift(-1) + u0 * ((um1 * f).shift(1) - um1 * f),
              (um1 * f).shift(1) - um1 * f.shift(-1)}});
        return mat;
    }

    return std::nullopt;
}

} // namespace goldens
} // namespace bigtoda
