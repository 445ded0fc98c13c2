#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bigtoda/rational.hpp"

namespace bigtoda {

/// A jet variable that can occur as a monomial factor.
///
/// Kinds:
///   U    — derivative of a dependent variable u_k, index k in [-M+1, N-1],
///          derivative order der >= 0. u_{-M} itself is never a generator;
///          it is represented as v^M.
///   VDer — derivative of v = (u_{-M})^{1/M} of order der >= 1. Underived v
///          lives in Monomial::v_exp so that negative powers are allowed.
///   Aux  — derivative of an auxiliary test function (used to present
///          Hamiltonian operator entries as actions on a dummy argument).
///
/// log u_{-M} appears only underived (Monomial::logu_exp); its x-derivative
/// is rewritten as M v_x v^{-1} at construction time.
struct Gen {
    enum class Kind : std::uint8_t { U = 0, VDer = 1, Aux = 2 };

    Kind kind;
    int idx; // U: the k of u_k; Aux: the aux id; VDer: unused (0)
    int der; // derivative order

    friend auto operator<=>(const Gen&, const Gen&) = default;
};

inline Gen gen_u(int k, int der = 0) { return Gen{Gen::Kind::U, k, der}; }
inline Gen gen_vder(int der) { return Gen{Gen::Kind::VDer, 0, der}; }
inline Gen gen_aux(int id, int der = 0) { return Gen{Gen::Kind::Aux, id, der}; }

/// A monomial of the algebra: eps^eps * v^v_exp * (log u_{-M})^logu_exp *
/// prod fac. Factors are kept sorted by Gen ordering with positive exponents;
/// this fixes the canonical normal form.
struct Monomial {
    int eps = 0;
    int v_exp = 0;
    int logu_exp = 0;
    std::vector<std::pair<Gen, int>> fac;

    friend auto operator<=>(const Monomial&, const Monomial&) = default;

    bool is_constant() const { return v_exp == 0 && logu_exp == 0 && fac.empty(); }

    /// Total derivative count weighted by exponents (used by deg_partial).
    int derivative_weight() const
    {
        int w = 0;
        for (const auto& [g, e] : fac) w += g.der * e;
        return w;
    }

    /// Multiplies a factor in, keeping the sorted invariant.
    void mul_factor(const Gen& g, int e)
    {
        if (e == 0) return;
        auto it = fac.begin();
        while (it != fac.end() && it->first < g) ++it;
        if (it != fac.end() && it->first == g) {
            it->second += e;
            if (it->second == 0) fac.erase(it);
        } else {
            fac.insert(it, {g, e});
        }
    }

    Monomial times(const Monomial& o) const
    {
        Monomial r = *this;
        r.eps += o.eps;
        r.v_exp += o.v_exp;
        r.logu_exp += o.logu_exp;
        for (const auto& [g, e] : o.fac) r.mul_factor(g, e);
        return r;
    }
};

inline Monomial mono_one() { return Monomial{}; }

inline Monomial mono_eps(int p = 1)
{
    Monomial m;
    m.eps = p;
    return m;
}

inline Monomial mono_u(int k, int der = 0, int e = 1)
{
    Monomial m;
    m.mul_factor(gen_u(k, der), e);
    return m;
}

inline Monomial mono_v(int e = 1)
{
    Monomial m;
    m.v_exp = e;
    return m;
}

inline Monomial mono_vder(int der, int e = 1)
{
    Monomial m;
    m.mul_factor(gen_vder(der), e);
    return m;
}

inline Monomial mono_logu(int e = 1)
{
    Monomial m;
    m.logu_exp = e;
    return m;
}

inline Monomial mono_aux(int id, int der = 0, int e = 1)
{
    Monomial m;
    m.mul_factor(gen_aux(id, der), e);
    return m;
}

/// deg per the hierarchy's gradation: deg u_k = 1 - k/N, deg v = 1/N + 1/M,
/// deg logu = deg eps = 0; x-derivatives do not change deg.
inline Rat mono_deg(const Monomial& m, int N, int M)
{
    Rat d = Rat(m.v_exp) * (rat(1, N) + rat(1, M));
    for (const auto& [g, e] : m.fac) {
        switch (g.kind) {
        case Gen::Kind::U: d += Rat(e) * (Rat(1) - rat(g.idx, N)); break;
        case Gen::Kind::VDer: d += Rat(e) * (rat(1, N) + rat(1, M)); break;
        case Gen::Kind::Aux: break;
        }
    }
    return d;
}

/// deg_partial: each x-derivative counts -1, each power of eps counts +1.
inline Rat mono_deg_partial(const Monomial& m)
{
    return Rat(m.eps - m.derivative_weight());
}

namespace detail {

inline std::string gen_key(const Gen& g)
{
    std::string s;
    switch (g.kind) {
    case Gen::Kind::U: s = "u[" + std::to_string(g.idx) + "]"; break;
    case Gen::Kind::VDer: s = "v"; break;
    case Gen::Kind::Aux: s = "f" + (g.idx ? std::to_string(g.idx) : std::string()); break;
    }
    if (g.der > 0) s += "_" + std::to_string(g.der);
    return s;
}

} // namespace detail

/// Canonical textual key, e.g. "eps^2*u[-1]_1*v^-3*logu". Used for JSON maps
/// and for deterministic debugging output.
inline std::string mono_key(const Monomial& m)
{
    std::string s;
    auto push = [&s](const std::string& t) {
        if (!s.empty()) s += "*";
        s += t;
    };
    if (m.eps == 1)
        push("eps");
    else if (m.eps != 0)
        push("eps^" + std::to_string(m.eps));
    for (const auto& [g, e] : m.fac) {
        if (g.kind == Gen::Kind::VDer) continue; // emitted after v for stable reading
        push(detail::gen_key(g) + (e == 1 ? std::string() : "^" + std::to_string(e)));
    }
    if (m.v_exp != 0) push(m.v_exp == 1 ? std::string("v") : "v^" + std::to_string(m.v_exp));
    for (const auto& [g, e] : m.fac) {
        if (g.kind != Gen::Kind::VDer) continue;
        push(detail::gen_key(g) + (e == 1 ? std::string() : "^" + std::to_string(e)));
    }
    if (m.logu_exp != 0) push(m.logu_exp == 1 ? std::string("logu") : "logu^" + std::to_string(m.logu_exp));
    if (s.empty()) s = "1";
    return s;
}

} // namespace bigtoda
