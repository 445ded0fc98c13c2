#pragma once

#include <map>
#include <utility>
#include <vector>

#include "bigtoda/algebra.hpp"
#include "bigtoda/errors.hpp"

namespace bigtoda {

/// Variational and integration calculus on the algebra.
///
/// The ring generated by {u_k, v^{+-1}, log u_{-M}} with the relation
/// d(log u_{-M}) = M v_x v^{-1} is isomorphic to a free differential ring by
/// the substitution v = e^phi, log u_{-M} = M phi. In the phi picture a
/// monomial is e^{k phi} * phi^s * prod phi^{(j)} * (u jets), stored in the
/// same AlgebraElement container with the reading
///
///   v_exp    -> the sector k of e^{k phi}
///   logu_exp -> the power s of underived phi
///   VDer(j)  -> the jet variable phi^{(j)}, j >= 1
///
/// All exactness questions (is an element a total x-derivative?) are decided
/// there, where integration by parts terminates and the only cohomology is
/// the constants.
namespace calculus {

/// The x-derivative in the phi picture (free jets, with D e^{k phi} =
/// k phi_x e^{k phi} and D phi = phi_x).
inline AlgebraElement d_dx_phi(const AlgebraElement& a)
{
    AlgebraElement r(a.params());
    r.set_valid(a.valid_order());
    for (const auto& [m, c] : a.terms()) {
        for (std::size_t i = 0; i < m.fac.size(); ++i) {
            const auto [g, e] = m.fac[i];
            Monomial s = m;
            s.mul_factor(g, -1);
            Gen up = g;
            up.der += 1;
            s.mul_factor(up, 1);
            r.add_term(s, c * Rat(e));
        }
        if (m.logu_exp != 0) { // phi^s -> s phi^{s-1} phi_x
            Monomial s = m;
            s.logu_exp -= 1;
            s.mul_factor(gen_vder(1), 1);
            r.add_term(s, c * Rat(m.logu_exp));
        }
        if (m.v_exp != 0) { // e^{k phi} -> k phi_x e^{k phi}
            Monomial s = m;
            s.mul_factor(gen_vder(1), 1);
            r.add_term(s, c * Rat(m.v_exp));
        }
    }
    return r;
}

namespace detail {

/// W_j = e^{-phi} D^j e^{phi} as a polynomial in the phi jets.
inline const AlgebraElement& bell_w(const AlgebraParams& p, int j, std::vector<AlgebraElement>& cache)
{
    if (cache.empty()) cache.push_back(AlgebraElement::constant(p, Rat(1)));
    while (static_cast<int>(cache.size()) <= j) {
        // W_{j+1} = D W_j + phi_x W_j, taken in the free phi jets (sector 0)
        const AlgebraElement& w = cache.back();
        cache.push_back(d_dx_phi(w) + AlgebraElement::from_monomial(p, mono_vder(1)) * w);
    }
    return cache[static_cast<std::size_t>(j)];
}

/// X_j = D^{j-1} (v_x v^{-1}) in the original picture.
inline const AlgebraElement& log_jet(const AlgebraParams& p, int j, std::vector<AlgebraElement>& cache)
{
    if (cache.empty()) {
        Monomial m = mono_vder(1);
        m.v_exp = -1;
        cache.push_back(AlgebraElement::from_monomial(p, m)); // X_1
    }
    while (static_cast<int>(cache.size()) < j) cache.push_back(cache.back().d_dx());
    return cache[static_cast<std::size_t>(j - 1)];
}

} // namespace detail

/// Original picture -> free phi picture.
inline AlgebraElement to_phi(const AlgebraElement& a)
{
    const AlgebraParams& p = a.params();
    std::vector<AlgebraElement> bell;
    AlgebraElement r(p);
    r.set_valid(a.valid_order());
    Rat mfac(p.M);
    for (const auto& [m, c] : a.terms()) {
        Monomial base;
        base.eps = m.eps;
        base.v_exp = m.v_exp;
        base.logu_exp = m.logu_exp; // phi power
        AlgebraElement term = AlgebraElement::from_monomial(p, base, c * rat_pow(mfac, m.logu_exp));
        for (const auto& [g, e] : m.fac) {
            if (g.kind == Gen::Kind::VDer) {
                // v^{(j)} = e^phi W_j
                AlgebraElement w = detail::bell_w(p, g.der, bell);
                AlgebraElement sector = AlgebraElement::from_monomial(p, mono_v(e)); // e^{e phi}
                AlgebraElement pw = AlgebraElement::constant(p, Rat(1));
                for (int t = 0; t < e; ++t) pw = pw * w;
                term = term * sector * pw;
            } else {
                term = term * AlgebraElement::from_monomial(p, [&] {
                    Monomial f;
                    f.mul_factor(g, e);
                    return f;
                }());
            }
        }
        r += term;
    }
    return r;
}

/// Free phi picture -> original picture.
inline AlgebraElement from_phi(const AlgebraElement& b)
{
    const AlgebraParams& p = b.params();
    std::vector<AlgebraElement> jets;
    AlgebraElement r(p);
    r.set_valid(b.valid_order());
    Rat minv = rat(1, p.M);
    for (const auto& [m, c] : b.terms()) {
        Monomial base;
        base.eps = m.eps;
        base.v_exp = m.v_exp;
        base.logu_exp = m.logu_exp; // logu power, rescaled below
        AlgebraElement term = AlgebraElement::from_monomial(p, base, c * rat_pow(minv, m.logu_exp));
        for (const auto& [g, e] : m.fac) {
            if (g.kind == Gen::Kind::VDer) {
                // phi^{(j)} = D^{j-1}(v_x v^{-1})
                AlgebraElement x = detail::log_jet(p, g.der, jets);
                AlgebraElement pw = AlgebraElement::constant(p, Rat(1));
                for (int t = 0; t < e; ++t) pw = pw * x;
                term = term * pw;
            } else {
                term = term * AlgebraElement::from_monomial(p, [&] {
                    Monomial f;
                    f.mul_factor(g, e);
                    return f;
                }());
            }
        }
        r += term;
    }
    return r;
}

namespace detail {

inline int max_der_order(const AlgebraElement& f)
{
    int j = 0;
    for (const auto& [m, c] : f.terms())
        for (const auto& [g, e] : m.fac)
            if (g.der > j) j = g.der;
    return j;
}

inline bool linear_in_top(const AlgebraElement& f, int J)
{
    for (const auto& [m, c] : f.terms()) {
        int d = 0;
        for (const auto& [g, e] : m.fac)
            if (g.der == J) d += e;
        if (d > 1) return false;
    }
    return true;
}

inline bool has_der_at_least(const AlgebraElement& f, int J)
{
    for (const auto& [m, c] : f.terms())
        for (const auto& [g, e] : m.fac)
            if (g.der >= J) return true;
    return false;
}

/// Polynomial antiderivative with respect to the single jet variable eta.
inline AlgebraElement antiderivative_in(const AlgebraElement& a, const Gen& eta)
{
    AlgebraElement r(a.params());
    r.set_valid(a.valid_order());
    for (const auto& [m, c] : a.terms()) {
        int e = 0;
        for (const auto& [g, k] : m.fac)
            if (g == eta) e = k;
        Monomial s = m;
        s.mul_factor(eta, 1);
        r.add_term(s, c / Rat(e + 1));
    }
    return r;
}

/// Solves h' + k h = A per sector for the phi_x endgame, where A is
/// underived: A = sum_s phi^s C_s and h = sum_s phi^s H_s with
/// (s+1) H_{s+1} + k H_s = C_s.
inline bool solve_phi_linear(const AlgebraElement& A, AlgebraElement& out)
{
    const AlgebraParams& p = A.params();
    // group monomials by everything except the phi power
    struct Group {
        std::map<int, Rat> c_by_s;
    };
    std::map<Monomial, Group> groups;
    for (const auto& [m, c] : A.terms()) {
        Monomial key = m;
        int s = key.logu_exp;
        key.logu_exp = 0;
        groups[key].c_by_s[s] += c;
    }
    AlgebraElement h(p);
    h.set_valid(A.valid_order());
    for (auto& [key, grp] : groups) {
        int k = key.v_exp;
        int S = 0;
        for (const auto& [s, c] : grp.c_by_s)
            if (s > S) S = s;
        std::map<int, Rat> H;
        if (k != 0) {
            Rat next(0); // H_{S+1}
            for (int s = S; s >= 0; --s) {
                Rat cs = grp.c_by_s.count(s) ? grp.c_by_s[s] : Rat(0);
                Rat hs = (cs - Rat(s + 1) * next) / Rat(k);
                H[s] = hs;
                next = hs;
            }
        } else {
            for (int s = 0; s <= S; ++s) {
                Rat cs = grp.c_by_s.count(s) ? grp.c_by_s[s] : Rat(0);
                H[s + 1] = cs / Rat(s + 1);
            }
        }
        for (const auto& [s, hs] : H) {
            if (is_zero(hs)) continue;
            Monomial m = key;
            m.logu_exp = s;
            h.add_term(m, hs);
        }
    }
    out = h;
    return true;
}

} // namespace detail

/// Integration by parts in the free phi picture. Returns true and fills g
/// with d_dx_phi(g) == f when f is exact; returns false otherwise.
inline bool integrate_phi(const AlgebraElement& f0, AlgebraElement& g)
{
    const AlgebraParams& p = f0.params();
    g = AlgebraElement::zero(p);
    g.set_valid(f0.valid_order());
    AlgebraElement f = f0;

    long budget = 64 + 8 * static_cast<long>(f.jet_support().size()) + 2 * static_cast<long>(f.size());
    while (!f.is_zero()) {
        if (--budget < 0) return false;
        int J = detail::max_der_order(f);
        if (J == 0) return false; // underived residue: constants or worse
        if (!detail::linear_in_top(f, J)) return false;

        // pick a top variable; phi jets go last so the twisted endgame sees
        // only phi_x
        Gen xi{};
        bool found = false;
        for (const Gen& cand : f.jet_support()) {
            if (cand.der != J) continue;
            if (!found) {
                xi = cand;
                found = true;
                continue;
            }
            bool xi_phi = xi.kind == Gen::Kind::VDer;
            bool cand_phi = cand.kind == Gen::Kind::VDer;
            if (xi_phi && !cand_phi)
                xi = cand;
            else if (xi_phi == cand_phi && xi < cand)
                xi = cand;
        }

        AlgebraElement A = f.partial(xi);
        if (detail::has_der_at_least(A, J)) return false;

        AlgebraElement abar(p);
        if (xi.kind == Gen::Kind::VDer && xi.der == 1) {
            if (detail::has_der_at_least(A, 1)) return false;
            if (!detail::solve_phi_linear(A, abar)) return false;
        } else {
            Gen eta = xi;
            eta.der -= 1;
            abar = detail::antiderivative_in(A, eta);
        }
        g += abar;
        f -= d_dx_phi(abar);
    }
    return true;
}

/// True when a lies in the image of d/dx.
inline bool is_exact_x_derivative(const AlgebraElement& a)
{
    if (a.is_zero()) return true;
    if (!a.constant_part().is_zero()) return false;
    AlgebraElement g;
    AlgebraElement fphi = to_phi(a);
    if (!integrate_phi(fphi, g)) return false;
    return (d_dx_phi(g) - fphi).is_zero();
}

/// Formal antiderivative: returns f with d_dx(f) = a and zero constant term.
/// Throws NotExactError when a is not a total x-derivative.
inline AlgebraElement integrate_x(const AlgebraElement& a)
{
    const AlgebraParams& p = a.params();
    if (a.is_zero()) return AlgebraElement::zero(p);
    if (!a.constant_part().is_zero())
        throw NotExactError("integrate_x: element has a nonzero constant part");
    AlgebraElement fphi = to_phi(a);
    AlgebraElement gphi;
    if (!integrate_phi(fphi, gphi) || !(d_dx_phi(gphi) - fphi).is_zero())
        throw NotExactError("integrate_x: element is not an exact x-derivative");
    AlgebraElement g = from_phi(gphi);
    g -= g.constant_part();
    return g;
}

/// Variational derivative with respect to the family u_k (the u jets form a
/// free family, so the classical Euler operator applies directly).
inline AlgebraElement euler_derivative_u(const AlgebraElement& a, int k)
{
    AlgebraElement r(a.params());
    r.set_valid(a.valid_order());
    int top = 0;
    for (const Gen& g : a.jet_support())
        if (g.kind == Gen::Kind::U && g.idx == k && g.der > top) top = g.der;
    for (int j = 0; j <= top; ++j) {
        AlgebraElement t = a.partial(gen_u(k, j));
        for (int i = 0; i < j; ++i) t = -t.d_dx();
        r += t;
    }
    return r;
}

/// Variational derivative with respect to the v family (joint with logu:
/// both reduce to the phi jets of the free picture). Vanishes on exact
/// x-derivatives.
inline AlgebraElement euler_derivative_v(const AlgebraElement& a)
{
    const AlgebraParams& p = a.params();
    AlgebraElement f = to_phi(a);
    AlgebraElement acc(p);
    acc.set_valid(f.valid_order());
    // sector weight: the e^{k phi} factor contributes k f
    for (const auto& [m, c] : f.terms())
        if (m.v_exp != 0) acc.add_term(m, c * Rat(m.v_exp));
    // j = 0 term: underived phi
    acc += f.partial_logu();
    int top = 0;
    for (const Gen& g : f.jet_support())
        if (g.kind == Gen::Kind::VDer && g.der > top) top = g.der;
    for (int j = 1; j <= top; ++j) {
        AlgebraElement t = f.partial(gen_vder(j));
        for (int i = 0; i < j; ++i) t = -d_dx_phi(t);
        acc += t;
    }
    return from_phi(acc);
}

/// Variational derivative with respect to an auxiliary test family.
inline AlgebraElement euler_derivative_aux(const AlgebraElement& a, int id)
{
    AlgebraElement r(a.params());
    r.set_valid(a.valid_order());
    int top = 0;
    for (const Gen& g : a.jet_support())
        if (g.kind == Gen::Kind::Aux && g.idx == id && g.der > top) top = g.der;
    for (int j = 0; j <= top; ++j) {
        AlgebraElement t = a.partial(gen_aux(id, j));
        for (int i = 0; i < j; ++i) t = -t.d_dx();
        r += t;
    }
    return r;
}

} // namespace calculus
} // namespace bigtoda
