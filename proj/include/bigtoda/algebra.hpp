#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bigtoda/errors.hpp"
#include "bigtoda/monomial.hpp"
#include "bigtoda/rational.hpp"

namespace bigtoda {

/// Shape parameters of the algebra: the Lax orders N, M and the eps
/// truncation K. Every element carries a copy; elements from algebras with
/// different parameters never mix.
struct AlgebraParams {
    int N = 1;
    int M = 1;
    int K = 0;

    friend bool operator==(const AlgebraParams&, const AlgebraParams&) = default;
};

/// An exact element of the truncated algebra A[[eps]]/(eps^{K+1}):
/// a rational linear combination of monomials in the jet variables,
/// canonicalized as a sorted term map.
///
/// `valid` records through which eps order the stored slices are guaranteed
/// correct. Most operations preserve it; inverting a discrete derivative or
/// dividing by eps lowers it by one, multiplying by eps raises it (capped at
/// K). Identity checks report the order actually compared.
class AlgebraElement {
public:
    AlgebraElement() = default;

    explicit AlgebraElement(const AlgebraParams& p) : params_(p), valid_(p.K) {}

    static AlgebraElement zero(const AlgebraParams& p) { return AlgebraElement(p); }

    static AlgebraElement constant(const AlgebraParams& p, const Rat& c)
    {
        AlgebraElement a(p);
        a.add_term(mono_one(), c);
        return a;
    }

    static AlgebraElement from_monomial(const AlgebraParams& p, const Monomial& m, const Rat& c = Rat(1))
    {
        AlgebraElement a(p);
        a.add_term(m, c);
        return a;
    }

    static AlgebraElement u(const AlgebraParams& p, int k, int der = 0)
    {
        if (k < -p.M || k > p.N - 1)
            throw ConfigError("u_k index out of range");
        if (k == -p.M) {
            // u_{-M} = v^M by the defining relation
            if (der == 0) return from_monomial(p, mono_v(p.M));
            AlgebraElement a = from_monomial(p, mono_v(p.M));
            for (int j = 0; j < der; ++j) a = a.d_dx();
            return a;
        }
        return from_monomial(p, mono_u(k, der));
    }

    static AlgebraElement v(const AlgebraParams& p, int e = 1) { return from_monomial(p, mono_v(e)); }
    static AlgebraElement logu(const AlgebraParams& p) { return from_monomial(p, mono_logu()); }
    static AlgebraElement aux(const AlgebraParams& p, int id = 0, int der = 0)
    {
        return from_monomial(p, mono_aux(id, der));
    }
    static AlgebraElement eps(const AlgebraParams& p, int pow = 1)
    {
        if (pow > p.K) return zero(p);
        return from_monomial(p, mono_eps(pow));
    }

    const AlgebraParams& params() const { return params_; }
    const std::map<Monomial, Rat>& terms() const { return terms_; }
    int trunc_order() const { return params_.K; }
    int valid_order() const { return valid_; }
    bool empty() const { return terms_.empty(); }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    void set_valid(int v) { valid_ = v < params_.K ? v : params_.K; }

    void add_term(const Monomial& m, const Rat& c)
    {
        if (bigtoda::is_zero(c) || m.eps > params_.K) return;
        auto [it, fresh] = terms_.try_emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (bigtoda::is_zero(it->second)) terms_.erase(it);
        }
    }

    Rat coeff(const Monomial& m) const
    {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rat(0) : it->second;
    }

    /// The eps^e slice, returned with eps stripped off (an element of A).
    AlgebraElement eps_slice(int e) const
    {
        AlgebraElement r(params_);
        r.valid_ = valid_;
        for (const auto& [m, c] : terms_) {
            if (m.eps != e) continue;
            Monomial s = m;
            s.eps = 0;
            r.add_term(s, c);
        }
        return r;
    }

    int max_eps_power() const
    {
        int p = 0;
        for (const auto& [m, c] : terms_)
            if (m.eps > p) p = m.eps;
        return p;
    }

    AlgebraElement operator-() const
    {
        AlgebraElement r(params_);
        r.valid_ = valid_;
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }

    AlgebraElement& operator+=(const AlgebraElement& o)
    {
        require_same_algebra(o);
        if (o.valid_ < valid_) valid_ = o.valid_;
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }

    AlgebraElement& operator-=(const AlgebraElement& o)
    {
        require_same_algebra(o);
        if (o.valid_ < valid_) valid_ = o.valid_;
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }

    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }

    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b)
    {
        a.require_same_algebra(b);
        AlgebraElement r(a.params_);
        r.valid_ = a.valid_ < b.valid_ ? a.valid_ : b.valid_;
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                if (ma.eps + mb.eps > a.params_.K) continue;
                r.add_term(ma.times(mb), ca * cb);
            }
        }
        return r;
    }

    AlgebraElement& operator*=(const AlgebraElement& o) { return *this = *this * o; }

    AlgebraElement scaled(const Rat& c) const
    {
        AlgebraElement r(params_);
        r.valid_ = valid_;
        if (bigtoda::is_zero(c)) return r;
        for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
        return r;
    }

    friend AlgebraElement operator*(const Rat& c, const AlgebraElement& a) { return a.scaled(c); }
    friend AlgebraElement operator*(const AlgebraElement& a, const Rat& c) { return a.scaled(c); }

    bool operator==(const AlgebraElement& o) const
    {
        return params_ == o.params_ && terms_ == o.terms_;
    }

    /// True when no stored term has eps power <= ord.
    bool is_zero_through(int ord) const
    {
        for (const auto& [m, c] : terms_)
            if (m.eps <= ord) return false;
        return true;
    }

    /// Multiplication by eps^p; raises the validity marker accordingly.
    AlgebraElement mul_eps(int p = 1) const
    {
        AlgebraElement r(params_);
        r.valid_ = valid_ + p < params_.K ? valid_ + p : params_.K;
        for (const auto& [m, c] : terms_) {
            if (m.eps + p > params_.K) continue;
            Monomial s = m;
            s.eps += p;
            r.terms_.emplace(s, c);
        }
        return r;
    }

    /// Exact division by eps. Throws if any term lacks an eps factor.
    AlgebraElement div_eps() const
    {
        AlgebraElement r(params_);
        r.valid_ = valid_ - 1;
        for (const auto& [m, c] : terms_) {
            if (m.eps == 0)
                throw ConfigError("div_eps: element is not divisible by eps (" + mono_key(m) + ")");
            Monomial s = m;
            s.eps -= 1;
            r.terms_.emplace(s, c);
        }
        return r;
    }

    /// The x-derivative: a derivation with d(u_k^{(j)}) = u_k^{(j+1)},
    /// d(v^{(j)}) = v^{(j+1)}, d(logu) = M v_x v^{-1}.
    AlgebraElement d_dx() const
    {
        AlgebraElement r(params_);
        r.valid_ = valid_;
        for (const auto& [m, c] : terms_) {
            // factor slots
            for (std::size_t i = 0; i < m.fac.size(); ++i) {
                const auto [g, e] = m.fac[i];
                Monomial s = m;
                s.mul_factor(g, -1);
                Gen up = g;
                up.der += 1;
                s.mul_factor(up, 1);
                r.add_term(s, c * Rat(e));
            }
            // underived v power
            if (m.v_exp != 0) {
                Monomial s = m;
                s.v_exp -= 1;
                s.mul_factor(gen_vder(1), 1);
                r.add_term(s, c * Rat(m.v_exp));
            }
            // logu: d(logu) = M v_x v^{-1}
            if (m.logu_exp != 0) {
                Monomial s = m;
                s.logu_exp -= 1;
                s.v_exp -= 1;
                s.mul_factor(gen_vder(1), 1);
                r.add_term(s, c * Rat(m.logu_exp) * Rat(params_.M));
            }
        }
        return r;
    }

    /// eps * d/dx, the basic degree-preserving derivation.
    AlgebraElement eps_d_dx() const { return d_dx().mul_eps(); }

    /// Lambda^m action: sum_j (m eps)^j / j! d^j, truncated at K.
    AlgebraElement shift(int m) const
    {
        if (m == 0) return *this;
        AlgebraElement r = *this;
        AlgebraElement der = *this;
        Rat fac(1);
        for (int j = 1; j <= params_.K; ++j) {
            der = der.d_dx();
            if (der.empty()) break;
            fac *= rat(m, j);
            AlgebraElement t = der.mul_eps(j).scaled(fac);
            t.valid_ = r.valid_;
            if (t.empty() && j + min_eps_power(der) > params_.K) break;
            r += t;
        }
        return r;
    }

    std::optional<Rat> grading() const
    {
        std::optional<Rat> d;
        for (const auto& [m, c] : terms_) {
            Rat md = mono_deg(m, params_.N, params_.M);
            if (!d)
                d = md;
            else if (*d != md)
                return std::nullopt;
        }
        return d;
    }

    std::optional<Rat> grading_partial() const
    {
        std::optional<Rat> d;
        for (const auto& [m, c] : terms_) {
            Rat md = mono_deg_partial(m);
            if (!d)
                d = md;
            else if (*d != md)
                return std::nullopt;
        }
        return d;
    }

    /// Partial derivative with respect to the jet variable g.
    AlgebraElement partial(const Gen& g) const
    {
        AlgebraElement r(params_);
        r.valid_ = valid_;
        for (const auto& [m, c] : terms_) {
            for (const auto& [h, e] : m.fac) {
                if (h == g) {
                    Monomial s = m;
                    s.mul_factor(g, -1);
                    r.add_term(s, c * Rat(e));
                }
            }
        }
        return r;
    }

    /// Partial derivative with respect to underived v.
    AlgebraElement partial_v() const
    {
        AlgebraElement r(params_);
        r.valid_ = valid_;
        for (const auto& [m, c] : terms_) {
            if (m.v_exp == 0) continue;
            Monomial s = m;
            s.v_exp -= 1;
            r.add_term(s, c * Rat(m.v_exp));
        }
        return r;
    }

    /// Partial derivative with respect to logu.
    AlgebraElement partial_logu() const
    {
        AlgebraElement r(params_);
        r.valid_ = valid_;
        for (const auto& [m, c] : terms_) {
            if (m.logu_exp == 0) continue;
            Monomial s = m;
            s.logu_exp -= 1;
            r.add_term(s, c * Rat(m.logu_exp));
        }
        return r;
    }

    /// Collects the distinct jet factors appearing in the element.
    std::set<Gen> jet_support() const
    {
        std::set<Gen> s;
        for (const auto& [m, c] : terms_)
            for (const auto& [g, e] : m.fac) s.insert(g);
        return s;
    }

    bool contains_v_or_logu() const
    {
        for (const auto& [m, c] : terms_) {
            if (m.v_exp != 0 || m.logu_exp != 0) return true;
            for (const auto& [g, e] : m.fac)
                if (g.kind == Gen::Kind::VDer) return true;
        }
        return false;
    }

    bool contains_aux() const
    {
        for (const auto& [m, c] : terms_)
            for (const auto& [g, e] : m.fac)
                if (g.kind == Gen::Kind::Aux) return true;
        return false;
    }

    /// The constant part: terms that are pure powers of eps.
    AlgebraElement constant_part() const
    {
        AlgebraElement r(params_);
        r.valid_ = valid_;
        for (const auto& [m, c] : terms_)
            if (m.is_constant()) r.terms_.emplace(m, c);
        return r;
    }

    void require_same_algebra(const AlgebraElement& o) const
    {
        if (params_.N != o.params_.N || params_.M != o.params_.M)
            throw ConfigError("algebra mismatch: elements from different (N, M)");
        if (params_.K != o.params_.K)
            throw ConfigError("truncation mismatch: arithmetic on elements with different K");
    }

private:
    static int min_eps_power(const AlgebraElement& a)
    {
        int p = a.params_.K + 1;
        for (const auto& [m, c] : a.terms_)
            if (m.eps < p) p = m.eps;
        return p;
    }

    AlgebraParams params_;
    std::map<Monomial, Rat> terms_;
    int valid_ = 0;
};

inline bool equal_through(const AlgebraElement& a, const AlgebraElement& b, int ord)
{
    return (a - b).is_zero_through(ord);
}

/// Time-derivative data of one hierarchy flow: the induced derivations of all
/// generators. v_dot and logu_dot are derived from u_dot at -M via
/// u_{-M} = v^M.
struct FlowData {
    std::map<int, AlgebraElement> u_dot; // keys -M+1 .. N-1
    AlgebraElement v_dot;
    AlgebraElement logu_dot;
};

/// Applies an evolutionary vector field (chain rule through the jets).
inline AlgebraElement evolve(const AlgebraElement& a, const FlowData& flow)
{
    const AlgebraParams& p = a.params();
    AlgebraElement r(p);
    r.set_valid(a.valid_order());

    std::map<std::pair<int, int>, AlgebraElement> du_cache; // (k, der) -> D^der u_dot_k
    std::map<int, AlgebraElement> dv_cache;                 // der -> D^der v_dot

    auto u_dot_der = [&](int k, int der) -> const AlgebraElement& {
        for (int j = 0; j <= der; ++j) {
            auto key = std::make_pair(k, j);
            if (!du_cache.count(key))
                du_cache.emplace(key, j == 0 ? flow.u_dot.at(k) : du_cache.at({k, j - 1}).d_dx());
        }
        return du_cache.at({k, der});
    };
    auto v_dot_der = [&](int der) -> const AlgebraElement& {
        for (int j = 0; j <= der; ++j)
            if (!dv_cache.count(j)) dv_cache.emplace(j, j == 0 ? flow.v_dot : dv_cache.at(j - 1).d_dx());
        return dv_cache.at(der);
    };

    for (const Gen& g : a.jet_support()) {
        switch (g.kind) {
        case Gen::Kind::U:
            r += a.partial(g) * u_dot_der(g.idx, g.der);
            break;
        case Gen::Kind::VDer:
            r += a.partial(g) * v_dot_der(g.der);
            break;
        case Gen::Kind::Aux:
            throw ConfigError("evolve: auxiliary generators do not evolve");
        }
    }
    r += a.partial_v() * flow.v_dot;
    r += a.partial_logu() * flow.logu_dot;
    return r;
}

} // namespace bigtoda
