#pragma once

#include <map>
#include <utility>
#include <vector>

#include "bigtoda/algebra.hpp"
#include "bigtoda/calculus.hpp"
#include "bigtoda/errors.hpp"
#include "bigtoda/rational.hpp"

namespace bigtoda {

/// Bernoulli numbers B_0 .. B_{n-1} (convention z/(e^z-1) = sum B_k z^k / k!),
/// computed by the standard recurrence.
inline std::vector<Rat> bernoulli_numbers(int n)
{
    std::vector<Rat> b;
    b.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            b.push_back(Rat(1));
            continue;
        }
        Rat s(0);
        for (int j = 0; j < k; ++j) s += binomial(static_cast<unsigned>(k + 1), static_cast<unsigned>(j)) * b[static_cast<std::size_t>(j)];
        b.push_back(-s / Rat(k + 1));
    }
    return b;
}

/// A finite rational combination of terms c * e^{a z} * z^j with integer a.
/// Together with the quotient in ShiftSymbol this spans every symbol the
/// hierarchy needs: shifts, discrete-derivative inverses, geometric inverses.
class ExpPoly {
public:
    ExpPoly() = default;

    static ExpPoly zero() { return {}; }

    static ExpPoly constant(const Rat& c)
    {
        ExpPoly p;
        p.add(0, 0, c);
        return p;
    }

    static ExpPoly z()
    {
        ExpPoly p;
        p.add(0, 1, Rat(1));
        return p;
    }

    static ExpPoly exp(int a)
    {
        ExpPoly p;
        p.add(a, 0, Rat(1));
        return p;
    }

    /// sum_{j=a}^{b} e^{j z} (empty when a > b).
    static ExpPoly exp_range(int a, int b)
    {
        ExpPoly p;
        for (int j = a; j <= b; ++j) p.add(j, 0, Rat(1));
        return p;
    }

    void add(int a, int j, const Rat& c)
    {
        if (is_zero(c)) return;
        auto key = std::make_pair(a, j);
        auto [it, fresh] = terms_.try_emplace(key, c);
        if (!fresh) {
            it->second += c;
            if (bigtoda::is_zero(it->second)) terms_.erase(it);
        }
    }

    bool empty() const { return terms_.empty(); }
    const std::map<std::pair<int, int>, Rat>& terms() const { return terms_; }

    friend ExpPoly operator+(const ExpPoly& x, const ExpPoly& y)
    {
        ExpPoly r = x;
        for (const auto& [k, c] : y.terms_) r.add(k.first, k.second, c);
        return r;
    }

    friend ExpPoly operator-(const ExpPoly& x, const ExpPoly& y)
    {
        ExpPoly r = x;
        for (const auto& [k, c] : y.terms_) r.add(k.first, k.second, -c);
        return r;
    }

    friend ExpPoly operator*(const ExpPoly& x, const ExpPoly& y)
    {
        ExpPoly r;
        for (const auto& [kx, cx] : x.terms_)
            for (const auto& [ky, cy] : y.terms_) r.add(kx.first + ky.first, kx.second + ky.second, cx * cy);
        return r;
    }

    ExpPoly scaled(const Rat& c) const
    {
        ExpPoly r;
        for (const auto& [k, v] : terms_) r.add(k.first, k.second, v * c);
        return r;
    }

    /// Taylor coefficients at z = 0 through order ord.
    std::vector<Rat> taylor(int ord) const
    {
        std::vector<Rat> out(static_cast<std::size_t>(ord) + 1, Rat(0));
        for (const auto& [k, c] : terms_) {
            const auto [a, j] = k;
            // c e^{a z} z^j = sum_t c a^t / t! z^{j+t}
            Rat pw(1);
            Rat fct(1);
            for (int t = 0; j + t <= ord; ++t) {
                if (t > 0) {
                    pw *= Rat(a);
                    fct *= Rat(t);
                }
                out[static_cast<std::size_t>(j + t)] += c * pw / fct;
                if (a == 0) break;
            }
        }
        return out;
    }

private:
    std::map<std::pair<int, int>, Rat> terms_;
};

/// Truncated expansion sum_j s_j z^j of a symbol; z stands for eps d/dx.
struct SymbolSeries {
    std::vector<Rat> coeff; // indices 0..K

    int order() const { return static_cast<int>(coeff.size()) - 1; }

    Rat at(int j) const
    {
        return j >= 0 && j < static_cast<int>(coeff.size()) ? coeff[static_cast<std::size_t>(j)] : Rat(0);
    }
};

/// An exact rational expression in e^{az} and z: num/den of ExpPoly.
class ShiftSymbol {
public:
    ShiftSymbol() : num_(ExpPoly::zero()), den_(ExpPoly::constant(Rat(1))) {}
    ShiftSymbol(ExpPoly num, ExpPoly den) : num_(std::move(num)), den_(std::move(den))
    {
        if (den_.empty()) throw ConfigError("ShiftSymbol: zero denominator");
    }

    static ShiftSymbol constant(const Rat& c) { return {ExpPoly::constant(c), ExpPoly::constant(Rat(1))}; }
    static ShiftSymbol z() { return {ExpPoly::z(), ExpPoly::constant(Rat(1))}; }
    static ShiftSymbol exp(int a) { return {ExpPoly::exp(a), ExpPoly::constant(Rat(1))}; }
    static ShiftSymbol of(ExpPoly p) { return {std::move(p), ExpPoly::constant(Rat(1))}; }

    const ExpPoly& num() const { return num_; }
    const ExpPoly& den() const { return den_; }

    friend ShiftSymbol operator+(const ShiftSymbol& x, const ShiftSymbol& y)
    {
        return {x.num_ * y.den_ + y.num_ * x.den_, x.den_ * y.den_};
    }
    friend ShiftSymbol operator-(const ShiftSymbol& x, const ShiftSymbol& y)
    {
        return {x.num_ * y.den_ - y.num_ * x.den_, x.den_ * y.den_};
    }
    friend ShiftSymbol operator*(const ShiftSymbol& x, const ShiftSymbol& y)
    {
        return {x.num_ * y.num_, x.den_ * y.den_};
    }
    friend ShiftSymbol operator/(const ShiftSymbol& x, const ShiftSymbol& y)
    {
        if (y.num_.empty()) throw ConfigError("ShiftSymbol: division by zero symbol");
        return {x.num_ * y.den_, x.den_ * y.num_};
    }

    ShiftSymbol scaled(const Rat& c) const { return {num_.scaled(c), den_}; }

private:
    ExpPoly num_, den_;
};

/// Exact Taylor expansion of a symbol at z = 0 through order K.
/// Throws PoleAtZeroError when the expression has a pole there.
inline SymbolSeries expand_symbol(const ShiftSymbol& s, int K)
{
    if (s.num().empty()) return SymbolSeries{std::vector<Rat>(static_cast<std::size_t>(K) + 1, Rat(0))};

    int ord = K + 8;
    std::vector<Rat> den = s.den().taylor(ord);
    int vd = -1;
    while (true) {
        for (int i = 0; i <= ord; ++i) {
            if (!is_zero(den[static_cast<std::size_t>(i)])) {
                vd = i;
                break;
            }
        }
        if (vd >= 0) break;
        if (ord > 256) throw ConfigError("expand_symbol: denominator vanishes to very high order");
        ord *= 2;
        den = s.den().taylor(ord);
    }
    std::vector<Rat> num = s.num().taylor(K + vd);
    int vn = -1;
    for (int i = 0; i <= K + vd; ++i) {
        if (!is_zero(num[static_cast<std::size_t>(i)])) {
            vn = i;
            break;
        }
    }
    if (vn == -1) {
        // numerator vanishes through the needed order; expansion is zero
        return SymbolSeries{std::vector<Rat>(static_cast<std::size_t>(K) + 1, Rat(0))};
    }
    if (vn < vd) throw PoleAtZeroError("expand_symbol: pole at z = 0");

    // divide shifted series: result_i for i = 0..K
    std::vector<Rat> q(static_cast<std::size_t>(K) + 1, Rat(0));
    auto nshift = [&](int i) { return num[static_cast<std::size_t>(i + vd)]; };
    auto dshift = [&](int i) { return den[static_cast<std::size_t>(i + vd)]; };
    for (int i = 0; i <= K; ++i) {
        Rat acc = (i + vd <= K + vd) ? nshift(i) : Rat(0);
        for (int t = 0; t < i; ++t) acc -= q[static_cast<std::size_t>(t)] * dshift(i - t);
        q[static_cast<std::size_t>(i)] = acc / dshift(0);
    }
    return SymbolSeries{std::move(q)};
}

/// Applies a symbol series: sum_j s_j (eps d/dx)^j a.
inline AlgebraElement apply_symbol(const SymbolSeries& s, const AlgebraElement& a)
{
    AlgebraElement r = a.scaled(s.at(0));
    AlgebraElement der = a;
    for (int j = 1; j <= a.trunc_order() && j <= s.order(); ++j) {
        der = der.eps_d_dx();
        if (der.is_zero()) break;
        AlgebraElement t = der.scaled(s.at(j));
        t.set_valid(r.valid_order());
        r += t;
    }
    return r;
}

inline AlgebraElement apply_symbol(const ShiftSymbol& s, const AlgebraElement& a)
{
    return apply_symbol(expand_symbol(s, a.trunc_order()), a);
}

/// (Lambda^m - 1)^{-1} g for g an exact x-derivative, normalized with zero
/// constant term: integrate, then apply the Bernoulli series
/// z/(e^{mz} - 1) = (1/m) sum B_k (mz)^k / k!.
///
/// g is taken as exactly given (its unstored eps slices are zero); the
/// validity marker of the result still drops by one because the inversion
/// genuinely consumes one eps order of g.
inline AlgebraElement invert_discrete_derivative(const AlgebraElement& g, int m)
{
    if (m == 0) throw ConfigError("invert_discrete_derivative: m must be nonzero");
    if (g.is_zero()) {
        AlgebraElement r = g;
        r.set_valid(g.valid_order() - 1); // slice e of the inverse needs slice e+1 of g
        return r;
    }
    AlgebraElement y;
    try {
        y = calculus::integrate_x(g.div_eps());
    } catch (const ConfigError&) {
        throw NotExactError("invert_discrete_derivative: element is not in the image of eps d/dx");
    }
    ShiftSymbol s(ExpPoly::z(), ExpPoly::exp(m) - ExpPoly::constant(Rat(1)));
    return apply_symbol(s, y);
}

} // namespace bigtoda
