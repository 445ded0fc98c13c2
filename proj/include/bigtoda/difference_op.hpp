#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "bigtoda/algebra.hpp"
#include "bigtoda/errors.hpp"

namespace bigtoda {

/// Sentinel infinity for window bounds.
inline constexpr int WINF = 1 << 24;

namespace winmath {

inline int add(int a, int b)
{
    if (a >= WINF || b >= WINF) return (a <= -WINF || b <= -WINF) ? 0 : WINF;
    if (a <= -WINF || b <= -WINF) return -WINF;
    return a + b;
}

inline int clamp(int x) { return x > WINF ? WINF : (x < -WINF ? -WINF : x); }

} // namespace winmath

/// A Laurent difference operator sum_k f_k Lambda^k with algebra-element
/// coefficients and explicit knowledge bookkeeping:
///
///   - coefficients with order in [exact_lo, exact_hi] are exactly stored,
///   - coefficients outside [supp_lo, supp_hi] are exactly zero,
///   - everything else is unknown (semi-infinite tails not yet computed).
///
/// Products propagate these intervals so that an order is marked exact iff it
/// is computable from exact data of the factors alone.
class DifferenceOperator {
public:
    DifferenceOperator() = default;

    explicit DifferenceOperator(const AlgebraParams& p)
        : params_(p), exact_lo_(-WINF), exact_hi_(WINF), supp_lo_(0), supp_hi_(-1)
    {
    }

    /// Zero operator, known everywhere.
    static DifferenceOperator zero(const AlgebraParams& p) { return DifferenceOperator(p); }

    static DifferenceOperator identity(const AlgebraParams& p)
    {
        return monomial(p, 0, AlgebraElement::constant(p, Rat(1)));
    }

    static DifferenceOperator shift_op(const AlgebraParams& p, int k = 1)
    {
        return monomial(p, k, AlgebraElement::constant(p, Rat(1)));
    }

    /// f Lambda^k, known everywhere.
    static DifferenceOperator monomial(const AlgebraParams& p, int k, const AlgebraElement& f)
    {
        DifferenceOperator r(p);
        r.supp_lo_ = k;
        r.supp_hi_ = k;
        r.set_coeff(k, f);
        return r;
    }

    /// Operator with the given coefficients, exactly known everywhere
    /// (zero outside the keys).
    static DifferenceOperator total(const AlgebraParams& p, std::map<int, AlgebraElement> coeffs)
    {
        DifferenceOperator r(p);
        if (!coeffs.empty()) {
            r.supp_lo_ = coeffs.begin()->first;
            r.supp_hi_ = coeffs.rbegin()->first;
        }
        for (auto& [k, f] : coeffs) r.set_coeff(k, f);
        return r;
    }

    /// Semi-infinite or windowed operator: coefficients known on
    /// [exact_lo, exact_hi], zero outside [supp_lo, supp_hi].
    static DifferenceOperator windowed(const AlgebraParams& p, std::map<int, AlgebraElement> coeffs,
                                       int exact_lo, int exact_hi, int supp_lo, int supp_hi)
    {
        DifferenceOperator r(p);
        r.exact_lo_ = winmath::clamp(exact_lo);
        r.exact_hi_ = winmath::clamp(exact_hi);
        r.supp_lo_ = winmath::clamp(supp_lo);
        r.supp_hi_ = winmath::clamp(supp_hi);
        for (auto& [k, f] : coeffs) r.set_coeff(k, f);
        return r;
    }

    const AlgebraParams& params() const { return params_; }
    int exact_lo() const { return exact_lo_; }
    int exact_hi() const { return exact_hi_; }
    int supp_lo() const { return supp_lo_; }
    int supp_hi() const { return supp_hi_; }
    const std::map<int, AlgebraElement>& coeffs() const { return coeffs_; }

    bool known(int k) const { return (k >= exact_lo_ && k <= exact_hi_) || k < supp_lo_ || k > supp_hi_; }

    /// Orders where an unknown tail begins (empty pieces collapse).
    bool has_unknown_low() const { return supp_lo_ < exact_lo_; }
    bool has_unknown_high() const { return supp_hi_ > exact_hi_; }

    AlgebraElement coeff(int k) const
    {
        if (!known(k)) throw WindowError("DifferenceOperator: order " + std::to_string(k) + " outside exact window");
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? AlgebraElement::zero(params_) : it->second;
    }

    void set_coeff(int k, const AlgebraElement& f)
    {
        if (f.is_zero())
            coeffs_.erase(k);
        else
            coeffs_.insert_or_assign(k, f);
    }

    bool stored_zero() const { return coeffs_.empty(); }

    /// True when every stored coefficient vanishes through eps order ord.
    bool is_zero_through(int ord) const
    {
        for (const auto& [k, f] : coeffs_)
            if (!f.is_zero_through(ord)) return false;
        return true;
    }

    int min_valid_order() const
    {
        int v = params_.K;
        for (const auto& [k, f] : coeffs_)
            if (f.valid_order() < v) v = f.valid_order();
        return v;
    }

    DifferenceOperator operator-() const
    {
        DifferenceOperator r = *this;
        for (auto& [k, f] : r.coeffs_) f = -f;
        return r;
    }

    friend DifferenceOperator operator+(const DifferenceOperator& a, const DifferenceOperator& b)
    {
        a.require_same(b);
        DifferenceOperator r(a.params_);
        r.supp_lo_ = std::min(a.supp_lo_, b.supp_lo_);
        r.supp_hi_ = std::max(a.supp_hi_, b.supp_hi_);
        r.exact_lo_ = std::max(a.eff_exact_lo(), b.eff_exact_lo());
        r.exact_hi_ = std::min(a.eff_exact_hi(), b.eff_exact_hi());
        for (const auto& [k, f] : a.coeffs_)
            if (r.known_candidate(k)) r.set_coeff(k, f);
        for (const auto& [k, f] : b.coeffs_) {
            if (!r.known_candidate(k)) continue;
            auto it = r.coeffs_.find(k);
            if (it == r.coeffs_.end())
                r.set_coeff(k, f);
            else {
                it->second += f;
                if (it->second.is_zero()) r.coeffs_.erase(it);
            }
        }
        return r;
    }

    friend DifferenceOperator operator-(const DifferenceOperator& a, const DifferenceOperator& b)
    {
        return a + (-b);
    }

    DifferenceOperator scaled(const Rat& c) const
    {
        DifferenceOperator r = *this;
        if (is_zero(c)) {
            r.coeffs_.clear();
            return r;
        }
        for (auto& [k, f] : r.coeffs_) f = f.scaled(c);
        return r;
    }

    friend DifferenceOperator operator*(const Rat& c, const DifferenceOperator& a) { return a.scaled(c); }

    DifferenceOperator scaled(const AlgebraElement& c) const
    {
        DifferenceOperator r = *this;
        for (auto& [k, f] : r.coeffs_) f = f * c;
        if (c.is_zero()) r.coeffs_.clear();
        return r;
    }

    /// Composition (f Lambda^a)(g Lambda^b) = f shift(g, a) Lambda^{a+b},
    /// with the exactness intervals propagated by interval arithmetic.
    friend DifferenceOperator operator*(const DifferenceOperator& a, const DifferenceOperator& b)
    {
        a.require_same(b);
        DifferenceOperator r(a.params_);
        r.supp_lo_ = winmath::add(a.supp_lo_, b.supp_lo_);
        r.supp_hi_ = winmath::add(a.supp_hi_, b.supp_hi_);
        if (r.supp_lo_ > r.supp_hi_) { // one factor is zero
            r.supp_lo_ = 0;
            r.supp_hi_ = -1;
            return r;
        }

        // exact range bounds from the four unknown tail pieces
        int lo = -WINF, hi = WINF;
        auto need_lo = [&lo](int bound) { lo = std::max(lo, bound); };
        if (a.has_unknown_low()) {
            if (b.supp_hi_ >= WINF)
                lo = WINF; // contributions from arbitrarily low unknown a-orders
            else
                need_lo(winmath::add(a.exact_lo_, b.supp_hi_));
        }
        if (b.has_unknown_low()) {
            if (a.supp_hi_ >= WINF)
                lo = WINF;
            else
                need_lo(winmath::add(b.exact_lo_, a.supp_hi_));
        }
        auto need_hi = [&hi](int bound) { hi = std::min(hi, bound); };
        if (a.has_unknown_high()) {
            if (b.supp_lo_ <= -WINF)
                hi = -WINF;
            else
                need_hi(winmath::add(a.exact_hi_, b.supp_lo_));
        }
        if (b.has_unknown_high()) {
            if (a.supp_lo_ <= -WINF)
                hi = -WINF;
            else
                need_hi(winmath::add(b.exact_hi_, a.supp_lo_));
        }
        r.exact_lo_ = lo;
        r.exact_hi_ = hi;

        for (const auto& [i, f] : a.coeffs_) {
            for (const auto& [j, gcoef] : b.coeffs_) {
                int n = i + j;
                if (!r.known_candidate(n)) continue;
                AlgebraElement t = f * gcoef.shift(i);
                auto it = r.coeffs_.find(n);
                if (it == r.coeffs_.end()) {
                    if (!t.is_zero()) r.coeffs_.emplace(n, std::move(t));
                } else {
                    it->second += t;
                    if (it->second.is_zero()) r.coeffs_.erase(it);
                }
            }
        }
        return r;
    }

    bool exact_window_empty() const { return exact_range_lo() > exact_range_hi(); }

    friend DifferenceOperator commutator(const DifferenceOperator& a, const DifferenceOperator& b)
    {
        DifferenceOperator r = a * b - b * a;
        if (r.exact_window_empty() && !(r.supp_lo_ > r.supp_hi_))
            throw EmptyWindowError("commutator: no order computable from the factors' windows");
        return r;
    }

    enum class Part { Plus, Minus, NonPositive, Positive };

    /// Coefficient-wise restriction. Requires all potentially nonzero orders
    /// of the result to be known.
    DifferenceOperator project(Part part) const
    {
        int cut_lo = -WINF, cut_hi = WINF; // kept orders [cut_lo, cut_hi]
        switch (part) {
        case Part::Plus: cut_lo = 0; break;
        case Part::Minus: cut_hi = -1; break;
        case Part::NonPositive: cut_hi = 0; break;
        case Part::Positive: cut_lo = 1; break;
        }
        int check_lo = std::max(supp_lo_, cut_lo);
        int check_hi = std::min(supp_hi_, cut_hi);
        if (check_lo >= -WINF / 2 && check_hi <= WINF / 2) {
            for (int k = check_lo; k <= check_hi; ++k)
                if (!known(k))
                    throw WindowError("project: window does not cover order " + std::to_string(k));
        } else {
            throw WindowError("project: projection of an operator with unbounded unknown support");
        }
        DifferenceOperator r(params_);
        r.supp_lo_ = check_lo;
        r.supp_hi_ = check_hi;
        if (r.supp_lo_ > r.supp_hi_) {
            r.supp_lo_ = 0;
            r.supp_hi_ = -1;
            return r;
        }
        for (const auto& [k, f] : coeffs_)
            if (k >= cut_lo && k <= cut_hi) r.coeffs_.emplace(k, f);
        return r;
    }

    /// Coefficient of Lambda^0.
    AlgebraElement residue() const
    {
        if (!known(0)) throw WindowError("residue: order 0 not in the exact window");
        return coeff(0);
    }

    /// Coefficient-wise x derivative.
    DifferenceOperator x_derivative() const
    {
        DifferenceOperator r = *this;
        std::map<int, AlgebraElement> next;
        for (auto& [k, f] : r.coeffs_) {
            AlgebraElement d = f.d_dx();
            if (!d.is_zero()) next.emplace(k, std::move(d));
        }
        r.coeffs_ = std::move(next);
        return r;
    }

    /// Coefficient-wise application of a flow's chain rule.
    DifferenceOperator evolved(const FlowData& flow) const
    {
        DifferenceOperator r = *this;
        std::map<int, AlgebraElement> next;
        for (auto& [k, f] : r.coeffs_) {
            AlgebraElement d = evolve(f, flow);
            if (!d.is_zero()) next.emplace(k, std::move(d));
        }
        r.coeffs_ = std::move(next);
        return r;
    }

    DifferenceOperator mul_eps(int p = 1) const
    {
        DifferenceOperator r = *this;
        std::map<int, AlgebraElement> next;
        for (auto& [k, f] : r.coeffs_) {
            AlgebraElement d = f.mul_eps(p);
            if (!d.is_zero()) next.emplace(k, std::move(d));
        }
        r.coeffs_ = std::move(next);
        return r;
    }

    /// Shrinks the support bounds to the hull of the stored coefficients.
    /// Only valid when there are no unknown tails.
    DifferenceOperator tightened() const
    {
        if (has_unknown_low() || has_unknown_high()) return *this;
        DifferenceOperator r = *this;
        if (coeffs_.empty()) {
            r.supp_lo_ = 0;
            r.supp_hi_ = -1;
        } else {
            r.supp_lo_ = coeffs_.begin()->first;
            r.supp_hi_ = coeffs_.rbegin()->first;
        }
        return r;
    }

    /// Restriction to nonnegative orders without demanding full knowledge:
    /// unknown orders stay unknown, dropped orders become known zeros.
    DifferenceOperator soft_project_plus() const
    {
        DifferenceOperator r(params_);
        r.supp_lo_ = std::max(supp_lo_, 0);
        r.supp_hi_ = supp_hi_;
        r.exact_lo_ = exact_lo_;
        r.exact_hi_ = exact_hi_;
        if (r.supp_lo_ > r.supp_hi_) {
            r.supp_lo_ = 0;
            r.supp_hi_ = -1;
            return r;
        }
        for (const auto& [k, f] : coeffs_)
            if (k >= 0) r.coeffs_.emplace(k, f);
        return r;
    }

    DifferenceOperator soft_project_minus() const
    {
        DifferenceOperator r(params_);
        r.supp_lo_ = supp_lo_;
        r.supp_hi_ = std::min(supp_hi_, -1);
        r.exact_lo_ = exact_lo_;
        r.exact_hi_ = exact_hi_;
        if (r.supp_lo_ > r.supp_hi_) {
            r.supp_lo_ = 0;
            r.supp_hi_ = -1;
            return r;
        }
        for (const auto& [k, f] : coeffs_)
            if (k <= -1) r.coeffs_.emplace(k, f);
        return r;
    }

    /// Deliberate modification: drops every coefficient outside [lo, hi].
    /// Used to fix canonical one-form representatives.
    DifferenceOperator restrict_support(int lo, int hi) const
    {
        for (int k = std::max(lo, supp_lo_); k <= std::min(hi, supp_hi_); ++k)
            if (!known(k)) throw WindowError("restrict_support: order " + std::to_string(k) + " unknown");
        DifferenceOperator r(params_);
        r.supp_lo_ = std::max(lo, supp_lo_);
        r.supp_hi_ = std::min(hi, supp_hi_);
        if (r.supp_lo_ > r.supp_hi_) {
            r.supp_lo_ = 0;
            r.supp_hi_ = -1;
            return r;
        }
        for (const auto& [k, f] : coeffs_)
            if (k >= lo && k <= hi) r.coeffs_.emplace(k, f);
        return r;
    }

    void require_same(const DifferenceOperator& o) const
    {
        if (!(params_ == o.params_)) throw ConfigError("DifferenceOperator: algebra parameter mismatch");
    }

private:
    // effective exact bounds for addition: a missing unknown tail extends
    // knowledge to infinity on that side
    int eff_exact_lo() const { return has_unknown_low() ? exact_lo_ : -WINF; }
    int eff_exact_hi() const { return has_unknown_high() ? exact_hi_ : WINF; }
    int exact_range_lo() const { return std::max(exact_lo_, supp_lo_); }
    int exact_range_hi() const { return std::min(exact_hi_, supp_hi_); }

    bool known_candidate(int k) const { return known(k) && k >= supp_lo_ && k <= supp_hi_; }

    AlgebraParams params_;
    std::map<int, AlgebraElement> coeffs_;
    int exact_lo_ = -WINF;
    int exact_hi_ = WINF;
    int supp_lo_ = 0;
    int supp_hi_ = -1;
};

inline DifferenceOperator op_pow(const DifferenceOperator& a, int n)
{
    if (n < 0) throw ConfigError("op_pow: negative power");
    DifferenceOperator r = DifferenceOperator::identity(a.params());
    for (int i = 0; i < n; ++i) r = r * a;
    return r;
}

inline bool equal_on_window(const DifferenceOperator& a, const DifferenceOperator& b, int lo, int hi, int eps_ord)
{
    for (int k = lo; k <= hi; ++k) {
        if (!(a.coeff(k) - b.coeff(k)).is_zero_through(eps_ord)) return false;
    }
    return true;
}

/// A difference operator plus a polynomial part in eps d/dx:
/// sum_j P_j (eps d/dx)^j with difference-operator coefficients P_j,
/// normal-ordered with all derivative powers on the right.
class DiffDiffOperator {
public:
    DiffDiffOperator() = default;
    explicit DiffDiffOperator(const AlgebraParams& p) : params_(p) {}

    static DiffDiffOperator from_difference(const DifferenceOperator& d)
    {
        DiffDiffOperator r(d.params());
        if (!d.stored_zero() || d.supp_lo() <= d.supp_hi()) r.parts_[0] = d;
        return r;
    }

    /// P (eps d/dx)^j.
    static DiffDiffOperator dpoly(const DifferenceOperator& p, int j)
    {
        DiffDiffOperator r(p.params());
        r.parts_[j] = p;
        return r;
    }

    const AlgebraParams& params() const { return params_; }
    const std::map<int, DifferenceOperator>& parts() const { return parts_; }

    DifferenceOperator part(int j) const
    {
        auto it = parts_.find(j);
        return it == parts_.end() ? DifferenceOperator::zero(params_) : it->second;
    }

    DifferenceOperator difference_part() const { return part(0); }

    void set_part(int j, const DifferenceOperator& d) { parts_[j] = d; }

    DiffDiffOperator operator-() const
    {
        DiffDiffOperator r = *this;
        for (auto& [j, d] : r.parts_) d = -d;
        return r;
    }

    friend DiffDiffOperator operator+(const DiffDiffOperator& a, const DiffDiffOperator& b)
    {
        DiffDiffOperator r = a;
        for (const auto& [j, d] : b.parts_) {
            auto it = r.parts_.find(j);
            if (it == r.parts_.end())
                r.parts_.emplace(j, d);
            else
                it->second = it->second + d;
        }
        return r;
    }

    friend DiffDiffOperator operator-(const DiffDiffOperator& a, const DiffDiffOperator& b) { return a + (-b); }

    /// Normal ordering: (eps d/dx)^i Q = sum_t C(i,t) (eps d/dx applied to
    /// the coefficients of Q, t times) (eps d/dx)^{i-t}.
    friend DiffDiffOperator operator*(const DiffDiffOperator& a, const DiffDiffOperator& b)
    {
        DiffDiffOperator r(a.params_);
        for (const auto& [i, p] : a.parts_) {
            for (const auto& [j, q] : b.parts_) {
                DifferenceOperator qd = q;
                for (int t = 0; t <= i; ++t) {
                    if (t > 0) qd = qd.x_derivative().mul_eps();
                    Rat c = binomial(static_cast<unsigned>(i), static_cast<unsigned>(t));
                    DifferenceOperator term = (p * qd).scaled(c);
                    int pow = i + j - t;
                    auto it = r.parts_.find(pow);
                    if (it == r.parts_.end())
                        r.parts_.emplace(pow, term);
                    else
                        it->second = it->second + term;
                }
            }
        }
        return r;
    }

    DiffDiffOperator scaled(const Rat& c) const
    {
        DiffDiffOperator r = *this;
        for (auto& [j, d] : r.parts_) d = d.scaled(c);
        return r;
    }

    DiffDiffOperator evolved(const FlowData& flow) const
    {
        DiffDiffOperator r = *this;
        for (auto& [j, d] : r.parts_) d = d.evolved(flow);
        return r;
    }

    DiffDiffOperator mul_eps(int p = 1) const
    {
        DiffDiffOperator r = *this;
        for (auto& [j, d] : r.parts_) d = d.mul_eps(p);
        return r;
    }

    bool is_zero_through(int ord) const
    {
        for (const auto& [j, d] : parts_)
            if (!d.is_zero_through(ord)) return false;
        return true;
    }

private:
    AlgebraParams params_;
    std::map<int, DifferenceOperator> parts_;
};

inline DiffDiffOperator commutator(const DiffDiffOperator& a, const DiffDiffOperator& b)
{
    return a * b - b * a;
}

/// res(X Y) = sum_k x_k shift(y_{-k}, k), demanding a finite fully-known
/// overlap of the supports.
inline AlgebraElement res_product(const DifferenceOperator& X, const DifferenceOperator& Y)
{
    X.require_same(Y);
    int lo = std::max(X.supp_lo(), -Y.supp_hi());
    int hi = std::min(X.supp_hi(), -Y.supp_lo());
    AlgebraElement acc(X.params());
    if (lo > hi) return acc;
    if (lo <= -WINF / 2 || hi >= WINF / 2)
        throw WindowError("res_product: support overlap is not finite");
    for (int k = lo; k <= hi; ++k) acc += X.coeff(k) * Y.coeff(-k).shift(k);
    return acc;
}

inline AlgebraElement res_commutator(const DifferenceOperator& X, const DifferenceOperator& Y)
{
    return res_product(X, Y) - res_product(Y, X);
}

} // namespace bigtoda
