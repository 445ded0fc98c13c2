#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bigtoda/algebra.hpp"
#include "bigtoda/calculus.hpp"
#include "bigtoda/difference_op.hpp"
#include "bigtoda/errors.hpp"
#include "bigtoda/symbols.hpp"

namespace bigtoda {

/// Index of one hierarchy flow: alpha in [-M, N-1], p >= 0.
struct FlowIndex {
    int alpha = 0;
    int p = 0;

    friend auto operator<=>(const FlowIndex&, const FlowIndex&) = default;
};

/// Construction of the Lax operator, its roots and logarithms, and the flow
/// generators. Expensive intermediates (root coefficients, log coefficients,
/// gauge ratios, flows) are memoized; widening a window extends the cached
/// recursions instead of recomputing them.
class Hierarchy {
public:
    Hierarchy(int N, int M, int K) : p_{N, M, K}
    {
        if (N < 1 || M < 1 || K < 0) throw ConfigError("Hierarchy: need N, M >= 1 and K >= 0");
        std::map<int, AlgebraElement> c;
        c.emplace(N, AlgebraElement::constant(p_, Rat(1)));
        for (int k = -M; k <= N - 1; ++k) c.emplace(k, AlgebraElement::u(p_, k));
        L_ = DifferenceOperator::total(p_, std::move(c));
    }

    const AlgebraParams& params() const { return p_; }
    int N() const { return p_.N; }
    int M() const { return p_.M; }
    int K() const { return p_.K; }
    const DifferenceOperator& lax() const { return L_; }

    Rat mu(int alpha) const
    {
        check_alpha(alpha);
        return alpha >= 0 ? -rat(alpha, p_.N) : rat(alpha, p_.M);
    }

    /// c_q = 1 + 1/2 + ... + 1/q, c_0 = 0.
    static Rat harmonic(int q)
    {
        Rat c(0);
        for (int k = 1; k <= q; ++k) c += rat(1, k);
        return c;
    }

    Rat kappa(int q) const { return (rat(1, p_.M) + rat(1, p_.N)) * harmonic(q) * rat(1, 2); }

    // ----- fractional powers ------------------------------------------------

    /// L^{1/N} = Lambda + sum_{k <= 0} a_k Lambda^k, exact on [lo, 1].
    DifferenceOperator root_n(int lo)
    {
        extend_root_n(lo);
        std::map<int, AlgebraElement> c;
        c.emplace(1, AlgebraElement::constant(p_, Rat(1)));
        for (const auto& [k, a] : a_) {
            if (k >= lo) c.emplace(k, a);
        }
        return DifferenceOperator::windowed(p_, std::move(c), lo, WINF, -WINF, 1);
    }

    /// L^{1/M} = sum_{k >= -1} b_k Lambda^k, exact on [-1, hi].
    DifferenceOperator root_m(int hi)
    {
        extend_root_m(hi);
        std::map<int, AlgebraElement> c;
        for (const auto& [k, b] : btilde_) {
            if (k > hi) continue;
            c.emplace(k, gauge_ratio_inv(k) * b);
        }
        return DifferenceOperator::windowed(p_, std::move(c), -WINF, hi, -1, WINF);
    }

    /// L^{m/N} with exact window [lo, m].
    DifferenceOperator root_n_power(int m, int lo)
    {
        if (m < 1) throw ConfigError("root_n_power: m >= 1");
        auto key = std::make_pair(m, lo);
        auto it = rn_pow_.find(key);
        if (it != rn_pow_.end()) return it->second;
        DifferenceOperator r = root_n(lo - m + 1);
        DifferenceOperator acc = r;
        for (int i = 1; i < m; ++i) acc = acc * r;
        rn_pow_.emplace(key, acc);
        return acc;
    }

    /// Ltilde^{m/M} (gauged root power) with exact window [-m, hi].
    DifferenceOperator root_m_tilde_power(int m, int hi)
    {
        if (m < 1) throw ConfigError("root_m_tilde_power: m >= 1");
        auto key = std::make_pair(m, hi);
        auto it = rmt_pow_.find(key);
        if (it != rmt_pow_.end()) return it->second;
        DifferenceOperator s = root_m_tilde(hi + m - 1);
        DifferenceOperator acc = s;
        for (int i = 1; i < m; ++i) acc = acc * s;
        rmt_pow_.emplace(key, acc);
        return acc;
    }

    /// L^{m/M} with exact window [-m, hi].
    DifferenceOperator root_m_power(int m, int hi)
    {
        DifferenceOperator r = root_m(hi + m - 1);
        DifferenceOperator acc = r;
        for (int i = 1; i < m; ++i) acc = acc * r;
        return acc;
    }

    // ----- gauge ratios -----------------------------------------------------

    /// Lambda^k q_0 / q_0 = v^k exp(series), an exact element of the algebra.
    AlgebraElement gauge_ratio(int k)
    {
        auto it = gauge_.find(k);
        if (it != gauge_.end()) return it->second;
        ShiftSymbol s(ExpPoly::exp(k) - ExpPoly::constant(Rat(1)),
                      ExpPoly::constant(Rat(1)) - ExpPoly::exp(-p_.M));
        AlgebraElement g = exp_of_symbol_on_logu(s);
        gauge_.emplace(k, g);
        return g;
    }

    AlgebraElement gauge_ratio_inv(int k)
    {
        auto it = gauge_inv_.find(k);
        if (it != gauge_inv_.end()) return it->second;
        ShiftSymbol s(ExpPoly::constant(Rat(1)) - ExpPoly::exp(k),
                      ExpPoly::constant(Rat(1)) - ExpPoly::exp(-p_.M));
        AlgebraElement g = exp_of_symbol_on_logu(s);
        gauge_inv_.emplace(k, g);
        return g;
    }

    /// exp(s applied to logu): the constant part of the symbol exponentiates
    /// to an integer power of v, the eps tail exponentiates as a finite
    /// series.
    AlgebraElement exp_of_symbol_on_logu(const ShiftSymbol& s)
    {
        SymbolSeries ser = expand_symbol(s, p_.K);
        Rat c0 = ser.at(0) * Rat(p_.M);
        if (c0.get_den() != 1)
            throw ConfigError("exp_of_symbol_on_logu: constant part does not exponentiate to an integer v power");
        long vpow = c0.get_num().get_si();
        AlgebraElement tail(p_);
        AlgebraElement dlog = AlgebraElement::logu(p_).eps_d_dx(); // eps M v_x / v
        AlgebraElement cur = dlog;
        for (int j = 1; j <= p_.K; ++j) {
            tail += cur.scaled(ser.at(j));
            cur = cur.eps_d_dx();
            if (cur.is_zero()) break;
        }
        return AlgebraElement::v(p_, static_cast<int>(vpow)) * exp_positive_eps(tail);
    }

    /// exp of an element with strictly positive eps valuation.
    AlgebraElement exp_positive_eps(const AlgebraElement& x)
    {
        if (!x.is_zero_through(0)) throw ConfigError("exp_positive_eps: eps-free part present");
        AlgebraElement acc = AlgebraElement::constant(p_, Rat(1));
        AlgebraElement pw = AlgebraElement::constant(p_, Rat(1));
        for (int j = 1; j <= p_.K; ++j) {
            pw = pw * x;
            if (pw.is_zero()) break;
            acc += pw.scaled(Rat(1) / factorial(static_cast<unsigned>(j)));
        }
        return acc;
    }

    // ----- logarithm --------------------------------------------------------

    /// Coefficient w_k of log L.
    AlgebraElement log_w(int k)
    {
        if (k == 0) {
            if (!w0_) {
                ShiftSymbol s(ExpPoly::z(), ExpPoly::constant(Rat(1)) - ExpPoly::exp(-p_.M));
                w0_ = apply_symbol(s, AlgebraElement::logu(p_)).scaled(rat(1, 2));
            }
            return *w0_;
        }
        if (k < 0) {
            compute_w_neg(-k);
            return w_neg_.at(-k);
        }
        compute_w_pos(k);
        return gauge_ratio_inv(k) * w_tilde_.at(k);
    }

    /// log L = sum w_k Lambda^k on [lo, hi].
    DifferenceOperator log_op(int lo, int hi)
    {
        std::map<int, AlgebraElement> c;
        for (int k = lo; k <= hi; ++k) c.emplace(k, log_w(k));
        return DifferenceOperator::windowed(p_, std::move(c), lo, hi, -WINF, WINF);
    }

    /// log_+ L = N eps d + 2N W_red, W_red = sum_{k<0} w_k Lambda^k on [lo, -1].
    DiffDiffOperator log_plus(int lo)
    {
        DiffDiffOperator r(p_);
        r.set_part(1, DifferenceOperator::identity(p_).scaled(Rat(p_.N)));
        std::map<int, AlgebraElement> c;
        for (int k = lo; k <= -1; ++k) c.emplace(k, log_w(k).scaled(Rat(2 * p_.N)));
        r.set_part(0, DifferenceOperator::windowed(p_, std::move(c), lo, WINF, -WINF, -1));
        return r;
    }

    /// log_- L = -M eps d + 2M w_0 + 2M W_pos on [0, hi].
    DiffDiffOperator log_minus(int hi)
    {
        DiffDiffOperator r(p_);
        r.set_part(1, DifferenceOperator::identity(p_).scaled(Rat(-p_.M)));
        std::map<int, AlgebraElement> c;
        for (int k = 0; k <= hi; ++k) c.emplace(k, log_w(k).scaled(Rat(2 * p_.M)));
        r.set_part(0, DifferenceOperator::windowed(p_, std::move(c), -WINF, hi, 0, WINF));
        return r;
    }

    // ----- exponential generators -------------------------------------------

    /// W_- = log(L Lambda^{-N}) as a convergent series on [lo, -1].
    DifferenceOperator bch_w_minus(int lo)
    {
        DifferenceOperator x =
            (L_ * DifferenceOperator::shift_op(p_, -p_.N) - DifferenceOperator::identity(p_)).tightened();
        return log_series(x, lo, -1);
    }

    /// W_{>0} = log(L Lambda^{M} v^{-M}) on [1, hi].
    DifferenceOperator bch_w_pos(int hi)
    {
        DifferenceOperator inv =
            DifferenceOperator::monomial(p_, p_.M, AlgebraElement::v(p_, -p_.M).shift(p_.M));
        DifferenceOperator x = (L_ * inv - DifferenceOperator::identity(p_)).tightened();
        return log_series(x, 1, hi);
    }

    /// exp of a difference operator supported strictly on one side of 0,
    /// truncated to the window [lo, hi].
    DifferenceOperator exp_series(const DifferenceOperator& x, int lo, int hi)
    {
        bool below = x.supp_hi() <= -1;
        bool above = x.supp_lo() >= 1;
        if (!below && !above) throw ConfigError("exp_series: support must avoid order 0");
        int depth = below ? -lo : hi;
        DifferenceOperator acc = DifferenceOperator::identity(p_);
        DifferenceOperator pw = DifferenceOperator::identity(p_);
        for (int j = 1; j <= depth; ++j) {
            pw = pw * x;
            acc = acc + pw.scaled(Rat(1) / factorial(static_cast<unsigned>(j)));
        }
        return acc;
    }

    // ----- flow generators --------------------------------------------------

    /// Gamma(2 - c) / Gamma(p + 2 - c) as a finite rational product.
    static Rat gamma_ratio(const Rat& c, int p)
    {
        Rat r(1);
        for (int t = 0; t < p; ++t) r /= Rat(2) - c + Rat(t);
        return r;
    }

    /// B_{alpha, p} with exact window at least [lo, hi].
    DifferenceOperator b_op(FlowIndex idx, int lo, int hi)
    {
        check_index(idx);
        const auto [alpha, q] = idx;
        if (alpha >= 0) {
            int e = (q + 1) * p_.N - alpha;
            return root_n_power(e, lo).scaled(gamma_ratio(rat(alpha, p_.N), q));
        }
        return b_op_negative(idx, lo, hi);
    }

    /// A_{alpha, q} for alpha != -M: a fully known finite operator.
    DifferenceOperator a_op(FlowIndex idx)
    {
        check_index(idx);
        const auto [alpha, q] = idx;
        if (alpha == -p_.M) throw ConfigError("a_op: use a_op_log or a_tilde for alpha = -M");
        if (alpha >= 0) {
            int e = (q + 1) * p_.N - alpha;
            return b_op(idx, 0, e).project(DifferenceOperator::Part::Plus);
        }
        int e = (q + 1) * p_.M + alpha;
        return (-b_op(idx, -e, -1)).project(DifferenceOperator::Part::Minus);
    }

    /// A_{-M, q} = (2/q!) [L^q (log L - kappa-type constant)]_+ restricted to
    /// the exact window [0, hi].
    DifferenceOperator a_op_log(int q, int hi)
    {
        DifferenceOperator b = b_op({-p_.M, q}, 0, hi);
        return b.soft_project_plus();
    }

    /// The finite differential-difference form of the -M flow generators.
    DiffDiffOperator a_tilde(int q)
    {
        auto it = atilde_.find(q);
        if (it != atilde_.end()) return it->second;
        Rat inv_qfac = Rat(1) / factorial(static_cast<unsigned>(q));
        DifferenceOperator Lq = op_pow(L_, q);
        Rat cc = (rat(1, p_.M) + rat(1, p_.N)) * harmonic(q) * rat(1, 4);

        // [L^q (W_- - cc)]_+ : needs w_k down to -qN - 1
        std::map<int, AlgebraElement> wm;
        for (int k = -q * p_.N - 1; k <= -1; ++k) wm.emplace(k, log_w(k));
        DifferenceOperator Wm = DifferenceOperator::windowed(p_, std::move(wm), -q * p_.N - 1, WINF, -WINF, -1);
        DifferenceOperator plus_arg = Lq * Wm - Lq.scaled(cc);
        DifferenceOperator part_plus = plus_arg.project(DifferenceOperator::Part::Plus);

        // [L^q (W_{>=0} - cc)]_- : needs w_k up to qM - 1... use qM + 1 margin
        std::map<int, AlgebraElement> wp;
        for (int k = 0; k <= q * p_.M + 1; ++k) wp.emplace(k, log_w(k));
        DifferenceOperator Wp = DifferenceOperator::windowed(p_, std::move(wp), -WINF, q * p_.M + 1, 0, WINF);
        DifferenceOperator minus_arg = Lq * Wp - Lq.scaled(cc);
        DifferenceOperator part_minus = minus_arg.project(DifferenceOperator::Part::Minus);

        DiffDiffOperator r(p_);
        r.set_part(1, Lq.scaled(inv_qfac));
        r.set_part(0, (part_plus - part_minus).scaled(Rat(2) * inv_qfac));
        atilde_.emplace(q, r);
        return r;
    }

    // ----- flows ------------------------------------------------------------

    /// The induced derivations u_dot_k of the flow t^{alpha, p}, read off the
    /// commutator representation. Checks that the two Lax forms agree.
    const FlowData& flow(FlowIndex idx)
    {
        check_index(idx);
        auto it = flows_.find(idx);
        if (it != flows_.end()) return it->second;

        const auto [alpha, q] = idx;
        DifferenceOperator C(p_);
        if (alpha != -p_.M) {
            DifferenceOperator A = a_op(idx);
            C = commutator(A, L_);
            // cross-check against the opposite projection
            DifferenceOperator other(p_);
            if (alpha >= 0) {
                int e = (q + 1) * p_.N - alpha;
                DifferenceOperator B = b_op(idx, -p_.M - p_.N, e);
                other = commutator(-B.soft_project_minus(), L_);
            } else {
                int e = (q + 1) * p_.M + alpha;
                DifferenceOperator B = b_op(idx, -e, p_.N + p_.M);
                other = commutator(B.soft_project_plus(), L_);
            }
            for (int k = -p_.M; k <= p_.N - 1; ++k) {
                if (!(C.coeff(k) - other.coeff(k)).is_zero_through(std::min(C.coeff(k).valid_order(), other.coeff(k).valid_order())))
                    throw InconsistentFlowError("flow: the two Lax forms disagree at order " + std::to_string(k));
            }
        } else {
            DiffDiffOperator Cc = commutator(a_tilde(q), DiffDiffOperator::from_difference(L_));
            for (const auto& [j, prt] : Cc.parts()) {
                if (j >= 1 && !prt.is_zero_through(p_.K))
                    throw InconsistentFlowError("flow: derivative part of [A, L] does not cancel");
            }
            C = Cc.difference_part();
            // windowed check against the unbounded projection form
            DifferenceOperator A = a_op_log(q, p_.N + p_.M + q * p_.N);
            DifferenceOperator other = commutator(A, L_);
            for (int k = -p_.M; k <= p_.N - 1; ++k) {
                if (!(C.coeff(k) - other.coeff(k)).is_zero_through(std::min(C.coeff(k).valid_order(), other.coeff(k).valid_order())))
                    throw InconsistentFlowError("flow: log-flow forms disagree at order " + std::to_string(k));
            }
        }

        // tangency: nothing outside [-M, N-1]
        for (const auto& [k, f] : C.coeffs()) {
            if ((k < -p_.M || k > p_.N - 1) && !f.is_zero_through(f.valid_order()))
                throw InconsistentFlowError("flow: commutator leaves the tangent window at order " + std::to_string(k));
        }

        FlowData fd;
        AlgebraElement udot_m(p_);
        for (int k = -p_.M; k <= p_.N - 1; ++k) {
            AlgebraElement cd = C.coeff(k);
            AlgebraElement ud = cd.is_zero() ? dup_valid(cd) : cd.div_eps();
            if (k == -p_.M)
                udot_m = ud;
            else
                fd.u_dot.emplace(k, ud);
        }
        // v_dot = (1/M) v^{1-M} u_dot_{-M}, logu_dot = v^{-M} u_dot_{-M}
        fd.v_dot = udot_m * AlgebraElement::v(p_, 1 - p_.M).scaled(rat(1, p_.M));
        fd.logu_dot = udot_m * AlgebraElement::v(p_, -p_.M);
        auto [pos, ok] = flows_.emplace(idx, std::move(fd));
        return pos->second;
    }

    /// eps d a / d t^{alpha, p} is flow-application times eps; this returns
    /// d a / d t^{alpha, p}.
    AlgebraElement time_derivative(const AlgebraElement& a, FlowIndex idx) { return evolve(a, flow(idx)); }

    /// The flow generator as a differential-difference operator: A for
    /// alpha != -M, the finite tilde form for alpha = -M.
    DiffDiffOperator flow_generator(FlowIndex idx)
    {
        if (idx.alpha == -p_.M) return a_tilde(idx.p);
        return DiffDiffOperator::from_difference(a_op(idx));
    }

    struct ZSReport {
        bool pass = true;
        int order_checked = 0;
        std::string failure;
    };

    /// Residual of the compatibility equation
    /// eps d A_1 / d t_2 - eps d A_2 / d t_1 + [A_1, A_2] = 0.
    ZSReport check_zakharov_shabat(FlowIndex i1, FlowIndex i2)
    {
        DiffDiffOperator A1 = flow_generator(i1);
        DiffDiffOperator A2 = flow_generator(i2);
        DiffDiffOperator r = A1.evolved(flow(i2)).mul_eps() - A2.evolved(flow(i1)).mul_eps() + commutator(A1, A2);
        int ord = p_.K;
        for (const auto& [j, prt] : r.parts()) {
            int v = prt.min_valid_order();
            if (v < ord) ord = v;
        }
        ZSReport rep;
        rep.order_checked = ord;
        for (const auto& [j, prt] : r.parts()) {
            if (!prt.is_zero_through(ord)) {
                rep.pass = false;
                rep.failure = "residual at derivative power " + std::to_string(j);
                break;
            }
        }
        return rep;
    }

private:
    static AlgebraElement dup_valid(const AlgebraElement& a)
    {
        AlgebraElement r = a;
        r.set_valid(a.valid_order() - 1);
        return r;
    }

    void check_alpha(int alpha) const
    {
        if (alpha < -p_.M || alpha > p_.N - 1) throw ConfigError("flow index alpha out of range");
    }

    void check_index(FlowIndex idx) const
    {
        check_alpha(idx.alpha);
        if (idx.p < 0) throw ConfigError("flow index p must be nonnegative");
    }

    DifferenceOperator b_op_negative(FlowIndex idx, int lo, int hi)
    {
        const auto [alpha, q] = idx;
        if (alpha != -p_.M) {
            int e = (q + 1) * p_.M + alpha;
            return root_m_power(e, hi).scaled(gamma_ratio(-rat(alpha, p_.M), q));
        }
        // B_{-M, q} = (2/q!) [ L^q (log L - kappa) ]
        DifferenceOperator Lq = op_pow(L_, q);
        DifferenceOperator lg = log_op(lo - q * p_.N, hi + q * p_.M);
        DifferenceOperator r = Lq * lg - Lq.scaled(kappa(q));
        return r.scaled(Rat(2) / factorial(static_cast<unsigned>(q)));
    }

    /// log(1 + x) truncated on [lo, hi] for x supported strictly off 0.
    DifferenceOperator log_series(const DifferenceOperator& x, int lo, int hi)
    {
        bool below = x.supp_hi() <= -1;
        int depth = below ? -lo : hi;
        DifferenceOperator acc(p_);
        DifferenceOperator pw = DifferenceOperator::identity(p_);
        for (int j = 1; j <= depth; ++j) {
            pw = pw * x;
            acc = acc + pw.scaled(rat(j % 2 == 1 ? 1 : -1, j));
        }
        return acc.restrict_support(lo, hi);
    }

    void extend_root_n(int lo)
    {
        ShiftSymbol geo(ExpPoly::constant(Rat(1)), ExpPoly::exp_range(0, p_.N - 1));
        SymbolSeries inv = expand_symbol(geo, p_.K);
        int start = a_.empty() ? 0 : a_.begin()->first - 1;
        for (int t = start; t >= lo; --t) {
            int p = t + p_.N - 1;
            AlgebraElement rhs = lax_coeff(p);
            std::vector<int> parts;
            AlgebraElement sum(p_);
            enumerate_root_n_terms(t, p, 0, 0, AlgebraElement::constant(p_, Rat(1)), parts, sum);
            a_.emplace(t, apply_symbol(inv, rhs - sum));
        }
    }

    /// Sum over compositions l_1 + ... + l_N = p with t < l_i <= 1 of
    /// a_{l_1} shift(a_{l_2}, l_1) ... ; a_1 = 1.
    void enumerate_root_n_terms(int t, int target, int depth, int prefix, const AlgebraElement& acc,
                                std::vector<int>& parts, AlgebraElement& sum)
    {
        if (depth == p_.N) {
            if (target == 0) sum += acc;
            return;
        }
        int remaining = p_.N - depth - 1;
        for (int l = std::max(t + 1, target - remaining); l <= 1; ++l) {
            // remaining parts are each at least t+1
            if (target - l < remaining * (t + 1)) continue;
            const AlgebraElement coeff = l == 1 ? AlgebraElement::constant(p_, Rat(1)) : a_.at(l);
            AlgebraElement next = acc * coeff.shift(prefix);
            parts.push_back(l);
            enumerate_root_n_terms(t, target - l, depth + 1, prefix + l, next, parts, sum);
            parts.pop_back();
        }
    }

    /// Ltilde = q0^{-1} L q0 coefficient.
    AlgebraElement lax_tilde_coeff(int k)
    {
        if (k < -p_.M || k > p_.N) return AlgebraElement::zero(p_);
        if (k == -p_.M) return AlgebraElement::constant(p_, Rat(1));
        return lax_coeff(k) * gauge_ratio(k);
    }

    AlgebraElement lax_coeff(int k)
    {
        if (k == p_.N) return AlgebraElement::constant(p_, Rat(1));
        if (k < -p_.M || k > p_.N) return AlgebraElement::zero(p_);
        return AlgebraElement::u(p_, k);
    }

    /// Ltilde^{1/M} = Lambda^{-1} + sum_{k >= 0} btilde_k Lambda^k.
    DifferenceOperator root_m_tilde(int hi)
    {
        extend_root_m(hi);
        std::map<int, AlgebraElement> c;
        for (const auto& [k, b] : btilde_)
            if (k <= hi) c.emplace(k, b);
        return DifferenceOperator::windowed(p_, std::move(c), -WINF, hi, -1, WINF);
    }

    void extend_root_m(int hi)
    {
        if (btilde_.empty()) btilde_.emplace(-1, AlgebraElement::constant(p_, Rat(1)));
        ShiftSymbol geo(ExpPoly::constant(Rat(1)), ExpPoly::exp_range(-(p_.M - 1), 0));
        SymbolSeries inv = expand_symbol(geo, p_.K);
        int start = btilde_.rbegin()->first + 1;
        for (int t = start; t <= hi; ++t) {
            int p = t - p_.M + 1;
            AlgebraElement rhs = lax_tilde_coeff(p);
            std::vector<int> parts;
            AlgebraElement sum(p_);
            enumerate_root_m_terms(t, p, 0, 0, AlgebraElement::constant(p_, Rat(1)), parts, sum);
            btilde_.emplace(t, apply_symbol(inv, rhs - sum));
        }
    }

    /// Sum over compositions l_1 + ... + l_M = p with -1 <= l_i <= t - 1.
    void enumerate_root_m_terms(int t, int target, int depth, int prefix, const AlgebraElement& acc,
                                std::vector<int>& parts, AlgebraElement& sum)
    {
        if (depth == p_.M) {
            if (target == 0) sum += acc;
            return;
        }
        int remaining = p_.M - depth - 1;
        for (int l = -1; l <= t - 1; ++l) {
            if (target - l < -remaining) continue;          // rest each >= -1
            if (target - l > remaining * (t - 1)) continue;  // rest each <= t-1
            const AlgebraElement coeff = l == -1 ? AlgebraElement::constant(p_, Rat(1)) : btilde_.at(l);
            AlgebraElement next = acc * coeff.shift(prefix);
            parts.push_back(l);
            enumerate_root_m_terms(t, target - l, depth + 1, prefix + l, next, parts, sum);
            parts.pop_back();
        }
    }

    /// w_{-m} for m >= 1 from the residue recursion of the positive-root
    /// dressing, via regular symbols only.
    void compute_w_neg(int m)
    {
        for (int mm = w_neg_.empty() ? 1 : static_cast<int>(w_neg_.size()) + 1; mm <= m; ++mm) {
            DifferenceOperator pw = root_n_power(mm, 0);
            AlgebraElement y = pw.coeff(0).scaled(rat(1, 2));
            for (int l = 1; l < mm; ++l) {
                AlgebraElement z = pw.coeff(l) * w_neg_.at(l).shift(l);
                ShiftSymbol s(ExpPoly::exp(-l) - ExpPoly::constant(Rat(1)), ExpPoly::z());
                y += apply_symbol(s, z);
            }
            ShiftSymbol inv(ExpPoly::z(), ExpPoly::exp(mm) - ExpPoly::constant(Rat(1)));
            w_neg_.emplace(mm, apply_symbol(inv, y));
        }
    }

    /// wtilde_m for m >= 1 from the gauged recursion.
    void compute_w_pos(int m)
    {
        for (int mm = w_tilde_.empty() ? 1 : static_cast<int>(w_tilde_.size()) + 1; mm <= m; ++mm) {
            DifferenceOperator pw = root_m_tilde_power(mm, 0);
            AlgebraElement y = pw.coeff(0).scaled(rat(1, 2));
            for (int k = 1; k < mm; ++k) {
                AlgebraElement z = w_tilde_.at(k) * pw.coeff(-k).shift(k);
                ShiftSymbol s(ExpPoly::constant(Rat(1)) - ExpPoly::exp(-k), ExpPoly::z());
                y -= apply_symbol(s, z);
            }
            ShiftSymbol inv(ExpPoly::z(), ExpPoly::constant(Rat(1)) - ExpPoly::exp(-mm));
            w_tilde_.emplace(mm, apply_symbol(inv, y));
        }
    }

    AlgebraParams p_;
    DifferenceOperator L_;

    std::map<int, AlgebraElement> a_;      // root_n coefficients, indices <= 0
    std::map<int, AlgebraElement> btilde_; // gauged root_m coefficients, indices >= -1
    std::map<int, AlgebraElement> gauge_;
    std::map<int, AlgebraElement> gauge_inv_;
    std::map<int, AlgebraElement> w_neg_;   // key m >= 1 for w_{-m}
    std::map<int, AlgebraElement> w_tilde_; // key m >= 1 for wtilde_m
    std::optional<AlgebraElement> w0_;
    std::map<std::pair<int, int>, DifferenceOperator> rn_pow_;
    std::map<std::pair<int, int>, DifferenceOperator> rmt_pow_;
    std::map<int, DiffDiffOperator> atilde_;
    std::map<FlowIndex, FlowData> flows_;
};

} // namespace bigtoda
