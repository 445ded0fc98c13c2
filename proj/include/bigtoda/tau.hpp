#pragma once

#include <algorithm>
#include <string>

#include "bigtoda/hamiltonian.hpp"
#include "bigtoda/lax.hpp"

namespace bigtoda {
namespace tau {

/// h_{alpha, p-1} = res B_{alpha, p}, valid for p >= 0.
inline AlgebraElement density_shifted(Hierarchy& h, FlowIndex idx)
{
    return h.b_op(idx, 0, 0).residue();
}

/// eps d h_{alpha, p-1} / d t^{beta, q} computed through the residue
/// formulas of the hierarchy (no flow application), the tau-symmetric form.
inline AlgebraElement h_time_derivative(Hierarchy& h, FlowIndex ap, FlowIndex bq)
{
    const auto& P = h.params();
    const auto [alpha, p] = ap;
    const auto [beta, q] = bq;

    auto b_minus = [&](int lo) {
        return h.b_op(bq, lo, -1).soft_project_minus();
    };
    auto b_plus = [&](int hi) {
        int lo = beta >= 0 ? 0 : -((q + 1) * P.M + beta);
        return h.b_op(bq, std::min(lo, 0), hi).soft_project_plus();
    };

    if (alpha >= 0) {
        int ea = (p + 1) * P.N - alpha;
        DifferenceOperator Ba = h.b_op(ap, -ea - 1, ea);
        return res_commutator(-b_minus(-ea - 1), Ba);
    }
    if (alpha != -P.M) {
        int ea = (p + 1) * P.M + alpha;
        DifferenceOperator Ba = h.b_op(ap, -ea, ea + 1);
        return res_commutator(b_plus(ea + 1), Ba);
    }

    // alpha = -M: the differential-difference contributions reduce to three
    // residues of pure difference operators.
    int pn = p * P.N, pm = p * P.M;
    DifferenceOperator Lp = op_pow(h.lax(), p);
    Rat half_kappa = h.kappa(p) * rat(1, 2);

    // (eps/2) res( L^p (B_{beta,q})_x )
    int span = std::max(pn, pm) + 1;
    DifferenceOperator B = h.b_op(bq, -span, span);
    AlgebraElement t1 = res_product(Lp, B.x_derivative()).mul_eps().scaled(rat(1, 2));

    // [-(B)_-, L^p ((log L)_- - kappa/2)]
    std::map<int, AlgebraElement> wm;
    for (int k = -pn - p * P.M - 1; k <= -1; ++k) wm.emplace(k, h.log_w(k));
    DifferenceOperator Wm = DifferenceOperator::windowed(P, std::move(wm), -pn - p * P.M - 1, WINF, -WINF, -1);
    DifferenceOperator Ym = Lp * Wm - Lp.scaled(half_kappa);
    AlgebraElement t2 = res_commutator(-b_minus(-pn - 1), Ym);

    // [(B)_+, L^p ((log L)_+ - kappa/2)]
    std::map<int, AlgebraElement> wp;
    for (int k = 0; k <= pm + pn + 1; ++k) wp.emplace(k, h.log_w(k));
    DifferenceOperator Wp = DifferenceOperator::windowed(P, std::move(wp), -WINF, pm + pn + 1, 0, WINF);
    DifferenceOperator Yp = Lp * Wp - Lp.scaled(half_kappa);
    AlgebraElement t3 = res_commutator(b_plus(pm + 1), Yp);

    return (t1 + t2 + t3).scaled(Rat(2) / factorial(static_cast<unsigned>(p)));
}

/// The expected degree q + p + 2 + mu_alpha + mu_beta of the mixed objects.
inline Rat expected_degree(Hierarchy& h, FlowIndex ap, FlowIndex bq)
{
    return Rat(ap.p + bq.p + 2) + h.mu(ap.alpha) + h.mu(bq.alpha);
}

/// Omega_{alpha,p;beta,q}: the (Lambda - 1)-preimage of the density time
/// derivative, zero-constant normalized; the degree-zero entry (-M,0;-M,0)
/// is fixed by its closed symbol form.
inline AlgebraElement omega(Hierarchy& h, FlowIndex ap, FlowIndex bq)
{
    const auto& P = h.params();
    if (ap.alpha == -P.M && bq.alpha == -P.M && ap.p == 0 && bq.p == 0) {
        // eps^2 (Lambda-1)^{-1} (1-Lambda^{-M})^{-1} (logu)_xx
        ShiftSymbol s(ExpPoly::z() * ExpPoly::z(),
                      (ExpPoly::exp(1) - ExpPoly::constant(Rat(1))) *
                          (ExpPoly::constant(Rat(1)) - ExpPoly::exp(-P.M)));
        return apply_symbol(s, AlgebraElement::logu(P));
    }
    return invert_discrete_derivative(h_time_derivative(h, ap, bq), 1);
}

inline CheckReport check_tau_symmetry(Hierarchy& h, FlowIndex ap, FlowIndex bq)
{
    AlgebraElement lhs = h_time_derivative(h, ap, bq);
    AlgebraElement rhs = h_time_derivative(h, bq, ap);
    CheckReport rep;
    rep.id = "tau-symmetry (" + std::to_string(ap.alpha) + "," + std::to_string(ap.p) + ";" +
             std::to_string(bq.alpha) + "," + std::to_string(bq.p) + ")";
    rep.order_checked = std::min(lhs.valid_order(), rhs.valid_order());
    rep.pass = (lhs - rhs).is_zero_through(rep.order_checked);
    if (!rep.pass) rep.detail = "density derivatives differ";
    return rep;
}

/// Full three-pair symmetry of d Omega / d t, the closedness condition
/// behind the existence of a tau function.
inline CheckReport check_tau_closedness(Hierarchy& h, FlowIndex ap, FlowIndex bq, FlowIndex sk)
{
    AlgebraElement d1 = evolve(omega(h, ap, bq), h.flow(sk));
    AlgebraElement d2 = evolve(omega(h, ap, sk), h.flow(bq));
    AlgebraElement d3 = evolve(omega(h, bq, sk), h.flow(ap));
    CheckReport rep;
    rep.id = "tau-closedness (" + std::to_string(ap.alpha) + "," + std::to_string(ap.p) + ";" +
             std::to_string(bq.alpha) + "," + std::to_string(bq.p) + ";" + std::to_string(sk.alpha) + "," +
             std::to_string(sk.p) + ")";
    rep.order_checked = std::min({d1.valid_order(), d2.valid_order(), d3.valid_order()});
    rep.pass = (d1 - d2).is_zero_through(rep.order_checked) && (d1 - d3).is_zero_through(rep.order_checked);
    if (!rep.pass) rep.detail = "mixed derivatives of Omega are not symmetric";
    return rep;
}

/// Cross-check of the two computation paths for the density derivative:
/// the residue formula against the flow chain rule.
inline CheckReport check_density_derivative_consistency(Hierarchy& h, FlowIndex ap, FlowIndex bq)
{
    AlgebraElement residue_path = h_time_derivative(h, ap, bq);
    AlgebraElement chain_path = evolve(density_shifted(h, ap), h.flow(bq)).mul_eps();
    CheckReport rep;
    rep.id = "density-derivative (" + std::to_string(ap.alpha) + "," + std::to_string(ap.p) + ";" +
             std::to_string(bq.alpha) + "," + std::to_string(bq.p) + ")";
    rep.order_checked = std::min(residue_path.valid_order(), chain_path.valid_order());
    rep.pass = (residue_path - chain_path).is_zero_through(rep.order_checked);
    if (!rep.pass) rep.detail = "residue formula disagrees with the chain rule";
    return rep;
}

} // namespace tau
} // namespace bigtoda
