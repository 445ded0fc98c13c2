#pragma once

#include <random>

#include "bigtoda/algebra.hpp"
#include "bigtoda/difference_op.hpp"

namespace bigtoda::testing {

/// Deterministic random elements for property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

    Rat rational(int mag = 4)
    {
        int num = uniform(-mag, mag);
        int den = uniform(1, mag);
        return rat(num == 0 ? 1 : num, den);
    }

    Monomial monomial(const AlgebraParams& p, bool allow_v = true, bool allow_logu = true, int max_der = 2)
    {
        Monomial m;
        m.eps = uniform(0, p.K);
        int nf = uniform(0, 2);
        for (int i = 0; i < nf; ++i) {
            int k = uniform(-p.M + 1, p.N - 1);
            m.mul_factor(gen_u(k, uniform(0, max_der)), uniform(1, 2));
        }
        if (allow_v && uniform(0, 2) == 0) m.v_exp = uniform(-2, 2);
        if (allow_v && uniform(0, 3) == 0) m.mul_factor(gen_vder(uniform(1, max_der)), 1);
        if (allow_logu && uniform(0, 3) == 0) m.logu_exp = uniform(1, 2);
        return m;
    }

    AlgebraElement element(const AlgebraParams& p, int nterms = 3, bool allow_v = true, bool allow_logu = true,
                           int max_der = 2)
    {
        AlgebraElement a(p);
        for (int i = 0; i < nterms; ++i) a.add_term(monomial(p, allow_v, allow_logu, max_der), rational());
        return a;
    }

    DifferenceOperator finite_operator(const AlgebraParams& p, int lo, int hi, int nterms = 2)
    {
        std::map<int, AlgebraElement> c;
        for (int k = lo; k <= hi; ++k) {
            if (uniform(0, 1) == 0) continue;
            c.emplace(k, element(p, nterms));
        }
        return DifferenceOperator::total(p, std::move(c));
    }

private:
    std::mt19937_64 eng_;
};

} // namespace bigtoda::testing
