#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bigtoda {

/// Exact rational scalar. All coefficient arithmetic in the workbench is
/// carried out in Rat; no floating point enters the symbolic layer.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1)
{
    if (den == 0) throw std::invalid_argument("rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "p" or "p/q".
inline Rat rat_from_string(const std::string& s)
{
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("rat_from_string: bad literal '" + s + "'");
    if (r.get_den() == 0) throw std::invalid_argument("rat_from_string: zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }

inline Rat rat_pow(const Rat& base, long e)
{
    if (e == 0) return Rat(1);
    Rat b = base;
    bool inv = e < 0;
    unsigned long n = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    if (inv) {
        if (is_zero(b)) throw std::domain_error("rat_pow: zero to negative power");
        b = Rat(1) / b;
    }
    Rat acc(1);
    while (n) {
        if (n & 1) acc *= b;
        b *= b;
        n >>= 1;
    }
    return acc;
}

inline Rat factorial(unsigned n)
{
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rat(f);
}

inline Rat binomial(unsigned n, unsigned k)
{
    if (k > n) return Rat(0);
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rat(b);
}

} // namespace bigtoda
