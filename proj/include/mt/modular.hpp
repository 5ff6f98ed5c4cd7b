#pragma once

#include <gmpxx.h>

#include "mt/errors.hpp"
#include "mt/valuation.hpp"

namespace mt {

// Small exact helpers over Z and Z/m.  All operations are pure.

inline Int mod_reduce(const Int& a, const Int& m) {
    Int r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());  // result in [0, m)
    return r;
}

inline Int mod_mul(const Int& a, const Int& b, const Int& m) {
    return mod_reduce(a * b, m);
}

inline Int mod_pow(const Int& base, const Int& exp, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Int mod_inv(const Int& a, const Int& m) {
    Int r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
        throw internal_error("mod_inv: element not invertible");
    }
    return r;
}

inline Int pow_int(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Int binomial(const Int& n, unsigned long k) {
    Int r;
    mpz_bin_ui(r.get_mpz_t(), n.get_mpz_t(), k);
    return r;
}

inline Int gcd_int(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int lcm_int(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// Reduce an exact rational with p-unit (or more generally m-coprime)
// denominator into Z/m.
inline Int mod_of_rat(const Rat& x, const Int& m) {
    Int num = mod_reduce(x.get_num(), m);
    Int den = mod_inv(mod_reduce(x.get_den(), m), m);
    return mod_mul(num, den, m);
}

}  // namespace mt
