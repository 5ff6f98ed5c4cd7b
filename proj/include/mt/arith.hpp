#pragma once

#include <gmpxx.h>

#include "mt/errors.hpp"
#include "mt/modular.hpp"
#include "mt/prime_context.hpp"
#include "mt/valuation.hpp"

namespace mt {

// Teichmüller lift ω(a) mod p^M: the unique (p−1)-st root of unity congruent
// to a mod p (p odd); ±1 for p = 2 according to a mod 4.  Computed by
// iterating a ↦ a^p, which converges p-adically one digit per step.
inline Int teichmuller(const Int& a, const PrimeContext& ctx) {
    if (gcd_int(a, ctx.p) != 1) throw schema_error("teichmuller: argument not a p-unit");
    Int pM = ctx.p_pow(ctx.M);
    if (ctx.p == 2) {
        return (mod_reduce(a, 4) == 1) ? Int(1) : pM - 1;
    }
    Int t = mod_reduce(a, pM);
    for (long i = 0; i < ctx.M; ++i) t = mod_pow(t, ctx.p, pM);
    return t;
}

// The projection ⟨a⟩ = a·ω(a)^{−1} to 1+2pZ_p, computed mod p^N.
inline Int one_unit_part(const Int& a, const PrimeContext& ctx, const Int& pN) {
    Int w;
    if (ctx.p == 2) {
        w = (mod_reduce(a, 4) == 1) ? Int(1) : pN - 1;
    } else {
        w = mod_reduce(a, pN);
        // Iterate enough times for the modulus pN (pN divides p^M by policy;
        // iterate M times which dominates any exponent used here).
        for (long i = 0; i < ctx.M + 4; ++i) w = mod_pow(w, ctx.p, pN);
    }
    return mod_mul(mod_reduce(a, pN), mod_inv(w, pN), pN);
}

// Discrete logarithm to base gamma on the 1-units: the x mod p^n with
// gamma^x ≡ ⟨a⟩ mod p^N, N = N(p, n).  Solved digit by digit: the i-th digit
// is determined by the congruence mod p^{i+2} (p odd) resp. 2^{i+3} (p = 2).
inline Int discrete_log_gamma(const Int& a, const PrimeContext& ctx, long n) {
    if (gcd_int(a, ctx.p) != 1) throw schema_error("discrete_log_gamma: argument not a p-unit");
    if (n == 0) return 0;
    const long N = ctx.N_of(n);
    const Int pN = ctx.p_pow(N);
    const Int b = one_unit_part(a, ctx, pN);
    const long extra = (ctx.p == 2) ? 2 : 1;
    Int x = 0;
    Int p_i = 1;  // p^i
    for (long i = 0; i < n; ++i) {
        long mod_exp = std::min(i + 1 + extra, N);
        Int m = ctx.p_pow(mod_exp);
        bool found = false;
        for (Int d = 0; d < ctx.p; ++d) {
            Int cand = x + d * p_i;
            if (mod_pow(mod_reduce(ctx.gamma, m), cand, m) == mod_reduce(b, m)) {
                x = cand;
                found = true;
                break;
            }
        }
        if (!found) throw internal_error("discrete_log_gamma: no digit matched (bad gamma?)");
        p_i *= ctx.p;
    }
    return x;
}

// ord_p of C(p^n, i) is n − ord_p(i); used in division-term bounds.
inline Val ordp_binom_pn(const PrimeContext& ctx, long n, const Int& i) {
    Val vi = ordp(i, ctx.p);
    if (!vi.is_finite()) return Val::infinity();
    return Val::of(Rat(n) - vi.v);
}

}  // namespace mt
