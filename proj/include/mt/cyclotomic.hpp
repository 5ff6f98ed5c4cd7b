#pragma once

#include <gmpxx.h>

#include <vector>

#include "mt/errors.hpp"
#include "mt/iwasawa.hpp"
#include "mt/poly.hpp"
#include "mt/prime_context.hpp"

namespace mt {

// Cyclotomic building blocks Φ_m, the substitution η^j, the finite layer
// half-logarithms log_{k,n}^±, the combinatorial weight constants
// (q_n, q_n', ν, ν^±, l, a, b, ι^±, I_k^±, C^±), the forward prediction of
// theta invariants, and the half-log projection oracle.

// Sign of (−1)^n: +1 iff n even.
inline int eps_n(long n) { return (n % 2 == 0) ? +1 : -1; }

// ⋆-sign twist: identity for p > 2, sign flip for p = 2.
inline int star_sign(const PrimeContext& ctx, int sign) {
    return (ctx.p == 2) ? -sign : sign;
}

// δ_n^+ = ⌊n/2⌋ (number of even layers ≤ n), δ_n^− = ⌊(n+1)/2⌋.
inline long delta_n(long n, int sign) { return (sign > 0) ? n / 2 : (n + 1) / 2; }

// q_n: the alternating sum p^{n−1} − p^{n−2} + … ending at −1 (n even) or −p
// (n odd); q_0 = q_1 = 0.
inline Int qn(const PrimeContext& ctx, long n) {
    long last = (n % 2 == 0) ? 0 : 1;  // lowest power included
    Int q = 0;
    int sgn = 1;
    for (long e = n - 1; e >= last; --e, sgn = -sgn) {
        if (sgn > 0) {
            q += ctx.p_pow(e);
        } else {
            q -= ctx.p_pow(e);
        }
    }
    return q;
}

// q_n' = p·q_{n−2} (0 for n ≤ 2, the empty alternating sum); satisfies both
// p·q_n ≡ q_n' mod t_n and 0 ≤ q_n' < t_n.
inline Int qn_prime(const PrimeContext& ctx, long n) {
    if (n <= 2) return 0;
    Int qp = ctx.p * qn(ctx, n - 2);
    // Defining congruence, asserted for all uses.
    if (n >= 2 && mod_reduce(ctx.p * qn(ctx, n) - qp, ctx.t_n(n)) != 0) {
        throw internal_error("qn_prime: congruence p*q_n = q_n' mod t_n failed");
    }
    return qp;
}

// Φ_m(T) = Σ_{i=0}^{p−1} T^{i·p^{m−1}}, the p^m-th cyclotomic polynomial.
inline std::vector<Int> phi_poly(const PrimeContext& ctx, long m) {
    if (m < 1) throw internal_error("phi_poly: m >= 1 required");
    unsigned long step = mpz_get_ui(ctx.p_pow(m - 1).get_mpz_t());
    unsigned long pl = mpz_get_ui(ctx.p.get_mpz_t());
    std::vector<Int> f(step * (pl - 1) + 1, Int(0));
    for (unsigned long i = 0; i < pl; ++i) f[i * step] = 1;
    return f;
}

// Φ_m(1+T) as an exact integer polynomial.
inline std::vector<Int> phi_poly_shifted(const PrimeContext& ctx, long m) {
    std::vector<Rat> shifted =
        poly_compose_affine_general(poly_rat_of_int(phi_poly(ctx, m)), Rat(1), Rat(1));
    std::vector<Int> out(shifted.size());
    for (size_t i = 0; i < out.size(); ++i) {
        if (shifted[i].get_den() != 1) throw internal_error("phi_poly_shifted: non-integer");
        out[i] = shifted[i].get_num();
    }
    return out;
}

// gamma^j as an exact rational (j may be negative).
inline Rat gamma_pow(const PrimeContext& ctx, long j) {
    Int num = pow_int(ctx.gamma, static_cast<unsigned long>(j < 0 ? -j : j));
    Rat r = (j < 0) ? Rat(Int(1)) / Rat(num) : Rat(num);
    r.canonicalize();
    return r;
}

// η^j(F) = F(γ^j(1+T) − 1), computed exactly.
template <class S>
Series<S> eta(const Series<S>& F, long j, const PrimeContext& ctx) {
    Series<S> out;
    out.exactness = F.exactness;
    out.c = poly_compose_affine(F.c, gamma_pow(ctx, j));
    return out;
}

// ω_{n,j}^± = ∏_{1 ≤ i ≤ n, ε_i = ±} Φ_i(γ^{−j}(1+T)); empty product = 1.
inline std::vector<Rat> omega_pm(const PrimeContext& ctx, long n, long j, int sign) {
    std::vector<Rat> prod{Rat(1)};
    const Rat u = gamma_pow(ctx, -j);
    for (long i = 1; i <= n; ++i) {
        if (eps_n(i) != sign) continue;
        // Φ_i evaluated at u(1+T) = uT + u.
        std::vector<Rat> factor =
            poly_compose_affine_general(poly_rat_of_int(phi_poly(ctx, i)), u, u);
        prod = poly_mul(prod, factor);
    }
    return prod;
}

// log_{k,n}^± = ∏_{j=0}^{k−2} ω_{n,j}^±.
inline std::vector<Rat> half_log_layer(const PrimeContext& ctx, long k, long n, int sign) {
    if (k < 2) throw internal_error("half_log_layer: k >= 2 required");
    std::vector<Rat> prod{Rat(1)};
    for (long j = 0; j <= k - 2; ++j) prod = poly_mul(prod, omega_pm(ctx, n, j, sign));
    return prod;
}

// ---------------------------------------------------------------------------
// Weight constants.
// ---------------------------------------------------------------------------
struct WeightConstants {
    Int nu;        // ⌊(k−p−2)/(p²−1)⌋ (floored, may be negative for small k)
    Int nu_minus;  // ν(p−1)+1
    Int nu_plus;   // p·ν⁻
    Int l;         // k−p−2 = l + ν(p²−1), 0 ≤ l ≤ p²−2
    Int a;         // l = a + bp, 0 ≤ a ≤ p−1
    Int b;
    bool branch_pair = false;  // true when k ≡ p+2 mod (p²−1) and k ≥ p+2
    Int iota;                  // resolved value when !branch_pair
    Int iota_ge;               // branch λ ≥ ν^* when branch_pair
    Int iota_lt;               // branch λ < ν^* when branch_pair
    Int C_plus;                // C^+ (1 always)
    Int C_minus;               // C^− (2^{k−1} when p = 2, else 1)

    Int nu_sign(int sign) const { return (sign > 0) ? nu_plus : nu_minus; }
    Int C_sign(int sign) const { return (sign > 0) ? C_plus : C_minus; }
};

inline WeightConstants weight_constants(const PrimeContext& ctx, long k) {
    if (k < 2) throw internal_error("weight_constants: k >= 2 required");
    WeightConstants wc;
    const Int p = ctx.p;
    const Int p2m1 = p * p - 1;
    Int km = Int(k) - p - 2;
    mpz_fdiv_qr(wc.nu.get_mpz_t(), wc.l.get_mpz_t(), km.get_mpz_t(), p2m1.get_mpz_t());
    mpz_fdiv_qr(wc.b.get_mpz_t(), wc.a.get_mpz_t(), wc.l.get_mpz_t(), p.get_mpz_t());
    wc.nu_minus = wc.nu * (p - 1) + 1;
    wc.nu_plus = p * wc.nu_minus;
    if (Int(k) <= p + 1) {
        wc.iota = 0;
    } else if (wc.l != 0) {  // k ≥ p+2, k ≢ p+2 mod (p²−1)
        Int num = p * Int(k - 2) - 1;
        mpz_fdiv_q(wc.iota.get_mpz_t(), num.get_mpz_t(), p2m1.get_mpz_t());
    } else {  // k ≡ p+2 mod (p²−1): data-dependent branch pair
        wc.branch_pair = true;
        wc.iota_ge = (p * Int(k - 2) - 1) / p2m1;
        wc.iota_lt = (p * Int(k - 2 - p)) / p2m1;
        if (wc.iota_ge * p2m1 != p * Int(k - 2) - 1 || wc.iota_lt * p2m1 != p * Int(k - 2 - p)) {
            throw internal_error("weight_constants: branch values not integral");
        }
    }
    wc.C_plus = 1;
    wc.C_minus = (p == 2) ? pow_int(Int(2), static_cast<unsigned long>(k - 1)) : Int(1);
    return wc;
}

// I_k^*(L): the multiplier version of ι, closed forms as displayed after the
// definition; `sign` selects * and lambda_of_L replaces λ^{⋆*}.
inline Int cap_I(const PrimeContext& ctx, long k, int sign, const Int& lambda_of_L) {
    WeightConstants wc = weight_constants(ctx, k);
    if (Int(k) <= ctx.p + 1) return 0;
    if (!wc.branch_pair) return wc.iota;
    return (lambda_of_L >= wc.nu_sign(sign)) ? wc.iota_ge : wc.iota_lt;
}

// ---------------------------------------------------------------------------
// Forward prediction of theta invariants from signed invariants.
// ---------------------------------------------------------------------------
struct SignedInvariants {
    Int lambda_plus;
    Int lambda_minus;
    Rat mu_plus = 0;
    Rat mu_minus = 0;
};

inline InvariantPair predict_theta_invariants(const PrimeContext& ctx, long k, long j,
                                              const SignedInvariants& sig, long n) {
    WeightConstants wc = weight_constants(ctx, k);
    const int s = eps_n(n + 1);        // ε_{n+1}
    const int ss = star_sign(ctx, s);  // ⋆ε_{n+1}
    const Int lam = (ss > 0) ? sig.lambda_plus : sig.lambda_minus;
    const Rat mu = (ss > 0) ? sig.mu_plus : sig.mu_minus;
    Int iota;
    if (!wc.branch_pair) {
        iota = wc.iota;
    } else if (lam >= wc.nu_sign(s)) {
        if (ctx.e != 1) {
            throw unsupported_branch(
                "prediction at k = p+2 mod (p^2-1) with lambda >= nu requires an unramified "
                "coefficient field");
        }
        iota = wc.iota_ge;
    } else {
        iota = wc.iota_lt;
    }
    const Int Ceps = wc.C_sign(eps_n(n));
    const Int binom_kj = binomial(Int(k - 2), static_cast<unsigned long>(j));
    Val extra = ordp(Int(Ceps * binom_kj), ctx.p);
    InvariantPair out;
    Int lam_out = lam + Int(k - 1) * qn(ctx, n) - iota * ctx.t_n(n);
    out.lambda = mpz_get_si(lam_out.get_mpz_t());
    out.mu = mu + Rat(iota) + extra.v;
    return out;
}

// ---------------------------------------------------------------------------
// Oracle for the half-log projection identities: invariants of
// π_n(η^j(L·log_{k,n}^{ε_{n+1}})), directly and via the closed form.
// ---------------------------------------------------------------------------
struct LfknRecord {
    InvariantPair direct;
    InvariantPair formula;
    Int I;
    bool match = false;
};

inline LfknRecord lfkn_oracle(const PrimeContext& ctx, long k, long n, long j,
                              const QSeries& L) {
    if (ctx.e != 1) throw ramified_context("lfkn_oracle requires an unramified context");
    InvariantPair invL = invariants(L, ctx);
    const int s = eps_n(n + 1);
    LfknRecord rec;
    rec.I = cap_I(ctx, k, s, Int(invL.lambda));

    QSeries prod;
    prod.c = poly_mul(L.c, half_log_layer(ctx, k, n, s));
    rec.direct = invariants(project(eta(prod, j, ctx), ctx, n), ctx);

    Int lam = Int(invL.lambda) + Int(k - 1) * qn(ctx, n) - rec.I * ctx.t_n(n);
    rec.formula.lambda = mpz_get_si(lam.get_mpz_t());
    rec.formula.mu = invL.mu + Rat(rec.I);
    rec.match = (rec.direct == rec.formula);
    return rec;
}

}  // namespace mt
