#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "mt/arith.hpp"
#include "mt/cyclotomic.hpp"
#include "mt/errors.hpp"
#include "mt/iwasawa.hpp"
#include "mt/modular_symbols.hpp"
#include "mt/qpoly.hpp"
#include "mt/zq.hpp"

namespace mt {

// Theta elements at the finite cyclotomic layers: assembly from path values
// of the eigensymbols, Iwasawa invariants, and the exact internal identities
// (Hecke/3-term relation, interpolation-zero divisibility, and the
// character-valuation identity).

// The two normalized eigensymbols of one form plus the p-data needed by the
// relations.
template <class S>
struct SymbolPair {
    SymbolSpacePtr space;
    long k = 2;          // weight
    S ap = S{};         // a_p of the form (a_p = 0 in the signed theory)
    int eps_p = 1;       // nebentype value at p (trivial character: 1)
    EigenSymbolT<S> plus;
    EigenSymbolT<S> minus;
    std::string label;

    const EigenSymbolT<S>& by_sign(int s) const { return s > 0 ? plus : minus; }
};

// The sign * = sgn psi(-1)(-1)^{k-j} selecting which eigensymbol feeds theta;
// psi = omega^i has psi(-1) = (-1)^i.
inline int theta_sign(long k, long j, long psi_exp) {
    return ((psi_exp + k - j) % 2 == 0) ? +1 : -1;
}

template <class S>
struct ThetaElement {
    std::vector<S> exps;  // group-ring coefficients, index = exponent in [0, p^n)
    Series<S> poly;       // image under gamma_n -> 1+T
    std::string form_label;
    Int p;
    long n = 0;
    long j = 0;
    long psi_exp = 0;
    Int gamma;
    int sign = +1;
};

// (1+T)-power assembly of a group-ring coefficient vector.
template <class S>
Series<S> assemble_group_ring(const std::vector<S>& exps, Exactness ex) {
    Series<S> out;
    out.exactness = ex;
    out.c.assign(exps.size(), S{});
    for (size_t e = 0; e < exps.size(); ++e) {
        if (s_is_zero(exps[e])) continue;
        for (size_t i = 0; i <= e; ++i) {
            out.c[i] = out.c[i] + s_mul_rat(exps[e], Rat(binomial(Int(e), i)));
        }
    }
    poly_trim(out.c);
    return out;
}

// theta_{n,j} for trivial psi: exact coefficients in S.
template <class S>
ThetaElement<S> theta(const SymbolPair<S>& F, const PrimeContext& ctx, long n, long j) {
    if (j < 0 || j > F.k - 2) throw schema_error("theta: j out of range [0, k-2]");
    ThetaElement<S> th;
    th.form_label = F.label;
    th.p = ctx.p;
    th.n = n;
    th.j = j;
    th.psi_exp = 0;
    th.gamma = ctx.gamma;
    th.sign = theta_sign(F.k, j, 0);
    const EigenSymbolT<S>& es = F.by_sign(th.sign);
    const Int pN = ctx.p_pow(ctx.N_of(n));
    const unsigned long pn = mpz_get_ui(ctx.p_pow(n).get_mpz_t());
    th.exps.assign(pn, S{});
    for (Int a = 1; a < pN; ++a) {
        if (gcd_int(a, ctx.p) != 1) continue;
        std::vector<S> br = evaluate_path(es, a, pN);
        unsigned long e = mpz_get_ui(discrete_log_gamma(a, ctx, n).get_mpz_t());
        th.exps[e] = th.exps[e] + br[j];
    }
    th.poly = assemble_group_ring(th.exps, Exactness::kExact);
    return th;
}

inline Zq to_zq(const Rat& x, const ZqRingPtr& ring, const PrimeContext&) {
    return Zq::from_rat(ring, x);
}
inline Zq to_zq(const NFElem& x, const ZqRingPtr& ring, const PrimeContext& ctx) {
    if (x.is_rational()) return Zq::from_rat(ring, x.rat());
    if (!ctx.embedding) throw internal_error("to_zq: no embedding for NF coefficients");
    return Zq::from_nf(ring, x, *ctx.embedding);
}

// theta_{n,j}^psi for psi = omega^{psi_exp}: Teichmüller values are genuine
// p-adics, so coefficients are truncated residues mod p^M with M = ctx.M.
template <class S>
ThetaElement<Zq> theta_twisted(const SymbolPair<S>& F, const PrimeContext& ctx, long n,
                               long j, long psi_exp) {
    if (j < 0 || j > F.k - 2) throw schema_error("theta: j out of range [0, k-2]");
    ZqRingPtr ring = ctx.embedding && !ctx.embedding->ramified()
                         ? ZqRing::from_embedding(*ctx.embedding)
                         : ZqRing::make_zp(ctx.p, ctx.M);
    if (ctx.embedding && ctx.embedding->ramified()) {
        throw ramified_prime("theta_twisted: ramified coefficient prime");
    }
    ThetaElement<Zq> th;
    th.form_label = F.label;
    th.p = ctx.p;
    th.n = n;
    th.j = j;
    th.psi_exp = psi_exp;
    th.gamma = ctx.gamma;
    th.sign = theta_sign(F.k, j, psi_exp);
    const EigenSymbolT<S>& es = F.by_sign(th.sign);
    const Int pN = ctx.p_pow(ctx.N_of(n));
    const unsigned long pn = mpz_get_ui(ctx.p_pow(n).get_mpz_t());
    th.exps.assign(pn, Zq());
    for (Int a = 1; a < pN; ++a) {
        if (gcd_int(a, ctx.p) != 1) continue;
        std::vector<S> br = evaluate_path(es, a, pN);
        Zq val = to_zq(br[j], ring, ctx);
        if (psi_exp != 0) {
            Int w = mod_pow(teichmuller(a, ctx), Int(psi_exp), ring->pM);
            val = val * Zq::from_int(ring, w);
        }
        unsigned long e = mpz_get_ui(discrete_log_gamma(a, ctx, n).get_mpz_t());
        th.exps[e] = th.exps[e] + val;
    }
    th.poly = assemble_group_ring(th.exps, Exactness::kTruncated);
    return th;
}

template <class S>
InvariantPair theta_invariants(const ThetaElement<S>& th, const PrimeContext& ctx) {
    return invariants(th.poly, ctx);
}

// ---------------------------------------------------------------------------
// 3-term relation on group-ring coefficient vectors:
//   res(theta_{n+1}) = a_p theta_n - eps(p) p^{k-2} cor(theta_{n-1}),
// with res reducing exponents mod p^n and cor lifting e mod p^{n-1} to the
// fiber {e + t p^{n-1} : 0 <= t < p} mod p^n.  Returns the residual vector
// (all entries zero iff the relation holds).
// ---------------------------------------------------------------------------
template <class S>
std::vector<S> three_term_residual(const ThetaElement<S>& prev, const ThetaElement<S>& cur,
                                   const ThetaElement<S>& next, const S& ap, int eps_p,
                                   long k, const PrimeContext& ctx) {
    const long n = cur.n;
    if (prev.n != n - 1 || next.n != n + 1 || n < 1) {
        throw schema_error("three_term_residual: need layers n-1, n, n+1 with n >= 1");
    }
    if (prev.j != cur.j || next.j != cur.j || prev.psi_exp != cur.psi_exp ||
        next.psi_exp != cur.psi_exp || prev.gamma != cur.gamma || next.gamma != cur.gamma) {
        throw schema_error("three_term_residual: mismatched theta metadata");
    }
    const unsigned long pn = mpz_get_ui(ctx.p_pow(n).get_mpz_t());
    const unsigned long pn1 = mpz_get_ui(ctx.p_pow(n - 1).get_mpz_t());
    const unsigned long pl = mpz_get_ui(ctx.p.get_mpz_t());
    std::vector<S> r(pn, S{});
    for (size_t e = 0; e < next.exps.size(); ++e) {
        r[e % pn] = r[e % pn] + next.exps[e];
    }
    for (size_t e = 0; e < cur.exps.size(); ++e) {
        r[e] = r[e] - ap * cur.exps[e];
    }
    const Rat c = Rat(eps_p) * Rat(pow_int(ctx.p, static_cast<unsigned long>(k - 2)));
    for (size_t e = 0; e < prev.exps.size(); ++e) {
        if (s_is_zero(prev.exps[e])) continue;
        for (unsigned long t = 0; t < pl; ++t) {
            size_t idx = (e + t * pn1) % pn;
            r[idx] = r[idx] + s_mul_rat(prev.exps[e], c);
        }
    }
    return r;
}

template <class S>
bool three_term_holds(const std::vector<S>& residual) {
    for (const S& x : residual) {
        if (!s_is_zero(x)) return false;
    }
    return true;
}

// The underlying Hecke relation on raw brackets, including the degenerate
// base where the denominator m/p collapses to 1 (the [0/1] path):
//   sum_{b = a mod m} [b/pm]_j = a_p [a/m]_j - eps(p) p^{k-2} [a/(m/p)]_j.
template <class S>
bool hecke_bracket_check(const SymbolPair<S>& F, const PrimeContext& ctx, int sign,
                         const Int& m, const Int& a) {
    if (mod_reduce(m, ctx.p) != 0) throw schema_error("hecke_bracket_check: p must divide m");
    if (gcd_int(a, m) != 1 && m != 1) throw schema_error("hecke_bracket_check: a not a unit");
    const EigenSymbolT<S>& es = F.by_sign(sign);
    const Int pm = ctx.p * m;
    const Int mp = m / ctx.p;
    const long w = F.k - 2;
    std::vector<S> lhs(w + 1, S{});
    for (Int t = 0; t < ctx.p; ++t) {
        std::vector<S> br = evaluate_path(es, a + t * m, pm);
        for (long i = 0; i <= w; ++i) lhs[i] = lhs[i] + br[i];
    }
    std::vector<S> mid = evaluate_path(es, a, m);
    std::vector<S> low = evaluate_path(es, mp == 1 ? Int(0) : mod_reduce(a, mp), mp);
    const Rat c = Rat(F.eps_p) * Rat(pow_int(ctx.p, static_cast<unsigned long>(F.k - 2)));
    for (long i = 0; i <= w; ++i) {
        S rhs = F.ap * mid[i] - s_mul_rat(low[i], c);
        if (!s_is_zero(lhs[i] - rhs)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Interpolation zeros: theta_n is divisible by the product of Phi_i(1+T)
// over 1 <= i <= n with eps_i = star (N even) resp. -star (N odd), where
// star = + for p odd and - for p = 2.
// ---------------------------------------------------------------------------
inline std::vector<Int> interpolation_divisor(const PrimeContext& ctx, long n) {
    const long N = ctx.N_of(n);
    int s = star_sign(ctx, +1);
    if (N % 2 != 0) s = -s;
    std::vector<Int> d{Int(1)};
    for (long i = 1; i <= n; ++i) {
        if (eps_n(i) != s) continue;
        std::vector<Int> f = phi_poly_shifted(ctx, i);
        std::vector<Int> prod(d.size() + f.size() - 1, Int(0));
        for (size_t x = 0; x < d.size(); ++x) {
            for (size_t y = 0; y < f.size(); ++y) prod[x + y] += d[x] * f[y];
        }
        d = std::move(prod);
    }
    return d;
}

template <class S>
bool interpolation_zero_check(const ThetaElement<S>& th, const PrimeContext& ctx) {
    std::vector<Int> d = interpolation_divisor(ctx, th.n);
    if (d.size() <= 1) return true;  // empty product
    auto [q, r] = poly_divrem_monic(th.poly.c, d);
    (void)q;
    for (const S& x : r) {
        if (!s_is_zero(x)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Character valuation: ord_p theta(zeta_n - 1) via the resultant against
// Phi_n(1+T), compared with mu + lambda/t_n.
// ---------------------------------------------------------------------------
struct CharValReport {
    bool infinite = false;  // theta divisible by Phi_n(1+T)
    Rat resultant_side = 0;
    Rat invariant_side = 0;
    bool match = false;
};

inline CharValReport character_valuation(const ThetaElement<Rat>& th, const PrimeContext& ctx) {
    if (th.n < 1) throw schema_error("character_valuation: n >= 1 required");
    CharValReport rep;
    std::vector<Int> A = phi_poly_shifted(ctx, th.n);
    try {
        Val v = resultant_valuation(A, th.poly.c, ctx);
        rep.resultant_side = v.v / Rat(ctx.t_n(th.n));
    } catch (const Error& e) {
        if (e.code() == "ZeroResultant") {
            rep.infinite = true;
            return rep;
        }
        throw;
    }
    InvariantPair inv = invariants(th.poly, ctx);
    rep.invariant_side = inv.mu + Rat(inv.lambda) / Rat(ctx.t_n(th.n));
    rep.match = (rep.resultant_side == rep.invariant_side);
    return rep;
}

// Augmentation consistency: theta(0) equals the plain sum of the group-ring
// coefficients.
template <class S>
bool augmentation_consistent(const ThetaElement<S>& th) {
    S total = S{};
    for (const S& x : th.exps) total = total + x;
    S head = th.poly.c.empty() ? S{} : th.poly.c[0];
    return s_is_zero(total - head);
}

}  // namespace mt
