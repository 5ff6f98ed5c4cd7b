#pragma once

#include <gmpxx.h>

#include <vector>

#include "mt/errors.hpp"
#include "mt/modular.hpp"
#include "mt/poly.hpp"
#include "mt/prime_context.hpp"
#include "mt/valuation.hpp"

namespace mt {

// Rational-coefficient polynomial extras: Euclidean division, exact
// resultants, and the p-adic valuation of Res(A, B) with a fast path for
// Eisenstein moduli (the only large-degree case the library needs).

inline std::pair<std::vector<Rat>, std::vector<Rat>> qpoly_divrem(std::vector<Rat> a,
                                                                  const std::vector<Rat>& b) {
    poly_trim(a);
    if (b.empty()) throw internal_error("qpoly_divrem: division by zero");
    std::vector<Rat> q;
    if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, Rat(0));
    while (a.size() >= b.size()) {
        Rat c = a.back() / b.back();
        size_t shift = a.size() - b.size();
        q[shift] = c;
        for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
        poly_trim(a);
    }
    return {q, a};
}

// Exact resultant over Q via the Euclidean recurrence
//   Res(A,B) = (−1)^{deg A · deg B} · lc(B)^{deg A − deg R} · Res(B, R).
inline Rat resultant_q(std::vector<Rat> A, std::vector<Rat> B) {
    poly_trim(A);
    poly_trim(B);
    if (A.empty() || B.empty()) return Rat(0);
    Rat acc = 1;
    bool negate = false;
    while (true) {
        if (B.size() == 1) {
            Rat r = acc;
            if (negate) r = -r;
            // lc(B)^{deg A}
            for (size_t i = 0; i + 1 < A.size(); ++i) r *= B[0];
            return r;
        }
        auto rem = qpoly_divrem(A, B).second;
        if (rem.empty()) return Rat(0);
        long degA = static_cast<long>(A.size()) - 1;
        long degB = static_cast<long>(B.size()) - 1;
        long degR = static_cast<long>(rem.size()) - 1;
        if ((degA * degB) % 2 != 0) negate = !negate;
        Rat lead = B.back();
        for (long i = 0; i < degA - degR; ++i) acc *= lead;
        A = std::move(B);
        B = std::move(rem);
    }
}

// True when A is monic, congruent to T^{deg A} mod p, with ord_p A(0) = 1:
// then A is Eisenstein-like (its roots are uniformizers of a totally ramified
// extension of degree deg A) and B(root) has valuation
// min_i (ord_p c_i + i/deg A) for the remainder B mod A = sum c_i T^i, the
// terms having pairwise distinct valuations.
inline bool eisenstein_at_p(const std::vector<Int>& A, const Int& p) {
    if (A.size() < 2 || A.back() != 1) return false;
    if (A[0] == 0 || mod_reduce(A[0], p * p) == 0 || mod_reduce(A[0], p) != 0) return false;
    for (size_t i = 0; i + 1 < A.size(); ++i) {
        if (mod_reduce(A[i], p) != 0) return false;
    }
    return true;
}

// ord_p Res(A, B) for monic integer A and rational B.  Throws ZeroResultant
// when B vanishes at a root of A.
inline Val resultant_valuation(const std::vector<Int>& A, const std::vector<Rat>& B,
                               const PrimeContext& ctx) {
    std::vector<Int> Atrim = A;
    while (!Atrim.empty() && Atrim.back() == 0) Atrim.pop_back();
    if (Atrim.empty() || Atrim.back() != 1) {
        throw internal_error("resultant_valuation: A must be monic");
    }
    std::vector<Rat> Bt = B;
    poly_trim(Bt);
    if (Bt.empty()) throw zero_resultant("resultant_valuation: B = 0");
    const long degA = static_cast<long>(Atrim.size()) - 1;
    if (degA == 0) return Val::of(0L);

    if (eisenstein_at_p(Atrim, ctx.p)) {
        auto rem = poly_divrem_monic(Bt, Atrim).second;
        if (rem.empty()) throw zero_resultant("B vanishes at the roots of A");
        Val best = Val::infinity();
        for (size_t i = 0; i < rem.size(); ++i) {
            if (rem[i] == 0) continue;
            Val v = ordp(rem[i], ctx.p);
            Val term = Val::of(v.v + Rat(Int(static_cast<long>(i))) / Rat(Int(degA)));
            if (term < best) best = term;
        }
        return Val::of(best.v * degA);
    }

    Rat res = resultant_q(poly_rat_of_int(Atrim), Bt);
    if (res == 0) throw zero_resultant("B vanishes at a root of A");
    return ordp(res, ctx.p);
}

}  // namespace mt
