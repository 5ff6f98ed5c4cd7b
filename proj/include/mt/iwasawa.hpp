#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "mt/errors.hpp"
#include "mt/poly.hpp"
#include "mt/prime_context.hpp"
#include "mt/scalar_traits.hpp"
#include "mt/valuation.hpp"

namespace mt {

// Elements of Λ = O[[T]] (stored as finite polynomials) and Λ_n = O[T]/(ω_n),
// their Iwasawa invariants, the projection π_n with explicit division terms,
// and the p-large / Newton-polygon transfer apparatus.

enum class Exactness { kExact, kTruncated };

template <class S>
struct Series {
    std::vector<S> c;  // index i = coefficient of T^i
    Exactness exactness = Exactness::kExact;
};

using QSeries = Series<Rat>;
using NFSeries = Series<NFElem>;
using ZqSeries = Series<Zq>;

struct InvariantPair {
    long lambda = 0;
    Rat mu = 0;  // denominator divides e; integer when e = 1

    friend bool operator==(const InvariantPair& a, const InvariantPair& b) {
        return a.lambda == b.lambda && a.mu == b.mu;
    }
};

// ω_n = (1+T)^{p^n} − 1 as an exact integer polynomial.
inline std::vector<Int> omega_n(const PrimeContext& ctx, long n) {
    Int pn = ctx.p_pow(n);
    unsigned long deg = mpz_get_ui(pn.get_mpz_t());
    std::vector<Int> w(deg + 1);
    for (unsigned long i = 0; i <= deg; ++i) w[i] = binomial(pn, i);
    w[0] -= 1;  // (1+T)^{p^n} − 1
    return w;
}

// μ = min valuation over coefficients, λ = first index achieving it.
template <class S>
InvariantPair invariants(const Series<S>& F, const PrimeContext& ctx) {
    std::optional<long> lambda;
    Val mu = Val::infinity();
    bool any_uncertain = false;
    for (size_t i = 0; i < F.c.size(); ++i) {
        auto [v, certain] = s_ordp(F.c[i], ctx);
        if (!certain) {
            any_uncertain = true;
            continue;  // valuation >= M; cannot achieve a minimum below M
        }
        if (!v.is_finite()) continue;
        if (v < mu) {
            mu = v;
            lambda = static_cast<long>(i);
        }
    }
    if (!lambda) {
        if (any_uncertain) {
            throw precision_insufficient("invariants: all coefficients vanish mod p^M");
        }
        throw zero_series("invariants of the zero series");
    }
    if (F.exactness == Exactness::kTruncated && mu >= Val::of(ctx.M)) {
        throw precision_insufficient("invariants: mu >= working precision M");
    }
    return InvariantPair{*lambda, mu.v};
}

// π_n: remainder of exact division by the monic integer polynomial ω_n.
template <class S>
Series<S> project(const Series<S>& F, const PrimeContext& ctx, long n) {
    Series<S> r;
    r.exactness = F.exactness;
    r.c = poly_divrem_monic(F.c, omega_n(ctx, n)).second;
    return r;
}

// R(N)_n and Q(N)_n with N = R + Q·t_n, 0 ≤ R < t_n.
struct RQ {
    Int R;
    Int Q;
};
inline RQ remainder_quotient(const Int& N, const PrimeContext& ctx, long n) {
    Int t = ctx.t_n(n);
    RQ rq;
    mpz_fdiv_qr(rq.Q.get_mpz_t(), rq.R.get_mpz_t(), N.get_mpz_t(), t.get_mpz_t());
    return rq;
}

// Division terms c_{N,n}^{(i)}: T^{p^n+N} ≡ Σ_i c_{N,n}^{(i)} T^i mod ω_n.
// Base row c_0^{(i)} = −C(p^n, i); recursion
//   c_N^{(i)} = c_{N−1}^{(i−1)} + c_{N−1}^{(p^n−1)}·c_0^{(i)},  c^{(0)} := 0.
// Row N is stored as a vector indexed by i−1 for 1 ≤ i ≤ p^n−1.
inline std::vector<std::vector<Int>> division_terms(const PrimeContext& ctx, long n, long N_max) {
    if (n < 1) throw internal_error("division_terms: n >= 1 required");
    Int pn = ctx.p_pow(n);
    unsigned long dim = mpz_get_ui(pn.get_mpz_t()) - 1;
    std::vector<std::vector<Int>> table;
    table.reserve(N_max + 1);
    std::vector<Int> base(dim);
    for (unsigned long i = 1; i <= dim; ++i) base[i - 1] = -binomial(pn, i);
    table.push_back(base);
    for (long N = 1; N <= N_max; ++N) {
        const std::vector<Int>& prev = table.back();
        const Int& top = prev[dim - 1];  // c_{N−1}^{(p^n−1)}
        std::vector<Int> row(dim);
        for (unsigned long i = 1; i <= dim; ++i) {
            Int shifted = (i >= 2) ? prev[i - 2] : Int(0);
            row[i - 1] = shifted + top * base[i - 1];
        }
        table.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// p-largeness (valuation profile), Newton polygon, B_n region.
// ---------------------------------------------------------------------------
struct PLargeProfile {
    Int R;
    Int Q;
    Int t_n;
    long lambda = 0;
    Rat mu = 0;
    std::vector<Rat> v;  // v_i(F, n) for 0 ≤ i ≤ λ−1
};

template <class S>
PLargeProfile p_large_profile(const Series<S>& F, const PrimeContext& ctx, long n) {
    InvariantPair inv = invariants(F, ctx);
    Int pn = ctx.p_pow(n);
    if (Int(inv.lambda) < pn) {
        throw not_p_large("p_large_profile: lambda(F) < p^n");
    }
    PLargeProfile prof;
    prof.t_n = ctx.t_n(n);
    prof.lambda = inv.lambda;
    prof.mu = inv.mu;
    RQ rq = remainder_quotient(Int(inv.lambda) - pn, ctx, n);
    prof.R = rq.R;
    prof.Q = rq.Q;
    const Rat inv_e = Rat(1) / Rat(Int(ctx.e));
    const Int pn1 = ctx.p_pow(n - 1);
    const Int edge = prof.R + pn1;  // R + p^{n−1}
    prof.v.resize(inv.lambda);
    for (long i = 0; i < inv.lambda; ++i) {
        Rat vi;
        if (Int(i) <= edge) {
            vi = prof.mu + Rat(prof.Q) + 1 + inv_e;
        } else if (Int(i) <= pn - 1) {
            vi = prof.mu + Rat(prof.Q) + 1;
        } else {
            RQ loc = remainder_quotient(Int(i) - pn, ctx, n);
            if (loc.R <= prof.R) {
                vi = prof.mu + Rat(prof.Q) - Rat(loc.Q) + inv_e;
            } else {
                vi = prof.mu + Rat(prof.Q) - Rat(loc.Q);
            }
        }
        prof.v[i] = vi;
    }
    return prof;
}

template <class S>
bool is_p_large(const Series<S>& F, const PrimeContext& ctx, long n, std::string* reason = nullptr) {
    InvariantPair inv = invariants(F, ctx);
    if (Int(inv.lambda) < ctx.p_pow(n)) {
        if (reason) *reason = "lambda < p^n";
        return false;
    }
    PLargeProfile prof = p_large_profile(F, ctx, n);
    for (long i = 0; i < inv.lambda; ++i) {
        auto [v, certain] = s_ordp(F.c[i], ctx);
        if (!v.is_finite()) continue;  // zero coefficient: bound vacuous
        if (!certain) {
            if (Val::of(prof.v[i]) <= v) continue;  // v_i ≤ M ≤ true valuation
            throw precision_insufficient("is_p_large: cannot verify bound beyond p^M");
        }
        if (v < Val::of(prof.v[i])) {
            if (reason) {
                *reason = "ord_p a_" + std::to_string(i) + " = " + v.str() + " < v_i = " +
                          prof.v[i].get_str();
            }
            return false;
        }
    }
    return true;
}

struct NewtonPolygon {
    std::vector<std::pair<Int, Rat>> vertices;  // (i, ord_p a_i) on the lower hull
};

// Lower convex hull (Andrew monotone chain) of the finite-valuation points of
// the truncation to degree `upto`.
template <class S>
NewtonPolygon newton_polygon(const Series<S>& F, const PrimeContext& ctx, long upto) {
    std::vector<std::pair<Int, Rat>> pts;
    for (long i = 0; i <= upto && i < static_cast<long>(F.c.size()); ++i) {
        auto [v, certain] = s_ordp(F.c[i], ctx);
        if (!certain || !v.is_finite()) continue;
        pts.emplace_back(Int(i), v.v);
    }
    NewtonPolygon np;
    for (const auto& pt : pts) {
        auto& h = np.vertices;
        while (h.size() >= 2) {
            const auto& o = h[h.size() - 2];
            const auto& a = h[h.size() - 1];
            Rat cross = Rat(a.first - o.first) * (pt.second - o.second) -
                        (a.second - o.second) * Rat(pt.first - o.first);
            if (cross <= 0) {
                h.pop_back();
            } else {
                break;
            }
        }
        np.vertices.push_back(pt);
    }
    return np;
}

// The boundary function f_F of the region B_n(F), evaluated at integer x.
inline Rat b_region_boundary(const PLargeProfile& prof, const PrimeContext& ctx, long n,
                             const Int& x) {
    const Int pn1 = ctx.p_pow(n - 1);
    const Int edge = prof.R + pn1;
    const Rat mu = prof.mu;
    if (prof.Q == 0) {
        // Decreasing line to μ+1, then flat.
        if (x <= edge + 1) {
            return mu + 2 - Rat(x) / Rat(edge + 1);
        }
        return mu + 1;
    }
    if (x <= edge) return mu + 2 + Rat(prof.Q);
    Int flat_from = Int(prof.lambda) - prof.t_n + 1;
    if (x >= flat_from) return mu + 1;
    // Linear from (edge, μ+2+Q) down to (λ−t_n+1, μ+1).
    Rat slope = -Rat(prof.Q + 1) / Rat(prof.Q * prof.t_n + 1);
    return mu + 2 + Rat(prof.Q) + slope * Rat(x - edge);
}

// Newton polygon of the degree-(λ−1) truncation contained in B_n(F)?
// Checked at every integer abscissa (both boundaries are linear on unit
// intervals).  Refused for ramified coefficients.
template <class S>
bool b_region_contains(const Series<S>& F, const PrimeContext& ctx, long n) {
    if (ctx.e != 1) throw ramified_context("b_region_contains requires e = 1");
    InvariantPair inv = invariants(F, ctx);
    if (Int(inv.lambda) < ctx.p_pow(n)) {
        throw not_p_large("b_region_contains: lambda(F) < p^n");
    }
    PLargeProfile prof = p_large_profile(F, ctx, n);
    NewtonPolygon np = newton_polygon(F, ctx, inv.lambda - 1);
    if (np.vertices.empty()) return true;
    size_t seg = 0;
    for (Int i = np.vertices.front().first; i <= np.vertices.back().first; ++i) {
        while (seg + 1 < np.vertices.size() && np.vertices[seg + 1].first < i) ++seg;
        Rat hull;
        if (np.vertices[seg].first == i) {
            hull = np.vertices[seg].second;
        } else {
            const auto& a = np.vertices[seg];
            const auto& b = np.vertices[seg + 1];
            hull = a.second + (b.second - a.second) * Rat(i - a.first) / Rat(b.first - a.first);
        }
        if (hull < b_region_boundary(prof, ctx, n, i)) return false;
    }
    return true;
}

// Layer invariants through Theorem "mainpl": valid only for p-large F.
template <class S>
InvariantPair layer_invariants_via_theorem(const Series<S>& F, const PrimeContext& ctx, long n) {
    std::string reason;
    if (!is_p_large(F, ctx, n, &reason)) {
        throw not_p_large("layer_invariants_via_theorem: " + reason);
    }
    PLargeProfile prof = p_large_profile(F, ctx, n);
    InvariantPair out;
    out.lambda = mpz_get_si(Int(prof.R + ctx.p_pow(n - 1)).get_mpz_t());
    out.mu = prof.mu + Rat(prof.Q) + 1;
    return out;
}

}  // namespace mt
