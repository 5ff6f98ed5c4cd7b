#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "mt/cyclotomic.hpp"
#include "mt/errors.hpp"
#include "mt/prime_context.hpp"

namespace mt {

// Inverting the layer formula: from a table of theta invariants, infer the
// signed invariants lambda^{+/-} (and mu when supplied), the branch and the
// iota value used; generalized residual fitting; and the congruent-forms
// lambda comparison between weights p+1 and 2.

struct ThetaTableRow {
    long n = 0;
    Int lambda;
    std::optional<Rat> mu;
};

struct ThetaTable {
    std::vector<ThetaTableRow> rows;
    Int p;
    long k = 2;
    long j = 0;
    long psi_exp = 0;
    std::string label;

    void validate(const PrimeContext& ctx) const {
        long last = 0;
        for (const auto& r : rows) {
            if (r.n <= last && !(last == 0 && r.n >= 1)) {
                throw schema_error("theta table: n must be strictly increasing");
            }
            if (r.n <= 0) throw schema_error("theta table: n >= 1 required");
            if (r.lambda < 0 || r.lambda >= ctx.p_pow(r.n)) {
                throw schema_error("theta table: lambda(theta_n) must lie in [0, p^n)");
            }
            last = r.n;
        }
    }
};

// Result for one star-sign (* = the superscript of lambda^*).
struct ParityResult {
    bool stable = false;
    Int lambda;               // stable residual = lambda^{star eps_{n+1}}
    std::optional<Rat> mu;    // when mu rows were supplied
    Int iota;                 // the iota^* used
    std::string branch;       // "i", "ii", or "iii"
    long n0 = -1;             // first n of this parity from which residuals are constant
    std::vector<std::pair<long, Int>> residuals;  // (n, residual) trajectory
};

struct ExtractionReport {
    ParityResult plus;   // lambda^+ data
    ParityResult minus;  // lambda^- data
    std::string branch;  // common branch label ("i" or the pair branch used)
    long n0 = -1;        // max of the per-parity stabilization indices

    const ParityResult& by_sign(int s) const { return s > 0 ? plus : minus; }
};

namespace detail {

// Residual trajectory for one parity class (rows with eps_{n+1} = s) and a
// candidate iota: r_n = lambda(theta_n) - (k-1) q_n + iota * t_n.
inline ParityResult try_branch(const ThetaTable& T, const PrimeContext& ctx, int s,
                               const Int& iota, const std::string& branch) {
    ParityResult out;
    out.iota = iota;
    out.branch = branch;
    for (const auto& r : T.rows) {
        if (eps_n(r.n + 1) != s) continue;
        Int resid = r.lambda - Int(T.k - 1) * qn(ctx, r.n) + iota * ctx.t_n(r.n);
        out.residuals.push_back({r.n, resid});
    }
    const size_t m = out.residuals.size();
    if (m < 2) return out;  // not enough data: unstable
    if (out.residuals[m - 1].second != out.residuals[m - 2].second) return out;
    out.stable = true;
    out.lambda = out.residuals[m - 1].second;
    // First row of this parity from which the residual stays constant.
    size_t i0 = m - 2;
    while (i0 > 0 && out.residuals[i0 - 1].second == out.lambda) --i0;
    out.n0 = out.residuals[i0].first;
    // mu extraction when mu rows are present for the stable range.
    WeightConstants wc = weight_constants(ctx, T.k);
    bool have_mu = true;
    std::optional<Rat> mu_val;
    for (const auto& r : T.rows) {
        if (eps_n(r.n + 1) != s || r.n < out.n0) continue;
        if (!r.mu) {
            have_mu = false;
            break;
        }
        Val extra = ordp(Int(wc.C_sign(eps_n(r.n)) * binomial(Int(T.k - 2),
                                                              static_cast<unsigned long>(T.j))),
                         ctx.p);
        Rat cand = *r.mu - Rat(iota) - extra.v;
        if (mu_val && *mu_val != cand) {
            have_mu = false;
            break;
        }
        mu_val = cand;
    }
    if (have_mu && mu_val) out.mu = mu_val;
    return out;
}

}  // namespace detail

inline ExtractionReport extract_signed_invariants(const ThetaTable& T,
                                                  const PrimeContext& ctx) {
    T.validate(ctx);
    for (int s : {+1, -1}) {
        long cnt = 0;
        for (const auto& r : T.rows) {
            if (eps_n(r.n + 1) == s) ++cnt;
        }
        if (cnt < 2) throw schema_error("extract: need at least 2 rows of each parity");
    }
    WeightConstants wc = weight_constants(ctx, T.k);
    ExtractionReport rep;
    std::string trajectories;
    for (int star : {+1, -1}) {
        // Parity class: rows govern lambda^{star eps_{n+1}}; the star-sign of
        // the reported invariant is star, so s = eps_{n+1} satisfies
        // star_sign(s) = star.
        int s = star_sign(ctx, star);
        std::vector<ParityResult> accepted;
        if (!wc.branch_pair) {
            ParityResult r = detail::try_branch(T, ctx, s, wc.iota, "i");
            if (r.stable) accepted.push_back(r);
        } else {
            ParityResult rii = detail::try_branch(T, ctx, s, wc.iota_lt, "ii");
            if (rii.stable && rii.lambda < wc.nu_sign(star)) accepted.push_back(rii);
            ParityResult riii = detail::try_branch(T, ctx, s, wc.iota_ge, "iii");
            if (riii.stable && riii.lambda >= wc.nu_sign(star)) accepted.push_back(riii);
        }
        if (accepted.empty()) {
            // Report the trajectories for diagnosis.
            std::string msg = "extract: no branch stabilizes for lambda^" +
                              std::string(star > 0 ? "+" : "-") + " (residuals:";
            ParityResult probe = detail::try_branch(
                T, ctx, s, wc.branch_pair ? wc.iota_lt : wc.iota, "?");
            for (auto& [n, v] : probe.residuals) {
                msg += " n" + std::to_string(n) + ":" + v.get_str();
            }
            throw unstable(msg + ")");
        }
        if (accepted.size() > 1) {
            throw inconsistent_branches("extract: branches " + accepted[0].branch + " and " +
                                        accepted[1].branch +
                                        " both stabilize consistently for lambda^" +
                                        std::string(star > 0 ? "+" : "-"));
        }
        (star > 0 ? rep.plus : rep.minus) = accepted[0];
    }
    if (rep.plus.branch != rep.minus.branch && wc.branch_pair) {
        throw inconsistent_branches("extract: mixed branches " + rep.plus.branch + "/" +
                                    rep.minus.branch + " across parities");
    }
    rep.branch = rep.plus.branch;
    rep.n0 = std::max(rep.plus.n0, rep.minus.n0);
    return rep;
}

// ---------------------------------------------------------------------------
// Generalized fit: least c >= 0 with lambda(theta_n) = (k-1)q_n - c t_n + r
// for per-parity constants r on the tail rows.
// ---------------------------------------------------------------------------
struct GeneralizedFit {
    Int c;
    Int r_odd;   // residual on odd n (governs lambda^{star+})
    Int r_even;  // residual on even n
    long n0 = -1;
};

inline GeneralizedFit generalized_fit(const ThetaTable& T, const PrimeContext& ctx,
                                      long c_max = 64) {
    T.validate(ctx);
    for (int par : {0, 1}) {
        long cnt = 0;
        for (const auto& r : T.rows) {
            if (r.n % 2 == par) ++cnt;
        }
        if (cnt < 3) throw schema_error("generalized_fit: need at least 3 rows per parity");
    }
    for (long c = 0; c <= c_max; ++c) {
        GeneralizedFit fit;
        fit.c = c;
        bool ok = true;
        long n0 = -1;
        for (int par : {1, 0}) {
            std::vector<std::pair<long, Int>> res;
            for (const auto& r : T.rows) {
                if (r.n % 2 != par) continue;
                res.push_back({r.n, r.lambda - Int(T.k - 1) * qn(ctx, r.n) +
                                        Int(c) * ctx.t_n(r.n)});
            }
            size_t m = res.size();
            if (res[m - 1].second != res[m - 2].second ||
                res[m - 2].second != res[m - 3].second) {
                ok = false;
                break;
            }
            size_t i0 = m - 3;
            while (i0 > 0 && res[i0 - 1].second == res[m - 1].second) --i0;
            n0 = std::max(n0, res[i0].first);
            (par == 1 ? fit.r_odd : fit.r_even) = res[m - 1].second;
        }
        if (ok) {
            fit.n0 = n0;
            return fit;
        }
    }
    throw no_fit("generalized_fit: no c in [0, " + std::to_string(c_max) +
                 "] yields constant tail residuals");
}

// ---------------------------------------------------------------------------
// Congruent-forms comparison between a weight p+1 form f and a weight 2 form
// g: lambda^-(f) = lambda^sharp(g) and lambda^+(f) = lambda^flat(g) + p - 1.
// Which of g's star-signs plays sharp is not pinned a priori; the record
// reports the mapping(s) that satisfy both relations.
// ---------------------------------------------------------------------------
struct CongruentComparison {
    bool pass = false;
    std::string mapping;  // "sharp=plus", "sharp=minus", "either", or "none"
    Int lambda_sharp_g;
    Int lambda_flat_g;
    Int lambda_plus_f;
    Int lambda_minus_f;
};

inline CongruentComparison compare_congruent(const ExtractionReport& f,
                                             const ExtractionReport& g,
                                             const PrimeContext& ctx, long k_f, long k_g) {
    if (Int(k_f) != ctx.p + 1 || k_g != 2) {
        throw wrong_weights("compare_congruent: need weight p+1 vs weight 2");
    }
    if (ctx.p == 2) throw wrong_weights("compare_congruent: p must be odd");
    CongruentComparison out;
    out.lambda_plus_f = f.plus.lambda;
    out.lambda_minus_f = f.minus.lambda;
    const Int pm1 = ctx.p - 1;
    bool m1 = (f.minus.lambda == g.plus.lambda) && (f.plus.lambda == g.minus.lambda + pm1);
    bool m2 = (f.minus.lambda == g.minus.lambda) && (f.plus.lambda == g.plus.lambda + pm1);
    if (m1 && m2) {
        out.mapping = "either";
    } else if (m1) {
        out.mapping = "sharp=plus";
    } else if (m2) {
        out.mapping = "sharp=minus";
    } else {
        out.mapping = "none";
    }
    out.pass = m1 || m2;
    if (m1) {
        out.lambda_sharp_g = g.plus.lambda;
        out.lambda_flat_g = g.minus.lambda;
    } else if (m2) {
        out.lambda_sharp_g = g.minus.lambda;
        out.lambda_flat_g = g.plus.lambda;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Predicted valuation of the normalized twisted L-value at a layer-n
// character, from theta invariants directly or from a stable report.
// ---------------------------------------------------------------------------
inline Rat lvalue_valuation_from_theta(const InvariantPair& inv, const PrimeContext& ctx,
                                       long n) {
    return inv.mu + Rat(inv.lambda) / Rat(ctx.t_n(n));
}

inline Rat lvalue_valuation_from_report(const ExtractionReport& rep, const PrimeContext& ctx,
                                        long k, long j, long n) {
    const int s = eps_n(n + 1);
    const ParityResult& pr = rep.by_sign(star_sign(ctx, s));
    if (!pr.stable || n < rep.n0) throw unstable("lvalue valuation: invariants not stable");
    Rat mu = pr.mu ? *pr.mu : Rat(0);
    WeightConstants wc = weight_constants(ctx, k);
    Val extra = ordp(Int(wc.C_sign(eps_n(n)) * binomial(Int(k - 2),
                                                        static_cast<unsigned long>(j))),
                     ctx.p);
    return mu + extra.v + Rat(Int(k - 1) * qn(ctx, n) + pr.lambda) / Rat(ctx.t_n(n));
}

}  // namespace mt
