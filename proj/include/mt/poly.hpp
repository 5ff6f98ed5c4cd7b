#pragma once

#include <gmpxx.h>

#include <vector>

#include "mt/errors.hpp"
#include "mt/scalar_traits.hpp"
#include "mt/valuation.hpp"

namespace mt {

// Dense polynomial utilities over a generic exact-ish scalar S (index =
// degree).  Division is only ever by *monic integer* polynomials (omega_n and
// cyclotomic factors), so no scalar inversion is required anywhere.

template <class S>
void poly_trim(std::vector<S>& a) {
    while (!a.empty() && s_is_zero(a.back())) a.pop_back();
}

template <class S>
std::vector<S> poly_add(const std::vector<S>& a, const std::vector<S>& b) {
    std::vector<S> r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] = r[i] + a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = r[i] + b[i];
    poly_trim(r);
    return r;
}

template <class S>
std::vector<S> poly_sub(const std::vector<S>& a, const std::vector<S>& b) {
    std::vector<S> r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] = r[i] + a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = r[i] - b[i];
    poly_trim(r);
    return r;
}

template <class S>
std::vector<S> poly_mul(const std::vector<S>& a, const std::vector<S>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<S> r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i) {
        if (s_is_zero(a[i])) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    }
    poly_trim(r);
    return r;
}

template <class S>
std::vector<S> poly_scale_rat(const std::vector<S>& a, const Rat& c) {
    std::vector<S> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = s_mul_rat(a[i], c);
    poly_trim(r);
    return r;
}

// Division with remainder by a monic integer polynomial.
template <class S>
std::pair<std::vector<S>, std::vector<S>> poly_divrem_monic(std::vector<S> a,
                                                            const std::vector<Int>& d) {
    if (d.empty() || d.back() != 1) {
        throw internal_error("poly_divrem_monic: divisor must be monic");
    }
    poly_trim(a);
    std::vector<S> q;
    if (a.size() >= d.size()) q.resize(a.size() - d.size() + 1);
    while (a.size() >= d.size()) {
        S c = a.back();
        size_t shift = a.size() - d.size();
        q[shift] = c;
        for (size_t i = 0; i < d.size(); ++i) {
            a[shift + i] = a[shift + i] - s_mul_rat(c, Rat(d[i]));
        }
        poly_trim(a);  // leading term cancels exactly
    }
    poly_trim(q);
    return {q, a};
}

// Composition f(lin·T + cst) via Horner.
template <class S>
std::vector<S> poly_compose_affine_general(const std::vector<S>& f, const Rat& lin,
                                           const Rat& cst) {
    std::vector<S> r;
    for (size_t k = f.size(); k-- > 0;) {
        // r <- r*(lin*T + cst) + f[k]
        std::vector<S> next(r.size() + 1);
        for (size_t i = 0; i < r.size(); ++i) {
            next[i] = next[i] + s_mul_rat(r[i], cst);
            next[i + 1] = next[i + 1] + s_mul_rat(r[i], lin);
        }
        if (next.empty()) next.resize(1);
        next[0] = next[0] + f[k];
        r = std::move(next);
        poly_trim(r);
    }
    return r;
}

// Composition with the affine map T ↦ u(1+T) − 1 = uT + (u−1).  This
// realizes the substitution η^j for u = gamma^j (an exact rational for
// integer gamma, so no truncation enters here).
template <class S>
std::vector<S> poly_compose_affine(const std::vector<S>& f, const Rat& u) {
    return poly_compose_affine_general(f, u, u - 1);
}

// Convenience conversions.
inline std::vector<Rat> poly_rat_of_int(const std::vector<Int>& a) {
    std::vector<Rat> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Rat(a[i]);
    return r;
}

template <class S>
S poly_eval(const std::vector<S>& f, const S& x) {
    S r{};
    for (size_t k = f.size(); k-- > 0;) r = r * x + f[k];
    return r;
}

}  // namespace mt
