#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "mt/errors.hpp"
#include "mt/modular.hpp"
#include "mt/valuation.hpp"

namespace mt {

// A number field K_f = Q[x]/(f) for a monic integer polynomial f, together
// with element arithmetic in the power basis and the machinery to pick a
// prime over p: factor f mod p, Hensel-lift the chosen factor, and compute
// exact p-adic valuations through the resulting unramified embedding.

struct NumberField {
    std::vector<Int> poly;  // monic defining polynomial, degree = poly.size()-1

    int degree() const { return static_cast<int>(poly.size()) - 1; }
};

using NumberFieldPtr = std::shared_ptr<const NumberField>;

// ---------------------------------------------------------------------------
// Polynomial helpers over Z/m (dense, coefficient index = degree).
// ---------------------------------------------------------------------------
namespace zmodpoly {

using Poly = std::vector<Int>;

inline void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly reduce(const Poly& a, const Int& m) {
    Poly r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = mod_reduce(a[i], m);
    trim(r);
    return r;
}

inline Poly mul(const Poly& a, const Poly& b, const Int& m) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return reduce(r, m);
}

inline Poly add(const Poly& a, const Poly& b, const Int& m) {
    Poly r(std::max(a.size(), b.size()), Int(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return reduce(r, m);
}

inline Poly sub(const Poly& a, const Poly& b, const Int& m) {
    Poly r(std::max(a.size(), b.size()), Int(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return reduce(r, m);
}

inline Poly scale(const Poly& a, const Int& c, const Int& m) {
    Poly r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = mod_mul(a[i], c, m);
    trim(r);
    return r;
}

// Division with remainder; the divisor's leading coefficient must be a unit
// mod m.  Returns (quotient, remainder).
inline std::pair<Poly, Poly> divrem(const Poly& a, const Poly& b_in, const Int& m) {
    Poly b = reduce(b_in, m);
    if (b.empty()) throw internal_error("zmodpoly::divrem: division by zero");
    const Int lead_inv = mod_inv(b.back(), m);
    Poly r = reduce(a, m);
    Poly q;
    if (r.size() >= b.size()) q.assign(r.size() - b.size() + 1, Int(0));
    while (r.size() >= b.size()) {
        Int c = mod_mul(r.back(), lead_inv, m);
        size_t shift = r.size() - b.size();
        q[shift] = c;
        for (size_t i = 0; i < b.size(); ++i) {
            r[shift + i] = mod_reduce(r[shift + i] - c * b[i], m);
        }
        trim(r);  // the leading term cancels exactly, so this always shrinks r
    }
    trim(q);
    return {q, r};
}

inline bool divides(const Poly& b, const Poly& a, const Int& m) {
    return divrem(a, b, m).second.empty();
}

}  // namespace zmodpoly

// ---------------------------------------------------------------------------
// Factorization of a monic polynomial mod p by ordered trial division.
// Candidates are monic polynomials enumerated by increasing degree and then
// lexicographically by coefficient list (constant coefficient first); going in
// increasing degree guarantees every found factor is irreducible.  Intended
// for the small degrees and primes of defining polynomials.
// ---------------------------------------------------------------------------
struct ModpFactor {
    zmodpoly::Poly factor;  // monic, canonical lift with coefficients in [0,p)
    int multiplicity = 1;
};

inline std::vector<ModpFactor> factor_monic_mod_p(const zmodpoly::Poly& f_in, const Int& p) {
    using zmodpoly::Poly;
    Poly f = zmodpoly::reduce(f_in, p);
    if (f.empty() || f.back() != 1) {
        throw internal_error("factor_monic_mod_p: polynomial not monic mod p");
    }
    std::vector<ModpFactor> out;
    const long pl = mpz_get_si(p.get_mpz_t());
    // Try monic divisors of degree d = 1, 2, ...; since smaller factors are
    // divided out first, any divisor found is irreducible.  Stop once the
    // remaining cofactor cannot have a factor of degree <= deg/2.
    for (int d = 1; f.size() > 1 && 2 * d <= static_cast<int>(f.size()) - 1; ++d) {
        // Candidates of degree d: coefficient vector (c_0, ..., c_{d-1}),
        // lexicographic order, leading coefficient 1.
        std::vector<long> c(d, 0);
        while (true) {
            Poly cand(d + 1);
            for (int i = 0; i < d; ++i) cand[i] = c[i];
            cand[d] = 1;
            while (static_cast<int>(f.size()) - 1 >= d && zmodpoly::divides(cand, f, p)) {
                bool found = false;
                for (auto& fa : out) {
                    if (fa.factor == cand) {
                        ++fa.multiplicity;
                        found = true;
                    }
                }
                if (!found) out.push_back({cand, 1});
                f = zmodpoly::divrem(f, cand, p).first;
            }
            if (2 * d > static_cast<int>(f.size()) - 1) break;
            // next candidate in lexicographic order
            int i = d - 1;
            while (i >= 0 && ++c[i] >= pl) c[i--] = 0;
            if (i < 0) break;
        }
    }
    if (f.size() > 1) out.push_back({f, 1});  // leftover is irreducible
    // Deterministic ordering: by degree, then lexicographic coefficient list.
    std::sort(out.begin(), out.end(), [](const ModpFactor& a, const ModpFactor& b) {
        if (a.factor.size() != b.factor.size()) return a.factor.size() < b.factor.size();
        for (size_t i = 0; i < a.factor.size(); ++i) {
            if (a.factor[i] != b.factor[i]) return a.factor[i] < b.factor[i];
        }
        return false;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Hensel lifting of a coprime factorization f = g*h mod p to mod p^M.
// Linear lifting, one p-digit per step; all arithmetic exact.
// ---------------------------------------------------------------------------
inline zmodpoly::Poly hensel_lift_factor(const std::vector<Int>& f, const zmodpoly::Poly& g0,
                                         const Int& p, long M) {
    using zmodpoly::Poly;
    Poly fp = zmodpoly::reduce(f, p);
    Poly g = zmodpoly::reduce(g0, p);
    Poly h = zmodpoly::divrem(fp, g, p).first;
    if (!zmodpoly::divides(g, fp, p)) {
        throw internal_error("hensel_lift_factor: g does not divide f mod p");
    }
    // Bezout s*g + t*h = 1 mod p via extended Euclid in F_p[x].
    Poly r0 = g, r1 = h;
    Poly s0 = {Int(1)}, s1 = {};
    Poly t0 = {}, t1 = {Int(1)};
    while (!r1.empty()) {
        auto [q, r2] = zmodpoly::divrem(r0, r1, p);
        Poly s2 = zmodpoly::sub(s0, zmodpoly::mul(q, s1, p), p);
        Poly t2 = zmodpoly::sub(t0, zmodpoly::mul(q, t1, p), p);
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
        t0 = t1; t1 = t2;
    }
    if (r0.size() != 1) {
        throw ramified_prime("hensel_lift_factor: factor not coprime to cofactor mod p");
    }
    Int inv = mod_inv(r0[0], p);
    Poly s = zmodpoly::scale(s0, inv, p);  // s*g + t*h = 1 mod p
    Poly t = zmodpoly::scale(t0, inv, p);

    Int pm = p;  // current modulus p^m, factorization valid mod pm
    for (long m = 1; m < M; ++m) {
        Int pm1 = pm * p;
        // delta = (f - g*h)/p^m mod p
        Poly gh = zmodpoly::mul(g, h, pm1);
        Poly diff(std::max(f.size(), gh.size()), Int(0));
        for (size_t i = 0; i < f.size(); ++i) diff[i] += f[i];
        for (size_t i = 0; i < gh.size(); ++i) diff[i] -= gh[i];
        Poly delta(diff.size());
        for (size_t i = 0; i < diff.size(); ++i) {
            Int red = mod_reduce(diff[i], pm1);
            delta[i] = red / pm;  // exact: f == g*h mod p^m
        }
        zmodpoly::trim(delta);
        delta = zmodpoly::reduce(delta, p);
        // Solve u*h + w*g = delta mod p with deg u < deg g.
        Poly td = zmodpoly::mul(t, delta, p);
        auto [q, u] = zmodpoly::divrem(td, g, p);
        Poly w = zmodpoly::add(zmodpoly::mul(s, delta, p), zmodpoly::mul(q, h, p), p);
        // Update g, h mod p^{m+1}.
        Poly gu(std::max(g.size(), u.size()), Int(0));
        for (size_t i = 0; i < g.size(); ++i) gu[i] += g[i];
        for (size_t i = 0; i < u.size(); ++i) gu[i] += pm * u[i];
        g = zmodpoly::reduce(gu, pm1);
        Poly hw(std::max(h.size(), w.size()), Int(0));
        for (size_t i = 0; i < h.size(); ++i) hw[i] += h[i];
        for (size_t i = 0; i < w.size(); ++i) hw[i] += pm * w[i];
        h = zmodpoly::reduce(hw, pm1);
        pm = pm1;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Number-field elements: rational coordinates in the power basis.
// A null field pointer denotes a plain rational (degree-1 case included).
// ---------------------------------------------------------------------------
class NFElem {
public:
    NFElem() : c_{Rat(0)} {}
    explicit NFElem(const Rat& r) : c_{r} {}
    NFElem(NumberFieldPtr K, std::vector<Rat> coords) : K_(std::move(K)), c_(std::move(coords)) {
        if (K_ && c_.size() != static_cast<size_t>(K_->degree())) {
            c_.resize(K_->degree(), Rat(0));
        }
    }

    const NumberFieldPtr& field() const { return K_; }
    const std::vector<Rat>& coords() const { return c_; }

    bool is_rational() const {
        if (!K_) return true;
        for (size_t i = 1; i < c_.size(); ++i) {
            if (c_[i] != 0) return false;
        }
        return true;
    }
    const Rat& rat() const {
        if (!is_rational()) throw internal_error("NFElem::rat on non-rational element");
        return c_[0];
    }
    bool is_zero() const {
        for (const auto& x : c_) {
            if (x != 0) return false;
        }
        return true;
    }

    friend NFElem operator+(const NFElem& a, const NFElem& b) {
        auto [K, ac, bc] = align(a, b);
        std::vector<Rat> r(ac.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = ac[i] + bc[i];
        return NFElem(K, std::move(r));
    }
    friend NFElem operator-(const NFElem& a, const NFElem& b) {
        auto [K, ac, bc] = align(a, b);
        std::vector<Rat> r(ac.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = ac[i] - bc[i];
        return NFElem(K, std::move(r));
    }
    NFElem operator-() const {
        std::vector<Rat> r(c_.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = -c_[i];
        return NFElem(K_, std::move(r));
    }
    friend NFElem operator*(const NFElem& a, const NFElem& b) {
        auto [K, ac, bc] = align(a, b);
        if (!K) return NFElem(ac[0] * bc[0]);
        std::vector<Rat> prod(ac.size() + bc.size() - 1, Rat(0));
        for (size_t i = 0; i < ac.size(); ++i) {
            if (ac[i] == 0) continue;
            for (size_t j = 0; j < bc.size(); ++j) prod[i + j] += ac[i] * bc[j];
        }
        reduce_mod_field(prod, *K);
        prod.resize(K->degree(), Rat(0));
        return NFElem(K, std::move(prod));
    }
    friend bool operator==(const NFElem& a, const NFElem& b) { return (a - b).is_zero(); }
    friend bool operator!=(const NFElem& a, const NFElem& b) { return !(a == b); }

    // Multiplicative inverse via extended Euclid in Q[x] against the defining
    // polynomial.
    NFElem inverse() const {
        if (is_zero()) throw internal_error("NFElem::inverse of zero");
        if (!K_ || is_rational()) return NFElem(Rat(1) / c_[0]);
        std::vector<Rat> f(K_->poly.size());
        for (size_t i = 0; i < f.size(); ++i) f[i] = Rat(K_->poly[i]);
        std::vector<Rat> r0 = f, r1 = c_;
        trim_q(r1);
        std::vector<Rat> t0, t1 = {Rat(1)};
        while (!r1.empty()) {
            auto [q, r2] = divrem_q(r0, r1);
            std::vector<Rat> t2 = sub_q(t0, mul_q(q, t1));
            r0 = r1; r1 = r2;
            t0 = t1; t1 = t2;
        }
        if (r0.size() != 1) throw internal_error("NFElem::inverse: defining polynomial not coprime (reducible field poly?)");
        std::vector<Rat> inv(t0.size());
        for (size_t i = 0; i < t0.size(); ++i) inv[i] = t0[i] / r0[0];
        inv.resize(K_->degree(), Rat(0));
        return NFElem(K_, std::move(inv));
    }

    std::string str() const {
        if (is_rational()) return c_[0].get_str();
        std::string s = "[";
        for (size_t i = 0; i < c_.size(); ++i) {
            if (i) s += ",";
            s += c_[i].get_str();
        }
        return s + "]";
    }

private:
    static std::tuple<NumberFieldPtr, std::vector<Rat>, std::vector<Rat>> align(const NFElem& a,
                                                                                const NFElem& b) {
        NumberFieldPtr K = a.K_ ? a.K_ : b.K_;
        if (a.K_ && b.K_ && a.K_ != b.K_ && a.K_->poly != b.K_->poly) {
            throw internal_error("NFElem: mixed number fields");
        }
        auto widen = [&](const NFElem& x) {
            std::vector<Rat> v = x.c_;
            if (K) v.resize(K->degree(), Rat(0));
            return v;
        };
        return {K, widen(a), widen(b)};
    }

    static void trim_q(std::vector<Rat>& a) {
        while (!a.empty() && a.back() == 0) a.pop_back();
    }
    static std::vector<Rat> mul_q(const std::vector<Rat>& a, const std::vector<Rat>& b) {
        if (a.empty() || b.empty()) return {};
        std::vector<Rat> r(a.size() + b.size() - 1, Rat(0));
        for (size_t i = 0; i < a.size(); ++i) {
            for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
        }
        trim_q(r);
        return r;
    }
    static std::vector<Rat> sub_q(const std::vector<Rat>& a, const std::vector<Rat>& b) {
        std::vector<Rat> r(std::max(a.size(), b.size()), Rat(0));
        for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
        for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
        trim_q(r);
        return r;
    }
    static std::pair<std::vector<Rat>, std::vector<Rat>> divrem_q(std::vector<Rat> a,
                                                                  const std::vector<Rat>& b) {
        trim_q(a);
        std::vector<Rat> q;
        if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, Rat(0));
        while (a.size() >= b.size()) {
            Rat c = a.back() / b.back();
            size_t shift = a.size() - b.size();
            q[shift] = c;
            for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
            trim_q(a);  // leading term cancels exactly
        }
        return {q, a};
    }
    static void reduce_mod_field(std::vector<Rat>& v, const NumberField& K) {
        const int d = K.degree();
        for (int i = static_cast<int>(v.size()) - 1; i >= d; --i) {
            Rat c = v[i];
            if (c == 0) continue;
            v[i] = 0;
            for (int j = 0; j < d; ++j) v[i - d + j] -= c * Rat(K.poly[j]);
        }
        v.resize(d, Rat(0));
    }

    NumberFieldPtr K_;
    std::vector<Rat> c_;
};

// ---------------------------------------------------------------------------
// Unramified embedding: a Hensel-lifted factor of the defining polynomial
// mod p^M; elements reduce to Z_q = Z_p[x]/(factor) coordinates.
// ---------------------------------------------------------------------------
struct UnramifiedEmbedding {
    Int p;
    long prime_index = 0;
    long M = 0;
    zmodpoly::Poly factor;        // monic lift mod p^M
    zmodpoly::Poly factor_mod_p;  // canonical lift of the mod-p factor
    int multiplicity = 1;         // >1 means ramified: valuations refused
    int f_res = 1;

    bool ramified() const { return multiplicity > 1; }
};

inline UnramifiedEmbedding embed_unramified_setup(const NumberField& K, const Int& p,
                                                  long prime_index, long M) {
    auto factors = factor_monic_mod_p(zmodpoly::Poly(K.poly.begin(), K.poly.end()), p);
    if (prime_index < 0 || static_cast<size_t>(prime_index) >= factors.size()) {
        throw schema_error("prime_index out of range: defining polynomial has " +
                           std::to_string(factors.size()) + " factors mod p");
    }
    UnramifiedEmbedding emb;
    emb.p = p;
    emb.prime_index = prime_index;
    emb.M = M;
    emb.factor_mod_p = factors[prime_index].factor;
    emb.multiplicity = factors[prime_index].multiplicity;
    emb.f_res = static_cast<int>(emb.factor_mod_p.size()) - 1;
    if (emb.multiplicity > 1) {
        emb.factor = emb.factor_mod_p;  // no lift; ramified contexts are refusal paths
        return emb;
    }
    emb.factor = hensel_lift_factor(K.poly, emb.factor_mod_p, p, M);
    return emb;
}

// Residue coordinates of x in Z_q mod p^M, after clearing p-powers from the
// denominators: returns (coords of p^shift * x, shift).
inline std::pair<zmodpoly::Poly, long> embed_unramified(const NFElem& x,
                                                        const UnramifiedEmbedding& emb) {
    if (emb.ramified()) throw ramified_prime("embedding at a ramified prime");
    Int pM = pow_int(emb.p, static_cast<unsigned long>(emb.M));
    long shift = 0;
    for (const auto& co : x.coords()) {
        Val d = ordp(co.get_den(), emb.p);
        if (d.is_finite() && d.v > shift) shift = mpz_get_si(Rat(d.v).get_num().get_mpz_t());
    }
    Int scale = pow_int(emb.p, static_cast<unsigned long>(shift));
    zmodpoly::Poly rep(x.coords().size());
    for (size_t i = 0; i < rep.size(); ++i) rep[i] = mod_of_rat(Rat(scale) * x.coords()[i], pM);
    zmodpoly::trim(rep);
    auto red = zmodpoly::divrem(rep, emb.factor, pM).second;
    return {red, shift};
}

// Exact ord_p of a number-field element through the embedding; Val flagged as
// >= M - shift (via PrecisionInsufficient) when the residue vanishes mod p^M.
inline Val ordp_embedded(const NFElem& x, const UnramifiedEmbedding& emb) {
    if (x.is_zero()) return Val::infinity();
    if (x.is_rational()) return ordp(x.rat(), emb.p);
    auto [res, shift] = embed_unramified(x, emb);
    Val best = Val::infinity();
    for (const auto& co : res) {
        Val v = ordp(co, emb.p);
        if (v < best) best = v;
    }
    if (!best.is_finite()) {
        throw precision_insufficient("ordp_embedded: residue vanishes mod p^M (M=" +
                                     std::to_string(emb.M) + "); raise M");
    }
    return Val::of(best.v - shift);
}

}  // namespace mt
