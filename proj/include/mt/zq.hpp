#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>

#include "mt/errors.hpp"
#include "mt/modular.hpp"
#include "mt/number_field.hpp"
#include "mt/prime_context.hpp"
#include "mt/valuation.hpp"

namespace mt {

// Truncated unramified coefficients: Z_q mod p^M represented as polynomial
// residues mod (p^M, g(x)) for the Hensel-lifted factor g.  The degree-1
// modulus x recovers plain Z/p^M.  Used for theta elements with nontrivial
// tame character psi (Teichmüller values are genuinely inexact).
struct ZqRing {
    Int p;
    long M;
    Int pM;
    zmodpoly::Poly modpoly;  // monic, degree = residue degree f

    int f_res() const { return static_cast<int>(modpoly.size()) - 1; }

    static std::shared_ptr<const ZqRing> make_zp(const Int& p, long M) {
        auto r = std::make_shared<ZqRing>();
        r->p = p;
        r->M = M;
        r->pM = pow_int(p, static_cast<unsigned long>(M));
        r->modpoly = {Int(0), Int(1)};
        return r;
    }
    static std::shared_ptr<const ZqRing> from_embedding(const UnramifiedEmbedding& emb) {
        if (emb.ramified()) throw ramified_prime("ZqRing over a ramified prime");
        auto r = std::make_shared<ZqRing>();
        r->p = emb.p;
        r->M = emb.M;
        r->pM = pow_int(emb.p, static_cast<unsigned long>(emb.M));
        r->modpoly = emb.factor;
        return r;
    }
};

using ZqRingPtr = std::shared_ptr<const ZqRing>;

class Zq {
public:
    Zq() = default;
    Zq(ZqRingPtr ring, zmodpoly::Poly coords) : R_(std::move(ring)), c_(std::move(coords)) {
        normalize();
    }
    static Zq from_int(ZqRingPtr ring, const Int& v) {
        return Zq(std::move(ring), zmodpoly::Poly{v});
    }
    static Zq from_rat(ZqRingPtr ring, const Rat& v) {
        // Requires a p-unit denominator.
        Int r = mod_of_rat(v, ring->pM);
        return Zq(std::move(ring), zmodpoly::Poly{r});
    }
    static Zq from_nf(ZqRingPtr ring, const NFElem& x, const UnramifiedEmbedding& emb) {
        auto [res, shift] = embed_unramified(x, emb);
        if (shift != 0) throw precision_insufficient("Zq::from_nf: element not p-integral");
        return Zq(std::move(ring), std::move(res));
    }

    const ZqRingPtr& ring() const { return R_; }
    const zmodpoly::Poly& coords() const { return c_; }

    bool is_zero() const { return c_.empty(); }  // zero mod p^M (val >= M)

    friend Zq operator+(const Zq& a, const Zq& b) {
        ZqRingPtr R = a.pick(b);
        if (!R) return Zq();
        return Zq(R, zmodpoly::add(a.c_, b.c_, R->pM));
    }
    friend Zq operator-(const Zq& a, const Zq& b) {
        ZqRingPtr R = a.pick(b);
        if (!R) return Zq();
        return Zq(R, zmodpoly::sub(a.c_, b.c_, R->pM));
    }
    Zq operator-() const {
        if (!R_) return Zq();
        return Zq(R_, zmodpoly::scale(c_, R_->pM - 1, R_->pM));
    }
    friend Zq operator*(const Zq& a, const Zq& b) {
        ZqRingPtr R = a.pick(b);
        if (!R) return Zq();
        return Zq(R, zmodpoly::divrem(zmodpoly::mul(a.c_, b.c_, R->pM), R->modpoly, R->pM).second);
    }

    // Lower bound for ord_p: exact when below the precision M.
    // Returns (value, certain): (M, false) when the residue vanishes mod p^M.
    std::pair<Val, bool> ordp_info() const {
        if (!R_ || c_.empty()) return {Val::of(R_ ? R_->M : 0), false};
        Val best = Val::infinity();
        for (const auto& co : c_) {
            Val v = ordp(co, R_->p);
            if (v < best) best = v;
        }
        if (!best.is_finite() || best.v >= R_->M) return {Val::of(R_->M), false};
        return {best, true};
    }

    std::string str() const {
        std::string s = "(";
        for (size_t i = 0; i < c_.size(); ++i) {
            if (i) s += ",";
            s += c_[i].get_str();
        }
        return s + " mod p^" + std::to_string(R_ ? R_->M : 0) + ")";
    }

private:
    void normalize() {
        if (!R_) return;
        c_ = zmodpoly::divrem(zmodpoly::reduce(c_, R_->pM), R_->modpoly, R_->pM).second;
    }
    ZqRingPtr pick(const Zq& other) const {
        if (R_ && other.R_ && R_ != other.R_) {
            if (R_->pM != other.R_->pM || R_->modpoly != other.R_->modpoly) {
                throw internal_error("Zq: mixed rings");
            }
        }
        return R_ ? R_ : other.R_;
    }

    ZqRingPtr R_;
    zmodpoly::Poly c_;  // empty = zero
};

}  // namespace mt
