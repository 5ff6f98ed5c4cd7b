#pragma once

#include <gmpxx.h>

#include <utility>

#include "mt/number_field.hpp"
#include "mt/prime_context.hpp"
#include "mt/valuation.hpp"
#include "mt/zq.hpp"

namespace mt {

// Uniform scalar interface for the three coefficient flavors:
//   Rat    — exact rationals (e = 1 path; the workhorse)
//   NFElem — exact number-field elements (valuations via the embedding)
//   Zq     — residues mod p^M in an unramified extension (truncated)
//
// s_ordp returns (valuation lower bound, certain?): certain=false only for a
// truncated residue that vanishes mod p^M (true valuation merely >= M).

inline bool s_is_zero(const Rat& x) { return x == 0; }
inline bool s_is_zero(const NFElem& x) { return x.is_zero(); }
inline bool s_is_zero(const Zq& x) { return x.is_zero(); }

inline std::pair<Val, bool> s_ordp(const Rat& x, const PrimeContext& ctx) {
    return {ordp(x, ctx.p), true};
}
inline std::pair<Val, bool> s_ordp(const NFElem& x, const PrimeContext& ctx) {
    if (x.is_zero()) return {Val::infinity(), true};
    if (x.is_rational()) return {ordp(x.rat(), ctx.p), true};
    if (!ctx.embedding) {
        throw internal_error("s_ordp(NFElem): context has no prime embedding");
    }
    return {ordp_embedded(x, *ctx.embedding), true};
}
inline std::pair<Val, bool> s_ordp(const Zq& x, const PrimeContext&) { return x.ordp_info(); }

inline Rat s_mul_rat(const Rat& x, const Rat& c) { return x * c; }
inline NFElem s_mul_rat(const NFElem& x, const Rat& c) { return x * NFElem(c); }
inline Zq s_mul_rat(const Zq& x, const Rat& c) {
    if (!x.ring()) return Zq();
    return x * Zq::from_rat(x.ring(), c);
}

inline Rat s_from_rat(const Rat& c, const Rat&) { return c; }
inline NFElem s_from_rat(const Rat& c, const NFElem&) { return NFElem(c); }
inline Zq s_from_rat(const Rat& c, const Zq& like) {
    if (!like.ring()) throw internal_error("s_from_rat(Zq): no ring available");
    return Zq::from_rat(like.ring(), c);
}

}  // namespace mt
