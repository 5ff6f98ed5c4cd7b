#pragma once

#include <gmpxx.h>

#include <compare>
#include <string>

#include "mt/errors.hpp"

namespace mt {

using Int = mpz_class;
using Rat = mpq_class;

// Extended-rational valuation: an exact rational or +infinity (for 0).
// Values may be fractional (denominator dividing the ramification index e,
// or the layer degree t_n when evaluating at roots of unity).
struct Val {
    bool inf = false;
    Rat v = 0;

    static Val infinity() { return Val{true, 0}; }
    static Val of(const Rat& r) {
        Val x;
        x.v = r;
        x.v.canonicalize();
        return x;
    }
    static Val of(long n) { return Val{false, Rat(n)}; }

    bool is_finite() const { return !inf; }

    friend Val operator+(const Val& a, const Val& b) {
        if (a.inf || b.inf) return infinity();
        return of(a.v + b.v);
    }
    friend bool operator==(const Val& a, const Val& b) {
        if (a.inf || b.inf) return a.inf == b.inf;
        return a.v == b.v;
    }
    friend bool operator<(const Val& a, const Val& b) {
        if (a.inf) return false;
        if (b.inf) return true;
        return a.v < b.v;
    }
    friend bool operator<=(const Val& a, const Val& b) { return a < b || a == b; }
    friend bool operator>(const Val& a, const Val& b) { return b < a; }
    friend bool operator>=(const Val& a, const Val& b) { return b <= a; }

    std::string str() const {
        if (inf) return "inf";
        return v.get_str();
    }
};

// ord_p of a nonzero integer (number of times p divides n); ord_p(0) = inf.
inline Val ordp(const Int& n, const Int& p) {
    if (n == 0) return Val::infinity();
    Int tmp;
    mp_bitcnt_t k = mpz_remove(tmp.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
    return Val::of(static_cast<long>(k));
}

// ord_p of a rational.
inline Val ordp(const Rat& x, const Int& p) {
    if (x == 0) return Val::infinity();
    Val a = ordp(x.get_num(), p);
    Val b = ordp(x.get_den(), p);
    return Val::of(a.v - b.v);
}

}  // namespace mt
