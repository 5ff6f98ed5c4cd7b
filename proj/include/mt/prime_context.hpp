#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>

#include "mt/errors.hpp"
#include "mt/modular.hpp"
#include "mt/number_field.hpp"
#include "mt/valuation.hpp"

namespace mt {

// All p-dependent bookkeeping for a computation: the prime, the chosen
// topological generator gamma of 1+2pZ_p, the working precision exponent M,
// and (for number-field coefficients) the chosen prime over p realized as a
// Hensel-lifted factor of the defining polynomial.
struct PrimeContext {
    Int p;
    Int gamma;
    long M = 24;
    int e = 1;      // ramification index of the coefficient field at the prime
    int f_res = 1;  // residue degree
    NumberFieldPtr field;  // null for rational coefficients
    std::optional<UnramifiedEmbedding> embedding;

    static PrimeContext make(const Int& p, long M = 24,
                             std::optional<Int> gamma_opt = std::nullopt) {
        if (mpz_probab_prime_p(p.get_mpz_t(), 40) == 0) {
            throw schema_error("p = " + p.get_str() + " is not prime");
        }
        PrimeContext ctx;
        ctx.p = p;
        ctx.M = M;
        ctx.gamma = gamma_opt ? *gamma_opt : (p == 2 ? Int(5) : Int(1) + p);
        // Generator condition for 1+2pZ_p: for odd p this group is 1+pZ_p, so
        // require gamma ≡ 1 mod p and ≢ 1 mod p²; for p = 2 require
        // gamma ≡ 1 mod 4 and ≢ 1 mod 8.
        Int two_p = (p == 2) ? Int(4) : p;
        Int two_p2 = two_p * p;
        if (mod_reduce(ctx.gamma - 1, two_p) != 0 || mod_reduce(ctx.gamma - 1, two_p2) == 0) {
            throw schema_error("gamma = " + ctx.gamma.get_str() +
                               " is not a topological generator of 1+2pZ_p");
        }
        return ctx;
    }

    // Attach a number field and select the prime over p (factor index into the
    // deterministically ordered mod-p factorization).
    void attach_field(NumberFieldPtr K, long prime_index) {
        field = std::move(K);
        embedding = embed_unramified_setup(*field, p, prime_index, M);
        f_res = embedding->f_res;
        e = embedding->ramified() ? embedding->multiplicity : 1;
    }

    // Precision layer count N(p, n): modulus for theta at layer n is p^N.
    long N_of(long n) const { return (p == 2) ? n + 2 : n + 1; }

    Int p_pow(long k) const { return pow_int(p, static_cast<unsigned long>(k)); }

    // t_n = p^n − p^{n−1}, the degree of the n-th layer over the (n−1)-st.
    Int t_n(long n) const {
        if (n < 1) throw internal_error("t_n needs n >= 1");
        return p_pow(n) - p_pow(n - 1);
    }

    bool unramified() const { return e == 1; }
};

}  // namespace mt
