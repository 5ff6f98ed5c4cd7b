#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mt/iwasawa.hpp"

using namespace mt;

namespace {

QSeries qs(std::vector<Rat> c) {
    QSeries F;
    F.c = std::move(c);
    return F;
}

QSeries qs_int(const std::vector<Int>& c) {
    QSeries F;
    F.c = poly_rat_of_int(c);
    return F;
}

// Random series with prescribed coefficient valuations + slack; used by the
// p-large and small-lambda property suites.
QSeries random_series(std::mt19937_64& rng, const Int& p, long deg, long max_extra_val) {
    QSeries F;
    F.c.resize(deg + 1);
    for (long i = 0; i <= deg; ++i) {
        long unit = static_cast<long>(rng() % 1000) + 1;
        if (rng() % 3 == 0) unit = -unit;
        while (mpz_divisible_p(Int(unit).get_mpz_t(), p.get_mpz_t())) ++unit;
        long v = static_cast<long>(rng() % (max_extra_val + 1));
        F.c[i] = Rat(Int(unit) * pow_int(p, v));
    }
    return F;
}

}  // namespace

TEST_CASE("invariants basics") {
    auto ctx = PrimeContext::make(Int(3), 24);
    CHECK(invariants(qs({Rat(1)}), ctx) == InvariantPair{0, Rat(0)});
    // p(1+T)^2 + T^3 = 3 + 6T + 3T^2 + T^3
    CHECK(invariants(qs({Rat(3), Rat(6), Rat(3), Rat(1)}), ctx) == InvariantPair{3, Rat(0)});
    for (long n = 1; n <= 3; ++n) {
        long pn = mpz_get_si(ctx.p_pow(n).get_mpz_t());
        CHECK(invariants(qs_int(omega_n(ctx, n)), ctx) == InvariantPair{pn, Rat(0)});
    }
    CHECK_THROWS_AS(invariants(qs({}), ctx), Error);
    CHECK_THROWS_AS(invariants(qs({Rat(0), Rat(0)}), ctx), Error);
}

TEST_CASE("project") {
    auto ctx = PrimeContext::make(Int(3), 24);
    // T^4 mod omega_1 = 6T^2 + 9T
    QSeries t4 = qs({Rat(0), Rat(0), Rat(0), Rat(0), Rat(1)});
    QSeries r = project(t4, ctx, 1);
    REQUIRE(r.c.size() == 3);
    CHECK(r.c[0] == 0);
    CHECK(r.c[1] == 9);
    CHECK(r.c[2] == 6);
    // project(T^{p^n}) has invariants (p^{n-1}, 1)
    for (long n = 1; n <= 3; ++n) {
        long pn = mpz_get_si(ctx.p_pow(n).get_mpz_t());
        QSeries tpn = qs(std::vector<Rat>(pn + 1, Rat(0)));
        tpn.c[pn] = 1;
        InvariantPair inv = invariants(project(tpn, ctx, n), ctx);
        CHECK(inv.lambda == mpz_get_si(ctx.p_pow(n - 1).get_mpz_t()));
        CHECK(inv.mu == 1);
    }
    // Ideal membership: project(omega_n * G + H) = project(H).
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 50; ++t) {
        QSeries G = random_series(rng, ctx.p, 7, 2);
        QSeries H = random_series(rng, ctx.p, 11, 2);
        QSeries sum;
        sum.c = poly_add(poly_mul(poly_rat_of_int(omega_n(ctx, 2)), G.c), H.c);
        CHECK(project(sum, ctx, 2).c == project(H, ctx, 2).c);
    }
}

TEST_CASE("remainder_quotient") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto rq0 = remainder_quotient(Int(0), ctx, 1);
    CHECK(rq0.R == 0);
    CHECK(rq0.Q == 0);
    auto rq1 = remainder_quotient(Int(5), ctx, 1);
    CHECK(rq1.R == 1);
    CHECK(rq1.Q == 2);
    auto rq2 = remainder_quotient(Int(7), ctx, 2);
    CHECK(rq2.R == 1);
    CHECK(rq2.Q == 1);
}

TEST_CASE("division terms: base row, recursion examples, valuation identities") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto table = division_terms(ctx, 1, 6);
    CHECK(table[0][0] == -3);  // c_0^(1)
    CHECK(table[0][1] == -3);  // c_0^(2)
    CHECK(table[1][0] == 9);   // c_1^(1)
    CHECK(table[1][1] == 6);   // c_1^(2)
}

TEST_CASE("division-term oracle: rows equal long-division coefficients") {
    for (long pl : {2L, 3L, 5L}) {
        auto ctx = PrimeContext::make(Int(pl), 24);
        for (long n = 1; n <= 3; ++n) {
            long pn = mpz_get_si(ctx.p_pow(n).get_mpz_t());
            if (pl == 5 && n == 3) continue;  // covered by acceptance binary
            long Nmax = 2 * pn;
            auto table = division_terms(ctx, n, Nmax);
            std::vector<Int> wn = omega_n(ctx, n);
            for (long N = 0; N <= Nmax; ++N) {
                QSeries mono = qs(std::vector<Rat>(pn + N + 1, Rat(0)));
                mono.c[pn + N] = 1;
                QSeries red = project(mono, ctx, n);
                REQUIRE(static_cast<long>(red.c.size()) <= pn);
                for (long i = 1; i <= pn - 1; ++i) {
                    Rat want = (i < static_cast<long>(red.c.size())) ? red.c[i] : Rat(0);
                    CHECK(Rat(table[N][i - 1]) == want);
                }
                // Constant term of the reduction is 0.
                if (!red.c.empty()) CHECK(red.c[0] == 0);
            }
            // ord_p c_N^(i) = n - ord_p(i-N) for N+1 <= i <= p^n - 1.
            for (long N = 0; N <= Nmax; ++N) {
                for (long i = N + 1; i <= pn - 1; ++i) {
                    Val got = ordp(table[N][i - 1], ctx.p);
                    Val want = Val::of(Rat(n) - ordp(Int(i - N), ctx.p).v);
                    CHECK(got == want);
                }
            }
            // Lower bounds on every row (valid range N <= t_n * something
            // small; the statement is for all N here computed).
            for (long N = 0; N <= Nmax; ++N) {
                auto rq = remainder_quotient(Int(N), ctx, n);
                Rat Q = Rat(rq.Q);
                Int edge = rq.R + ctx.p_pow(n - 1);
                for (long i = 1; i <= pn - 1; ++i) {
                    Val v = ordp(table[N][i - 1], ctx.p);
                    if (Int(i) < edge) {
                        CHECK(v >= Val::of(Q + 2));
                    } else if (Int(i) == edge) {
                        CHECK(v == Val::of(Q + 1));
                    } else {
                        CHECK(v >= Val::of(Q + 1));
                    }
                }
            }
        }
    }
}

TEST_CASE("p-large predicate examples") {
    auto ctx = PrimeContext::make(Int(3), 24);
    for (long n = 1; n <= 2; ++n) {
        long pn = mpz_get_si(ctx.p_pow(n).get_mpz_t());
        QSeries tpn = qs(std::vector<Rat>(pn + 1, Rat(0)));
        tpn.c[pn] = 1;
        CHECK(is_p_large(tpn, ctx, n));
        QSeries tpn_p = tpn;
        tpn_p.c[0] = Rat(3);
        CHECK(!is_p_large(tpn_p, ctx, n));
        CHECK(!is_p_large(qs_int(omega_n(ctx, n)), ctx, n));
    }
}

TEST_CASE("newton polygon") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto np1 = newton_polygon(qs({Rat(3), Rat(1)}), ctx, 1);
    REQUIRE(np1.vertices.size() == 2);
    CHECK(np1.vertices[0] == std::make_pair(Int(0), Rat(1)));
    CHECK(np1.vertices[1] == std::make_pair(Int(1), Rat(0)));
    auto np2 = newton_polygon(qs({Rat(0), Rat(9), Rat(0), Rat(1)}), ctx, 2);
    REQUIRE(np2.vertices.size() == 1);
    CHECK(np2.vertices[0] == std::make_pair(Int(1), Rat(2)));
    auto np3 = newton_polygon(qs({Rat(0), Rat(3), Rat(0), Rat(1)}), ctx, 2);
    REQUIRE(np3.vertices.size() == 1);
    CHECK(np3.vertices[0] == std::make_pair(Int(1), Rat(1)));
}

TEST_CASE("B-region examples and the failing counterexample") {
    auto ctx = PrimeContext::make(Int(3), 24);
    QSeries t27 = qs(std::vector<Rat>(28, Rat(0)));
    t27.c[27] = 1;
    CHECK(b_region_contains(t27, ctx, 3));

    QSeries good = qs({Rat(0), Rat(9), Rat(0), Rat(1)});  // T^3 + 9T
    CHECK(b_region_contains(good, ctx, 1));
    CHECK(is_p_large(good, ctx, 1));
    InvariantPair via = layer_invariants_via_theorem(good, ctx, 1);
    CHECK(via == invariants(project(good, ctx, 1), ctx));
    CHECK(via.lambda == 1);
    CHECK(via.mu == 1);

    QSeries bad = qs({Rat(0), Rat(3), Rat(0), Rat(1)});  // T^3 + 3T
    CHECK(!b_region_contains(bad, ctx, 1));
    CHECK(!is_p_large(bad, ctx, 1));
    InvariantPair direct = invariants(project(bad, ctx, 1), ctx);
    CHECK(direct.lambda == 2);
    CHECK(direct.mu == 1);
    // nrel identity fails: lambda + mu*t_n = 1+0*2... compare both sides.
    InvariantPair orig = invariants(bad, ctx);
    CHECK(Rat(orig.lambda) + orig.mu * Rat(ctx.t_n(1)) !=
          Rat(direct.lambda) + direct.mu * Rat(ctx.t_n(1)));
}

TEST_CASE("small-lambda projection invariance (random)") {
    std::mt19937_64 rng(777);
    for (long pl : {2L, 3L}) {
        auto ctx = PrimeContext::make(Int(pl), 24);
        for (int t = 0; t < 150; ++t) {
            long n = 1 + static_cast<long>(rng() % 3);
            long pn = mpz_get_si(ctx.p_pow(n).get_mpz_t());
            long lam = static_cast<long>(rng() % pn);
            QSeries F = random_series(rng, ctx.p, lam + 4 + static_cast<long>(rng() % 6), 3);
            // Force lambda(F) = lam < p^n: unit at lam, higher valuations below.
            for (long i = 0; i < lam; ++i) F.c[i] = F.c[i] * Rat(ctx.p);
            F.c[lam] = Rat(1 + static_cast<long>(rng() % 100) *
                                   mpz_get_si(ctx.p.get_mpz_t()));  // p-unit
            InvariantPair before = invariants(F, ctx);
            if (before.lambda >= pn) continue;
            InvariantPair after = invariants(project(F, ctx, n), ctx);
            CHECK(before == after);
        }
    }
}

TEST_CASE("unit multiplication preserves p-largeness and projections") {
    std::mt19937_64 rng(4242);
    auto ctx = PrimeContext::make(Int(3), 24);
    for (int t = 0; t < 60; ++t) {
        long n = 1 + static_cast<long>(rng() % 2);
        long pn = mpz_get_si(ctx.p_pow(n).get_mpz_t());
        // p-large F: T^{p^n} plus terms respecting the v-profile.
        QSeries F = qs(std::vector<Rat>(pn + 1, Rat(0)));
        F.c[pn] = 1;
        PLargeProfile prof = p_large_profile(F, ctx, n);
        for (long i = 0; i < pn; ++i) {
            long v = static_cast<long>(
                mpz_get_si(Rat(prof.v[i]).get_num().get_mpz_t()) /
                    mpz_get_si(Rat(prof.v[i]).get_den().get_mpz_t()) +
                1 + static_cast<long>(rng() % 2));
            if (rng() % 2) F.c[i] = Rat(pow_int(ctx.p, v)) * Rat(1 + static_cast<long>(rng() % 5));
        }
        REQUIRE(is_p_large(F, ctx, n));
        // Unit U: constant term a p-unit.
        QSeries U = random_series(rng, ctx.p, 3, 1);
        U.c[0] = Rat(1 + 3 * static_cast<long>(rng() % 50));
        QSeries UF;
        UF.c = poly_mul(U.c, F.c);
        CHECK(is_p_large(UF, ctx, n));
        CHECK(invariants(project(UF, ctx, n), ctx) == invariants(project(F, ctx, n), ctx));
    }
}
