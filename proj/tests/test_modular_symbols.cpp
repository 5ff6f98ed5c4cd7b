#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mt/modular_symbols.hpp"

using namespace mt;

namespace {

// Chain endpoints of h({infty}-{0}): (h.a : h.c) and (h.b : h.d).
bool same_cusp(const Int& p1, const Int& q1, const Int& p2, const Int& q2) {
    return p1 * q2 == p2 * q1 && !(q1 == 0 && q2 != 0) && !(q2 == 0 && q1 != 0);
}

}  // namespace

TEST_CASE("unimodular path decomposition") {
    std::mt19937_64 rng(4242);
    for (int t = 0; t < 200; ++t) {
        Int m = 1 + static_cast<long>(rng() % 400);
        Int a = static_cast<long>(rng() % 1000) - 500;
        Int g = gcd_int(a, m);
        a /= g;
        m /= g;
        auto hs = unimodular_path(a, m);
        REQUIRE(!hs.empty());
        for (const auto& h : hs) CHECK(h.det() == 1);
        // Telescoping: starts at infinity, consecutive endpoints match,
        // ends at a/m.
        CHECK(hs.front().c == 0);  // h_0(infty) = infinity
        for (size_t j = 0; j + 1 < hs.size(); ++j) {
            CHECK(same_cusp(hs[j].b, hs[j].d, hs[j + 1].a, hs[j + 1].c));
        }
        CHECK(hs.back().b * m == a * hs.back().d);
    }
    CHECK(unimodular_path(Int(1), Int(0)).empty());
    // Integer target: single matrix [1, a; 0, 1].
    auto one = unimodular_path(Int(7), Int(1));
    REQUIRE(one.size() == 1);
    CHECK(one[0].a == 1);
    CHECK(one[0].b == 7);
    CHECK(one[0].c == 0);
    CHECK(one[0].d == 1);
}

TEST_CASE("P1 classes and lifts") {
    for (long N : {1L, 11L, 26L, 32L, 154L}) {
        P1Space p1 = P1Space::build(Int(N));
        // |P^1(Z/N)| = N prod (1 + 1/p)
        Int psi = N;
        for (const Int& q : prime_divisors(Int(N))) psi = psi / q * (q + 1);
        CHECK(Int(p1.size()) == psi);
        for (long i = 0; i < p1.size(); ++i) {
            Mat22 g = p1.lift(i);
            CHECK(g.det() == 1);
            CHECK(p1.index_of_matrix(g) == i);
        }
    }
    // Unit multiples are identified.
    P1Space p1 = P1Space::build(Int(26));
    CHECK(p1.index_of(Int(3), Int(5)) == p1.index_of(Int(9), Int(15)));
    CHECK(p1.index_of(Int(3), Int(5)) == p1.index_of(Int(3 * 7), Int(5 * 7)));
}

TEST_CASE("weight action is multiplicative") {
    std::mt19937_64 rng(99);
    long w = 4;
    for (int t = 0; t < 30; ++t) {
        Mat22 g{static_cast<long>(rng() % 9) - 4, static_cast<long>(rng() % 9) - 4,
                static_cast<long>(rng() % 9) - 4, static_cast<long>(rng() % 9) - 4};
        Mat22 h{static_cast<long>(rng() % 9) - 4, static_cast<long>(rng() % 9) - 4,
                static_cast<long>(rng() % 9) - 4, static_cast<long>(rng() % 9) - 4};
        auto Wg = weight_action(g, w);
        auto Wh = weight_action(h, w);
        auto Wgh = weight_action(g * h, w);
        // (P|g)|h = P|(gh): matrix of |h times matrix of |g.
        for (long i = 0; i <= w; ++i) {
            for (long j = 0; j <= w; ++j) {
                Int acc = 0;
                for (long l = 0; l <= w; ++l) acc += Wh[i][l] * Wg[l][j];
                CHECK(acc == Wgh[i][j]);
            }
        }
    }
}

TEST_CASE("dimension oracle") {
    CHECK(dimension_oracle(Int(1), 12).dim_sk == 1);
    CHECK(dimension_oracle(Int(11), 2).dim_sk == 1);
    CHECK(dimension_oracle(Int(23), 2).dim_sk == 2);
    CHECK(dimension_oracle(Int(26), 6).dim_sk == 15);
    CHECK(dimension_oracle(Int(32), 2).dim_sk == 1);
    CHECK(dimension_oracle(Int(32), 4).dim_sk == 8);
    CHECK(dimension_oracle(Int(154), 2).dim_sk == 21);
    CHECK(dimension_oracle(Int(154), 4).dim_sk == 68);
    CHECK(dimension_oracle(Int(256), 2).dim_sk == 21);
}

TEST_CASE("symbol space dimensions match the oracle") {
    // The constructor throws on any mismatch, so building is the check.
    for (auto [N, k] : std::vector<std::pair<long, long>>{
             {1, 12}, {11, 2}, {23, 2}, {26, 6}, {32, 2}, {32, 4}}) {
        SymbolSpace sp = SymbolSpace::build(Int(N), k);
        CHECK(sp.dim() == sp.dim_info().dim_symb);
        // Every basis vector satisfies the Manin relations.
        for (long j = 0; j < sp.dim(); ++j) {
            QVec col = sp.basis().col(j);
            CHECK(sp.in_space(col));
        }
    }
}

TEST_CASE("Hecke operators commute and preserve the space") {
    auto spp = std::make_shared<const SymbolSpace>(SymbolSpace::build(Int(11), 2));
    const SymbolSpace& sp = *spp;
    QMat T2 = sp.plan_matrix(sp.hecke_plan(Int(2)));
    QMat T3 = sp.plan_matrix(sp.hecke_plan(Int(3)));
    QMat I = sp.plan_matrix(sp.iota_plan());
    CHECK(mat_mul(T2, T3) == mat_mul(T3, T2));
    CHECK(mat_mul(I, T2) == mat_mul(T2, I));
    CHECK(mat_mul(I, I) == QMat(QMat::Identity(sp.dim(), sp.dim())));
    // Images stay inside the relation kernel.
    for (long j = 0; j < sp.dim(); ++j) {
        QVec col = sp.basis().col(j);
        CHECK(sp.in_space(sp.apply_plan(sp.hecke_plan(Int(2)), col)));
        CHECK(sp.in_space(sp.apply_plan(sp.iota_plan(), col)));
    }
    // Cuspidal subspace has dimension 2 dim S_2(11) = 2.
    QMat C = cuspidal_subspace(sp, T2, Int(2));
    CHECK(C.cols() == 2);
}

TEST_CASE("rational eigensymbol: 11a") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto spp = std::make_shared<const SymbolSpace>(SymbolSpace::build(Int(11), 2));
    std::vector<QMat> mats{spp->plan_matrix(spp->hecke_plan(Int(2)))};
    QMat iota = spp->plan_matrix(spp->iota_plan());
    for (int sign : {+1, -1}) {
        auto es = make_eigensymbol<Rat>(spp, mats, {Rat(-2)}, iota, sign, ctx, "11a");
        // Hecke eigenproperty on the flat vector, for an operator not used
        // in the cut: T_3 with a_3 = -1.
        QVec img = spp->apply_plan(spp->hecke_plan(Int(3)), es.flat);
        for (long i = 0; i < img.size(); ++i) CHECK(img(i) == Rat(-1) * es.flat(i));
        // iota eigenproperty.
        QVec iimg = spp->apply_plan(spp->iota_plan(), es.flat);
        for (long i = 0; i < iimg.size(); ++i) CHECK(iimg(i) == Rat(sign) * es.flat(i));
        // Normalization: minimal 3-adic valuation is zero, and repeating
        // the normalization is a no-op.
        Vec<Rat> copy = es.flat;
        CHECK(normalize_cohomological(copy, ctx) == 1);
        // Path symmetry [-a/m]_j = sign * (-1)^(k-j) [a/m]_j.
        for (long m : {5L, 7L, 9L}) {
            for (long a = 1; a < m; ++a) {
                if (gcd_int(Int(a), Int(m)) != 1) continue;
                auto v = evaluate_path(es, Int(a), Int(m));
                auto vm = evaluate_path(es, Int(-a), Int(m));
                for (long j = 0; j <= spp->w(); ++j) {
                    int s = sign * (((2 - j) % 2 == 0) ? 1 : -1);
                    CHECK(vm[j] == Rat(s) * v[j]);
                }
            }
        }
    }
}

TEST_CASE("ambiguous and empty eigenspaces are reported") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto spp = std::make_shared<const SymbolSpace>(SymbolSpace::build(Int(11), 2));
    QMat iota = spp->plan_matrix(spp->iota_plan());
    // No eigenvalue constraints at all: the sign eigenspace is too big.
    CHECK_THROWS_AS(make_eigensymbol<Rat>(spp, {}, {}, iota, +1, ctx, "x"),
                    Error);
    // Wrong eigenvalue: empty.
    std::vector<QMat> mats{spp->plan_matrix(spp->hecke_plan(Int(2)))};
    CHECK_THROWS_AS(make_eigensymbol<Rat>(spp, mats, {Rat(17)}, iota, +1, ctx, "x"),
                    Error);
}

TEST_CASE("number-field eigensymbol: level 23 weight 2 at inert p = 3") {
    auto ctx = PrimeContext::make(Int(3), 12);
    auto K = std::make_shared<NumberField>();
    K->poly = {Int(-1), Int(1), Int(1)};  // x^2 + x - 1, the T_2 charpoly
    ctx.attach_field(K, 0);
    CHECK(ctx.f_res == 2);  // 3 inert in Q(sqrt 5)

    auto spp = std::make_shared<const SymbolSpace>(SymbolSpace::build(Int(23), 2));
    std::vector<QMat> mats{spp->plan_matrix(spp->hecke_plan(Int(2)))};
    QMat iota = spp->plan_matrix(spp->iota_plan());
    NFElem alpha(K, {Rat(0), Rat(1)});  // a_2 = root of x^2 + x - 1
    auto es = make_eigensymbol<NFElem>(spp, mats, {alpha}, iota, +1, ctx, "23a");
    // Derive a_3 from the symbol: T_3 flat = a_3 * flat.
    Vec<NFElem> img = spp->apply_plan(spp->hecke_plan(Int(3)), es.flat);
    NFElem a3;
    bool found = false;
    for (long i = 0; i < img.size() && !found; ++i) {
        if (!es.flat(i).is_zero()) {
            a3 = img(i) * es.flat(i).inverse();
            found = true;
        }
    }
    REQUIRE(found);
    for (long i = 0; i < img.size(); ++i) CHECK(img(i) == a3 * es.flat(i));
    // a_3 = -2 a_2 - 1 for this form (trace 0, norm -5, within the Hasse bound).
    CHECK(a3 == NFElem(Rat(0)) - alpha * NFElem(Rat(2)) - NFElem(Rat(1)));
}

TEST_CASE("weight 6 level 26 eigensymbol with the tabulated eigenvalues") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto spp = std::make_shared<const SymbolSpace>(SymbolSpace::build(Int(26), 6));
    std::vector<QMat> mats{spp->plan_matrix(spp->hecke_plan(Int(5))),
                           spp->plan_matrix(spp->hecke_plan(Int(7)))};
    QMat iota = spp->plan_matrix(spp->iota_plan());
    for (int sign : {+1, -1}) {
        auto es = make_eigensymbol<Rat>(spp, mats, {Rat(-14), Rat(-170)}, iota, sign, ctx,
                                        "26.6");
        // The symbol also has a_3 = 0 (the nonordinary eigenvalue at p = 3).
        QVec img = spp->apply_plan(spp->hecke_plan(Int(3)), es.flat);
        for (long i = 0; i < img.size(); ++i) CHECK(img(i) == 0);
        Vec<Rat> copy = es.flat;
        CHECK(normalize_cohomological(copy, ctx) == 1);
    }
}
