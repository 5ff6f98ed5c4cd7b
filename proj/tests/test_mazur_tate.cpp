#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mt/mazur_tate.hpp"

using namespace mt;

namespace {

// The (26, 6) form: a_2 = -4, a_3 = 0, a_5 = -14, a_7 = -170.
SymbolPair<Rat> form_26_6(const PrimeContext& ctx) {
    static SymbolPair<Rat> F = [] {
        auto ctx0 = PrimeContext::make(Int(3), 24);
        auto spp = std::make_shared<const SymbolSpace>(SymbolSpace::build(Int(26), 6));
        std::vector<QMat> mats{spp->plan_matrix(spp->hecke_plan(Int(5))),
                               spp->plan_matrix(spp->hecke_plan(Int(7)))};
        QMat iota = spp->plan_matrix(spp->iota_plan());
        SymbolPair<Rat> G;
        G.space = spp;
        G.k = 6;
        G.ap = 0;
        G.label = "26-6";
        G.plus = make_eigensymbol<Rat>(spp, mats, {Rat(-14), Rat(-170)}, iota, +1, ctx0,
                                       G.label);
        G.minus = make_eigensymbol<Rat>(spp, mats, {Rat(-14), Rat(-170)}, iota, -1, ctx0,
                                        G.label);
        return G;
    }();
    (void)ctx;
    return F;
}

// The level 32 weight 2 form (the a_3 = 0 elliptic curve of conductor 32).
SymbolPair<Rat> form_32_2() {
    static SymbolPair<Rat> F = [] {
        auto ctx0 = PrimeContext::make(Int(3), 24);
        auto spp = std::make_shared<const SymbolSpace>(SymbolSpace::build(Int(32), 2));
        std::vector<QMat> mats{spp->plan_matrix(spp->hecke_plan(Int(3))),
                               spp->plan_matrix(spp->hecke_plan(Int(5)))};
        QMat iota = spp->plan_matrix(spp->iota_plan());
        SymbolPair<Rat> G;
        G.space = spp;
        G.k = 2;
        G.ap = 0;
        G.label = "32-2";
        G.plus = make_eigensymbol<Rat>(spp, mats, {Rat(0), Rat(-2)}, iota, +1, ctx0, G.label);
        G.minus = make_eigensymbol<Rat>(spp, mats, {Rat(0), Rat(-2)}, iota, -1, ctx0, G.label);
        return G;
    }();
    return F;
}

}  // namespace

TEST_CASE("theta sign selection") {
    CHECK(theta_sign(6, 0, 0) == +1);
    CHECK(theta_sign(6, 1, 0) == -1);
    CHECK(theta_sign(6, 0, 1) == -1);
    CHECK(theta_sign(2, 0, 0) == +1);
    CHECK(theta_sign(5, 0, 0) == -1);
}

TEST_CASE("theta lambda table for the (26,6) form") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto F = form_26_6(ctx);
    std::vector<long> expect{1, 5, 17};
    for (long n = 1; n <= 3; ++n) {
        auto th = theta(F, ctx, n, 0);
        CHECK(th.sign == +1);
        CHECK(Int(th.exps.size()) == ctx.p_pow(n));
        InvariantPair inv = theta_invariants(th, ctx);
        CHECK(inv.lambda == expect[n - 1]);
        CHECK(augmentation_consistent(th));
        CHECK(interpolation_zero_check(th, ctx));
    }
    // n = 0: a single constant.
    auto th0 = theta(F, ctx, 0, 0);
    CHECK(th0.exps.size() == 1);
    CHECK(th0.poly.c.size() <= 1);
}

TEST_CASE("three-term relation for the (26,6) form") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto F = form_26_6(ctx);
    std::vector<ThetaElement<Rat>> th;
    for (long n = 0; n <= 3; ++n) th.push_back(theta(F, ctx, n, 0));
    for (long n = 1; n <= 2; ++n) {
        auto r = three_term_residual(th[n - 1], th[n], th[n + 1], F.ap, F.eps_p, F.k, ctx);
        CHECK(three_term_holds(r));
    }
    // Perturbing a_p breaks the relation (theta_1 is nonzero).
    auto bad = three_term_residual(th[0], th[1], th[2], Rat(1), F.eps_p, F.k, ctx);
    CHECK(!three_term_holds(bad));
}

TEST_CASE("Hecke bracket identity including the degenerate base") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto F = form_26_6(ctx);
    for (int sign : {+1, -1}) {
        CHECK(hecke_bracket_check(F, ctx, sign, Int(3), Int(1)));   // m/p = 1 base
        CHECK(hecke_bracket_check(F, ctx, sign, Int(3), Int(2)));
        CHECK(hecke_bracket_check(F, ctx, sign, Int(9), Int(4)));
    }
}

TEST_CASE("interpolation zeros and their parity") {
    auto ctx = PrimeContext::make(Int(3), 24);
    // p = 3: N = n+1; n = 2 -> N odd -> divisor Phi_1(1+T);
    //         n = 3 -> N even -> divisor Phi_2(1+T).
    CHECK(interpolation_divisor(ctx, 1) == std::vector<Int>{Int(1)});
    CHECK(interpolation_divisor(ctx, 2) == phi_poly_shifted(ctx, 1));
    CHECK(interpolation_divisor(ctx, 3) == phi_poly_shifted(ctx, 2));
    auto F = form_26_6(ctx);
    // Also at j = 1 (minus-sign theta).
    auto th = theta(F, ctx, 2, 1);
    CHECK(th.sign == -1);
    CHECK(interpolation_zero_check(th, ctx));
    CHECK(augmentation_consistent(th));
}

TEST_CASE("character valuation identity") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto F = form_26_6(ctx);
    auto th3 = theta(F, ctx, 3, 0);
    CharValReport rep = character_valuation(th3, ctx);
    CHECK(!rep.infinite);
    CHECK(rep.match);
    InvariantPair inv = theta_invariants(th3, ctx);
    CHECK(rep.invariant_side == inv.mu + Rat(17) / Rat(18));
    // Trivial shapes.
    ThetaElement<Rat> tp;
    tp.n = 2;
    tp.poly.c = {Rat(3)};
    CHECK(character_valuation(tp, ctx).resultant_side == 1);
    ThetaElement<Rat> tt;
    tt.n = 2;
    tt.poly.c = {Rat(0), Rat(0), Rat(1)};  // T^2, lambda=2 < t_2=6
    CHECK(character_valuation(tt, ctx).resultant_side == Rat(2) / Rat(6));
}

TEST_CASE("scaling by p shifts mu only") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto F = form_26_6(ctx);
    auto th = theta(F, ctx, 2, 0);
    InvariantPair base = theta_invariants(th, ctx);
    ThetaElement<Rat> scaled = th;
    scaled.poly.c = poly_scale_rat(scaled.poly.c, Rat(3));
    InvariantPair up = theta_invariants(scaled, ctx);
    CHECK(up.lambda == base.lambda);
    CHECK(up.mu == base.mu + 1);
}

TEST_CASE("twisted theta with psi = omega^i") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto F = form_26_6(ctx);
    // i = 0 reproduces the exact theta mod p^M.
    auto exact = theta(F, ctx, 2, 0);
    auto tw0 = theta_twisted(F, ctx, 2, 0, 0);
    REQUIRE(tw0.exps.size() == exact.exps.size());
    ZqRingPtr ring = ZqRing::make_zp(ctx.p, ctx.M);
    for (size_t e = 0; e < exact.exps.size(); ++e) {
        Zq diff = tw0.exps[e] - Zq::from_rat(ring, exact.exps[e]);
        CHECK(diff.is_zero());
    }
    // i = 1: odd twist flips the sign choice.
    auto tw1 = theta_twisted(F, ctx, 2, 0, 1);
    CHECK(tw1.sign == -1);
    CHECK(interpolation_zero_check(tw1, ctx));
    CHECK(augmentation_consistent(tw1));
    InvariantPair inv1 = theta_invariants(tw1, ctx);
    CHECK(inv1.lambda >= 0);
    // i = 2: even twist, plus symbol.
    auto tw2 = theta_twisted(F, ctx, 2, 0, 2);
    CHECK(tw2.sign == +1);
    CHECK(interpolation_zero_check(tw2, ctx));
    // 3-term relation for the omega^1 twist.
    auto a0 = theta_twisted(F, ctx, 0, 0, 1);
    auto a1 = theta_twisted(F, ctx, 1, 0, 1);
    auto a2 = theta_twisted(F, ctx, 2, 0, 1);
    auto r = three_term_residual(a0, a1, a2, Zq(), F.eps_p, F.k, ctx);
    CHECK(three_term_holds(r));
}

TEST_CASE("weight 2 form at level 32") {
    auto ctx = PrimeContext::make(Int(3), 24);
    auto F = form_32_2();
    std::vector<long> expect{0, 2, 6};
    std::vector<ThetaElement<Rat>> th;
    for (long n = 0; n <= 3; ++n) th.push_back(theta(F, ctx, n, 0));
    for (long n = 1; n <= 3; ++n) {
        CHECK(theta_invariants(th[n], ctx).lambda == expect[n - 1]);
        CHECK(interpolation_zero_check(th[n], ctx));
    }
    for (long n = 1; n <= 2; ++n) {
        auto r = three_term_residual(th[n - 1], th[n], th[n + 1], F.ap, F.eps_p, F.k, ctx);
        CHECK(three_term_holds(r));
    }
    for (int sign : {+1, -1}) CHECK(hecke_bracket_check(F, ctx, sign, Int(3), Int(1)));
}
