#include "doctest.h"

#include "qprime/errors.hpp"
#include "qprime/invariants.hpp"

#include <map>
#include <random>

using namespace qprime;

namespace {

HolPoly family_upsilon(const Rational& a, const Rational& b) {
    // a(z^2 + z) + b(1+i)w
    HolPoly u;
    u.n = 1;
    u.terms = {{{2}, 0, GaussRational(a)},
               {{1}, 0, GaussRational(a)},
               {{0}, 1, GaussRational(b, b)}};
    return u;
}

HolPoly random_holpoly(std::mt19937_64& rng, int maxdeg = 3) {
    std::uniform_int_distribution<int> num(-2, 2), den(1, 3), pick(0, 1);
    HolPoly p;
    p.n = 1;
    for (int a = 0; a <= maxdeg; ++a)
        for (int b = 0; a + b <= maxdeg; ++b) {
            if (a == 0 && b == 0) continue;
            if (pick(rng)) continue;
            GaussRational c(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
            if (c.is_zero()) continue;
            p.terms.push_back({{a}, b, c});
        }
    if (p.terms.empty()) p.terms.push_back({{1}, 0, GaussRational(1)});
    return p;
}

HolPoly concat(const HolPoly& a, const HolPoly& b) {
    HolPoly out = a;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    return out;
}

struct QuadricSetup {
    RigidSurface surf;
    AmbientMetric metric;
};

const QuadricSetup& quadric(int trunc) {
    static std::map<int, QuadricSetup> cache;
    auto it = cache.find(trunc);
    if (it == cache.end()) {
        RigidSurface s = quadric_surface(1, trunc);
        it = cache.emplace(trunc, QuadricSetup{s, build_ambient(s.rho0(), 1)}).first;
    }
    return it->second;
}

} // namespace

TEST_CASE("GJMS kills constants and pluriharmonics") {
    const auto& q = quadric(8);
    AmbientElement one(Bidegree(),
                       MultiSeries::constant(ambient_vars(1), 8, GaussRational(1)));
    CHECK(gjms(q.metric, q.surf, one).s.is_zero());

    HolPoly p;
    p.n = 1;
    p.terms = {{{3}, 0, GaussRational(Rational(1, 2))}};
    CHECK(gjms(q.metric, q.surf, pluriharmonic_element(p, 8)).s.is_zero());
}

TEST_CASE("GJMS weight admissibility") {
    const auto& q = quadric(8);
    auto av = ambient_vars(1);
    AmbientElement bad(Bidegree(Rational(1, 2), Rational(1, 2)),
                       MultiSeries::constant(av, 8, GaussRational(1)));
    CHECK_THROWS_AS(gjms(q.metric, q.surf, bad), precondition_error);
    AmbientElement unbalanced(Bidegree(0, -1),
                              MultiSeries::constant(av, 8, GaussRational(1)));
    CHECK_THROWS_AS(gjms(q.metric, q.surf, unbalanced), precondition_error);
}

TEST_CASE("GJMS is independent of the ambient extension") {
    std::mt19937_64 rng(31);
    const auto& q = quadric(8);
    AmbientElement rs = rsharp_element(q.metric.r);
    std::uniform_int_distribution<int> num(-2, 2), den(1, 2);
    for (int rep = 0; rep < 8; ++rep) {
        HolPoly f = random_holpoly(rng);
        MultiSeries base = hol_series(f, ambient_vars(1), 8);
        MultiSeries zb = MultiSeries::variable(ambient_vars(1), 8, "zb");
        AmbientElement fe(Bidegree(), base * zb + (base * zb).conj());
        MultiSeries phis(ambient_vars(1), 8);
        for (int k = 0; k < 3; ++k) {
            MultiSeries::Exp e(4, 0);
            e[0] = num(rng) & 1;
            e[1] = num(rng) & 1;
            phis += MultiSeries::monomial(ambient_vars(1), 8, e,
                                          GaussRational(Rational(num(rng), den(rng))));
        }
        AmbientElement phi(Bidegree(-1, -1), phis);
        BoundaryField b1 = gjms(q.metric, q.surf, fe);
        BoundaryField b2 = gjms(q.metric, q.surf, fe + rs * phi);
        CHECK(b1.s.matches(b2.s));
    }
    // and at half-integer weight m = -1/2 (the operator P_1)
    for (int rep = 0; rep < 3; ++rep) {
        MultiSeries s(ambient_vars(1), 8);
        for (int k = 0; k < 4; ++k) {
            MultiSeries::Exp e(4, 0);
            e[0] = num(rng) & 1;
            e[1] = num(rng) & 1;
            e[2] = num(rng) & 1;
            s += MultiSeries::monomial(ambient_vars(1), 8, e,
                                       GaussRational(Rational(num(rng), den(rng))));
        }
        AmbientElement fe(Bidegree(Rational(-1, 2), Rational(-1, 2)), s);
        AmbientElement phi(Bidegree(Rational(-3, 2), Rational(-3, 2)),
                           MultiSeries::constant(ambient_vars(1), 8, GaussRational(1)));
        BoundaryField b1 = gjms(q.metric, q.surf, fe);
        BoundaryField b2 = gjms(q.metric, q.surf, fe + rs * phi);
        CHECK(b1.s.matches(b2.s));
    }
}

TEST_CASE("gjms and gjms_via_expansion agree, including the scaling constant") {
    std::mt19937_64 rng(37);
    // D = 10 leaves a wider trusted window for the staged construction.
    RigidSurface s10 = quadric_surface(1, 10);
    AmbientMetric m10 = build_ambient(s10.rho0(), 1);

    AmbientElement one(Bidegree(),
                       MultiSeries::constant(ambient_vars(1), 10, GaussRational(1)));
    CHECK(gjms_via_expansion(m10, s10, one).s.is_zero());

    std::uniform_int_distribution<int> num(-2, 2), den(1, 2);
    for (int rep = 0; rep < 10; ++rep) {
        MultiSeries f(ambient_vars(1), 10);
        for (int k = 0; k < 4; ++k) {
            MultiSeries::Exp e(4, 0);
            e[0] = num(rng) & 1;
            e[1] = num(rng) & 1;
            e[2] = (rep + k) % 2;
            e[3] = num(rng) & 1;
            f += MultiSeries::monomial(ambient_vars(1), 10, e,
                                       GaussRational(Rational(num(rng), den(rng)),
                                                     Rational(num(rng), den(rng))));
        }
        f = f + f.conj();
        AmbientElement fe(Bidegree(), f);
        BoundaryField direct = gjms(m10, s10, fe);
        BoundaryField staged = gjms_via_expansion(m10, s10, fe);
        CHECK(direct.s.matches(staged.s));
        // Lemma scaling: B0 * (-1)^{n+1}(n+1)! n! recovers P f  (= 2 B0 at n=1).
        BoundaryField b0 = gjms_expansion_log_coefficient(m10, s10, fe);
        CHECK(direct.s.matches(b0.s.scaled(GaussRational(2))));
    }
}

TEST_CASE("Q-curvature: flat and pseudo-Einstein scalings vanish") {
    const auto& q = quadric(8);
    MultiSeries zero_ups(ambient_vars(1), 8);
    CHECK(q_curvature_ambient(q.metric, q.surf, zero_ups).s.is_zero());

    for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}, {2, -1}}) {
        MultiSeries ups = pluriharmonic_ambient(family_upsilon(a, b), 8);
        CHECK(q_curvature_ambient(q.metric, q.surf, ups).s.is_zero());
    }

    // |z|^2 on the quadric equals 2 Re w, hence IS CR-pluriharmonic
    // there and its Q vanishes; |z|^4 is genuinely non-pluriharmonic.
    MultiSeries zzb = MultiSeries::variable(ambient_vars(1), 8, "z") *
                      MultiSeries::variable(ambient_vars(1), 8, "zb");
    CHECK(q_curvature_ambient(q.metric, q.surf, zzb).s.is_zero());
    CHECK(!q_curvature_ambient(q.metric, q.surf, zzb * zzb).s.is_zero());
}

TEST_CASE("Q' on the model family equals 8(a^2+b^2) exactly") {
    const auto& q = quadric(8);
    for (auto [aa, bb] : std::vector<std::pair<Rational, Rational>>{
             {1, 0}, {0, 1}, {2, 1}, {Rational(1, 2), Rational(-1, 3)}, {-2, 2}}) {
        HolPoly ups = family_upsilon(aa, bb);
        BoundaryField qp = q_prime(q.metric, q.surf, ups);
        CHECK(qp.deg.p == Rational(-2));
        GaussRational want(Rational(8 * (aa * aa + bb * bb)));
        CHECK(origin_value(qp) == want);
    }
    HolPoly zero;
    zero.n = 1;
    CHECK(q_prime(q.metric, q.surf, zero).s.is_zero());
}

TEST_CASE("intermediate of the model computation: Delta^2 |f|^2 = 4(a^2+b^2) at e0") {
    const auto& q = quadric(8);
    for (auto [aa, bb] : std::vector<std::pair<Rational, Rational>>{{1, 0}, {0, 1}, {3, -2}}) {
        MultiSeries f = hol_series(family_upsilon(aa, bb), ambient_vars(1), 8);
        AmbientElement ff(Bidegree(), f * f.conj());
        AmbientElement out = laplacian_power(q.metric, ff, 2);
        BoundaryField b = restrict_to_boundary(out, q.surf);
        CHECK(origin_value(b) == GaussRational(Rational(4 * (aa * aa + bb * bb))));
    }
}

TEST_CASE("Q' at n = 2 vanishes on the flat model") {
    RigidSurface s = quadric_surface(2, 6);
    AmbientMetric m = build_ambient(s.rho0(), 2);
    HolPoly zero;
    zero.n = 2;
    BoundaryField qp = q_prime(m, s, zero);
    CHECK(qp.s.is_zero());
    CHECK(qp.deg.p == Rational(-3));
}

TEST_CASE("P'1 = -Q vanishes for pseudo-Einstein scalings") {
    const auto& q = quadric(8);
    HolPoly one_poly;
    one_poly.n = 1;
    one_poly.terms = {{{0}, 0, GaussRational(Rational(1, 2))}}; // 2 Re(1/2) = 1
    for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 0}, {2, 1}}) {
        HolPoly ups = family_upsilon(a, b);
        BoundaryField p1 = p_prime(q.metric, q.surf, ups, one_poly);
        CHECK(p1.s.is_zero());
    }
}

TEST_CASE("P' annihilates pluriharmonic f over the flat contact form") {
    const auto& q = quadric(8);
    HolPoly zero;
    zero.n = 1;
    HolPoly f;
    f.n = 1;
    f.terms = {{{1}, 0, GaussRational(Rational(1, 2))}}; // f = Re z
    BoundaryField out = p_prime(q.metric, q.surf, zero, f);
    CHECK(out.s.is_zero());
}

TEST_CASE("transformation law of P' (>= 10 random pluriharmonic pairs)") {
    std::mt19937_64 rng(41);
    const auto& q = quadric(8);
    for (int rep = 0; rep < 10; ++rep) {
        HolPoly ups = random_holpoly(rng);
        HolPoly f = random_holpoly(rng);
        BoundaryField lhs = p_prime(q.metric, q.surf, ups, f);
        BoundaryField p0 = p_prime(q.metric, q.surf, HolPoly{1, {}}, f);
        MultiSeries uf = pluriharmonic_ambient(ups, 8) * pluriharmonic_ambient(f, 8);
        BoundaryField puf = gjms(q.metric, q.surf, AmbientElement(Bidegree(), uf));
        CHECK(lhs.s.matches(p0.s + puf.s));
    }
    // richer: base theta = e^{U1} theta_0, further scaling U2
    for (int rep = 0; rep < 4; ++rep) {
        HolPoly u1 = random_holpoly(rng, 2);
        HolPoly u2 = random_holpoly(rng, 2);
        HolPoly f = random_holpoly(rng, 2);
        BoundaryField lhs = p_prime(q.metric, q.surf, concat(u1, u2), f);
        BoundaryField base = p_prime(q.metric, q.surf, u1, f);
        MultiSeries uf = pluriharmonic_ambient(u2, 8) * pluriharmonic_ambient(f, 8);
        BoundaryField puf = gjms(q.metric, q.surf, AmbientElement(Bidegree(), uf));
        CHECK(lhs.s.matches(base.s + puf.s));
    }
}

TEST_CASE("transformation law of Q' (>= 10 random pluriharmonic scalings)") {
    std::mt19937_64 rng(43);
    const auto& q = quadric(8);
    for (int rep = 0; rep < 10; ++rep) {
        HolPoly u1 = random_holpoly(rng, rep % 2 ? 3 : 2);
        HolPoly u2 = random_holpoly(rng, 2);
        BoundaryField lhs = q_prime(q.metric, q.surf, concat(u1, u2));
        BoundaryField base = q_prime(q.metric, q.surf, u1);
        BoundaryField pp = p_prime(q.metric, q.surf, u1, u2);
        MultiSeries u2s = pluriharmonic_ambient(u2, 8);
        BoundaryField pu2 = gjms(q.metric, q.surf, AmbientElement(Bidegree(), u2s * u2s));
        CHECK(lhs.s.matches(base.s + pp.s.scaled(GaussRational(2)) + pu2.s));
    }
}

TEST_CASE("density_as_function") {
    const auto& q = quadric(8);
    BoundaryField f0;
    f0.deg = Bidegree(0, 0);
    f0.s = restrict_series(pluriharmonic_ambient(family_upsilon(1, 1), 8), q.surf);
    MultiSeries ups_b(boundary_vars(1), 8);
    CHECK(density_as_function(f0, ups_b).matches(f0.s));

    BoundaryField qp = q_prime(q.metric, q.surf, family_upsilon(1, 0));
    CHECK(density_as_function(qp, ups_b).matches(qp.s));

    MultiSeries u = restrict_series(pluriharmonic_ambient(family_upsilon(0, 1), 8), q.surf);
    MultiSeries got = density_as_function(qp, u);
    MultiSeries want = qp.s * u.scaled(GaussRational(-2)).exp();
    CHECK(got.matches(want));
}
