#include "doctest.h"

#include "qprime/errors.hpp"
#include "qprime/invariants.hpp"
#include "qprime/tw.hpp"

#include <random>

using namespace qprime;

namespace {

HolPoly family_poly(const Rational& a, const Rational& b) {
    HolPoly u;
    u.n = 1;
    u.terms = {{{2}, 0, GaussRational(a)},
               {{1}, 0, GaussRational(a)},
               {{0}, 1, GaussRational(b, b)}};
    return u;
}

MultiSeries family_upsilon(const Rational& a, const Rational& b, int trunc = 8) {
    return pluriharmonic_flat_boundary(family_poly(a, b), trunc);
}

MultiSeries bvar(const std::string& n, int trunc = 8) {
    return MultiSeries::variable(boundary_vars(1), trunc, n);
}

MultiSeries random_real_field(std::mt19937_64& rng, int trunc, int terms) {
    auto bv = boundary_vars(1);
    MultiSeries s(bv, trunc);
    std::uniform_int_distribution<int> num(-2, 2), den(1, 2), e(0, 2);
    for (int k = 0; k < terms; ++k) {
        MultiSeries::Exp ex(3, 0);
        ex[0] = e(rng);
        ex[1] = e(rng);
        ex[2] = e(rng) / 2;
        if (ex[0] + ex[1] + ex[2] > trunc) continue;
        GaussRational c(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
        s += MultiSeries::monomial(bv, trunc, ex, c);
    }
    return s + s.conj();
}

int rank_of(std::vector<std::vector<Rational>> m) {
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[piv], m[rank]);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || m[r][c] == 0) continue;
            Rational f = m[r][c] / m[rank][c];
            for (int cc = c; cc < cols; ++cc) m[r][cc] -= f * m[rank][cc];
        }
        ++rank;
    }
    return rank;
}

} // namespace

TEST_CASE("flat frame reproduces the paper's model derivatives of Upsilon") {
    for (auto [a, b] : std::vector<std::pair<Rational, Rational>>{{1, 0}, {0, 1}, {2, -3}}) {
        MultiSeries U = family_upsilon(a, b);
        TWFrame fr = TWFrame::flat(8);
        CHECK(fr.t0(U).constant_term() == GaussRational(Rational(b * 2)));
        MultiSeries u1 = fr.z1(U);
        CHECK(u1.constant_term() == GaussRational(a));
        MultiSeries want_u1 = bvar("z").scaled(GaussRational(Rational(a * 2)))
                                  .plus_const(GaussRational(a)) +
                              bvar("zb").scaled(GaussRational(b, b));
        CHECK(u1.matches(want_u1));
        CHECK(fr.z1(u1).constant_term() == GaussRational(Rational(a * 2)));
        CHECK(fr.z1b(u1).constant_term() == GaussRational(b, b));
    }
}

TEST_CASE("scaled invariants match the section-6.2 closed forms") {
    for (auto [a, b] : std::vector<std::pair<Rational, Rational>>{{1, 0}, {0, 1}, {1, 1}, {-2, 3}}) {
        PHInvariants inv = scaled_invariants(family_upsilon(a, b));
        TWFrame flat = TWFrame::flat(8);
        MultiSeries u1 = flat.z1(family_upsilon(a, b));
        MultiSeries want = (u1 * u1.conj()).scaled(GaussRational(-2))
                               .plus_const(GaussRational(Rational(b * -4)));
        CHECK(inv.Scal.comp.matches(want));
        CHECK(inv.A11.comp.constant_term() ==
              GaussRational(Rational(0), Rational(a * 2 - a * a)));
    }
}

TEST_CASE("trans-terms: the four scalars at the origin") {
    for (auto [a, b] : std::vector<std::pair<Rational, Rational>>{
             {1, 0}, {0, 1}, {1, 1}, {2, 1}, {-1, 2}, {Rational(1, 2), Rational(2, 3)}}) {
        PHInvariants inv = scaled_invariants(family_upsilon(a, b));
        const TWFrame& fr = inv.frame;
        TWObj scal{inv.Scal.comp, 0, 0, -1};

        GaussRational dbs = fr.lapb(scal).c.constant_term();
        CHECK(dbs == GaussRational(Rational(-8) * a * a * (a + b - 2)));

        GaussRational s2 = (inv.Scal.comp * inv.Scal.comp).constant_term();
        Rational t = a * a + b * 2;
        CHECK(s2 == GaussRational(Rational(4) * t * t));

        GaussRational s0 = fr.d0(scal).c.constant_term();
        CHECK(s0 == GaussRational(Rational(8) * b * (a * a + b)));

        GaussRational a2 = (inv.A11.comp * inv.A11.comp.conj()).constant_term();
        CHECK(a2 == GaussRational(a * a * (a - 2) * (a - 2)));
    }
}

TEST_CASE("the four trans-terms polynomials are linearly independent") {
    std::vector<std::pair<Rational, Rational>> pts = {{1, 0}, {0, 1}, {1, 1}, {2, 1},
                                                      {-1, 1}, {1, -1}, {3, 2}};
    std::vector<std::vector<Rational>> m(4, std::vector<Rational>(pts.size()));
    for (std::size_t k = 0; k < pts.size(); ++k) {
        auto [a, b] = pts[k];
        m[0][k] = Rational(-8) * a * a * (a + b - 2);
        Rational t = a * a + b * 2;
        m[1][k] = Rational(4) * t * t;
        m[2][k] = Rational(8) * b * (a * a + b);
        m[3][k] = a * a * (a - 2) * (a - 2);
    }
    CHECK(rank_of(m) == 4);
}

TEST_CASE("q_prime_tw on the family: 8(a^2+b^2), with the (1,1) split") {
    CHECK(q_prime_tw(scaled_invariants(family_upsilon(1, 0))).comp.constant_term() ==
          GaussRational(8));
    CHECK(q_prime_tw(scaled_invariants(family_upsilon(0, 0))).comp.is_zero());

    PHInvariants inv11 = scaled_invariants(family_upsilon(1, 1));
    const TWFrame& fr = inv11.frame;
    GaussRational dbs = fr.lapb(TWObj{inv11.Scal.comp, 0, 0, -1}).c.constant_term();
    GaussRational s2 = (inv11.Scal.comp * inv11.Scal.comp).constant_term();
    GaussRational a2 = (inv11.A11.comp * inv11.A11.comp.conj()).constant_term();
    CHECK(dbs == GaussRational(0));
    CHECK(s2.re / 2 == Rational(18));
    CHECK(a2.re * 2 == Rational(2));
    CHECK(q_prime_tw(inv11).comp.constant_term() == GaussRational(16));
}

TEST_CASE("cross-module oracle: ambient and TW Q' agree as fields") {
    RigidSurface quad = quadric_surface(1, 8);
    AmbientMetric m = build_ambient(quad.rho0(), 1);
    for (auto [a, b] : std::vector<std::pair<Rational, Rational>>{
             {1, 0}, {0, 1}, {2, -1}, {Rational(1, 2), Rational(1, 3)}}) {
        BoundaryField amb = q_prime(m, quad, family_poly(a, b));
        PHField tw = q_prime_tw(scaled_invariants(family_upsilon(a, b)));
        CHECK(amb.s.constant_term() == tw.comp.constant_term());
        CHECK(ambient_to_tw_time(amb.s).matches(tw.comp));
    }
}

TEST_CASE("hat_derivatives closed forms equal the machinery composition") {
    std::mt19937_64 rng(53);
    for (int rep = 0; rep < 6; ++rep) {
        MultiSeries U = random_real_field(rng, 8, 3);
        PHInvariants inv = scaled_invariants(U);
        const TWFrame& fr = inv.frame;
        for (int w : {0, -1, 1, -2}) {
            PHField f{random_real_field(rng, 8, 3), w};
            HatDerivatives hd = hat_derivatives(inv, f);
            TWObj fo{f.comp, 0, 0, w};
            CHECK(hd.nabla1.matches(fr.d1(fo).c));
            CHECK(hd.nabla0.matches(fr.d0(fo).c));
            CHECK(hd.lap_b.matches(fr.lapb(fo).c));
        }
    }
}

TEST_CASE("commutation relation 2 f_[1 1b] = i h f_0 for scaled and rigid frames") {
    std::mt19937_64 rng(59);
    std::vector<TWFrame> frames;
    frames.push_back(TWFrame::flat(8));
    frames.push_back(TWFrame::scaled(random_real_field(rng, 8, 3)));
    frames.push_back(TWFrame::scaled(family_upsilon(2, -1)));
    {
        std::vector<SurfaceTerm> terms = {{{2}, {2}, GaussRational(Rational(1, 5))}};
        frames.push_back(tw_from_rigid_surface(make_rigid_surface(1, terms, 8)).frame);
    }
    for (auto& fr : frames) {
        for (int w : {0, -1, 2}) {
            TWObj f{random_real_field(rng, 8, 3), 0, 0, w};
            MultiSeries lhs = fr.d1b(fr.d1(f)).c - fr.d1(fr.d1b(f)).c;
            MultiSeries rhs = (fr.h() * fr.d0(f).c).scaled(GaussRational::i());
            CHECK(lhs.matches(rhs));
        }
    }
}

TEST_CASE("Bianchi identity: A_11,^{11} + conj = Scal_0") {
    std::mt19937_64 rng(61);
    for (int rep = 0; rep < 4; ++rep) {
        MultiSeries U = (rep < 2) ? family_upsilon(rep + 1, 2 - rep)
                                  : random_real_field(rng, 8, 3);
        PHInvariants inv = scaled_invariants(U);
        const TWFrame& fr = inv.frame;
        TWObj a{inv.A11.comp, 2, 0, 0};
        MultiSeries div2 = fr.hinv() * fr.hinv() * fr.d1b(fr.d1b(a)).c;
        MultiSeries lhs = div2 + div2.conj();
        MultiSeries rhs = fr.d0(TWObj{inv.Scal.comp, 0, 0, -1}).c;
        CHECK(lhs.matches(rhs));
    }
}

TEST_CASE("composite scaling consistency") {
    std::mt19937_64 rng(67);
    for (int rep = 0; rep < 4; ++rep) {
        MultiSeries u1 = random_real_field(rng, 8, 3);
        MultiSeries u2 = random_real_field(rng, 8, 3);
        PHInvariants base = scaled_invariants(u1);
        auto [scal2, a2] = transformed_invariants(base, u2);
        PHInvariants direct = scaled_invariants(u1 + u2);
        CHECK(scal2.comp.matches(direct.Scal.comp));
        CHECK(a2.comp.matches(direct.A11.comp));
    }
}

TEST_CASE("pseudo-Einstein characterization via S_1 and Q") {
    for (auto [a, b] : std::vector<std::pair<Rational, Rational>>{{1, 0}, {2, 1}}) {
        PHInvariants inv = scaled_invariants(family_upsilon(a, b));
        CHECK(pseudo_einstein_test(inv));
        CHECK(q_curvature_tw(inv).comp.is_zero());
    }
    // z zb equals 2 Re w on the quadric: pluriharmonic, so S_1 == 0 too
    MultiSeries zzb = bvar("z") * bvar("zb");
    PHInvariants inv_zzb = scaled_invariants(zzb);
    CHECK(pseudo_einstein_test(inv_zzb));
    CHECK(q_curvature_tw(inv_zzb).comp.is_zero());
    // genuinely non-pluriharmonic: |z|^4
    PHInvariants inv_nph = scaled_invariants(zzb * zzb);
    CHECK(!pseudo_einstein_test(inv_nph));
    CHECK(!q_curvature_tw(inv_nph).comp.is_zero());
}

TEST_CASE("Q-curvature cross-module oracle on a non-pluriharmonic scaling") {
    RigidSurface quad = quadric_surface(1, 8);
    AmbientMetric m = build_ambient(quad.rho0(), 1);
    MultiSeries zzb_amb = MultiSeries::variable(ambient_vars(1), 8, "z") *
                          MultiSeries::variable(ambient_vars(1), 8, "zb");
    BoundaryField amb = q_curvature_ambient(m, quad, zzb_amb * zzb_amb);
    MultiSeries zzb = bvar("z") * bvar("zb");
    PHField tw = q_curvature_tw(scaled_invariants(zzb * zzb));
    CHECK(amb.s.constant_term() == tw.comp.constant_term());
    CHECK(ambient_to_tw_time(amb.s).matches(tw.comp));
}

TEST_CASE("pluriharmonic_test") {
    HolPoly p;
    p.n = 1;
    p.terms = {{{3}, 0, GaussRational(Rational(1, 2))}, {{0}, 1, GaussRational(Rational(1, 2))}};
    PHField f{pluriharmonic_flat_boundary(p, 8), 0};
    CHECK(pluriharmonic_test(f).first);

    PHField ft{bvar("t"), 0};
    CHECK(pluriharmonic_test(ft).first);

    PHField fz{bvar("z") * bvar("zb"), 0};
    CHECK(pluriharmonic_test(fz).first);

    PHField f4{(bvar("z") * bvar("zb")).pow(2), 0};
    auto [ok, witness] = pluriharmonic_test(f4);
    CHECK(!ok);
    CHECK(!witness.comp.is_zero());
}

TEST_CASE("p_prime_tw basics and flat bilaplacian reduction") {
    PHInvariants inv = scaled_invariants(family_upsilon(1, 1));
    PHField one{MultiSeries::constant(boundary_vars(1), 8, GaussRational(1)), 0};
    CHECK(p_prime_tw(inv, one).comp.is_zero());

    PHInvariants flat = scaled_invariants(MultiSeries(boundary_vars(1), 8));
    PHField f{(bvar("z") * bvar("z") + bvar("zb") * bvar("zb"))
                  .scaled(GaussRational(Rational(1, 2))),
              0};
    MultiSeries lap2 = flat.frame.lapb(flat.frame.lapb(TWObj{f.comp, 0, 0, 0})).c;
    CHECK(p_prime_tw(flat, f).comp.matches(lap2));
}

TEST_CASE("tw GJMS P agrees with the ambient construction as fields") {
    RigidSurface quad = quadric_surface(1, 8);
    AmbientMetric m = build_ambient(quad.rho0(), 1);
    PHInvariants flat = scaled_invariants(MultiSeries(boundary_vars(1), 8));
    std::mt19937_64 rng(73);
    std::uniform_int_distribution<int> num(-2, 2), den(1, 2);
    for (int rep = 0; rep < 6; ++rep) {
        MultiSeries fa(ambient_vars(1), 8);
        for (int k = 0; k < 4; ++k) {
            MultiSeries::Exp e(4, 0);
            e[0] = num(rng) & 1;
            e[1] = num(rng) & 1;
            e[2] = (k + rep) % 2;
            e[3] = num(rng) & 1;
            fa += MultiSeries::monomial(ambient_vars(1), 8, e,
                                        GaussRational(Rational(num(rng), den(rng)),
                                                      Rational(num(rng), den(rng))));
        }
        fa = fa + fa.conj();
        BoundaryField amb = gjms(m, quad, AmbientElement(Bidegree(), fa));
        PHField f_tw{ambient_to_tw_time(restrict_series(fa, quad)), 0};
        PHField p_tw = tw_gjms_p(flat, f_tw);
        CHECK(ambient_to_tw_time(amb.s).matches(p_tw.comp));
    }
}

TEST_CASE("p_prime_tw transformation law against the TW operators") {
    PHInvariants flat = scaled_invariants(MultiSeries(boundary_vars(1), 8));
    for (int rep = 0; rep < 5; ++rep) {
        HolPoly up = family_poly(rep + 1, 1 - rep);
        HolPoly fp;
        fp.n = 1;
        fp.terms = {{{std::max(1, rep % 3)}, rep % 2, GaussRational(Rational(1, rep + 1))}};
        MultiSeries U = pluriharmonic_flat_boundary(up, 8);
        MultiSeries f = pluriharmonic_flat_boundary(fp, 8);
        PHInvariants hat = scaled_invariants(U);
        MultiSeries lhs = p_prime_tw(hat, PHField{f, 0}).comp;
        MultiSeries rhs = p_prime_tw(flat, PHField{f, 0}).comp +
                          tw_gjms_p(flat, PHField{U * f, 0}).comp;
        CHECK(lhs.matches(rhs));
    }
}

TEST_CASE("Cartan obstruction layer") {
    std::vector<MultiSeries> ups = {MultiSeries(boundary_vars(1), 8), family_upsilon(1, 0),
                                    family_upsilon(2, -1)};
    for (auto& U : ups) {
        CartanReport rep = cartan_obstruction(scaled_invariants(U));
        CHECK(rep.O11_zero);
        CHECK(rep.imag_zero);
    }
    // non-pseudo-Einstein scaling of the flat structure: still zero
    // (scalings do not change the CR structure).
    MultiSeries zzb = bvar("z") * bvar("zb");
    CartanReport rep = cartan_obstruction(scaled_invariants(zzb * zzb));
    CHECK(rep.O11_zero);
    CHECK(rep.imag_zero);

    // curved rigid surface: nonzero Cartan curvature, real divergence
    std::vector<SurfaceTerm> terms = {{{2}, {2}, GaussRational(Rational(1, 10))}};
    PHInvariants curved = tw_from_rigid_surface(make_rigid_surface(1, terms, 8));
    CartanReport rep2 = cartan_obstruction(curved);
    CHECK(!rep2.O11_zero);
    CHECK(rep2.imag_zero);

    PHInvariants flat = scaled_invariants(MultiSeries(boundary_vars(1), 8));
    PHField f{bvar("zb") * bvar("zb"), 1};
    CHECK(p11_deformation(flat, f).comp.matches(
        flat.frame.d1(flat.frame.d1(TWObj{f.comp, 0, 0, 1})).c));
}

TEST_CASE("burns_epstein_integrand on the family") {
    CHECK(burns_epstein_integrand(scaled_invariants(MultiSeries(boundary_vars(1), 8)))
              .comp.is_zero());
    PHField be = burns_epstein_integrand(scaled_invariants(family_upsilon(1, 0)));
    CHECK(be.comp.constant_term() == GaussRational(0));
}

TEST_CASE("tw_from_rigid_surface") {
    PHInvariants flat = tw_from_rigid_surface(quadric_surface(1, 8));
    CHECK(flat.Scal.comp.is_zero());
    CHECK(flat.A11.comp.is_zero());

    for (Rational eps : {Rational(1, 10), Rational(-1, 7)}) {
        std::vector<SurfaceTerm> terms = {{{2}, {2}, GaussRational(eps)}};
        PHInvariants inv = tw_from_rigid_surface(make_rigid_surface(1, terms, 8));
        CHECK(inv.A11.comp.is_zero());
        CHECK(inv.Scal.comp.constant_term() == GaussRational(Rational(-4) * eps));
    }

    std::vector<SurfaceTerm> bad = {{{0}, {0}, GaussRational(1)}};
    CHECK_THROWS_AS(make_rigid_surface(1, bad, 8), precondition_error);
}

TEST_CASE("Cayley transform: the sphere's contact form as a scaling of the model") {
    // Phi(z, w) = (2z/(1+2w), (1-2w)/(1+2w)) maps the quadric to the
    // sphere with rho_sphere o Phi = 4 rho_0 / |1+2w|^2; dropping the
    // constant factor 4, Upsilon = -2 Re log(1+2w) pulls back
    // theta_sphere / 4, whose Webster scalar is 4 * Scal_S = 8.
    auto bv = boundary_vars(1);
    MultiSeries w_b = (bvar("z") * bvar("zb")).scaled(GaussRational(Rational(1, 2))) +
                      bvar("t").scaled(GaussRational::i());
    MultiSeries loghol = w_b.scaled(GaussRational(2)).log1p();
    MultiSeries U = -(loghol + loghol.conj());
    PHInvariants inv = scaled_invariants(U);
    CHECK(inv.A11.comp.is_zero());
    MultiSeries want = U.exp().scaled(GaussRational(8));
    CHECK(inv.Scal.comp.matches(want));
    CHECK(pseudo_einstein_test(inv));
}
