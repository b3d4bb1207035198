#include "qprime/tw.hpp"

#include "qprime/errors.hpp"

#include <array>

namespace qprime {

namespace {

GaussRational half_i() { return GaussRational(Rational(0), Rational(1, 2)); }

MultiSeries re_part(const MultiSeries& s) {
    return (s + s.conj()).scaled(GaussRational(Rational(1, 2)));
}

MultiSeries im_part(const MultiSeries& s) {
    return (s - s.conj()).scaled(GaussRational(Rational(0), Rational(-1, 2)));
}

} // namespace

// ---------------------------------------------------------------------
// TWFrame
// ---------------------------------------------------------------------

MultiSeries TWFrame::z1(const MultiSeries& f) const {
    return f.derivative(0) - Fz_ * f.derivative(2).scaled(half_i());
}

MultiSeries TWFrame::z1b(const MultiSeries& f) const {
    return f.derivative(1) + Fz_.conj() * f.derivative(2).scaled(half_i());
}

MultiSeries TWFrame::t0(const MultiSeries& f) const {
    return -f.derivative(2);
}

void TWFrame::finish() {
    logh_ = (h_ - MultiSeries::constant(bv_, trunc_, GaussRational(1))).log1p();
    hinv_ = h_.unit_inverse();
    sig1_ = om1_ + om1b_.conj() - z1(logh_);
    sig1b_ = om1b_ + om1_.conj() - z1b(logh_);
    sigT_ = omT_ + omT_.conj() - t0(logh_);
    Om0_ = omT_ + reeb1_ * om1_ + reeb1b_ * om1b_;
    Sig0_ = sigT_ + reeb1_ * sig1_ + reeb1b_ * sig1b_;
}

TWFrame TWFrame::flat(int trunc) {
    TWFrame fr;
    fr.bv_ = boundary_vars(1);
    fr.trunc_ = trunc;
    fr.Fz_ = MultiSeries::variable(fr.bv_, trunc, "zb");
    fr.h_ = MultiSeries::constant(fr.bv_, trunc, GaussRational(1));
    MultiSeries zero(fr.bv_, trunc);
    fr.omT_ = fr.om1_ = fr.om1b_ = zero;
    fr.reeb1_ = fr.reeb1b_ = zero;
    fr.finish();
    return fr;
}

TWFrame TWFrame::scaled(const MultiSeries& upsilon) {
    if (!upsilon.is_real())
        throw precondition_error("scaled frame: Upsilon must be a real field");
    TWFrame fr = flat(upsilon.trunc());
    MultiSeries u1 = fr.z1(upsilon), u1b = fr.z1b(upsilon);
    // omega-hat_1^1 = [i Z1 Z1b U + 2i U_1 U_1b] theta + 2U_1 theta^1 - U_1b theta^1b
    fr.omT_ = fr.z1(u1b).scaled(GaussRational::i()) +
              (u1 * u1b).scaled(GaussRational(Rational(0), Rational(2)));
    fr.om1_ = u1.scaled(GaussRational(2));
    fr.om1b_ = -u1b;
    // Reeb of theta-hat mixes the frame: T-hat = e^-U (T - i U^1 Z1 + i U_1 Z1b).
    fr.reeb1_ = u1b.scaled(-GaussRational::i());
    fr.reeb1b_ = u1.scaled(GaussRational::i());
    fr.finish();
    return fr;
}

TWObj TWFrame::d1(const TWObj& x) const {
    MultiSeries c = z1(x.c);
    if (x.a != 0) c -= om1_.scaled(GaussRational(x.a)) * x.c;
    if (x.b != 0) c -= om1b_.conj().scaled(GaussRational(x.b)) * x.c;
    if (x.w != 0) c += sig1_.scaled(GaussRational(x.w)) * x.c;
    return {c, x.a + 1, x.b, x.w};
}

TWObj TWFrame::d1b(const TWObj& x) const {
    MultiSeries c = z1b(x.c);
    if (x.a != 0) c -= om1b_.scaled(GaussRational(x.a)) * x.c;
    if (x.b != 0) c -= om1_.conj().scaled(GaussRational(x.b)) * x.c;
    if (x.w != 0) c += sig1b_.scaled(GaussRational(x.w)) * x.c;
    return {c, x.a, x.b + 1, x.w};
}

TWObj TWFrame::d0(const TWObj& x) const {
    MultiSeries c = t0(x.c) + reeb1_ * z1(x.c) + reeb1b_ * z1b(x.c);
    if (x.a != 0) c -= Om0_.scaled(GaussRational(x.a)) * x.c;
    if (x.b != 0) c -= Om0_.conj().scaled(GaussRational(x.b)) * x.c;
    if (x.w != 0) c += Sig0_.scaled(GaussRational(x.w)) * x.c;
    return {c, x.a, x.b, x.w - 1};
}

TWObj TWFrame::lapb(const TWObj& x) const {
    TWObj m1 = d1b(d1(x));
    TWObj m2 = d1(d1b(x));
    return {-(hinv_ * (m1.c + m2.c)), x.a, x.b, x.w - 1};
}

// ---------------------------------------------------------------------
// Invariants of scaled and rigid structures
// ---------------------------------------------------------------------

PHInvariants scaled_invariants(const MultiSeries& upsilon) {
    PHInvariants inv;
    inv.frame = TWFrame::scaled(upsilon);
    inv.Upsilon = upsilon;
    inv.flat_base = true;
    TWFrame flatf = TWFrame::flat(upsilon.trunc());
    MultiSeries u1 = flatf.z1(upsilon), u1b = flatf.z1b(upsilon);
    MultiSeries lap0 = flatf.lapb(TWObj{upsilon, 0, 0, 0}).c;
    // Scal-hat = (n+1) Delta_b U - n(n+1) U_a U^a at n = 1.
    inv.Scal = {lap0.scaled(GaussRational(2)) - (u1 * u1b).scaled(GaussRational(2)), -1};
    // A-hat_11 = i U_{11} - i U_1 U_1.
    inv.A11 = {flatf.z1(u1).scaled(GaussRational::i()) -
                   (u1 * u1).scaled(GaussRational::i()),
               0};
    return inv;
}

PHInvariants scaled_invariants(const HolPoly& upsilon, int trunc) {
    return scaled_invariants(pluriharmonic_flat_boundary(upsilon, trunc));
}

namespace {

// Vector fields / 1-forms on (z, zb, t) as coefficient triples.
struct VF {
    MultiSeries cz, czb, ct;
};

VF bracket(const VF& X, const VF& Y) {
    auto apply = [&](const VF& V, const MultiSeries& f) {
        return V.cz * f.derivative(0) + V.czb * f.derivative(1) + V.ct * f.derivative(2);
    };
    VF out;
    out.cz = apply(X, Y.cz) - apply(Y, X.cz);
    out.czb = apply(X, Y.czb) - apply(Y, X.czb);
    out.ct = apply(X, Y.ct) - apply(Y, X.ct);
    return out;
}

struct Form {
    MultiSeries fz, fzb, ft;
    MultiSeries operator()(const VF& V) const { return fz * V.cz + fzb * V.czb + ft * V.ct; }
};

} // namespace

PHInvariants tw_from_rigid_surface(const RigidSurface& surf) {
    if (surf.n != 1) throw precondition_error("tw_from_rigid_surface: n = 1 only");
    auto bv = boundary_vars(1);
    const int t = surf.trunc;

    // F and its derivative restricted to the surface coordinates.
    MultiSeries Fb(bv, t);
    for (const auto& [e, c] : surf.F.terms()) {
        MultiSeries::Exp ne(bv->arity(), 0);
        ne[0] = e[0];
        ne[1] = e[1];
        Fb += MultiSeries::monomial(bv, t, ne, c);
    }
    MultiSeries Fz = Fb.derivative(0);
    MultiSeries Fzb = Fb.derivative(1);

    TWFrame fr = TWFrame::flat(t);
    fr.Fz_ = Fz; // frame Z1 = dz - (i/2) F_z dt, Levi-degenerate inputs rejected below

    MultiSeries zero(bv, t), one = MultiSeries::constant(bv, t, GaussRational(1));
    VF Z1{one, zero, -Fz.scaled(half_i())};
    VF Z1b{zero, one, Fzb.scaled(half_i())};
    VF T{zero, zero, -one};

    Form theta{-Fz.scaled(half_i()), Fzb.scaled(half_i()), -one};
    Form theta1{one, zero, zero};
    Form theta1b{zero, one, zero};

    VF bZ = bracket(Z1, Z1b);
    VF bTZ = bracket(T, Z1);
    VF bTZb = bracket(T, Z1b);

    MultiSeries h = theta(bZ).scaled(GaussRational::i());
    if (h.constant_term().is_zero())
        throw math_domain_error("tw_from_rigid_surface: Levi-degenerate surface");
    fr.h_ = h;

    MultiSeries s = -theta1(bZ);
    MultiSeries p = theta1(bTZ);
    MultiSeries A_up = -theta1(bTZb); // A^1_{1b}
    fr.omT_ = p;
    fr.om1b_ = s;
    fr.finish(); // sets hinv/logh with the provisional om1
    fr.om1_ = fr.z1(fr.logh_) - s.conj();
    fr.finish();

    // Normalization self-check: theta-component of omega + conj(omega).
    if (!(fr.omT_ + fr.omT_.conj()).matches(fr.t0(fr.logh_)))
        throw self_validation_error("tw_from_rigid_surface: structure equations inconsistent");

    // Scal h = d(omega)(Z1, Z1b) = Z1(s) - Z1b(q) - omega([Z1, Z1b]).
    MultiSeries om_bZ = fr.omT_ * theta(bZ) + fr.om1_ * theta1(bZ) + fr.om1b_ * theta1b(bZ);
    MultiSeries scal = fr.hinv() * (fr.z1(s) - fr.z1b(fr.om1_) - om_bZ);

    PHInvariants inv;
    inv.frame = fr;
    inv.Upsilon = MultiSeries(bv, t);
    inv.flat_base = false;
    inv.Scal = {scal, -1};
    inv.A11 = {fr.h() * A_up.conj(), 0};
    return inv;
}

// ---------------------------------------------------------------------
// Curvature operators
// ---------------------------------------------------------------------

HatDerivatives hat_derivatives(const PHInvariants& inv, const PHField& f) {
    if (!inv.flat_base)
        throw precondition_error("hat_derivatives: base connection must be the flat model");
    TWFrame flatf = TWFrame::flat(inv.Upsilon.trunc());
    const MultiSeries& U = inv.Upsilon;
    MultiSeries u1 = flatf.z1(U), u1b = flatf.z1b(U);
    GaussRational w(f.weight);

    HatDerivatives out;
    out.nabla1 = flatf.z1(f.comp) + (u1 * f.comp).scaled(w);

    MultiSeries u11b = flatf.z1b(u1);
    MultiSeries imtrace = im_part(u11b);
    out.nabla0 = flatf.t0(f.comp) +
                 (u1 * flatf.z1b(f.comp)).scaled(GaussRational::i()) -
                 (u1b * flatf.z1(f.comp)).scaled(GaussRational::i()) +
                 ((flatf.t0(U) + imtrace) * f.comp)
                     .scaled(w * GaussRational(Rational(2, 3)));

    MultiSeries lap0U = flatf.lapb(TWObj{U, 0, 0, 0}).c;
    MultiSeries lap0f = flatf.lapb(TWObj{f.comp, 0, 0, 0}).c;
    GaussRational c1 = GaussRational(1) + w * GaussRational(2);          // n + 2w
    GaussRational c2 = w * (GaussRational(1) + w) * GaussRational(2);    // 2w(n+w)
    out.lap_b = lap0f + (lap0U * f.comp).scaled(w) -
                (u1b * flatf.z1(f.comp) + u1 * flatf.z1b(f.comp)).scaled(c1) -
                (u1 * u1b * f.comp).scaled(c2);
    return out;
}

namespace {

MultiSeries a_norm_sq(const PHInvariants& inv) {
    const TWFrame& fr = inv.frame;
    return inv.A11.comp * inv.A11.comp.conj() * fr.hinv() * fr.hinv();
}

} // namespace

PHField q_prime_tw(const PHInvariants& inv) {
    const TWFrame& fr = inv.frame;
    MultiSeries lap_scal = fr.lapb(TWObj{inv.Scal.comp, 0, 0, -1}).c;
    MultiSeries out = lap_scal +
                      (inv.Scal.comp * inv.Scal.comp).scaled(GaussRational(Rational(1, 2))) -
                      a_norm_sq(inv).scaled(GaussRational(2));
    return {out, -2};
}

PHField s_tensor(const PHInvariants& inv) {
    const TWFrame& fr = inv.frame;
    TWObj scal{inv.Scal.comp, 0, 0, -1};
    TWObj a{inv.A11.comp, 2, 0, 0};
    MultiSeries div_a = fr.hinv() * fr.d1b(a).c; // A_11,^1 (one pair contracted)
    MultiSeries s1 = fr.d1(scal).c - div_a.scaled(GaussRational::i());
    return {s1, -1};
}

bool pseudo_einstein_test(const PHInvariants& inv) {
    return s_tensor(inv).comp.is_zero();
}

PHField q_curvature_tw(const PHInvariants& inv) {
    const TWFrame& fr = inv.frame;
    MultiSeries lap_scal = fr.lapb(TWObj{inv.Scal.comp, 0, 0, -1}).c;
    TWObj a{inv.A11.comp, 2, 0, 0};
    MultiSeries div2 = fr.hinv() * fr.hinv() * fr.d1b(fr.d1b(a)).c; // A_11,^{11}
    MultiSeries q6 = lap_scal - im_part(div2).scaled(GaussRational(2));
    return {q6.scaled(GaussRational(Rational(1, 6))), -2};
}

PHField p_prime_tw(const PHInvariants& inv, const PHField& f) {
    if (f.weight != 0) throw precondition_error("p_prime_tw: weight-0 input required");
    const TWFrame& fr = inv.frame;
    TWObj fo{f.comp, 0, 0, 0};
    TWObj f1 = fr.d1(fo);
    // tau_1 = Scal f_1 - 2i A_11 f^1  in E_1(-1)
    TWObj tau{inv.Scal.comp * f1.c -
                  (inv.A11.comp * fr.hinv() * fr.d1b(fo).c)
                      .scaled(GaussRational(Rational(0), Rational(2))),
              1, 0, -1};
    MultiSeries div_tau = fr.hinv() * fr.d1b(tau).c;
    MultiSeries Df = fr.lapb(fr.lapb(fo)).c - re_part(div_tau);

    MultiSeries s1 = s_tensor(inv).comp;
    MultiSeries s_term = re_part(fr.hinv() * s1.conj() * f1.c).scaled(GaussRational(Rational(2, 3)));
    MultiSeries q_term = q_curvature_tw(inv).comp * f.comp;
    return {Df + s_term + q_term, -2};
}

PHField p1_operator(const PHInvariants& inv, const PHField& f) {
    const TWFrame& fr = inv.frame;
    TWObj fo{f.comp, 0, 0, f.weight};
    // f_{1b}{}^{1b} = h^{.} nabla_1 nabla_1b f, then nabla_1, plus i A_11 f^1.
    TWObj inner{fr.hinv() * fr.d1(fr.d1b(fo)).c, 0, 0, f.weight - 1};
    MultiSeries p1 = fr.d1(inner).c +
                     (inv.A11.comp * fr.hinv() * fr.d1b(fo).c).scaled(GaussRational::i());
    return {p1, f.weight - 1};
}

std::pair<bool, PHField> pluriharmonic_test(const PHField& f) {
    PHInvariants flat;
    flat.frame = TWFrame::flat(f.comp.trunc());
    flat.Upsilon = MultiSeries(boundary_vars(1), f.comp.trunc());
    flat.Scal = {MultiSeries(boundary_vars(1), f.comp.trunc()), -1};
    flat.A11 = {MultiSeries(boundary_vars(1), f.comp.trunc()), 0};
    PHField w = p1_operator(flat, f);
    return {w.comp.is_zero(), w};
}

PHField tw_gjms_p(const PHInvariants& inv, const PHField& f) {
    const TWFrame& fr = inv.frame;
    TWObj fo{f.comp, 0, 0, f.weight};
    // P_1b f = f_beta{}^beta{}_1b - i Abar_{1b1b} f^{1b}
    TWObj inner{fr.hinv() * fr.d1b(fr.d1(fo)).c, 0, 0, f.weight - 1};
    MultiSeries p1b = fr.d1b(inner).c -
                      (inv.A11.comp.conj() * fr.hinv() * fr.d1(fo).c).scaled(GaussRational::i());
    // P f = (P^1 f)_{,1}: fold the raised index, derive, contract.
    TWObj pup{fr.hinv() * p1b, 0, 1, f.weight - 1};
    MultiSeries pf = fr.hinv() * fr.d1(pup).c;
    return {pf, f.weight - 2};
}

CartanReport cartan_obstruction(const PHInvariants& inv) {
    const TWFrame& fr = inv.frame;
    TWObj scal{inv.Scal.comp, 0, 0, -1};
    TWObj abar{inv.A11.comp.conj(), 0, 2, 0};

    // Lowered avatar N = O_{1b1b} in E_{1b1b}(-1):
    //   (1/6) Scal_{,1b1b} - (i/2) Scal Abar - Abar_{,0} + (2i/3) Abar_{,1}{}^1.
    MultiSeries t1 = fr.d1b(fr.d1b(scal)).c.scaled(GaussRational(Rational(1, 6)));
    MultiSeries t2 = (inv.Scal.comp * abar.c).scaled(GaussRational(Rational(0), Rational(-1, 2)));
    MultiSeries t3 = -fr.d0(abar).c;
    MultiSeries t4 = (fr.hinv() * fr.d1b(fr.d1(abar)).c)
                         .scaled(GaussRational(Rational(0), Rational(2, 3)));
    TWObj N{t1 + t2 + t3 + t4, 0, 2, -1};

    // P*_11 O^11 = O^{11}{}_{,11} + i A_11 O^{11}.
    MultiSeries div2 = fr.hinv() * fr.hinv() * fr.d1(fr.d1(N)).c;
    MultiSeries o = div2 + (inv.A11.comp * N.c * fr.hinv() * fr.hinv()).scaled(GaussRational::i());

    CartanReport rep;
    rep.O11 = {N.c, -1};
    rep.Oscalar = {o, -3};
    rep.O11_zero = N.c.is_zero();
    rep.imag_zero = im_part(o).is_zero();
    return rep;
}

PHField p11_deformation(const PHInvariants& inv, const PHField& f) {
    const TWFrame& fr = inv.frame;
    TWObj fo{f.comp, 0, 0, f.weight};
    MultiSeries out = fr.d1(fr.d1(fo)).c + (inv.A11.comp * f.comp).scaled(GaussRational::i());
    return {out, f.weight};
}

PHField burns_epstein_integrand(const PHInvariants& inv) {
    MultiSeries out = inv.Scal.comp * inv.Scal.comp - a_norm_sq(inv).scaled(GaussRational(4));
    return {out, -2};
}

std::pair<PHField, PHField> transformed_invariants(const PHInvariants& base,
                                                   const MultiSeries& ups2) {
    const TWFrame& fr = base.frame;
    TWObj u{ups2, 0, 0, 0};
    TWObj u1 = fr.d1(u);
    MultiSeries u1b = fr.d1b(u).c;
    PHField scal{base.Scal.comp + fr.lapb(u).c.scaled(GaussRational(2)) -
                     (u1.c * u1b * fr.hinv()).scaled(GaussRational(2)),
                 -1};
    PHField a11{base.A11.comp + fr.d1(u1).c.scaled(GaussRational::i()) -
                    (u1.c * u1.c).scaled(GaussRational::i()),
                0};
    return {scal, a11};
}

MultiSeries ambient_to_tw_time(const MultiSeries& s) {
    auto bv = s.vars();
    MultiSeries two_t = MultiSeries::variable(bv, s.trunc(), "t").scaled(GaussRational(2));
    return s.substitute("t", two_t);
}

} // namespace qprime
