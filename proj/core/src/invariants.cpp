#include "qprime/invariants.hpp"

#include "qprime/errors.hpp"

namespace qprime {

namespace {

// 2w must be an integer in [-n, 0].
void check_admissible(const AmbientElement& f, int n) {
    if (!f.balanced()) throw precondition_error("gjms: element is not balanced");
    Rational w2 = Rational(f.deg().p * 2);
    if (w2.get_den() != 1)
        throw precondition_error("gjms: weight must be a half-integer");
    long v = w2.get_num().get_si();
    if (v < -n || v > 0) throw precondition_error("gjms: inadmissible weight");
}

AmbientElement divide_by_rsharp_pow(const AmbientElement& e, const RigidSurface& surf,
                                    const MultiSeries& cof_inv_pow, int k) {
    // e / rsharp^k with r = rho0 * cof: shift the bidegree, divide the
    // base series by rho0^k, multiply by cof^{-k}.
    std::array<MultiSeries, 3> lc{divide_by_rho(e.lc(0), surf, k) * cof_inv_pow,
                                  divide_by_rho(e.lc(1), surf, k) * cof_inv_pow,
                                  divide_by_rho(e.lc(2), surf, k) * cof_inv_pow};
    Bidegree d(e.deg().p - k, e.deg().q - k);
    return AmbientElement(d, std::move(lc));
}

} // namespace

AmbientElement pluriharmonic_element(const HolPoly& p, int trunc) {
    return AmbientElement(Bidegree(), pluriharmonic_ambient(p, trunc));
}

BoundaryField gjms(const AmbientMetric& m, const RigidSurface& surf, const AmbientElement& f) {
    check_admissible(f, m.n);
    Rational w2r = Rational(f.deg().p * 2);
    long w2 = w2r.get_num().get_si();
    int power = m.n + static_cast<int>(w2) + 1;
    AmbientElement out = laplacian_power(m, f, power);
    BoundaryField b = restrict_to_boundary(out, surf);
    if (!b.deg.balanced())
        throw self_validation_error("gjms: output is not balanced");
    return b;
}

BoundaryField gjms_expansion_log_coefficient(const AmbientMetric& m, const RigidSurface& surf,
                                             const AmbientElement& f0) {
    if (!f0.balanced() || !(f0.deg().p == 0))
        throw precondition_error("gjms_via_expansion: weight-0 input required");
    const int n = m.n;
    MultiSeries cof = divide_by_rho(m.r, surf, 1); // r / rho0, a unit series
    MultiSeries cof_inv = cof.unit_inverse();
    AmbientElement rs = rsharp_element(m.r);

    // A_0 = f~, phi_0 = Delta A_0; inductively A_{k+1} = A_k + rsharp^{k+1} psi_{k+1}.
    AmbientElement A = f0;
    MultiSeries cof_inv_pow = MultiSeries::constant(cof.vars(), cof.trunc(), GaussRational(1));
    AmbientElement phi = ambient_laplacian(m, A); // = rsharp^0 phi_0
    for (int k = 0; k < n; ++k) {
        // phi_k = Delta A_k / rsharp^k, an element of weight -k-1.
        AmbientElement phik = (k == 0) ? phi : divide_by_rsharp_pow(phi, surf, cof_inv_pow, k);
        Rational c(-1, (k + 1) * (n - k));
        AmbientElement psi = phik.scaled(GaussRational(c));
        AmbientElement rs_pow = rs;
        for (int i = 1; i <= k; ++i) rs_pow = rs_pow * rs;
        A += rs_pow * psi;
        phi = ambient_laplacian(m, A);
        cof_inv_pow = cof_inv_pow * cof_inv;
    }
    // Breakdown stage k = n: Delta A_n = rsharp^n phi_n; the log term
    // B_0 r#^{n+1} log rho contributes +(n+1) B_0 r#^n through
    // r# Delta(log rho) = n+1, so cancellation needs B_0 = -phi_n/(n+1).
    AmbientElement phin = (n == 0) ? phi : divide_by_rsharp_pow(phi, surf, cof_inv_pow, n);
    AmbientElement B0 = phin.scaled(GaussRational(Rational(-1, n + 1)));
    return restrict_to_boundary(B0, surf);
}

BoundaryField gjms_via_expansion(const AmbientMetric& m, const RigidSurface& surf,
                                 const AmbientElement& f0) {
    BoundaryField B = gjms_expansion_log_coefficient(m, surf, f0);
    const int n = m.n;
    Integer fact1(1), fact2(1);
    for (int i = 2; i <= n + 1; ++i) fact1 *= i;
    for (int i = 2; i <= n; ++i) fact2 *= i;
    Rational scale((n % 2 == 0) ? -1 : 1, 1);
    scale *= Rational(fact1 * fact2);
    BoundaryField out;
    out.deg = B.deg;
    out.s = B.s.scaled(GaussRational(scale));
    if (!out.deg.balanced())
        throw self_validation_error("gjms_via_expansion: output is not balanced");
    return out;
}

BoundaryField q_curvature_ambient(const AmbientMetric& m, const RigidSurface& surf,
                                  const MultiSeries& upsilon_ext) {
    auto av = upsilon_ext.vars();
    int t = upsilon_ext.trunc();
    AmbientElement logh = AmbientElement::log_fiber(av, t) +
                          AmbientElement(Bidegree(), -upsilon_ext);
    AmbientElement out = laplacian_power(m, logh, m.n + 1);
    BoundaryField b = restrict_to_boundary(-out, surf);
    if (!b.deg.balanced())
        throw self_validation_error("q_curvature: output is not balanced");
    return b;
}

BoundaryField p_prime(const AmbientMetric& m, const RigidSurface& surf, const HolPoly& upsilon,
                      const HolPoly& f) {
    int t = m.r.trunc();
    MultiSeries ups = pluriharmonic_ambient(upsilon, t);
    MultiSeries fs = pluriharmonic_ambient(f, t);
    auto av = ups.vars();
    // f~ (Lambda - Ups): log level 1 carries f~, level 0 carries -f~ Ups.
    AmbientElement arg(Bidegree(), {-(fs * ups), fs, MultiSeries(av, t)});
    AmbientElement out = laplacian_power(m, arg, m.n + 1);
    BoundaryField b = restrict_to_boundary(-out, surf);
    if (!b.deg.balanced())
        throw self_validation_error("p_prime: output is not balanced");
    return b;
}

BoundaryField q_prime(const AmbientMetric& m, const RigidSurface& surf, const HolPoly& upsilon) {
    int t = m.r.trunc();
    MultiSeries ups = pluriharmonic_ambient(upsilon, t);
    auto av = ups.vars();
    // (Lambda - Ups)^2 = Lambda^2 - 2 Ups Lambda + Ups^2.
    AmbientElement arg(Bidegree(),
                       {ups * ups, -ups.scaled(GaussRational(2)),
                        MultiSeries::constant(av, t, GaussRational(1))});
    AmbientElement out = laplacian_power(m, arg, m.n + 1);
    BoundaryField b = restrict_to_boundary(out, surf);
    if (!b.deg.balanced() || !(b.deg.p == Rational(-m.n - 1)))
        throw self_validation_error("q_prime: output weight is not -n-1");
    return b;
}

MultiSeries density_as_function(const BoundaryField& f, const MultiSeries& upsilon_boundary) {
    // F' -> e^{-m Upsilon} F' with m = -weight.
    int w = f.weight_num();
    MultiSeries scale = upsilon_boundary.scaled(GaussRational(w)); // -m = w
    return f.s * scale.exp();
}

GaussRational origin_value(const BoundaryField& f) {
    return f.s.constant_term();
}

} // namespace qprime
