#include "qprime/sphere.hpp"

#include "qprime/errors.hpp"

#include <sstream>

namespace qprime {

// ---------------------------------------------------------------------
// SpherePoly
// ---------------------------------------------------------------------

void SpherePoly::insert_reduced(Exp e, const GaussRational& c) {
    if (c.is_zero()) return;
    if (e[2] > 0 && e[3] > 0) {
        // w wb = 1 - z zb
        Exp r = e;
        r[2] -= 1;
        r[3] -= 1;
        insert_reduced(r, c);
        Exp r2 = r;
        r2[0] += 1;
        r2[1] += 1;
        insert_reduced(r2, -c);
        return;
    }
    auto [it, fresh] = terms_.emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

SpherePoly SpherePoly::constant(const GaussRational& c) {
    SpherePoly p;
    p.insert_reduced({0, 0, 0, 0}, c);
    return p;
}

SpherePoly SpherePoly::variable(int idx) {
    Exp e{0, 0, 0, 0};
    e[idx] = 1;
    return monomial(e, GaussRational(1));
}

SpherePoly SpherePoly::monomial(const Exp& e, const GaussRational& c) {
    SpherePoly p;
    p.insert_reduced(e, c);
    return p;
}

GaussRational SpherePoly::constant_coeff() const {
    auto it = terms_.find({0, 0, 0, 0});
    return it == terms_.end() ? GaussRational() : it->second;
}

SpherePoly SpherePoly::operator-() const {
    SpherePoly p(*this);
    for (auto& [e, c] : p.terms_) c = -c;
    return p;
}

SpherePoly& SpherePoly::operator+=(const SpherePoly& o) {
    for (const auto& [e, c] : o.terms_) insert_reduced(e, c);
    return *this;
}

SpherePoly operator*(const SpherePoly& a, const SpherePoly& b) {
    SpherePoly out;
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) {
            SpherePoly::Exp e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]};
            out.insert_reduced(e, ca * cb);
        }
    return out;
}

SpherePoly SpherePoly::scaled(const GaussRational& c) const {
    SpherePoly out;
    if (c.is_zero()) return out;
    for (const auto& [e, v] : terms_) out.terms_.emplace(e, v * c);
    return out;
}

SpherePoly SpherePoly::conj() const {
    SpherePoly out;
    for (const auto& [e, c] : terms_)
        out.insert_reduced({e[1], e[0], e[3], e[2]}, c.conj());
    return out;
}

SpherePoly SpherePoly::derivative(int idx) const {
    SpherePoly out;
    for (const auto& [e, c] : terms_) {
        if (e[idx] == 0) continue;
        Exp ne = e;
        int k = ne[idx]--;
        out.insert_reduced(ne, c * GaussRational(k));
    }
    return out;
}

std::complex<double> SpherePoly::eval(std::complex<double> z, std::complex<double> w) const {
    std::complex<double> acc = 0.0;
    std::complex<double> zb = std::conj(z), wb = std::conj(w);
    for (const auto& [e, c] : terms_) {
        std::complex<double> v(rational_to_double(c.re), rational_to_double(c.im));
        for (int k = 0; k < e[0]; ++k) v *= z;
        for (int k = 0; k < e[1]; ++k) v *= zb;
        for (int k = 0; k < e[2]; ++k) v *= w;
        for (int k = 0; k < e[3]; ++k) v *= wb;
        acc += v;
    }
    return acc;
}

std::string SpherePoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    const char* names[4] = {"z", "zb", "w", "wb"};
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << gauss_to_string(c) << ")";
        for (int k = 0; k < 4; ++k)
            if (e[k] > 0) {
                os << "*" << names[k];
                if (e[k] > 1) os << "^" << e[k];
            }
    }
    return os.str();
}

SpherePoly sphere_re_hol(const std::map<std::array<int, 2>, GaussRational>& hol_terms) {
    SpherePoly h;
    for (const auto& [e, c] : hol_terms)
        h += SpherePoly::monomial({e[0], 0, e[1], 0}, c);
    return h + h.conj();
}

// ---------------------------------------------------------------------
// Frame fields and structure equations
// ---------------------------------------------------------------------

SpherePoly sphere_Z1(const SpherePoly& f) {
    return SpherePoly::variable(3) * f.derivative(0) - SpherePoly::variable(1) * f.derivative(2);
}

SpherePoly sphere_Z1b(const SpherePoly& f) {
    return SpherePoly::variable(2) * f.derivative(1) - SpherePoly::variable(0) * f.derivative(3);
}

SpherePoly sphere_T(const SpherePoly& f) {
    GaussRational i = GaussRational::i();
    SpherePoly acc = (SpherePoly::variable(0) * f.derivative(0)).scaled(i);
    acc += (SpherePoly::variable(2) * f.derivative(2)).scaled(i);
    acc += (SpherePoly::variable(1) * f.derivative(1)).scaled(-i);
    acc += (SpherePoly::variable(3) * f.derivative(3)).scaled(-i);
    return acc;
}

namespace {

struct SVF {
    std::array<SpherePoly, 4> c;
};

SVF field_Z1() {
    SVF v;
    v.c[0] = SpherePoly::variable(3);
    v.c[2] = -SpherePoly::variable(1);
    return v;
}

SVF field_T() {
    GaussRational i = GaussRational::i();
    SVF v;
    v.c[0] = SpherePoly::variable(0).scaled(i);
    v.c[1] = SpherePoly::variable(1).scaled(-i);
    v.c[2] = SpherePoly::variable(2).scaled(i);
    v.c[3] = SpherePoly::variable(3).scaled(-i);
    return v;
}

SVF conj_field(const SVF& v) {
    SVF o;
    o.c[0] = v.c[1].conj();
    o.c[1] = v.c[0].conj();
    o.c[2] = v.c[3].conj();
    o.c[3] = v.c[2].conj();
    return o;
}

SpherePoly apply(const SVF& v, const SpherePoly& f) {
    SpherePoly acc;
    for (int k = 0; k < 4; ++k)
        if (!v.c[k].is_zero()) acc += v.c[k] * f.derivative(k);
    return acc;
}

SVF bracket(const SVF& x, const SVF& y) {
    SVF o;
    for (int k = 0; k < 4; ++k) o.c[k] = apply(x, y.c[k]) - apply(y, x.c[k]);
    return o;
}

// theta = (i/2)(-zb dz - wb dw + z dzb + w dwb)
SpherePoly theta_form(const SVF& v) {
    GaussRational hi(Rational(0), Rational(1, 2));
    SpherePoly acc = (SpherePoly::variable(1) * v.c[0]).scaled(-hi);
    acc += (SpherePoly::variable(3) * v.c[2]).scaled(-hi);
    acc += (SpherePoly::variable(0) * v.c[1]).scaled(hi);
    acc += (SpherePoly::variable(2) * v.c[3]).scaled(hi);
    return acc;
}

// theta^1 = w dz - z dw (dual to Z1 within H)
SpherePoly theta1_form(const SVF& v) {
    return SpherePoly::variable(2) * v.c[0] - SpherePoly::variable(0) * v.c[2];
}

SpherePoly theta1b_form(const SVF& v) {
    return SpherePoly::variable(3) * v.c[1] - SpherePoly::variable(1) * v.c[3];
}

struct SphereConnection {
    SpherePoly p, q, s; // omega_1^1 = p theta + q theta^1 + s theta^1b
    Rational scal;
};

const SphereConnection& sphere_connection() {
    static SphereConnection conn = [] {
        SVF Z1 = field_Z1();
        SVF Z1b = conj_field(Z1);
        SVF T = field_T();

        SVF bZ = bracket(Z1, Z1b);
        SVF bTZ = bracket(T, Z1);
        SVF bTZb = bracket(T, Z1b);

        // dtheta(Z1, Z1b) = -theta([Z1,Z1b]) = i h; the global frame is
        // normalized, h must be the constant 1.
        SpherePoly h = theta_form(bZ).scaled(GaussRational::i());
        if (!(h == SpherePoly::constant(GaussRational(1))))
            throw self_validation_error("sphere frame: Levi component is not 1");

        SphereConnection c;
        c.s = -theta1_form(bZ);
        c.p = theta1_form(bTZ);
        c.q = -c.s.conj(); // dh = 0
        SpherePoly torsion = -theta1_form(bTZb);
        if (!torsion.is_zero())
            throw self_validation_error("sphere frame: torsion is not zero");
        if (!(c.p + c.p.conj()).is_zero())
            throw self_validation_error("sphere frame: connection normalization failed");

        // Scal = domega(Z1, Z1b) = Z1(s) - Z1b(q) - omega([Z1, Z1b]).
        SpherePoly om_bZ = c.p * theta_form(bZ) + c.q * theta1_form(bZ) + c.s * theta1b_form(bZ);
        SpherePoly scal = sphere_Z1(c.s) - sphere_Z1b(c.q) - om_bZ;
        GaussRational s0 = scal.constant_coeff();
        if (!(scal == SpherePoly::constant(s0)) || !s0.is_real() || s0.re <= 0)
            throw self_validation_error("sphere frame: Scal is not a positive constant");
        c.scal = s0.re;
        return c;
    }();
    return conn;
}

} // namespace

SpherePoly SphereTWData::delta_b(const SpherePoly& f) const {
    const auto& c = sphere_connection();
    // Delta_b f = -(nabla_1b nabla_1 + nabla_1 nabla_1b) f with the
    // omega corrections of the global frame.
    SpherePoly f1 = sphere_Z1(f), f1b = sphere_Z1b(f);
    SpherePoly m1 = sphere_Z1b(f1) - c.s * f1;
    SpherePoly m2 = sphere_Z1(f1b) - c.s.conj() * f1b;
    return -(m1 + m2);
}

SpherePoly SphereTWData::p_op(const SpherePoly& f) const {
    // P f = Z1 Z1b Z1b Z1 f: the omega corrections vanish on the sphere
    // frame (omega(Z1) = omega(Z1b) = 0), verified in sphere_connection().
    const auto& c = sphere_connection();
    if (!c.q.is_zero() || !c.s.is_zero())
        throw self_validation_error("sphere P: unexpected horizontal connection components");
    return sphere_Z1(sphere_Z1b(sphere_Z1b(sphere_Z1(f))));
}

SpherePoly SphereTWData::p_prime_op(const SpherePoly& f) const {
    const auto& c = sphere_connection();
    // P' f = Delta_b^2 f - Re nabla^1 (Scal nabla_1 f) with A = 0.
    SpherePoly tau = sphere_Z1(f).scaled(GaussRational(c.scal));
    SpherePoly div = sphere_Z1b(tau) - c.s * tau;
    SpherePoly re = (div + div.conj()).scaled(GaussRational(Rational(1, 2)));
    return delta_b(delta_b(f)) - re;
}

SphereTWData sphere_tw_data() {
    const auto& c = sphere_connection();
    SphereTWData d;
    d.scal = c.scal;
    // theta wedge dtheta = dphi1 dphi2 dxi in Hopf coordinates:
    // volume = (2 pi)(2 pi)(1) = 4 pi^2.
    d.volume_over_pi2 = 4;
    // Qbar' = int (Delta_b Scal + Scal^2/2 - 2|A|^2) = Scal^2/2 * vol.
    d.qprime_over_pi2 = d.scal * d.scal / 2 * d.volume_over_pi2;
    return d;
}

} // namespace qprime
