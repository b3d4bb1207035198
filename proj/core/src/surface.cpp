#include "qprime/surface.hpp"

#include "qprime/errors.hpp"

#include <numeric>

namespace qprime {

MultiSeries RigidSurface::rho0() const {
    auto av = ambient_vars(n);
    int wi = ambient_w_index(n);
    MultiSeries rho = MultiSeries::variable(av, trunc, av->names[wi]) +
                      MultiSeries::variable(av, trunc, av->names[wi + 1]) - F;
    return rho;
}

namespace {

void validate_F(int n, const MultiSeries& F) {
    auto av = ambient_vars(n);
    if (!(*F.vars() == *av)) throw precondition_error("surface F: wrong variable set");
    int wi = ambient_w_index(n);
    for (const auto& [e, c] : F.terms()) {
        if (e[wi] != 0 || e[wi + 1] != 0)
            throw precondition_error("surface F: must not depend on w");
        int dh = 0, da = 0;
        for (int j = 0; j < n; ++j) {
            dh += e[2 * j];
            da += e[2 * j + 1];
        }
        if (dh == 0 || da == 0)
            throw precondition_error(
                "surface F: pure (anti)holomorphic terms must be absorbed into w");
        if (dh + da == 2) {
            // Quadratic part must be exactly the standard Levi form.
            bool diag = false;
            for (int j = 0; j < n; ++j)
                if (e[2 * j] == 1 && e[2 * j + 1] == 1) diag = true;
            if (diag) {
                if (c != GaussRational(1))
                    throw precondition_error("surface F: Levi form not normalized");
            } else {
                throw precondition_error("surface F: off-diagonal quadratic term");
            }
        }
    }
    if (!F.is_real()) throw precondition_error("surface F: not a real series");
    for (int j = 0; j < n; ++j) {
        MultiSeries::Exp e(av->arity(), 0);
        e[2 * j] = e[2 * j + 1] = 1;
        if (F.coeff(e) != GaussRational(1))
            throw precondition_error("surface F: Levi form not normalized");
    }
}

} // namespace

RigidSurface make_rigid_surface_from_F(int n, const MultiSeries& F, int trunc) {
    if (n < 1 || n > 2) throw precondition_error("surface: n must be 1 or 2");
    validate_F(n, F);
    RigidSurface s;
    s.n = n;
    s.trunc = trunc;
    s.F = F;
    return s;
}

RigidSurface make_rigid_surface(int n, const std::vector<SurfaceTerm>& higher_terms, int trunc) {
    auto av = ambient_vars(n);
    MultiSeries F(av, trunc);
    for (int j = 0; j < n; ++j) {
        MultiSeries::Exp e(av->arity(), 0);
        e[2 * j] = e[2 * j + 1] = 1;
        F += MultiSeries::monomial(av, trunc, e, GaussRational(1));
    }
    for (const auto& t : higher_terms) {
        if (static_cast<int>(t.exp_z.size()) != n || static_cast<int>(t.exp_zbar.size()) != n)
            throw parse_error("surface term: exponent arity mismatch");
        MultiSeries::Exp e(av->arity(), 0);
        for (int j = 0; j < n; ++j) {
            e[2 * j] = t.exp_z[j];
            e[2 * j + 1] = t.exp_zbar[j];
        }
        F += MultiSeries::monomial(av, trunc, e, t.coeff);
    }
    return make_rigid_surface_from_F(n, F, trunc);
}

RigidSurface quadric_surface(int n, int trunc) {
    return make_rigid_surface(n, {}, trunc);
}

MultiSeries hol_series(const HolPoly& p, const VarSetPtr& avars, int trunc) {
    MultiSeries s(avars, trunc);
    int wi = ambient_w_index(p.n);
    for (const auto& t : p.terms) {
        if (static_cast<int>(t.exp_z.size()) != p.n)
            throw parse_error("holomorphic term: exponent arity mismatch");
        MultiSeries::Exp e(avars->arity(), 0);
        for (int j = 0; j < p.n; ++j) e[2 * j] = t.exp_z[j];
        e[wi] = t.exp_w;
        s += MultiSeries::monomial(avars, trunc, e, t.coeff);
    }
    return s;
}

MultiSeries pluriharmonic_ambient(const HolPoly& p, int trunc) {
    MultiSeries h = hol_series(p, ambient_vars(p.n), trunc);
    return h + h.conj();
}

MultiSeries pluriharmonic_flat_boundary(const HolPoly& p, int trunc) {
    if (p.n != 1) throw precondition_error("flat boundary restriction: n = 1 only");
    auto bv = boundary_vars(1);
    MultiSeries h = hol_series(p, ambient_vars(1), trunc);
    // w = z zb / 2 + i t on the flat model.
    MultiSeries wexpr =
        (MultiSeries::variable(bv, trunc, "z") * MultiSeries::variable(bv, trunc, "zb"))
            .scaled(GaussRational(Rational(1, 2))) +
        MultiSeries::variable(bv, trunc, "t").scaled(GaussRational::i());
    MultiSeries out(bv, trunc);
    // Rebuild term by term over the boundary ring.
    std::vector<MultiSeries> wpow{MultiSeries::constant(bv, trunc, GaussRational(1))};
    for (const auto& [e, c] : h.terms()) {
        int ke = e[2];
        while (static_cast<int>(wpow.size()) <= ke) wpow.push_back(wpow.back() * wexpr);
        MultiSeries::Exp be(bv->arity(), 0);
        be[0] = e[0];
        be[1] = e[1];
        if (be[0] + be[1] > trunc) continue;
        out += mul_capped(MultiSeries::monomial(bv, trunc, be, c), wpow[ke], trunc);
    }
    return out + out.conj();
}

} // namespace qprime
