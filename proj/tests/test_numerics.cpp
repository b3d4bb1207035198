#include "doctest.h"

#include "qprime/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace qprime;

namespace {

constexpr double pi = std::numbers::pi;

SpherePoly re_hol1(int ez, int ew) {
    return sphere_re_hol({{{ez, ew}, GaussRational(1)}});
}

} // namespace

TEST_CASE("sphere structure equations: Scal = 2, torsion-free, exact totals") {
    SphereTWData tw = sphere_tw_data();
    CHECK(tw.scal == Rational(2));
    CHECK(tw.volume_over_pi2 == Rational(4));
    CHECK(tw.qprime_over_pi2 == Rational(8));
    // Delta_b of constants vanishes
    CHECK(tw.delta_b(SpherePoly::constant(GaussRational(1))).is_zero());
}

TEST_CASE("sphere quadrature reproduces the exact volume") {
    SphereGrid grid(Resolution{});
    double vol = grid.volume();
    CHECK(std::abs(vol / (4 * pi * pi) - 1.0) < 1e-12);
}

TEST_CASE("sphere operators: P kills CR pluriharmonics, Delta_b is symmetric") {
    SphereTWData tw = sphere_tw_data();
    SpherePoly f = re_hol1(1, 0);   // Re z
    SpherePoly g = re_hol1(2, 1);   // Re z^2 w
    CHECK(tw.p_op(f).is_zero());
    CHECK(tw.p_op(g).is_zero());
    // P does not kill |z|^2 (not CR-pluriharmonic on the sphere)
    SpherePoly zzb = SpherePoly::monomial({1, 1, 0, 0}, GaussRational(1));
    CHECK(!tw.p_op(zzb).is_zero());

    SphereGrid grid(Resolution{});
    double s1 = grid.integrate_poly(f * tw.delta_b(g));
    double s2 = grid.integrate_poly(g * tw.delta_b(f));
    CHECK(std::abs(s1 - s2) < 1e-10 * (1 + std::abs(s1)));
}

TEST_CASE("fit_log_term on synthetic data") {
    EpsGrid grid;
    auto eps = grid.values();
    std::vector<double> v;
    for (double e : eps) v.push_back(3.0 / (e * e) + 5.0 * std::log(e) + 7.0);
    LogFitResult fit = fit_log_term(v, eps, 1);
    CHECK(fit.valid);
    CHECK(std::abs(fit.log_coeff - 5.0) < 1e-10);
    CHECK(std::abs(fit.constant - 7.0) < 1e-9);
    CHECK(std::abs(fit.pole_coeffs[0] - 3.0) < 1e-10);

    // eps-proportional noise: log coefficient stable to 1e-3
    std::vector<double> vn = v;
    for (std::size_t k = 0; k < vn.size(); ++k)
        vn[k] += eps[k] * ((k % 2) ? 1.0 : -1.0) * 1e-4;
    LogFitResult fit2 = fit_log_term(vn, eps, 1, 1.0);
    CHECK(std::abs(fit2.log_coeff - 5.0) < 1e-3);

    // narrow grids are rejected
    EpsGrid narrow{0.1, 0.2, 12};
    std::vector<double> vv(12, 1.0);
    CHECK_THROWS(fit_log_term(vv, narrow.values(), 1));
}

TEST_CASE("renormalized volume integrals: positivity and the log coefficient") {
    EpsGrid grid;
    Resolution res{48, 12, 12};
    auto vals1 = renormalized_volume_integral(1, grid, res);
    for (auto& [e, v] : vals1) CHECK(v > 0.0); // squared-norm integrand

    std::vector<double> v, e;
    for (auto& [ee, vv] : vals1) {
        e.push_back(ee);
        v.push_back(vv);
    }
    LogFitResult fit1 = fit_log_term(v, e, 1);
    double qbar = 8 * pi * pi;
    double expected = lp_cn(1) * qbar; // = -Qbar'
    CHECK(fit1.valid);
    CHECK(std::abs(fit1.log_coeff / expected - 1.0) < 0.01);

    auto vals2 = renormalized_volume_integral(2, grid, res);
    v.clear();
    e.clear();
    for (auto& [ee, vv] : vals2) {
        e.push_back(ee);
        v.push_back(vv);
    }
    LogFitResult fit2 = fit_log_term(v, e, 1);
    CHECK(fit2.valid);
    // the two variants agree within 10x fit residual or 1%
    CHECK(std::abs(fit2.log_coeff / expected - 1.0) < 0.01);
    CHECK(std::abs(fit1.log_coeff - fit2.log_coeff) <
          std::max(0.01 * std::abs(expected), 10 * (fit1.residual + fit2.residual) * std::abs(expected)));

    // grid refinement: doubling changes the integrals below tolerance
    auto vals1d = renormalized_volume_integral(1, grid, res.doubled());
    for (std::size_t k = 0; k < vals1.size(); ++k) {
        double rel = std::abs(vals1d[k].second / vals1[k].second - 1.0);
        CHECK(rel < 1e-8);
    }
}

TEST_CASE("self-adjointness residuals") {
    Resolution res{48, 12, 12};
    SpherePoly f1 = re_hol1(1, 0);
    // antisymmetry: equal arguments
    CHECK(self_adjointness_residual(f1, f1, WhichOperator::Pprime, res) < 1e-14);

    CHECK(self_adjointness_residual(f1, re_hol1(0, 2), WhichOperator::Pprime, res) < 1e-8);
    CHECK(self_adjointness_residual(f1, re_hol1(1, 1), WhichOperator::Pprime, res) < 1e-8);

    SpherePoly zzb = SpherePoly::monomial({1, 1, 0, 0}, GaussRational(1));
    CHECK(self_adjointness_residual(zzb, zzb * zzb, WhichOperator::P, res) < 1e-8);
    CHECK(self_adjointness_residual(zzb, re_hol1(2, 0), WhichOperator::P, res) < 1e-8);
}

TEST_CASE("burns_epstein relation") {
    CHECK(burns_epstein(0.0) == 0.0);
    double qbar = 8 * pi * pi;
    double mu = burns_epstein(qbar);
    CHECK(mu < 0.0); // positive total Q' gives negative mu
    CHECK(std::abs(mu - (-1.0)) < 1e-14);
}

TEST_CASE("vol_cn and lp_cn") {
    CHECK(vol_cn(1) == -1.0);
    CHECK(vol_cn(2) == -0.5);
    CHECK(lp_cn(1) == -1.0);
    CHECK(lp_cn(2) == doctest::Approx(1.0 / 8.0));
}
