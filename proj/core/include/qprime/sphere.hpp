#ifndef QPRIME_SPHERE_HPP
#define QPRIME_SPHERE_HPP

#include "qprime/rational.hpp"

#include <array>
#include <complex>
#include <map>
#include <string>

namespace qprime {

// Polynomials on S^3 = {|z|^2 + |w|^2 = 1} in C^2, reduced modulo the
// sphere relation by eliminating w*wb (normal form: no monomial carries
// both w and wb). Exact coefficients.
class SpherePoly {
public:
    using Exp = std::array<int, 4>; // (z, zb, w, wb)

    SpherePoly() = default;
    static SpherePoly constant(const GaussRational& c);
    static SpherePoly variable(int idx);
    static SpherePoly monomial(const Exp& e, const GaussRational& c);

    const std::map<Exp, GaussRational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    GaussRational constant_coeff() const;

    SpherePoly operator-() const;
    SpherePoly& operator+=(const SpherePoly& o);
    friend SpherePoly operator+(SpherePoly a, const SpherePoly& b) { return a += b; }
    friend SpherePoly operator-(SpherePoly a, const SpherePoly& b) { return a += -b; }
    friend SpherePoly operator*(const SpherePoly& a, const SpherePoly& b);
    SpherePoly scaled(const GaussRational& c) const;
    SpherePoly conj() const;

    // Formal coordinate derivative (before reduction the normal form is
    // differentiated term by term; the result is reduced again).
    SpherePoly derivative(int idx) const;

    std::complex<double> eval(std::complex<double> z, std::complex<double> w) const;
    bool operator==(const SpherePoly& o) const { return terms_ == o.terms_; }
    std::string str() const;

private:
    void insert_reduced(Exp e, const GaussRational& c);
    std::map<Exp, GaussRational> terms_;
};

// 2 Re of a holomorphic polynomial in (z, w), restricted to the sphere.
SpherePoly sphere_re_hol(const std::map<std::array<int, 2>, GaussRational>& hol_terms);

// Tangential frame Z1 = wb dz - zb dw annihilating rho = 1 - |z|^2 - |w|^2,
// Reeb field of theta = (i/2)(d - dbar)rho.
SpherePoly sphere_Z1(const SpherePoly& f);
SpherePoly sphere_Z1b(const SpherePoly& f);
SpherePoly sphere_T(const SpherePoly& f);

// Tanaka-Webster data of the sphere contact form, solved from the
// structure equations in the polynomial ring. Torsion must come out
// identically zero and Scal constant; both are verified.
struct SphereTWData {
    Rational scal;                 // Webster scalar curvature (constant)
    Rational qprime_over_pi2;      // total Q' divided by pi^2 (exact)
    Rational volume_over_pi2;      // integral of theta wedge dtheta over pi^2
    SpherePoly delta_b(const SpherePoly& f) const;
    SpherePoly p_op(const SpherePoly& f) const;      // GJMS P = P_2
    SpherePoly p_prime_op(const SpherePoly& f) const; // P' for the sphere
};

SphereTWData sphere_tw_data();

} // namespace qprime

#endif
