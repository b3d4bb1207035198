#ifndef QPRIME_QUADRATURE_HPP
#define QPRIME_QUADRATURE_HPP

#include "qprime/sphere.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace qprime {

// Renormalized-volume constants (two distinct constants that share one
// name in the surrounding literature):
//   vol_cn = -1/n!            (volume-form normalization),
//   lp_cn  = (-1)^n / (n!)^3  (log-term coefficient of the weighted
//                              volume expansion).
double vol_cn(int n);
double lp_cn(int n);

struct EpsGrid {
    double lo = 0.02, hi = 0.4;
    int count = 12;
    std::vector<double> values() const; // logarithmically spaced
};

struct Resolution {
    int radial = 96;  // Gauss-Legendre nodes in the (log-substituted) shell direction
    int xi = 24;      // Gauss-Legendre nodes in xi = sin^2(alpha)
    int phi = 24;     // trapezoid nodes per periodic Hopf angle
    Resolution doubled() const { return {2 * radial, 2 * xi, 2 * phi}; }
};

// Quadrature grid for the sphere measure theta wedge dtheta =
// dphi1 dphi2 dxi (trapezoid x trapezoid x Gauss-Legendre).
struct SphereGrid {
    explicit SphereGrid(const Resolution& res);
    double integrate(const std::function<double(std::complex<double>, std::complex<double>)>& f) const;
    double integrate_poly(const SpherePoly& p) const; // real part of the integral
    double volume() const;                            // quadrature of 1
    std::vector<double> xi_nodes, xi_weights;
    int nphi;
};

// Shell integrals on the ball r = 1 - |z|^2 - |w|^2 with the exact
// Einstein-Kahler metric g = -i ddbar log r.
//   variant 1: ||d log r||^2 dv_g
//   variant 2: -2/(n+1)! * (ddbar r / (i r))^{n+1}
std::vector<std::pair<double, double>> renormalized_volume_integral(int variant,
                                                                    const EpsGrid& grid,
                                                                    const Resolution& res);

struct LogFitResult {
    std::vector<double> pole_coeffs; // a_0 .. a_n against eps^{j-n-1}
    double log_coeff = 0;
    double constant = 0;
    double residual = 0; // RMS of the least-squares residual, relative
    bool valid = false;
    std::vector<double> eps;
};

// Least squares against {eps^{-n-1}, ..., eps^{-1}, log eps, 1}.
LogFitResult fit_log_term(const std::vector<double>& values, const std::vector<double>& eps,
                          int n, double validity_threshold = 1e-6);

enum class WhichOperator { P, Pprime };

// |int (f1 O f2 - f2 O f1)| / (|f1||O f2| + |f2||O f1|) over the sphere.
double self_adjointness_residual(const SpherePoly& f1, const SpherePoly& f2, WhichOperator which,
                                 const Resolution& res);

// mu = -Qbar' / (8 pi^2).
double burns_epstein(double total_q_prime);

} // namespace qprime

#endif
