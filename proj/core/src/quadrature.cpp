#include "qprime/quadrature.hpp"

#include "qprime/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace qprime {

namespace {

constexpr double pi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

void gauss_legendre_ab(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    gauss_legendre(n, x, w);
    for (int i = 0; i < n; ++i) {
        x[i] = 0.5 * (a + b) + 0.5 * (b - a) * x[i];
        w[i] *= 0.5 * (b - a);
    }
}

} // namespace

double vol_cn(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return -1.0 / f;
}

double lp_cn(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return ((n % 2) ? -1.0 : 1.0) / (f * f * f);
}

std::vector<double> EpsGrid::values() const {
    if (count < 2 || lo <= 0 || hi <= lo)
        throw precondition_error("eps grid: need 0 < lo < hi and count >= 2");
    std::vector<double> v(count);
    double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < count; ++i)
        v[i] = std::exp(la + (lb - la) * i / (count - 1));
    return v;
}

// ---------------------------------------------------------------------
// Sphere quadrature
// ---------------------------------------------------------------------

SphereGrid::SphereGrid(const Resolution& res) : nphi(res.phi) {
    if (res.xi < 2 || res.phi < 4) throw precondition_error("sphere grid: resolution too small");
    gauss_legendre_ab(res.xi, 0.0, 1.0, xi_nodes, xi_weights);
}

double SphereGrid::integrate(
    const std::function<double(std::complex<double>, std::complex<double>)>& f) const {
    // theta wedge dtheta = dphi1 dphi2 dxi with
    // z = sqrt(1-xi) e^{i phi1}, w = sqrt(xi) e^{i phi2}.
    double acc = 0.0;
    double dphi = 2.0 * pi / nphi;
    for (std::size_t ix = 0; ix < xi_nodes.size(); ++ix) {
        double xi = xi_nodes[ix];
        double rz = std::sqrt(1.0 - xi), rw = std::sqrt(xi);
        double sub = 0.0;
        for (int i = 0; i < nphi; ++i) {
            double p1 = dphi * i;
            std::complex<double> z = rz * std::complex<double>(std::cos(p1), std::sin(p1));
            for (int j = 0; j < nphi; ++j) {
                double p2 = dphi * j;
                std::complex<double> w = rw * std::complex<double>(std::cos(p2), std::sin(p2));
                sub += f(z, w);
            }
        }
        acc += xi_weights[ix] * sub * dphi * dphi;
    }
    return acc;
}

double SphereGrid::integrate_poly(const SpherePoly& p) const {
    return integrate([&](std::complex<double> z, std::complex<double> w) {
        return p.eval(z, w).real();
    });
}

double SphereGrid::volume() const {
    return integrate([](std::complex<double>, std::complex<double>) { return 1.0; });
}

// ---------------------------------------------------------------------
// Ball shell integrals
// ---------------------------------------------------------------------

namespace {

// Pointwise integrand data on the ball from the closed-form metric
// g_{jk} = delta/r + conj(zeta_j) zeta_k / r^2 (n = 1, C^2).
struct BallIntegrands {
    // variant 1: ||d log r||^2 * det(g) * 4   (per Euclidean volume)
    // variant 2: -2/(n+1)! * 8 det(H)/r^2 with H = mixed Hessian of r.
    static double value(int variant, std::complex<double> z, std::complex<double> w) {
        std::complex<double> zeta[2] = {z, w};
        double s = std::norm(z) + std::norm(w);
        double r = 1.0 - s;
        // metric and inverse
        Eigen::Matrix2cd g;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                g(a, b) = ((a == b) ? 1.0 / r : 0.0) +
                          std::conj(zeta[a]) * zeta[b] / (r * r);
        if (variant == 2) {
            // ddbar r = -I: det H = 1; total: -2/2! * (-8 det(H) dV / r^2)
            // with the sign worked into the 4-form coefficient:
            // (ddbar r/(i r))^2 = 8 det(H) dV / r^2, prefactor -2/2! = -1.
            return -8.0 / (r * r);
        }
        Eigen::Matrix2cd ginv = g.inverse();
        // d log r components: d_j log r = -conj(zeta_j)/r; the inverse
        // pairing g^{j kb} X_j conj(X_k) uses the conjugate slots of the
        // plain matrix inverse.
        std::complex<double> dj[2] = {-std::conj(z) / r, -std::conj(w) / r};
        std::complex<double> acc = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                acc += ginv(a, b) * std::conj(dj[a]) * dj[b];
        double norm2 = 2.0 * acc.real();
        double detg = g.determinant().real();
        return norm2 * detg * 4.0;
    }
};

} // namespace

std::vector<std::pair<double, double>> renormalized_volume_integral(int variant,
                                                                    const EpsGrid& grid,
                                                                    const Resolution& res) {
    if (variant != 1 && variant != 2)
        throw precondition_error("renormalized_volume_integral: variant must be 1 or 2");
    auto eps = grid.values();
    for (double e : eps)
        if (e <= 0.0 || e >= 1.0)
            throw precondition_error("renormalized_volume_integral: eps outside (0,1)");

    std::vector<double> xin, xiw;
    gauss_legendre_ab(res.xi, 0.0, 1.0, xin, xiw);
    double dphi = 2.0 * pi / res.phi;

    std::vector<std::pair<double, double>> out;
    out.reserve(eps.size());
    for (double e : eps) {
        // Shell r > eps, i.e. s = |zeta|^2 < 1 - e. Radial direction in
        // x = 1 - s over [e, 1] with Gauss-Legendre in log x (the
        // integrand is a polynomial-exponential there).
        std::vector<double> tn, tw;
        gauss_legendre_ab(res.radial, std::log(e), 0.0, tn, tw);
        double acc = 0.0;
        for (int it = 0; it < res.radial; ++it) {
            double x = std::exp(tn[it]);
            double s = 1.0 - x;
            double wrad = tw[it] * x; // dx = x dt
            if (s <= 0.0) continue;
            double sigma = std::sqrt(s);
            // dV_R4 = (1/4) u du dxi dphi1 dphi2 with u = sigma^2 = s.
            double base = 0.25 * s * wrad;
            double sub = 0.0;
            for (std::size_t ix = 0; ix < xin.size(); ++ix) {
                double xi = xin[ix];
                double rz = sigma * std::sqrt(1.0 - xi), rw = sigma * std::sqrt(xi);
                double sub2 = 0.0;
                for (int i = 0; i < res.phi; ++i) {
                    double p1 = dphi * i;
                    std::complex<double> z = rz * std::complex<double>(std::cos(p1), std::sin(p1));
                    for (int j = 0; j < res.phi; ++j) {
                        double p2 = dphi * j;
                        std::complex<double> w =
                            rw * std::complex<double>(std::cos(p2), std::sin(p2));
                        sub2 += BallIntegrands::value(variant, z, w);
                    }
                }
                sub += xiw[ix] * sub2;
            }
            acc += base * sub * dphi * dphi;
        }
        out.emplace_back(e, acc);
    }
    return out;
}

// ---------------------------------------------------------------------
// Log-term extraction
// ---------------------------------------------------------------------

LogFitResult fit_log_term(const std::vector<double>& values, const std::vector<double>& eps,
                          int n, double validity_threshold) {
    if (values.size() != eps.size())
        throw precondition_error("fit_log_term: value/eps size mismatch");
    int m = static_cast<int>(eps.size());
    int cols = (n + 1) + 2; // eps^{j-n-1} for j=0..n, log eps, 1
    if (m < n + 4) throw precondition_error("fit_log_term: need at least n+4 grid points");
    double lo = *std::min_element(eps.begin(), eps.end());
    double hi = *std::max_element(eps.begin(), eps.end());
    if (hi / lo < 4.0)
        throw precondition_error("fit_log_term: eps grid must span at least a factor 4");

    Eigen::MatrixXd A(m, cols);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= n; ++j) A(i, j) = std::pow(eps[i], j - n - 1);
        A(i, n + 1) = std::log(eps[i]);
        A(i, n + 2) = 1.0;
        b(i) = values[i];
    }
    Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
    double rel = (A * x - b).norm() / std::max(b.norm(), 1e-300);

    LogFitResult res;
    res.pole_coeffs.assign(x.data(), x.data() + n + 1);
    res.log_coeff = x(n + 1);
    res.constant = x(n + 2);
    res.residual = rel;
    res.valid = rel < validity_threshold;
    res.eps = eps;
    return res;
}

// ---------------------------------------------------------------------
// Self-adjointness residual and Burns-Epstein
// ---------------------------------------------------------------------

double self_adjointness_residual(const SpherePoly& f1, const SpherePoly& f2, WhichOperator which,
                                 const Resolution& res) {
    SphereTWData tw = sphere_tw_data();
    auto op = [&](const SpherePoly& f) {
        return which == WhichOperator::P ? tw.p_op(f) : tw.p_prime_op(f);
    };
    SpherePoly o1 = op(f1), o2 = op(f2);
    SphereGrid grid(res);
    double numer = std::abs(grid.integrate_poly(f1 * o2 - f2 * o1));
    auto l2 = [&](const SpherePoly& p) {
        return std::sqrt(std::abs(grid.integrate_poly(p * p.conj())));
    };
    double denom = l2(f1) * l2(o2) + l2(f2) * l2(o1);
    if (denom < 1e-14) return numer; // operator annihilates the pair
    return numer / denom;
}

double burns_epstein(double total_q_prime) {
    return -total_q_prime / (8.0 * pi * pi);
}

} // namespace qprime
