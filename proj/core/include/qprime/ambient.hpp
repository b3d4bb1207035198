#ifndef QPRIME_AMBIENT_HPP
#define QPRIME_AMBIENT_HPP

#include "qprime/multiseries.hpp"
#include "qprime/surface.hpp"

#include <array>
#include <optional>
#include <vector>

namespace qprime {

struct Bidegree {
    Rational p, q;
    Bidegree() : p(0), q(0) {}
    Bidegree(Rational pp, Rational qq) : p(std::move(pp)), q(std::move(qq)) {}
    bool operator==(const Bidegree& o) const { return p == o.p && q == o.q; }
    Bidegree operator+(const Bidegree& o) const { return {p + o.p, q + o.q}; }
    bool balanced() const { return p == q; }
};

// Function germ on the ambient space L*_X of the form
//     (z0)^p (z0b)^q * sum_k S_k(z) Lambda^k,   Lambda = log|z0|^2,
// with S_k series in the base variables. Log-degree is capped at 2; the
// paper never needs Lambda^3 and exceeding the cap is an error.
class AmbientElement {
public:
    AmbientElement() = default;
    AmbientElement(Bidegree d, MultiSeries lc0);
    AmbientElement(Bidegree d, std::array<MultiSeries, 3> lcs);

    static AmbientElement zero(VarSetPtr avars, int trunc);
    // Lambda itself (bidegree (0,0), log coefficient 1 at level 1).
    static AmbientElement log_fiber(VarSetPtr avars, int trunc);

    const Bidegree& deg() const { return deg_; }
    const MultiSeries& lc(int k) const { return lc_[k]; }
    const VarSetPtr& vars() const { return lc_[0].vars(); }
    int trunc() const { return lc_[0].trunc(); }

    bool is_zero() const;
    bool log_free() const { return lc_[1].is_zero() && lc_[2].is_zero(); }
    int log_degree() const;
    bool balanced() const { return deg_.balanced(); }

    AmbientElement operator-() const;
    AmbientElement& operator+=(const AmbientElement& o);
    friend AmbientElement operator+(AmbientElement a, const AmbientElement& b) { return a += b; }
    friend AmbientElement operator-(AmbientElement a, const AmbientElement& b) { return a += -b; }
    friend AmbientElement operator*(const AmbientElement& a, const AmbientElement& b);

    AmbientElement scaled(const GaussRational& c) const;
    AmbientElement base_scaled(const MultiSeries& s) const; // multiply by a weight-(0,0) series

    AmbientElement conj() const;

    // Partial derivatives: index 0 is the fiber coordinate, 1..n+1 the
    // base coordinates. The fiber rules are
    //   d0:  (p,q) -> (p-1,q),  S_k -> p S_k + (k+1) S_{k+1}
    // and mirrored for d0b (from d0 Lambda = 1/z0).
    AmbientElement partial(int I) const;
    AmbientElement partial_conj(int I) const;

    // Euler operators Z = z0 d0 and the conjugate; on a balanced log-free
    // element of weight w both act as multiplication by w.
    AmbientElement euler_Z() const;
    AmbientElement euler_Zbar() const;

    AmbientElement unit_inverse() const; // log-free with unit base series

    bool matches(const AmbientElement& o) const;
    std::string str() const;

private:
    int base_index(int I) const; // 1..n+1 -> variable index
    Bidegree deg_;
    std::array<MultiSeries, 3> lc_;
};

AmbientElement rsharp_element(const MultiSeries& r); // |z0|^2 r, bidegree (1,1)

struct AmbientMetric {
    int n = 1;
    MultiSeries r;
    std::vector<std::vector<AmbientElement>> g_lo; // g_{I Jbar}
    std::vector<std::vector<AmbientElement>> g_up; // pairs d_I d_Jbar in the Laplacian
    AmbientElement det;
    bool det_identity_checked = false;
    bool lorentz_checked = false;
    bool homogeneous_model = false; // built on independent cone coordinates
};

// Calibrated Monge-Ampere operator: bordered determinant times a global
// sign fixed once per n by J[1 - |zeta|^2] = +1.
int monge_ampere_sign(int n);
MultiSeries monge_ampere(const MultiSeries& r, int n);
// Exact directional derivative d/de J[r + e*delta] at e = 0.
MultiSeries monge_ampere_linearized(const MultiSeries& r, const MultiSeries& delta, int n);

struct MongeAmpereReport {
    RigidSurface surface;
    MultiSeries r;
    int order_achieved = 0;
    bool j_exact = false;         // J[r] - 1 identically zero as a stored series
    bool has_obstruction = false; // order reached n+2
    MultiSeries obstruction;      // series in (z, zb); valid when has_obstruction
    bool self_validated = false;  // order re-verified by recomputing J
};

// Order-by-order normalization J[r] = 1 + O(rho^target). The stage-s
// linear factor is recomputed from the exact linearization of J; a
// singular solve before stage n+2 aborts, and target > n+2 reports the
// obstruction blocking further improvement.
MongeAmpereReport fefferman_improve(const RigidSurface& s, int target_order);

AmbientMetric build_ambient(const MultiSeries& r, int n);
// Constant-coefficient metric of the quadric in homogeneous cone
// coordinates; the Laplacian reduces to d0 d2b + d2 d0b - d1 d1b.
AmbientMetric flat_model_metric(int n, int trunc);

AmbientElement ambient_laplacian(const AmbientMetric& m, const AmbientElement& e);
AmbientElement laplacian_power(const AmbientMetric& m, AmbientElement e, int k);

// Shell coordinates u = w + wb - F.
MultiSeries to_shell(const MultiSeries& s, const RigidSurface& surf);
MultiSeries from_shell(const MultiSeries& su, const RigidSurface& surf);
// Vanishing order in u among terms of total degree <= trust_deg.
int shell_order(const MultiSeries& s, const RigidSurface& surf, int trust_deg);
// Exact division by rho0^k; throws self_validation_error when not divisible.
MultiSeries divide_by_rho(const MultiSeries& s, const RigidSurface& surf, int k);
// u^0 slice of a shell-coordinate series as a (z, zb) polynomial table.
MultiSeries boundary_slice(const MultiSeries& su, const RigidSurface& surf);

struct BoundaryField {
    Bidegree deg;
    MultiSeries s; // boundary vars (z..., t)
    int weight_num() const; // p as int when balanced integer weight
};

// Restriction to N: substitute w = (F + i t)/2. Requires the log part to
// vanish; checks nothing about balance (callers assert it per contract).
BoundaryField restrict_to_boundary(const AmbientElement& e, const RigidSurface& surf);
MultiSeries restrict_series(const MultiSeries& s, const RigidSurface& surf);

// Hermiticity / inverse identity / Lorentz signature of the metric block.
bool metric_is_hermitian(const AmbientMetric& m);
bool metric_inverse_identity(const AmbientMetric& m);
bool metric_lorentz_signature(const AmbientMetric& m);

} // namespace qprime

#endif
