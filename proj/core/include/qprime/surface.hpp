#ifndef QPRIME_SURFACE_HPP
#define QPRIME_SURFACE_HPP

#include "qprime/multiseries.hpp"

#include <vector>

namespace qprime {

// Rigid hypersurface rho = w + wb - F(z, zb) = 0 with F real, free of
// pure (anti)holomorphic terms, and quadratic part equal to the standard
// Levi form sum_a z_a zb_a.
struct RigidSurface {
    int n = 1;
    int trunc = 8;
    MultiSeries F; // ambient vars, no w/wb dependence

    MultiSeries rho0() const; // w + wb - F
};

struct SurfaceTerm {
    std::vector<int> exp_z;    // length n
    std::vector<int> exp_zbar; // length n
    GaussRational coeff;
};

// Validates reality, Levi normal form and the absence of pluriharmonic
// terms; throws precondition_error otherwise. Terms are the part of F
// beyond the Levi form.
RigidSurface make_rigid_surface(int n, const std::vector<SurfaceTerm>& higher_terms, int trunc);
RigidSurface quadric_surface(int n, int trunc);

// Validate an F series directly (used by the JSON loader).
RigidSurface make_rigid_surface_from_F(int n, const MultiSeries& F, int trunc);

// Holomorphic polynomial in (z, w); the carrier for every pluriharmonic
// input 2 Re(...). Uniqueness of the pluriharmonic extension makes this
// representation lossless for polynomial data.
struct HolTerm {
    std::vector<int> exp_z; // length n
    int exp_w = 0;
    GaussRational coeff;
};

struct HolPoly {
    int n = 1;
    std::vector<HolTerm> terms;
};

MultiSeries hol_series(const HolPoly& p, const VarSetPtr& avars, int trunc);
// 2 Re(p) as a fiber-constant ambient series.
MultiSeries pluriharmonic_ambient(const HolPoly& p, int trunc);
// 2 Re(p) restricted to the flat model surface w = |z|^2/2 + i t
// (tw3 coordinates; n = 1 only).
MultiSeries pluriharmonic_flat_boundary(const HolPoly& p, int trunc);

} // namespace qprime

#endif
