#ifndef QPRIME_INVARIANTS_HPP
#define QPRIME_INVARIANTS_HPP

#include "qprime/ambient.hpp"

namespace qprime {

// Ambient-construction invariants. Every operation returns the fiber
// coefficient of a balanced element restricted to N, i.e. the density
// trivialized against the contact form of the metric's defining
// function (theta_0 for the flat model).

// Weight-w pluriharmonic element 2 Re p with the fiber factor attached.
AmbientElement pluriharmonic_element(const HolPoly& p, int trunc);

// GJMS operator: Delta^(n+2w+1) f restricted to N, for f balanced of
// admissible weight w with 2w in [-n, 0].
BoundaryField gjms(const AmbientMetric& m, const RigidSurface& surf, const AmbientElement& f);

// Same operator through the harmonic-extension staging: builds A_k with
// Delta A_k = O(rho^k) using psi_{k+1} = -phi_k/((k+1)(n-k)), reads off
// the log coefficient and rescales by (-1)^(n+1) (n+1)! n!.
BoundaryField gjms_via_expansion(const AmbientMetric& m, const RigidSurface& surf,
                                 const AmbientElement& f0);
// The raw log coefficient B0 of the staging (before rescaling).
BoundaryField gjms_expansion_log_coefficient(const AmbientMetric& m, const RigidSurface& surf,
                                             const AmbientElement& f0);

// Q-curvature of theta = e^Upsilon theta_r: -Delta^(n+1)(Lambda - Ups)|_N
// for an arbitrary ambient extension Ups of Upsilon.
BoundaryField q_curvature_ambient(const AmbientMetric& m, const RigidSurface& surf,
                                  const MultiSeries& upsilon_ext);

// P' f = -Delta^(n+1)(f~ log h_theta)|_N for pluriharmonic f.
BoundaryField p_prime(const AmbientMetric& m, const RigidSurface& surf, const HolPoly& upsilon,
                      const HolPoly& f);

// Q' = Delta^(n+1)(log^2 h_theta)|_N, theta = e^Upsilon theta_0
// pseudo-Einstein (Upsilon pluriharmonic by construction of HolPoly).
BoundaryField q_prime(const AmbientMetric& m, const RigidSurface& surf, const HolPoly& upsilon);

// Function representative of a weight -m density with respect to
// theta-hat = e^Upsilon theta: multiplies by e^{-m Upsilon}|_M.
MultiSeries density_as_function(const BoundaryField& f, const MultiSeries& upsilon_boundary);

// Exact value at the surface origin (all boundary variables zero).
GaussRational origin_value(const BoundaryField& f);

} // namespace qprime

#endif
