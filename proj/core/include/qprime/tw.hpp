#ifndef QPRIME_TW_HPP
#define QPRIME_TW_HPP

#include "qprime/multiseries.hpp"
#include "qprime/surface.hpp"

namespace qprime {

// Symbolic Tanaka-Webster calculus on 3-dimensional CR manifolds.
//
// Every field is stored through its theta_0-trivialized component in the
// surface coordinates (z, zb, t) with w = F/2 + i t, frame
//   Z1 = dz - (i/2) F_z dt,   T = -dt,
// and all indices lowered; raising against the canonical weighted Levi
// form is component-free and only shifts the recorded weight.

struct PHField {
    MultiSeries comp; // theta_0-trivialized component
    int weight = 0;   // density weight w in E(w)
};

// Indexed object: a lower-holomorphic, b lower-antiholomorphic indices.
struct TWObj {
    MultiSeries c;
    int a = 0, b = 0;
    int w = 0;
};

// Connection data for one pseudo-hermitian structure over the flat
// coordinate frame: Levi component h, connection form omega_1^1 =
// omT*theta + om1*theta^1 + om1b*theta^1b, the density-connection
// components, and the Reeb mixing of the hatted 0-direction.
class TWFrame {
public:
    static TWFrame flat(int trunc);
    // theta-hat = e^Upsilon theta_0, admissible coframe
    // theta-hat^1 = theta^1 + i Upsilon^1 theta.
    static TWFrame scaled(const MultiSeries& upsilon);

    const VarSetPtr& vars() const { return bv_; }
    int trunc() const { return trunc_; }
    const MultiSeries& h() const { return h_; }
    const MultiSeries& hinv() const { return hinv_; }

    // Flat-coordinate frame derivations.
    MultiSeries z1(const MultiSeries& f) const;
    MultiSeries z1b(const MultiSeries& f) const;
    MultiSeries t0(const MultiSeries& f) const;

    // Covariant derivatives with index/weight bookkeeping.
    TWObj d1(const TWObj& x) const;
    TWObj d1b(const TWObj& x) const;
    TWObj d0(const TWObj& x) const;
    // Sub-Laplacian by operator composition.
    TWObj lapb(const TWObj& x) const;

    TWFrame() = default;
    void finish(); // derive sigma / reeb-paired components

    MultiSeries Fz_, h_, hinv_, logh_;
    MultiSeries omT_, om1_, om1b_;
    MultiSeries sigT_, sig1_, sig1b_;
    MultiSeries reeb1_, reeb1b_;
    MultiSeries Om0_, Sig0_;
    VarSetPtr bv_;
    int trunc_ = 0;
};

struct PHInvariants {
    TWFrame frame;
    MultiSeries Upsilon; // scaling from theta_0 (zero for rigid surfaces)
    PHField Scal;        // weight -1
    PHField A11;         // torsion component, weight tag 0 in E_{11}
    bool flat_base = true;
};

// theta-hat = e^Upsilon theta_0 on the Heisenberg model.
PHInvariants scaled_invariants(const MultiSeries& upsilon);
PHInvariants scaled_invariants(const HolPoly& upsilon, int trunc);

// Structure-equation extraction for a rigid surface (n = 1).
PHInvariants tw_from_rigid_surface(const RigidSurface& surf);

// Prop-2.4-style hatted derivatives of a scalar density (closed formulas;
// flat base required). The machinery route (d1/lapb above) must agree.
struct HatDerivatives {
    MultiSeries nabla1;  // weight w
    MultiSeries nabla0;  // weight w-1
    MultiSeries lap_b;   // weight w-1
};
HatDerivatives hat_derivatives(const PHInvariants& inv, const PHField& f);

PHField q_prime_tw(const PHInvariants& inv);
PHField q_curvature_tw(const PHInvariants& inv);
PHField s_tensor(const PHInvariants& inv); // S_1 component, E_1(-1)
bool pseudo_einstein_test(const PHInvariants& inv);

PHField p_prime_tw(const PHInvariants& inv, const PHField& f);
// GJMS P (= P_2) through P_1: P f = (P^1 f)_{,1}.
PHField tw_gjms_p(const PHInvariants& inv, const PHField& f);

// P_1 f = f_1b^{1b}_1 + i A_11 f^1; zero iff f is CR pluriharmonic on
// the model. Returns the witness field.
std::pair<bool, PHField> pluriharmonic_test(const PHField& f);
PHField p1_operator(const PHInvariants& inv, const PHField& f);

struct CartanReport {
    PHField O11;       // lowered avatar O_{1b1b} in E_{1b1b}(-1)
    PHField Oscalar;   // P*_11 O^11 in E(-3)
    bool O11_zero = false;
    bool imag_zero = false; // Im P*_11 O^11 == 0
};
CartanReport cartan_obstruction(const PHInvariants& inv);
// Deformation operator P_11 f = (nabla_11 + i A_11) f.
PHField p11_deformation(const PHInvariants& inv, const PHField& f);

// (Scal^2 - 4|A|^2); the -1/(16 pi^2) prefactor stays symbolic and is
// applied only by the numeric layer.
PHField burns_epstein_integrand(const PHInvariants& inv);

// Prop 2.4(i) applied over an already-scaled base; must agree with
// scaled_invariants(Upsilon_base + ups2).
std::pair<PHField, PHField> transformed_invariants(const PHInvariants& base,
                                                   const MultiSeries& ups2);

// Convert an ambient-restriction boundary series (w = (F+it)/2) to the
// tw coordinates (w = F/2 + it): substitutes t -> 2t.
MultiSeries ambient_to_tw_time(const MultiSeries& s);

} // namespace qprime

#endif
