#ifndef QPRIME_IO_HPP
#define QPRIME_IO_HPP

#include "qprime/ambient.hpp"
#include "qprime/multiseries.hpp"
#include "qprime/surface.hpp"

#include "json.hpp"

namespace qprime {

using Json = nlohmann::ordered_json;

// Shared series schema:
// {"vars": [...], "trunc": D,
//  "terms": [{"exp": [e1, ...], "re": "p/q", "im": "p/q"}]}
Json series_to_json(const MultiSeries& s);
MultiSeries series_from_json(const Json& j);

// Surface schema:
// {"n": 1, "trunc": D, "F_terms": [{"exp_z": [..], "exp_zbar": [..],
//  "coeff": "p/q(+p/q i)"}]}; optional "shape": "ball" | "quadric".
RigidSurface surface_from_json(const Json& j);
Json surface_to_json(const RigidSurface& s);
std::string surface_shape(const Json& j); // "rigid" unless a shape tag is present

// Pluriharmonic input schema:
// {"hol_terms": [{"exp_z": e, "exp_w": k, "coeff": "p/q(+p/q i)"}]}
HolPoly holpoly_from_json(const Json& j, int n);
Json holpoly_to_json(const HolPoly& p);

Json boundary_field_to_json(const BoundaryField& f);
Json rational_json(const Rational& q);      // {"exact": "p/q", "decimal": x}
Json gauss_json(const GaussRational& c);

Json load_json_file(const std::string& path); // throws parse_error
void write_text_file(const std::string& path, const std::string& text);

} // namespace qprime

#endif
