#ifndef QPRIME_VARSET_HPP
#define QPRIME_VARSET_HPP

#include <memory>
#include <string>
#include <vector>

namespace qprime {

// Ordered variable list with conjugation pairing. A holomorphic variable
// "x" is paired with "xb"; a variable without a partner is real
// (conj[i] == i). Shared by every series over the same coordinates.
struct VarSet {
    std::vector<std::string> names;
    std::vector<int> conj;

    int arity() const { return static_cast<int>(names.size()); }
    int index_of(const std::string& name) const; // throws parse_error if absent
    bool operator==(const VarSet& o) const { return names == o.names; }
};

using VarSetPtr = std::shared_ptr<const VarSet>;

VarSetPtr make_varset(std::vector<std::string> names);

// Ambient base coordinates: z1, z1b, ..., zn, znb, w, wb  (plain z/zb at n=1).
VarSetPtr ambient_vars(int n);
// Hypersurface coordinates: z..., t.
VarSetPtr boundary_vars(int n);
// Shell coordinates z..., u, wb with u = w + wb - F. Conjugation is not
// meaningful here; internal use only.
VarSetPtr shell_vars(int n);

// Index of w (resp. u) in the ambient (resp. shell) table.
int ambient_w_index(int n);

} // namespace qprime

#endif
