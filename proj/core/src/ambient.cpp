#include "qprime/ambient.hpp"

#include "qprime/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace qprime {

// ---------------------------------------------------------------------
// AmbientElement
// ---------------------------------------------------------------------

AmbientElement::AmbientElement(Bidegree d, MultiSeries lc0) : deg_(std::move(d)) {
    MultiSeries z(lc0.vars(), lc0.trunc());
    lc_ = {std::move(lc0), z, z};
}

AmbientElement::AmbientElement(Bidegree d, std::array<MultiSeries, 3> lcs)
    : deg_(std::move(d)), lc_(std::move(lcs)) {
    for (int k = 1; k < 3; ++k)
        if (!lc_[k].same_ring(lc_[0]))
            throw precondition_error("AmbientElement: mixed variable sets");
}

AmbientElement AmbientElement::zero(VarSetPtr avars, int trunc) {
    return AmbientElement(Bidegree(), MultiSeries(std::move(avars), trunc));
}

AmbientElement AmbientElement::log_fiber(VarSetPtr avars, int trunc) {
    MultiSeries z(avars, trunc);
    MultiSeries one = MultiSeries::constant(avars, trunc, GaussRational(1));
    return AmbientElement(Bidegree(), {z, one, z});
}

bool AmbientElement::is_zero() const {
    return lc_[0].is_zero() && lc_[1].is_zero() && lc_[2].is_zero();
}

int AmbientElement::log_degree() const {
    for (int k = 2; k >= 0; --k)
        if (!lc_[k].is_zero()) return k;
    return -1;
}

AmbientElement AmbientElement::operator-() const {
    AmbientElement out(*this);
    for (auto& s : out.lc_) s = -s;
    return out;
}

AmbientElement& AmbientElement::operator+=(const AmbientElement& o) {
    if (is_zero()) {
        // adopt o's bidegree, keep the weaker truncation/exactness
        int t = std::min(trunc(), o.trunc());
        bool ex = lc_[0].exact() && lc_[1].exact() && lc_[2].exact();
        deg_ = o.deg_;
        for (int k = 0; k < 3; ++k) {
            lc_[k] = o.lc_[k].with_trunc(t);
            lc_[k].set_exact(lc_[k].exact() && ex);
        }
        return *this;
    }
    if (o.is_zero()) {
        // still merge truncation info
        for (int k = 0; k < 3; ++k) lc_[k] += o.lc_[k];
        return *this;
    }
    if (!(deg_ == o.deg_))
        throw precondition_error("AmbientElement addition: mismatched bidegree");
    for (int k = 0; k < 3; ++k) lc_[k] += o.lc_[k];
    return *this;
}

AmbientElement operator*(const AmbientElement& a, const AmbientElement& b) {
    Bidegree d = a.deg() + b.deg();
    std::array<MultiSeries, 3> lc{MultiSeries(a.vars(), std::min(a.trunc(), b.trunc())),
                                  MultiSeries(a.vars(), std::min(a.trunc(), b.trunc())),
                                  MultiSeries(a.vars(), std::min(a.trunc(), b.trunc()))};
    for (int i = 0; i < 3; ++i) {
        if (a.lc(i).is_zero()) continue;
        for (int j = 0; j < 3; ++j) {
            if (b.lc(j).is_zero()) continue;
            if (i + j > 2)
                throw math_domain_error("AmbientElement product: log degree above 2");
            lc[i + j] += a.lc(i) * b.lc(j);
        }
    }
    return AmbientElement(d, std::move(lc));
}

AmbientElement AmbientElement::scaled(const GaussRational& c) const {
    AmbientElement out(*this);
    for (auto& s : out.lc_) s = s.scaled(c);
    return out;
}

AmbientElement AmbientElement::base_scaled(const MultiSeries& s) const {
    AmbientElement out(*this);
    for (auto& x : out.lc_) x = x * s;
    return out;
}

AmbientElement AmbientElement::conj() const {
    AmbientElement out(*this);
    out.deg_ = Bidegree(deg_.q, deg_.p);
    for (auto& s : out.lc_) s = s.conj();
    return out;
}

int AmbientElement::base_index(int I) const {
    // Ambient order z1, z1b, ..., zn, znb, w, wb; I in 1..n+1.
    int n = (vars()->arity() - 2) / 2;
    if (I < 1 || I > n + 1) throw precondition_error("ambient partial: index out of range");
    return (I <= n) ? 2 * (I - 1) : 2 * n;
}

AmbientElement AmbientElement::partial(int I) const {
    if (I == 0) {
        std::array<MultiSeries, 3> lc{lc_[0].scaled(GaussRational(deg_.p)) + lc_[1],
                                      lc_[1].scaled(GaussRational(deg_.p)) + lc_[2].scaled(GaussRational(2)),
                                      lc_[2].scaled(GaussRational(deg_.p))};
        return AmbientElement(Bidegree(deg_.p - 1, deg_.q), std::move(lc));
    }
    int v = base_index(I);
    return AmbientElement(deg_, {lc_[0].derivative(v), lc_[1].derivative(v), lc_[2].derivative(v)});
}

AmbientElement AmbientElement::partial_conj(int I) const {
    if (I == 0) {
        std::array<MultiSeries, 3> lc{lc_[0].scaled(GaussRational(deg_.q)) + lc_[1],
                                      lc_[1].scaled(GaussRational(deg_.q)) + lc_[2].scaled(GaussRational(2)),
                                      lc_[2].scaled(GaussRational(deg_.q))};
        return AmbientElement(Bidegree(deg_.p, deg_.q - 1), std::move(lc));
    }
    int v = vars()->conj[base_index(I)];
    return AmbientElement(deg_, {lc_[0].derivative(v), lc_[1].derivative(v), lc_[2].derivative(v)});
}

AmbientElement AmbientElement::euler_Z() const {
    AmbientElement out = partial(0);
    out.deg_ = deg_;
    return out;
}

AmbientElement AmbientElement::euler_Zbar() const {
    AmbientElement out = partial_conj(0);
    out.deg_ = deg_;
    return out;
}

AmbientElement AmbientElement::unit_inverse() const {
    if (!log_free()) throw math_domain_error("AmbientElement inverse: log part present");
    return AmbientElement(Bidegree(-deg_.p, -deg_.q), lc_[0].unit_inverse());
}

bool AmbientElement::matches(const AmbientElement& o) const {
    if (is_zero() || o.is_zero()) {
        for (int k = 0; k < 3; ++k)
            if (!lc_[k].matches(o.lc_[k])) return false;
        return true;
    }
    if (!(deg_ == o.deg_)) return false;
    for (int k = 0; k < 3; ++k)
        if (!lc_[k].matches(o.lc_[k])) return false;
    return true;
}

std::string AmbientElement::str() const {
    std::ostringstream os;
    os << "(z0)^" << rational_to_string(deg_.p) << " (z0b)^" << rational_to_string(deg_.q)
       << " * [" << lc_[0].str();
    if (!lc_[1].is_zero()) os << " + L*(" << lc_[1].str() << ")";
    if (!lc_[2].is_zero()) os << " + L^2*(" << lc_[2].str() << ")";
    os << "]";
    return os.str();
}

AmbientElement rsharp_element(const MultiSeries& r) {
    return AmbientElement(Bidegree(1, 1), r);
}

// ---------------------------------------------------------------------
// Monge-Ampere operator
// ---------------------------------------------------------------------

namespace {

// Determinant by cofactor expansion; Ring needs +, -, *.
template <typename Ring>
Ring det_ring(const std::vector<std::vector<Ring>>& m) {
    std::size_t sz = m.size();
    if (sz == 1) return m[0][0];
    Ring acc;
    bool first = true;
    for (std::size_t c = 0; c < sz; ++c) {
        std::vector<std::vector<Ring>> minor;
        minor.reserve(sz - 1);
        for (std::size_t i = 1; i < sz; ++i) {
            std::vector<Ring> row;
            row.reserve(sz - 1);
            for (std::size_t j = 0; j < sz; ++j)
                if (j != c) row.push_back(m[i][j]);
            minor.push_back(std::move(row));
        }
        Ring term = m[0][c] * det_ring(minor);
        bool neg = (c % 2) == 1;
        if (first) {
            acc = neg ? -term : term;
            first = false;
        } else {
            acc = neg ? (acc - term) : (acc + term);
        }
    }
    return acc;
}

struct DualSeries {
    MultiSeries a, b; // a + eps*b
    DualSeries operator+(const DualSeries& o) const { return {a + o.a, b + o.b}; }
    DualSeries operator-(const DualSeries& o) const { return {a - o.a, b - o.b}; }
    DualSeries operator-() const { return {-a, -b}; }
    DualSeries operator*(const DualSeries& o) const { return {a * o.a, a * o.b + b * o.a}; }
};

int infer_n(const MultiSeries& r) {
    int arity = r.vars()->arity();
    if (arity % 2 != 0 || arity < 4)
        throw precondition_error("monge_ampere: not an ambient variable set");
    return arity / 2 - 1;
}

template <typename Ring, typename Entry>
std::vector<std::vector<Ring>> bordered_matrix(const MultiSeries& r, int n, Entry&& entry) {
    // Rows: 0 then kbar = 1..n+1; columns: 0 then j = 1..n+1.
    // Entry (0,0) = r, (0,j) = d_j r, (k,0) = d_kbar r, (k,j) = d_j d_kbar r.
    auto var_of = [&](int j) { return (j <= n) ? 2 * (j - 1) : 2 * n; };
    std::vector<MultiSeries> dj(n + 2), dk(n + 2);
    for (int j = 1; j <= n + 1; ++j) {
        dj[j] = r.derivative(var_of(j));
        dk[j] = r.derivative(r.vars()->conj[var_of(j)]);
    }
    std::vector<std::vector<Ring>> m(n + 2, std::vector<Ring>(n + 2));
    m[0][0] = entry(r);
    for (int j = 1; j <= n + 1; ++j) m[0][j] = entry(dj[j]);
    for (int k = 1; k <= n + 1; ++k) {
        m[k][0] = entry(dk[k]);
        for (int j = 1; j <= n + 1; ++j) m[k][j] = entry(dk[k].derivative(var_of(j)));
    }
    return m;
}

MultiSeries bordered_det(const MultiSeries& r, int n) {
    auto m = bordered_matrix<MultiSeries>(r, n, [](const MultiSeries& s) { return s; });
    return det_ring(m);
}

} // namespace

int monge_ampere_sign(int n) {
    static std::map<int, int> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    // Calibration J[1 - |zeta|^2] = +1 on the ball.
    auto av = ambient_vars(n);
    int trunc = 4;
    MultiSeries ball = MultiSeries::constant(av, trunc, GaussRational(1));
    for (int j = 0; j <= n; ++j) {
        int v = (j < n) ? 2 * j : 2 * n;
        ball -= MultiSeries::variable(av, trunc, av->names[v]) *
                MultiSeries::variable(av, trunc, av->names[v + 1]);
    }
    MultiSeries d = bordered_det(ball, n);
    GaussRational c = d.constant_term();
    MultiSeries cc = MultiSeries::constant(av, trunc, c);
    if (!d.matches(cc) || !(c == GaussRational(1) || c == GaussRational(-1)))
        throw self_validation_error("Monge-Ampere sign calibration failed");
    int sign = (c == GaussRational(1)) ? 1 : -1;
    cache[n] = sign;
    return sign;
}

MultiSeries monge_ampere(const MultiSeries& r, int n) {
    if (infer_n(r) != n) throw precondition_error("monge_ampere: wrong variable set for n");
    if (r.is_zero()) throw math_domain_error("monge_ampere: zero input");
    bool grad = !r.constant_term().is_zero();
    for (int v = 0; v < r.vars()->arity() && !grad; ++v)
        if (!r.derivative(v).constant_term().is_zero()) grad = true;
    if (!grad) throw math_domain_error("monge_ampere: degenerate gradient at base point");
    MultiSeries d = bordered_det(r, n);
    return (monge_ampere_sign(n) == 1) ? d : -d;
}

MultiSeries monge_ampere_linearized(const MultiSeries& r, const MultiSeries& delta, int n) {
    MultiSeries zero(r.vars(), std::min(r.trunc(), delta.trunc()));
    // All matrix entries are linear in the argument, so dual-number
    // entries are (entry(r), entry(delta)).
    auto var_of = [&](int j) { return (j <= n) ? 2 * (j - 1) : 2 * n; };
    std::vector<std::vector<DualSeries>> m(n + 2, std::vector<DualSeries>(n + 2));
    m[0][0] = DualSeries{r, delta};
    for (int j = 1; j <= n + 1; ++j)
        m[0][j] = DualSeries{r.derivative(var_of(j)), delta.derivative(var_of(j))};
    for (int k = 1; k <= n + 1; ++k) {
        int vk = r.vars()->conj[var_of(k)];
        MultiSeries rk = r.derivative(vk), dk = delta.derivative(vk);
        m[k][0] = DualSeries{rk, dk};
        for (int j = 1; j <= n + 1; ++j)
            m[k][j] = DualSeries{rk.derivative(var_of(j)), dk.derivative(var_of(j))};
    }
    DualSeries d = det_ring(m);
    return (monge_ampere_sign(n) == 1) ? d.b : -d.b;
}

// ---------------------------------------------------------------------
// Shell coordinates u = w + wb - F
// ---------------------------------------------------------------------

namespace {

MultiSeries remap_z_part(const MultiSeries& s, const VarSetPtr& to, int trunc) {
    // Copies a series whose support uses only the shared z-variables.
    MultiSeries out(to, trunc);
    bool dropped = false;
    for (const auto& [e, c] : s.terms()) {
        MultiSeries::Exp ne(to->arity(), 0);
        int deg = 0;
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (e[k] == 0) continue;
            ne[to->index_of(s.vars()->names[k])] = e[k];
            deg += e[k];
        }
        if (deg > trunc) {
            dropped = true;
            continue;
        }
        out += MultiSeries::monomial(to, trunc, ne, c);
    }
    out.set_exact(s.exact() && !dropped);
    return out;
}

// Substitute one variable by an expression over a different VarSet whose
// other variables coincide by name.
MultiSeries cross_substitute(const MultiSeries& s, int var, const VarSetPtr& to,
                             const MultiSeries& expr) {
    int t = std::min(s.trunc(), expr.trunc());
    std::vector<MultiSeries> pw{MultiSeries::constant(to, t, GaussRational(1))};
    MultiSeries out(to, t);
    bool ex = s.exact() && expr.exact();
    for (const auto& [e, c] : s.terms()) {
        int k = e[var];
        while (static_cast<int>(pw.size()) <= k) pw.push_back(pw.back() * expr);
        MultiSeries::Exp ne(to->arity(), 0);
        int rest = 0;
        for (std::size_t v = 0; v < e.size(); ++v) {
            if (static_cast<int>(v) == var || e[v] == 0) continue;
            ne[to->index_of(s.vars()->names[v])] = e[v];
            rest += e[v];
        }
        if (rest > t) {
            ex = false;
            continue;
        }
        MultiSeries term = mul_capped(MultiSeries::monomial(to, t, ne, c), pw[k], t);
        ex = ex && term.exact();
        out += term;
    }
    out.set_exact(ex && out.exact());
    return out;
}

} // namespace

MultiSeries to_shell(const MultiSeries& s, const RigidSurface& surf) {
    auto sv = shell_vars(surf.n);
    int wi = ambient_w_index(surf.n);
    // w = u - wb + F
    MultiSeries Fsh = remap_z_part(surf.F, sv, s.trunc());
    MultiSeries expr = MultiSeries::variable(sv, s.trunc(), "u") -
                       MultiSeries::variable(sv, s.trunc(), "wb") + Fsh;
    return cross_substitute(s, wi, sv, expr);
}

MultiSeries from_shell(const MultiSeries& su, const RigidSurface& surf) {
    auto av = ambient_vars(surf.n);
    int ui = su.vars()->index_of("u");
    MultiSeries expr = MultiSeries::variable(av, su.trunc(), "w") +
                       MultiSeries::variable(av, su.trunc(), "wb") -
                       surf.F.with_trunc(su.trunc());
    return cross_substitute(su, ui, av, expr);
}

int shell_order(const MultiSeries& s, const RigidSurface& surf, int trust_deg) {
    MultiSeries su = to_shell(s, surf);
    int ui = su.vars()->index_of("u");
    int best = trust_deg + 1;
    for (const auto& [e, c] : su.terms()) {
        int d = 0;
        for (int x : e) d += x;
        if (d > trust_deg) continue;
        best = std::min(best, e[ui]);
    }
    return best;
}

MultiSeries divide_by_rho(const MultiSeries& s, const RigidSurface& surf, int k) {
    if (k == 0) return s;
    MultiSeries su = to_shell(s, surf);
    int ui = su.vars()->index_of("u");
    MultiSeries sh(su.vars(), su.trunc());
    for (const auto& [e, c] : su.terms()) {
        if (e[ui] < k)
            throw self_validation_error("divide_by_rho: series not divisible by rho^" +
                                        std::to_string(k));
        MultiSeries::Exp ne = e;
        ne[ui] -= k;
        sh += MultiSeries::monomial(su.vars(), su.trunc(), ne, c);
    }
    sh.set_exact(su.exact());
    MultiSeries out = from_shell(sh, surf);
    out = out.with_trunc(std::max(0, s.trunc() - k));
    out.set_exact(s.exact());
    return out;
}

MultiSeries boundary_slice(const MultiSeries& su, const RigidSurface& surf) {
    auto bv = boundary_vars(surf.n);
    int ui = su.vars()->index_of("u");
    int wbi = su.vars()->index_of("wb");
    MultiSeries out(bv, su.trunc());
    for (const auto& [e, c] : su.terms()) {
        if (e[ui] != 0) continue;
        if (e[wbi] != 0)
            throw self_validation_error("boundary_slice: residual wb dependence on rigid data");
        MultiSeries::Exp ne(bv->arity(), 0);
        for (std::size_t v = 0; v < e.size(); ++v) {
            if (e[v] == 0 || static_cast<int>(v) == ui || static_cast<int>(v) == wbi) continue;
            ne[bv->index_of(su.vars()->names[v])] = e[v];
        }
        out += MultiSeries::monomial(bv, su.trunc(), ne, c);
    }
    out.set_exact(su.exact());
    return out;
}

// ---------------------------------------------------------------------
// Fefferman normalization
// ---------------------------------------------------------------------

namespace {

using MonKey = std::pair<int, int>; // packed z-exponents below

// Enumerate base monomials in (z, zb) coordinates up to a degree.
std::vector<MultiSeries::Exp> base_monomials(int n, int maxdeg) {
    auto av = ambient_vars(n);
    std::vector<MultiSeries::Exp> out;
    MultiSeries::Exp e(av->arity(), 0);
    // Positions 0..2n-1 are the z variables.
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == 2 * n) {
            out.push_back(e);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            e[pos] = k;
            rec(pos + 1, left - k);
        }
        e[pos] = 0;
    };
    rec(0, maxdeg);
    return out;
}

std::optional<std::vector<GaussRational>> solve_linear(
    std::vector<std::vector<GaussRational>> A, std::vector<GaussRational> b) {
    int m = static_cast<int>(A.size());
    for (int col = 0; col < m; ++col) {
        int piv = -1;
        for (int r = col; r < m; ++r)
            if (!A[r][col].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) return std::nullopt;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        GaussRational inv = A[col][col].inverse();
        for (int c = col; c < m; ++c) A[col][c] *= inv;
        b[col] *= inv;
        for (int r = 0; r < m; ++r) {
            if (r == col || A[r][col].is_zero()) continue;
            GaussRational f = A[r][col];
            for (int c = col; c < m; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    return b;
}

} // namespace

MongeAmpereReport fefferman_improve(const RigidSurface& surf, int target_order) {
    if (target_order < 1) throw precondition_error("fefferman_improve: target_order must be >= 1");
    const int n = surf.n;
    const int trunc = surf.trunc;
    const int jtrust = trunc - 2;
    const int max_stage = std::min(target_order, n + 3); // stage n+2 only to exhibit the obstruction
    auto av = ambient_vars(n);

    MultiSeries rho0 = surf.rho0();
    MultiSeries r = rho0;
    MultiSeries cof = MultiSeries::constant(av, trunc, GaussRational(1)); // r / rho0

    for (int s = 0; s < max_stage; ++s) {
        int dmax = jtrust - s;
        if (dmax < 0) break;
        auto basis = base_monomials(n, dmax);
        std::map<MultiSeries::Exp, int> index;
        for (std::size_t k = 0; k < basis.size(); ++k) index[basis[k]] = static_cast<int>(k);
        int m = static_cast<int>(basis.size());
        MultiSeries rho_s = rho0.pow(s);

        auto slice_vec = [&](const MultiSeries& Xu) {
            int ui = Xu.vars()->index_of("u");
            int wbi = Xu.vars()->index_of("wb");
            std::vector<GaussRational> v(m);
            for (const auto& [e, c] : Xu.terms()) {
                if (e[ui] != s) continue;
                if (e[wbi] != 0)
                    throw self_validation_error("fefferman: non-rigid residual term");
                MultiSeries::Exp key(av->arity(), 0);
                int deg = 0;
                for (std::size_t q = 0; q < e.size(); ++q) {
                    if (static_cast<int>(q) == ui || static_cast<int>(q) == wbi || e[q] == 0)
                        continue;
                    key[av->index_of(Xu.vars()->names[q])] = e[q];
                    deg += e[q];
                }
                if (deg > dmax) continue; // beyond the trusted window
                auto it = index.find(key);
                if (it != index.end()) v[it->second] = c;
            }
            return v;
        };

        // Newton iteration: the order-s correction is O(rho^s), so its
        // quadratic feedback at order s has growing valuation and the
        // loop terminates (one pass for s >= 1, a few passes at s = 0).
        for (int pass = 0;; ++pass) {
            MultiSeries E = monge_ampere(r, n) -
                            MultiSeries::constant(av, trunc, GaussRational(1));
            if (shell_order(E, surf, jtrust) > s) break;
            std::vector<GaussRational> rhs = slice_vec(to_shell(E, surf));
            bool nonzero = false;
            for (const auto& c : rhs) nonzero = nonzero || !c.is_zero();
            if (!nonzero) break;
            if (pass > 10)
                throw self_validation_error("fefferman_improve: stage " + std::to_string(s) +
                                            " failed to converge");

            std::vector<std::vector<GaussRational>> A(m, std::vector<GaussRational>(m));
            for (int cidx = 0; cidx < m; ++cidx) {
                MultiSeries mono = MultiSeries::monomial(av, trunc, basis[cidx], GaussRational(1));
                MultiSeries dir = r * rho_s * mono;
                MultiSeries L = monge_ampere_linearized(r, dir, n);
                auto col = slice_vec(to_shell(L, surf));
                for (int ridx = 0; ridx < m; ++ridx) A[ridx][cidx] = col[ridx];
            }
            for (auto& c : rhs) c = -c;
            auto x = solve_linear(std::move(A), std::move(rhs));
            if (!x) {
                if (s >= n + 2)
                    throw math_domain_error(
                        "fefferman_improve: obstruction blocks improvement past order n+2 "
                        "(stage " + std::to_string(s) + " is singular)");
                throw self_validation_error("fefferman_improve: singular stage " +
                                            std::to_string(s) + " before the obstruction order");
            }
            MultiSeries psi(av, trunc);
            for (int k = 0; k < m; ++k)
                psi += MultiSeries::monomial(av, trunc, basis[k], (*x)[k]);
            MultiSeries corr = MultiSeries::constant(av, trunc, GaussRational(1)) + rho_s * psi;
            r = r * corr;
            cof = cof * corr;
        }
    }

    if (target_order > n + 2)
        throw math_domain_error("fefferman_improve: target_order exceeds the obstruction order n+2");

    // Self-validation: recompute J on the stored r.
    MultiSeries E = monge_ampere(r, n) - MultiSeries::constant(av, trunc, GaussRational(1));
    int measured = shell_order(E, surf, jtrust);
    int eff_target = std::min(target_order, n + 2);
    if (measured < eff_target)
        throw self_validation_error("fefferman_improve: achieved order " +
                                    std::to_string(measured) + " < target " +
                                    std::to_string(eff_target));

    MongeAmpereReport rep;
    rep.surface = surf;
    rep.r = r;
    rep.order_achieved = std::min(measured, eff_target);
    rep.j_exact = E.is_zero() && E.exact();
    rep.self_validated = true;
    rep.has_obstruction = (eff_target == n + 2);
    if (rep.has_obstruction) {
        MultiSeries Eu = to_shell(E, surf);
        int ui = Eu.vars()->index_of("u");
        MultiSeries slice(Eu.vars(), Eu.trunc());
        for (const auto& [e, c] : Eu.terms()) {
            if (e[ui] != n + 2) continue;
            MultiSeries::Exp ne = e;
            ne[ui] = 0;
            slice += MultiSeries::monomial(Eu.vars(), Eu.trunc(), ne, c);
        }
        MultiSeries c0 = boundary_slice(to_shell(cof, surf), surf);
        MultiSeries obst = boundary_slice(slice, surf) * c0.unit_inverse().pow(n + 2);
        rep.obstruction = obst.with_trunc(std::max(0, jtrust - (n + 2)));
    } else {
        rep.obstruction = MultiSeries(boundary_vars(n), 0);
    }
    return rep;
}

// ---------------------------------------------------------------------
// Metric assembly and Laplacian
// ---------------------------------------------------------------------

namespace {

std::vector<std::vector<AmbientElement>> matrix_inverse(
    const std::vector<std::vector<AmbientElement>>& g) {
    int m = static_cast<int>(g.size());
    AmbientElement det = det_ring(g);
    if (det.is_zero() || !det.log_free() || det.lc(0).constant_term().is_zero())
        throw math_domain_error("ambient metric: determinant is not a unit series");
    AmbientElement dinv = det.unit_inverse();
    std::vector<std::vector<AmbientElement>> inv(m, std::vector<AmbientElement>(m));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            std::vector<std::vector<AmbientElement>> minor;
            minor.reserve(m - 1);
            for (int a = 0; a < m; ++a) {
                if (a == i) continue;
                std::vector<AmbientElement> row;
                row.reserve(m - 1);
                for (int b = 0; b < m; ++b)
                    if (b != j) row.push_back(g[a][b]);
                minor.push_back(std::move(row));
            }
            AmbientElement c = det_ring(minor) * dinv;
            if ((i + j) % 2 == 1) c = -c;
            inv[j][i] = c; // adjugate transpose
        }
    }
    return inv;
}

} // namespace

AmbientMetric build_ambient(const MultiSeries& r, int n) {
    if (infer_n(r) != n) throw precondition_error("build_ambient: wrong variable set");
    AmbientMetric m;
    m.n = n;
    m.r = r;
    AmbientElement rs = rsharp_element(r);
    int sz = n + 2;
    m.g_lo.assign(sz, std::vector<AmbientElement>(sz));
    for (int I = 0; I < sz; ++I) {
        AmbientElement dI = rs.partial(I);
        for (int J = 0; J < sz; ++J) m.g_lo[I][J] = -dI.partial_conj(J);
    }
    m.det = det_ring(m.g_lo);

    // det(g) = sign * (z0 z0b)^{n+1} J[r]; record and verify.
    MultiSeries j = monge_ampere(r, n);
    bool ok = m.det.log_free() && m.det.deg() == Bidegree(n + 1, n + 1);
    if (ok) {
        MultiSeries base = m.det.lc(0);
        ok = base.matches(j) || base.matches(-j);
    }
    if (!ok) throw self_validation_error("build_ambient: det(g) does not match the Monge-Ampere operator");
    m.det_identity_checked = true;

    auto ginv = matrix_inverse(m.g_lo);
    m.g_up.assign(sz, std::vector<AmbientElement>(sz));
    for (int I = 0; I < sz; ++I)
        for (int J = 0; J < sz; ++J) m.g_up[I][J] = ginv[J][I];

    if (!metric_lorentz_signature(m))
        throw math_domain_error("build_ambient: metric signature is not Lorentz at the base point");
    m.lorentz_checked = true;
    return m;
}

AmbientMetric flat_model_metric(int n, int trunc) {
    AmbientMetric m;
    m.n = n;
    m.homogeneous_model = true;
    auto av = ambient_vars(n);
    m.r = MultiSeries(av, trunc);
    int sz = n + 2;
    auto cst = [&](int v) {
        return AmbientElement(Bidegree(), MultiSeries::constant(av, trunc, GaussRational(v)));
    };
    m.g_lo.assign(sz, std::vector<AmbientElement>(sz, cst(0)));
    m.g_up.assign(sz, std::vector<AmbientElement>(sz, cst(0)));
    for (int j = 1; j <= n; ++j) {
        m.g_lo[j][j] = cst(1);
        m.g_up[j][j] = cst(1);
    }
    m.g_lo[0][n + 1] = m.g_lo[n + 1][0] = cst(-1);
    m.g_up[0][n + 1] = m.g_up[n + 1][0] = cst(-1);
    m.det = det_ring(m.g_lo);
    m.det_identity_checked = false;
    m.lorentz_checked = metric_lorentz_signature(m);
    return m;
}

AmbientElement ambient_laplacian(const AmbientMetric& m, const AmbientElement& e) {
    int sz = m.n + 2;
    AmbientElement acc = AmbientElement::zero(e.vars(), e.trunc());
    for (int J = 0; J < sz; ++J) {
        AmbientElement dJ = e.partial_conj(J);
        for (int I = 0; I < sz; ++I) {
            if (m.g_up[I][J].is_zero()) continue;
            acc += m.g_up[I][J] * dJ.partial(I);
        }
    }
    return -acc;
}

AmbientElement laplacian_power(const AmbientMetric& m, AmbientElement e, int k) {
    for (int i = 0; i < k; ++i) e = ambient_laplacian(m, e);
    return e;
}

// ---------------------------------------------------------------------
// Restriction and metric checks
// ---------------------------------------------------------------------

MultiSeries restrict_series(const MultiSeries& s, const RigidSurface& surf) {
    auto bv = boundary_vars(surf.n);
    int wi = ambient_w_index(surf.n);
    int t = s.trunc();
    MultiSeries Fb = remap_z_part(surf.F.with_trunc(t), bv, t);
    MultiSeries it = MultiSeries::variable(bv, t, "t").scaled(GaussRational::i());
    MultiSeries wexpr = (Fb + it).scaled(GaussRational(Rational(1, 2)));
    MultiSeries wbexpr = (Fb - it).scaled(GaussRational(Rational(1, 2)));
    // Two-step rebuild over the boundary ring.
    MultiSeries out(bv, t);
    std::vector<MultiSeries> wp{MultiSeries::constant(bv, t, GaussRational(1))};
    std::vector<MultiSeries> wbp{MultiSeries::constant(bv, t, GaussRational(1))};
    bool ex = s.exact();
    for (const auto& [e, c] : s.terms()) {
        while (static_cast<int>(wp.size()) <= e[wi]) wp.push_back(wp.back() * wexpr);
        while (static_cast<int>(wbp.size()) <= e[wi + 1]) wbp.push_back(wbp.back() * wbexpr);
        MultiSeries::Exp ne(bv->arity(), 0);
        int rest = 0;
        for (int v = 0; v < wi; ++v) {
            ne[v] = e[v];
            rest += e[v];
        }
        if (rest > t) {
            ex = false;
            continue;
        }
        MultiSeries term = mul_capped(MultiSeries::monomial(bv, t, ne, c), wp[e[wi]], t);
        term = mul_capped(term, wbp[e[wi + 1]], t);
        ex = ex && term.exact();
        out += term;
    }
    out.set_exact(ex && out.exact());
    return out;
}

BoundaryField restrict_to_boundary(const AmbientElement& e, const RigidSurface& surf) {
    if (!e.log_free())
        throw self_validation_error("restrict_to_boundary: log part did not cancel");
    BoundaryField f;
    f.deg = e.deg();
    f.s = restrict_series(e.lc(0), surf);
    return f;
}

int BoundaryField::weight_num() const {
    if (!(deg.p == deg.q)) throw self_validation_error("boundary field: unbalanced bidegree");
    if (deg.p.get_den() != 1) throw self_validation_error("boundary field: non-integer weight");
    return static_cast<int>(deg.p.get_num().get_si());
}

bool metric_is_hermitian(const AmbientMetric& m) {
    int sz = m.n + 2;
    for (int I = 0; I < sz; ++I)
        for (int J = 0; J < sz; ++J)
            if (!m.g_lo[I][J].matches(m.g_lo[J][I].conj())) return false;
    return true;
}

bool metric_inverse_identity(const AmbientMetric& m) {
    int sz = m.n + 2;
    auto av = m.g_lo[0][0].vars();
    int t = m.g_lo[0][0].trunc();
    for (int I = 0; I < sz; ++I) {
        for (int K = 0; K < sz; ++K) {
            AmbientElement acc = AmbientElement::zero(av, t);
            for (int J = 0; J < sz; ++J) acc += m.g_up[I][J] * m.g_lo[K][J];
            MultiSeries want =
                MultiSeries::constant(av, t, GaussRational(I == K ? 1 : 0));
            if (!acc.log_free() || !acc.lc(0).matches(want)) return false;
        }
    }
    return true;
}

bool metric_lorentz_signature(const AmbientMetric& m) {
    int sz = m.n + 2;
    std::vector<std::vector<GaussRational>> M(sz, std::vector<GaussRational>(sz));
    for (int i = 0; i < sz; ++i)
        for (int j = 0; j < sz; ++j) M[i][j] = m.g_lo[i][j].lc(0).constant_term();

    int pos = 0, neg = 0;
    for (int k = 0; k < sz; ++k) {
        if (M[k][k].is_zero()) {
            int pick = -1;
            for (int j = k + 1; j < sz; ++j)
                if (!M[j][j].is_zero()) {
                    pick = j;
                    break;
                }
            if (pick >= 0) {
                std::swap(M[pick], M[k]);
                for (auto& row : M) std::swap(row[pick], row[k]);
            } else {
                int j2 = -1;
                for (int j = k + 1; j < sz; ++j)
                    if (!M[k][j].is_zero()) {
                        j2 = j;
                        break;
                    }
                if (j2 < 0) return false; // degenerate
                GaussRational c = (M[k][j2].re != 0) ? GaussRational(1) : GaussRational::i();
                // row_k += c*row_j2 ; col_k += conj(c)*col_j2
                for (int t2 = 0; t2 < sz; ++t2) M[k][t2] += c * M[j2][t2];
                for (int t2 = 0; t2 < sz; ++t2) M[t2][k] += c.conj() * M[t2][j2];
            }
        }
        if (M[k][k].is_zero()) return false;
        if (!M[k][k].is_real())
            throw self_validation_error("signature check: non-real diagonal entry");
        if (M[k][k].re > 0) ++pos;
        else ++neg;
        for (int j = k + 1; j < sz; ++j) {
            if (M[j][k].is_zero()) continue;
            GaussRational f = M[j][k] / M[k][k];
            for (int t2 = 0; t2 < sz; ++t2) M[j][t2] -= f * M[k][t2];
            for (int t2 = 0; t2 < sz; ++t2) M[t2][j] -= f.conj() * M[t2][k];
        }
    }
    return pos == sz - 1 && neg == 1;
}

} // namespace qprime
