#include "qprime/multiseries.hpp"

#include "qprime/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace qprime {

MultiSeries::MultiSeries(VarSetPtr vars, int trunc) : vars_(std::move(vars)), trunc_(trunc) {
    if (!vars_) throw precondition_error("MultiSeries: null variable set");
    if (trunc_ < 0) throw precondition_error("MultiSeries: negative truncation");
}

int MultiSeries::degree_of(const Exp& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

MultiSeries MultiSeries::constant(VarSetPtr vars, int trunc, const GaussRational& c) {
    MultiSeries s(std::move(vars), trunc);
    if (!c.is_zero()) s.terms_.emplace(Exp(s.vars_->arity(), 0), c);
    return s;
}

MultiSeries MultiSeries::variable(VarSetPtr vars, int trunc, const std::string& name) {
    MultiSeries s(std::move(vars), trunc);
    int i = s.vars_->index_of(name);
    if (trunc < 1) throw precondition_error("variable does not fit below truncation");
    Exp e(s.vars_->arity(), 0);
    e[i] = 1;
    s.terms_.emplace(std::move(e), GaussRational(1));
    return s;
}

MultiSeries MultiSeries::monomial(VarSetPtr vars, int trunc, Exp e, const GaussRational& c) {
    MultiSeries s(std::move(vars), trunc);
    if (static_cast<int>(e.size()) != s.vars_->arity())
        throw precondition_error("monomial: exponent arity mismatch");
    for (int x : e)
        if (x < 0) throw precondition_error("monomial: negative exponent");
    if (degree_of(e) > trunc) throw precondition_error("monomial: beyond truncation");
    if (!c.is_zero()) s.terms_.emplace(std::move(e), c);
    return s;
}

int MultiSeries::valuation() const {
    int v = trunc_ + 1;
    for (const auto& [e, c] : terms_) v = std::min(v, degree_of(e));
    return v;
}

int MultiSeries::max_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, degree_of(e));
    return d;
}

GaussRational MultiSeries::coeff(const Exp& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? GaussRational() : it->second;
}

GaussRational MultiSeries::constant_term() const {
    return vars_ ? coeff(Exp(vars_->arity(), 0)) : GaussRational();
}

MultiSeries MultiSeries::with_trunc(int t) const {
    MultiSeries out(vars_, t);
    bool dropped = false;
    for (const auto& [e, c] : terms_) {
        if (degree_of(e) <= t) out.terms_.emplace(e, c);
        else dropped = true;
    }
    out.exact_ = exact_ && !dropped;
    return out;
}

void MultiSeries::add_term(const Exp& e, const GaussRational& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

bool MultiSeries::same_ring(const MultiSeries& o) const {
    return vars_ && o.vars_ && (vars_ == o.vars_ || *vars_ == *o.vars_);
}

MultiSeries MultiSeries::operator-() const {
    MultiSeries out(*this);
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
}

MultiSeries& MultiSeries::operator+=(const MultiSeries& o) {
    if (!same_ring(o)) throw precondition_error("series addition: mismatched variable sets");
    int t = std::min(trunc_, o.trunc_);
    if (t != trunc_) *this = with_trunc(t);
    for (const auto& [e, c] : o.terms_) {
        if (degree_of(e) <= t) add_term(e, c);
    }
    exact_ = exact_ && o.exact_;
    return *this;
}

MultiSeries& MultiSeries::operator-=(const MultiSeries& o) {
    return *this += -o;
}

MultiSeries mul_impl(const MultiSeries& a, const MultiSeries& b, int cap) {
    if (!a.same_ring(b)) throw precondition_error("series product: mismatched variable sets");
    MultiSeries out(a.vars_, std::min({a.trunc_, b.trunc_, cap}));
    bool dropped = false;
    const int t = out.trunc_;
    MultiSeries::Exp e(a.vars_->arity(), 0);
    for (const auto& [ea, ca] : a.terms_) {
        int da = MultiSeries::degree_of(ea);
        for (const auto& [eb, cb] : b.terms_) {
            if (da + MultiSeries::degree_of(eb) > t) {
                dropped = true;
                continue;
            }
            for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
            out.add_term(e, ca * cb);
        }
    }
    out.exact_ = a.exact_ && b.exact_ && !dropped;
    return out;
}

MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
    return mul_impl(a, b, std::min(a.trunc(), b.trunc()));
}

MultiSeries mul_capped(const MultiSeries& a, const MultiSeries& b, int cap) {
    return mul_impl(a, b, cap);
}

MultiSeries MultiSeries::scaled(const GaussRational& c) const {
    MultiSeries out(vars_, trunc_);
    out.exact_ = exact_;
    if (c.is_zero()) return out;
    for (const auto& [e, v] : terms_) out.terms_.emplace(e, v * c);
    return out;
}

MultiSeries MultiSeries::plus_const(const GaussRational& c) const {
    MultiSeries out(*this);
    out.add_term(Exp(vars_->arity(), 0), c);
    return out;
}

MultiSeries MultiSeries::conj() const {
    MultiSeries out(vars_, trunc_);
    out.exact_ = exact_;
    const auto& cj = vars_->conj;
    Exp e(vars_->arity(), 0);
    for (const auto& [ea, c] : terms_) {
        for (std::size_t k = 0; k < e.size(); ++k) e[cj[k]] = ea[k];
        out.add_term(e, c.conj());
    }
    return out;
}

bool MultiSeries::is_real() const {
    return conj().matches(*this);
}

MultiSeries MultiSeries::derivative(int var) const {
    if (var < 0 || var >= vars_->arity()) throw precondition_error("derivative: bad variable index");
    MultiSeries out(vars_, exact_ ? trunc_ : std::max(0, trunc_ - 1));
    out.exact_ = exact_;
    Exp e;
    for (const auto& [ea, c] : terms_) {
        if (ea[var] == 0) continue;
        e = ea;
        int k = e[var]--;
        out.add_term(e, c * GaussRational(k));
    }
    return out;
}

MultiSeries MultiSeries::derivative(const std::string& name) const {
    return derivative(vars_->index_of(name));
}

MultiSeries MultiSeries::unit_inverse() const {
    GaussRational c0 = constant_term();
    if (c0.is_zero()) throw math_domain_error("unit_inverse: zero constant term");
    GaussRational c0inv = c0.inverse();
    // a = c0 (1 - b) with val(b) >= 1; 1/a = (1/c0) sum b^k.
    MultiSeries b = constant(vars_, trunc_, GaussRational(1)) - scaled(c0inv);
    MultiSeries out = constant(vars_, trunc_, GaussRational(1));
    MultiSeries p = b;
    for (int k = 1; k <= trunc_ && !p.is_zero(); ++k) {
        out += p;
        p = p * b;
    }
    out = out.scaled(c0inv);
    out.exact_ = exact_ && max_degree() <= 0; // only constants invert exactly
    return out;
}

MultiSeries MultiSeries::exp() const {
    if (!constant_term().is_zero())
        throw precondition_error("series exp: nonzero constant term");
    MultiSeries out = constant(vars_, trunc_, GaussRational(1));
    MultiSeries p = constant(vars_, trunc_, GaussRational(1));
    Integer fact(1);
    for (int k = 1; k <= trunc_ && !p.is_zero(); ++k) {
        p = p * (*this);
        fact *= k;
        out += p.scaled(GaussRational(Rational(1, fact)));
    }
    out.exact_ = exact_ && is_zero();
    return out;
}

MultiSeries MultiSeries::log1p() const {
    if (!constant_term().is_zero())
        throw precondition_error("series log1p: nonzero constant term");
    MultiSeries out(vars_, trunc_);
    MultiSeries p = constant(vars_, trunc_, GaussRational(1));
    for (int k = 1; k <= trunc_ && !p.is_zero(); ++k) {
        p = p * (*this);
        Rational c(((k % 2) == 1) ? 1 : -1, k);
        out += p.scaled(GaussRational(c));
    }
    out.exact_ = exact_ && is_zero();
    return out;
}

MultiSeries MultiSeries::pow(int k) const {
    if (k < 0) return unit_inverse().pow(-k);
    MultiSeries out = constant(vars_, trunc_, GaussRational(1));
    MultiSeries base(*this);
    while (k > 0) {
        if (k & 1) out = out * base;
        if ((k >>= 1) != 0) base = base * base;
    }
    return out;
}

MultiSeries MultiSeries::substitute(int var, const MultiSeries& expr) const {
    if (!same_ring(expr)) throw precondition_error("substitute: mismatched variable sets");
    if (var < 0 || var >= vars_->arity()) throw precondition_error("substitute: bad variable");
    int maxexp = 0;
    for (const auto& [e, c] : terms_) maxexp = std::max(maxexp, e[var]);
    if (!expr.constant_term().is_zero() && !(expr.exact() && maxexp * expr.max_degree() <= trunc_))
        throw precondition_error("substitute: expression needs zero constant term");

    // Horner in the substituted variable.
    int t = std::min(trunc_, expr.trunc_);
    std::vector<MultiSeries> slice(maxexp + 1, MultiSeries(vars_, t));
    for (auto& s : slice) s.exact_ = exact_;
    for (const auto& [e, c] : terms_) {
        Exp stripped = e;
        int k = stripped[var];
        stripped[var] = 0;
        if (degree_of(stripped) <= t) slice[k].add_term(stripped, c);
        else for (auto& s : slice) s.exact_ = false;
    }
    MultiSeries out = slice[maxexp];
    for (int k = maxexp - 1; k >= 0; --k) out = out * expr + slice[k];
    return out;
}

MultiSeries MultiSeries::substitute(const std::string& name, const MultiSeries& expr) const {
    return substitute(vars_->index_of(name), expr);
}

GaussRational MultiSeries::eval(const std::vector<GaussRational>& point) const {
    if (static_cast<int>(point.size()) != vars_->arity())
        throw precondition_error("eval: point arity mismatch");
    GaussRational acc;
    for (const auto& [e, c] : terms_) {
        GaussRational v = c;
        for (std::size_t k = 0; k < e.size(); ++k)
            if (e[k] != 0) v *= point[k].pow(e[k]);
        acc += v;
    }
    return acc;
}

bool MultiSeries::matches(const MultiSeries& o) const {
    if (!same_ring(o)) return false;
    int t = std::min(trunc_, o.trunc_);
    for (const auto& [e, c] : terms_)
        if (degree_of(e) <= t && o.coeff(e) != c) return false;
    for (const auto& [e, c] : o.terms_)
        if (degree_of(e) <= t && coeff(e) != c) return false;
    return true;
}

bool MultiSeries::operator==(const MultiSeries& o) const {
    return same_ring(o) && trunc_ == o.trunc_ && terms_ == o.terms_;
}

std::string MultiSeries::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << gauss_to_string(c) << ")";
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (e[k] == 0) continue;
            os << "*" << vars_->names[k];
            if (e[k] > 1) os << "^" << e[k];
        }
    }
    return os.str();
}

} // namespace qprime
