#ifndef QPRIME_MULTISERIES_HPP
#define QPRIME_MULTISERIES_HPP

#include "qprime/rational.hpp"
#include "qprime/varset.hpp"

#include <map>
#include <string>
#include <vector>

namespace qprime {

// Truncated multivariate formal power series over GaussRational.
//
// Terms of total degree > trunc() are never stored. exact() records
// whether the discarded tail is known to be identically zero; it is the
// difference between "this polynomial" and "some series agreeing with
// this up to degree trunc()". Derivatives of a non-exact series lower
// the trustworthy order by one, binary operations take the minimum.
class MultiSeries {
public:
    using Exp = std::vector<int>;
    using TermMap = std::map<Exp, GaussRational>;

    MultiSeries() = default;
    MultiSeries(VarSetPtr vars, int trunc);

    static MultiSeries constant(VarSetPtr vars, int trunc, const GaussRational& c);
    static MultiSeries variable(VarSetPtr vars, int trunc, const std::string& name);
    static MultiSeries monomial(VarSetPtr vars, int trunc, Exp e, const GaussRational& c);

    const VarSetPtr& vars() const { return vars_; }
    int trunc() const { return trunc_; }
    bool exact() const { return exact_; }
    MultiSeries& set_exact(bool e) { exact_ = e; return *this; }

    bool is_zero() const { return terms_.empty(); }
    int valuation() const;  // trunc()+1 when zero
    int max_degree() const; // -1 when zero
    const TermMap& terms() const { return terms_; }
    GaussRational coeff(const Exp& e) const;
    GaussRational constant_term() const;

    // Lower the cap; keeps exactness only when nothing was discarded.
    MultiSeries with_trunc(int t) const;

    MultiSeries operator-() const;
    MultiSeries& operator+=(const MultiSeries& o);
    MultiSeries& operator-=(const MultiSeries& o);
    friend MultiSeries operator+(MultiSeries a, const MultiSeries& b) { return a += b; }
    friend MultiSeries operator-(MultiSeries a, const MultiSeries& b) { return a -= b; }
    friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b);

    MultiSeries scaled(const GaussRational& c) const;
    MultiSeries plus_const(const GaussRational& c) const;

    MultiSeries conj() const;
    bool is_real() const;

    MultiSeries derivative(int var) const;
    MultiSeries derivative(const std::string& name) const;

    MultiSeries unit_inverse() const; // throws math_domain_error on zero constant term
    MultiSeries exp() const;          // requires zero constant term
    MultiSeries log1p() const;        // log(1 + a), requires zero constant term
    MultiSeries pow(int k) const;

    // Compose: replace `var` by expr (expr must have zero constant term
    // unless the variable occurs only to bounded degree). Same VarSet.
    MultiSeries substitute(int var, const MultiSeries& expr) const;
    MultiSeries substitute(const std::string& name, const MultiSeries& expr) const;

    GaussRational eval(const std::vector<GaussRational>& point) const;

    bool same_ring(const MultiSeries& o) const;
    // Coefficient-wise equality through min(trunc, o.trunc).
    bool matches(const MultiSeries& o) const;
    bool operator==(const MultiSeries& o) const;

    std::string str() const;

private:
    void add_term(const Exp& e, const GaussRational& c);
    static int degree_of(const Exp& e);

    VarSetPtr vars_;
    int trunc_ = 0;
    bool exact_ = true;
    TermMap terms_;

    friend MultiSeries mul_impl(const MultiSeries& a, const MultiSeries& b, int cap);
};

// Product with an explicit cap (used to keep intermediate blowup down).
MultiSeries mul_capped(const MultiSeries& a, const MultiSeries& b, int cap);

} // namespace qprime

#endif
