#ifndef QPRIME_RATIONAL_HPP
#define QPRIME_RATIONAL_HPP

#include <gmpxx.h>
#include <iosfwd>
#include <string>

namespace qprime {

using Rational = mpq_class;
using Integer = mpz_class;

// "p/q" or "p", canonicalized. Throws parse_error on malformed input.
Rational rational_from_string(const std::string& s);
std::string rational_to_string(const Rational& q);
double rational_to_double(const Rational& q);
Rational rational_pow(const Rational& q, int k);

// Complex rational re + im*i: the coefficient field of every series in
// the project. All arithmetic is exact.
struct GaussRational {
    Rational re, im;

    GaussRational() : re(0), im(0) {}
    GaussRational(int n) : re(n), im(0) {}
    GaussRational(long n) : re(n), im(0) {}
    GaussRational(const Rational& r) : re(r), im(0) { re.canonicalize(); }
    GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }

    static GaussRational i() { return GaussRational(Rational(0), Rational(1)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }
    GaussRational conj() const { return GaussRational(re, -im); }
    Rational norm() const { return re * re + im * im; }

    GaussRational& operator+=(const GaussRational& o);
    GaussRational& operator-=(const GaussRational& o);
    GaussRational& operator*=(const GaussRational& o);
    GaussRational& operator/=(const GaussRational& o);

    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
    GaussRational operator-() const { return GaussRational(-re, -im); }

    bool operator==(const GaussRational& o) const { return re == o.re && im == o.im; }
    bool operator!=(const GaussRational& o) const { return !(*this == o); }

    GaussRational inverse() const;
    GaussRational pow(int k) const;
};

// Accepts "p/q", "p/q+r/si", "r/si", "p/q - r/s i" and friends.
GaussRational gauss_from_string(const std::string& s);
std::string gauss_to_string(const GaussRational& c);
std::ostream& operator<<(std::ostream& os, const GaussRational& c);

} // namespace qprime

#endif
