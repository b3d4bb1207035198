#include "qprime/rational.hpp"

#include "qprime/errors.hpp"

#include <cctype>
#include <ostream>
#include <sstream>

namespace qprime {

Rational rational_from_string(const std::string& s) {
    std::string t;
    t.reserve(s.size());
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw parse_error("empty rational literal");
    for (std::size_t k = 0; k < t.size(); ++k) {
        char c = t[k];
        bool ok = std::isdigit(static_cast<unsigned char>(c)) || c == '/' ||
                  ((c == '+' || c == '-') && (k == 0 || t[k - 1] == '/'));
        if (!ok) throw parse_error("malformed rational literal: '" + s + "'");
    }
    if (t[0] == '+') t.erase(0, 1);
    if (t.empty()) throw parse_error("empty rational literal");
    mpq_class q;
    if (q.set_str(t, 10) != 0) throw parse_error("malformed rational literal: '" + s + "'");
    if (q.get_den() == 0) throw parse_error("zero denominator in rational literal: '" + s + "'");
    q.canonicalize();
    return q;
}

std::string rational_to_string(const Rational& q) {
    return q.get_str();
}

double rational_to_double(const Rational& q) {
    return q.get_d();
}

Rational rational_pow(const Rational& q, int k) {
    if (k < 0) {
        if (q == 0) throw math_domain_error("rational_pow: 0 to a negative power");
        return rational_pow(1 / q, -k);
    }
    Rational r(1), base(q);
    while (k > 0) {
        if (k & 1) r *= base;
        base *= base;
        k >>= 1;
    }
    return r;
}

GaussRational& GaussRational::operator+=(const GaussRational& o) {
    re += o.re;
    im += o.im;
    return *this;
}

GaussRational& GaussRational::operator-=(const GaussRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
}

GaussRational& GaussRational::operator*=(const GaussRational& o) {
    Rational nre = re * o.re - im * o.im;
    Rational nim = re * o.im + im * o.re;
    re = std::move(nre);
    im = std::move(nim);
    return *this;
}

GaussRational GaussRational::inverse() const {
    Rational n = norm();
    if (n == 0) throw math_domain_error("division by zero GaussRational");
    return GaussRational(re / n, -im / n);
}

GaussRational& GaussRational::operator/=(const GaussRational& o) {
    return *this *= o.inverse();
}

GaussRational GaussRational::pow(int k) const {
    if (k < 0) return inverse().pow(-k);
    GaussRational r(1), base(*this);
    while (k > 0) {
        if (k & 1) r *= base;
        base *= base;
        k >>= 1;
    }
    return r;
}

GaussRational gauss_from_string(const std::string& s) {
    std::string t;
    t.reserve(s.size());
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw parse_error("empty coefficient literal");

    // Split into at most two signed parts at a '+'/'-' that is not a
    // leading sign and not a denominator sign after '/'.
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t k = 1; k < t.size(); ++k) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != '/') {
            parts.push_back(t.substr(start, k - start));
            start = k;
        }
    }
    parts.push_back(t.substr(start));
    if (parts.size() > 2) throw parse_error("malformed coefficient literal: '" + s + "'");

    GaussRational out;
    for (std::string p : parts) {
        bool imag = false;
        if (!p.empty() && (p.back() == 'i' || p.back() == 'I')) {
            imag = true;
            p.pop_back();
            if (!p.empty() && p.back() == '*') p.pop_back();
        }
        if (p.empty() || p == "+") p = "1";
        else if (p == "-") p = "-1";
        Rational q = rational_from_string(p);
        if (imag) out.im += q;
        else out.re += q;
    }
    return out;
}

std::string gauss_to_string(const GaussRational& c) {
    if (c.im == 0) return rational_to_string(c.re);
    std::ostringstream os;
    if (c.re != 0) {
        os << rational_to_string(c.re);
        if (c.im > 0) os << "+";
    }
    os << rational_to_string(c.im) << "i";
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const GaussRational& c) {
    return os << gauss_to_string(c);
}

} // namespace qprime
