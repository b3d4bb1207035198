#include "qprime/io.hpp"

#include "qprime/errors.hpp"

#include <fstream>
#include <sstream>

namespace qprime {

Json series_to_json(const MultiSeries& s) {
    Json j;
    j["vars"] = s.vars()->names;
    j["trunc"] = s.trunc();
    if (!s.exact()) j["exact"] = false;
    Json terms = Json::array();
    for (const auto& [e, c] : s.terms()) {
        Json t;
        t["exp"] = e;
        t["re"] = rational_to_string(c.re);
        t["im"] = rational_to_string(c.im);
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j;
}

MultiSeries series_from_json(const Json& j) {
    try {
        auto names = j.at("vars").get<std::vector<std::string>>();
        int trunc = j.at("trunc").get<int>();
        auto vs = make_varset(names);
        MultiSeries s(vs, trunc);
        for (const auto& t : j.at("terms")) {
            auto e = t.at("exp").get<std::vector<int>>();
            GaussRational c(rational_from_string(t.at("re").get<std::string>()),
                            t.contains("im") ? rational_from_string(t.at("im").get<std::string>())
                                             : Rational(0));
            s += MultiSeries::monomial(vs, trunc, std::move(e), c);
        }
        if (j.contains("exact")) s.set_exact(j.at("exact").get<bool>());
        return s;
    } catch (const Json::exception& e) {
        throw parse_error(std::string("series JSON: ") + e.what());
    }
}

std::string surface_shape(const Json& j) {
    if (j.contains("shape")) return j.at("shape").get<std::string>();
    return "rigid";
}

RigidSurface surface_from_json(const Json& j) {
    try {
        int n = j.value("n", 1);
        int trunc = j.value("trunc", n == 1 ? 8 : 6);
        std::string shape = surface_shape(j);
        if (shape == "ball" || shape == "quadric") return quadric_surface(n, trunc);
        std::vector<SurfaceTerm> terms;
        for (const auto& t : j.value("F_terms", Json::array())) {
            SurfaceTerm st;
            st.exp_z = t.at("exp_z").get<std::vector<int>>();
            st.exp_zbar = t.at("exp_zbar").get<std::vector<int>>();
            st.coeff = gauss_from_string(t.at("coeff").get<std::string>());
            terms.push_back(std::move(st));
        }
        return make_rigid_surface(n, terms, trunc);
    } catch (const Json::exception& e) {
        throw parse_error(std::string("surface JSON: ") + e.what());
    }
}

Json surface_to_json(const RigidSurface& s) {
    Json j;
    j["n"] = s.n;
    j["trunc"] = s.trunc;
    Json terms = Json::array();
    for (const auto& [e, c] : s.F.terms()) {
        std::vector<int> ez(s.n), ezb(s.n);
        bool levi = true;
        for (int a = 0; a < s.n; ++a) {
            ez[a] = e[2 * a];
            ezb[a] = e[2 * a + 1];
            if (!(ez[a] == 1 && ezb[a] == 1)) levi = false;
        }
        int total = 0;
        for (int x : e) total += x;
        if (levi && total == 2) continue; // Levi form is implicit
        Json t;
        t["exp_z"] = ez;
        t["exp_zbar"] = ezb;
        t["coeff"] = gauss_to_string(c);
        terms.push_back(std::move(t));
    }
    j["F_terms"] = std::move(terms);
    return j;
}

HolPoly holpoly_from_json(const Json& j, int n) {
    try {
        HolPoly p;
        p.n = n;
        for (const auto& t : j.at("hol_terms")) {
            HolTerm h;
            if (t.at("exp_z").is_array())
                h.exp_z = t.at("exp_z").get<std::vector<int>>();
            else
                h.exp_z = {t.at("exp_z").get<int>()};
            h.exp_w = t.value("exp_w", 0);
            h.coeff = gauss_from_string(t.at("coeff").get<std::string>());
            if (static_cast<int>(h.exp_z.size()) != n)
                throw parse_error("hol_terms: exp_z arity mismatch");
            p.terms.push_back(std::move(h));
        }
        return p;
    } catch (const Json::exception& e) {
        throw parse_error(std::string("hol poly JSON: ") + e.what());
    }
}

Json holpoly_to_json(const HolPoly& p) {
    Json terms = Json::array();
    for (const auto& t : p.terms) {
        Json x;
        if (p.n == 1)
            x["exp_z"] = t.exp_z[0];
        else
            x["exp_z"] = t.exp_z;
        x["exp_w"] = t.exp_w;
        x["coeff"] = gauss_to_string(t.coeff);
        terms.push_back(std::move(x));
    }
    Json j;
    j["hol_terms"] = std::move(terms);
    return j;
}

Json rational_json(const Rational& q) {
    Json j;
    j["exact"] = rational_to_string(q);
    j["decimal"] = rational_to_double(q);
    return j;
}

Json gauss_json(const GaussRational& c) {
    Json j;
    j["exact"] = gauss_to_string(c);
    j["decimal_re"] = rational_to_double(c.re);
    j["decimal_im"] = rational_to_double(c.im);
    return j;
}

Json boundary_field_to_json(const BoundaryField& f) {
    Json j;
    j["weight"] = rational_to_string(f.deg.p);
    j["series"] = series_to_json(f.s);
    j["origin_value"] = gauss_json(f.s.constant_term());
    return j;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw parse_error("JSON parse failure in " + path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw error("cannot write file: " + path, 1);
    out << text;
}

} // namespace qprime
