#pragma once

#include "acxlab/errors.hpp"
#include "acxlab/hermitian.hpp"
#include "acxlab/structure.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace acxlab {

using Json = nlohmann::ordered_json;

[[noreturn]] inline void schema_error(const std::string& msg) { throw Error(ErrorKind::SchemaError, msg); }

/// Rationals travel as strings "p/q"; integers and JSON numbers are accepted on input
/// (numbers convert exactly from their binary value).
inline std::string rational_str(const Rational& q) { return q.get_str(); }

inline Rational parse_rational(const Json& j, const std::string& what = "value") {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_number()) return Rational(j.get<double>());
    if (!j.is_string()) schema_error(what + ": expected a rational string or number");
    Rational q;
    if (q.set_str(j.get<std::string>(), 10) != 0) schema_error(what + ": malformed rational '" + j.get<std::string>() + "'");
    q.canonicalize();
    return q;
}

inline Json complex_json(const Complex<Rational>& c) { return Json::array({rational_str(c.re), rational_str(c.im)}); }

inline Complex<Rational> parse_complex(const Json& j, const std::string& what = "coefficient") {
    if (j.is_array()) {
        if (j.size() != 2) schema_error(what + ": complex values are [re, im]");
        return {parse_rational(j[0], what), parse_rational(j[1], what)};
    }
    return Complex<Rational>(parse_rational(j, what));
}

inline Exp4 parse_exponent(const Json& j) {
    if (!j.is_array() || j.size() != 4) schema_error("exponent: expected 4 integers");
    Exp4 e;
    for (int i = 0; i < 4; ++i) {
        if (!j[i].is_number_integer() || j[i].get<int>() < 0) schema_error("exponent: entries must be nonnegative integers");
        e[i] = j[i].get<int>();
    }
    return e;
}

inline Vec4 parse_vec4(const Json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 4) schema_error(what + ": expected 4 numbers");
    Vec4 v;
    for (int i = 0; i < 4; ++i) v[i] = to_double(parse_rational(j[i], what));
    return v;
}

inline Json vec4_json(const Vec4& v) { return Json::array({v[0], v[1], v[2], v[3]}); }

inline Json exponent_json(const Exp4& e) { return Json::array({e[0], e[1], e[2], e[3]}); }

/// Real polynomial in (x1, y1, x2, y2): {"terms": [{"exponent": [a,b,c,d], "coeff": "p/q"}]}.
inline Json poly_json(const RationalPoly& p) {
    Json terms = Json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"exponent", exponent_json(e)}, {"coeff", rational_str(c)}});
    return {{"terms", terms}};
}

inline RationalPoly parse_poly(const Json& j) {
    if (j.is_number() || j.is_string()) return RationalPoly(parse_rational(j, "polynomial constant"));
    if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array()) schema_error("polynomial: expected {terms: [...]}");
    RationalPoly p;
    for (const auto& t : j["terms"]) {
        if (!t.contains("exponent") || !t.contains("coeff")) schema_error("polynomial term needs exponent and coeff");
        p.add_term(parse_exponent(t["exponent"]), parse_rational(t["coeff"], "polynomial coeff"));
    }
    return p;
}

/// Hermitian polynomial as raw terms over (z1, conj z1, z2, conj z2) with [re, im] coefficients.
inline Json hermitian_json(const RationalHermitian& h) {
    Json terms = Json::array();
    for (const auto& [e, c] : h.raw().terms()) terms.push_back({{"exponent", exponent_json(e)}, {"coeff", complex_json(c)}});
    return {{"terms", terms}};
}

/// Accepts raw "terms" (must be conjugation symmetric) and/or "real_parts" entries
/// meaning Re(c z1^a conj(z1)^b z2^c conj(z2)^d).
inline RationalHermitian parse_hermitian(const Json& j) {
    if (!j.is_object() || (!j.contains("terms") && !j.contains("real_parts"))) {
        schema_error("defining function: expected {terms} or {real_parts}");
    }
    RationalHermitian::Raw raw;
    if (j.contains("terms")) {
        for (const auto& t : j["terms"]) {
            if (!t.contains("exponent") || !t.contains("coeff")) schema_error("term needs exponent and coeff");
            raw.add_term(parse_exponent(t["exponent"]), parse_complex(t["coeff"]));
        }
        for (const auto& [e, c] : raw.terms()) {
            if (!(raw.coeff(RationalHermitian::swap_conj(e)) == conj(c))) {
                schema_error("defining function terms are not real-valued (conjugate pair mismatch)");
            }
        }
    }
    RationalHermitian h(raw);
    if (j.contains("real_parts")) {
        for (const auto& t : j["real_parts"]) {
            if (!t.contains("exponent") || !t.contains("coeff")) schema_error("real_parts entry needs exponent and coeff");
            h = h + RationalHermitian::real_part(parse_exponent(t["exponent"]), parse_complex(t["coeff"]));
        }
    }
    return h;
}

inline Json box_json(const Box& b) { return {{"lo", vec4_json(b.lo)}, {"hi", vec4_json(b.hi)}}; }

inline Box parse_box(const Json& j) {
    if (j.contains("lo") && j.contains("hi")) return Box{parse_vec4(j["lo"], "box.lo"), parse_vec4(j["hi"], "box.hi")};
    if (j.contains("radius")) {
        Vec4 c = j.contains("center") ? parse_vec4(j["center"], "box.center") : Vec4{};
        return Box::centered(c, to_double(parse_rational(j["radius"], "box.radius")));
    }
    schema_error("box: expected {lo, hi} or {center, radius}");
}

/// {kind, entries (4x4 polynomials over real monomials), box}.
inline Json structure_json(const RationalStructure& J) {
    Json entries = Json::array();
    for (int i = 0; i < 4; ++i) {
        Json row = Json::array();
        for (int k = 0; k < 4; ++k) row.push_back(poly_json(J.entry(i, k)));
        entries.push_back(row);
    }
    return {{"kind", structure_kind_name(J.kind())}, {"entries", entries}, {"box", box_json(J.domain())}};
}

/// "standard", {kind: standard}, {kind: diagonal_ac, a1, c1, a2, c2} (b = -(1+a^2)/c),
/// or {entries: 4x4}. J^2 = -Id is checked exactly.
inline RationalStructure parse_structure(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "standard") return RationalStructure::standard();
        schema_error("structure: unknown name '" + j.get<std::string>() + "'");
    }
    if (!j.is_object()) schema_error("structure: expected a name or an object");
    Box box = j.contains("box") ? parse_box(j["box"]) : Box::unit();
    std::string kind = j.value("kind", j.contains("entries") ? "general" : "standard");
    RationalStructure J;
    if (j.contains("entries")) {
        const Json& e = j["entries"];
        if (!e.is_array() || e.size() != 4) schema_error("structure.entries: expected 4 rows");
        RationalStructure::Entries ent;
        for (int i = 0; i < 4; ++i) {
            if (!e[i].is_array() || e[i].size() != 4) schema_error("structure.entries: expected 4 columns");
            for (int k = 0; k < 4; ++k) ent[i][k] = parse_poly(e[i][k]);
        }
        J = RationalStructure(ent, box);
    } else if (kind == "standard") {
        J = RationalStructure::standard(box);
    } else if (kind == "diagonal_ac") {
        for (const char* k : {"a1", "c1", "a2", "c2"})
            if (!j.contains(k)) schema_error(std::string("structure diagonal_ac needs ") + k);
        try {
            J = RationalStructure::diagonal_from_ac(parse_poly(j["a1"]), parse_poly(j["c1"]), parse_poly(j["a2"]),
                                                    parse_poly(j["c2"]), box);
        } catch (const Error& err) {
            schema_error(std::string("structure: ") + err.what());
        }
    } else {
        schema_error("structure: unknown kind '" + kind + "'");
    }
    PolyMatrix<Rational> sq = poly_matmul(J.entries(), J.entries());
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            if (sq[i][k] != RationalPoly(Rational(i == k ? -1 : 0))) schema_error("structure: J^2 != -Id");
    return J;
}

inline Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) schema_error("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        schema_error(path.string() + ": " + e.what());
    }
}

/// Writes to a sibling temporary file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::TaskError, "cannot write " + tmp.string());
        out << content;
        if (!out) throw Error(ErrorKind::TaskError, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

/// Minimal CSV table with shortest round-trip formatting of doubles.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    static std::string cell(double x) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(const std::string& s) { return s; }

    std::string text() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
        os << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << "\n";
        }
        return os.str();
    }
};

}  // namespace acxlab
