#pragma once

#include "acxlab/io.hpp"
#include "acxlab/scaling.hpp"

#include <filesystem>
#include <string>

namespace acxlab {

/// A domain {rho < 0} with its structure and working box.
struct DomainSpec {
    std::string name;
    RationalHermitian rho;
    RationalStructure J = RationalStructure::standard();
    Box box = Box::unit();
};

inline RationalHermitian model_rho(int m) {
    return RationalHermitian::re_z2() + RationalHermitian::modulus_power(m, 0, Rational(1));
}

/// M4 = Re z2 + |z1|^4 + t Re z1^4, |t| < 1.
inline RationalHermitian model_m4(const Rational& t) {
    if (!(t < 1 && t > -1)) throw Error(ErrorKind::SchemaError, "M4 needs |t| < 1");
    return model_rho(2) + RationalHermitian::real_part({4, 0, 0, 0}, Complex<Rational>(t));
}

inline const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names{"M1", "M2", "M3", "M4", "appendix", "unit-disc", "ball"};
    return names;
}

/// Built-in library. Parameters: t (M4, default 1/2); eps, kappa (appendix, default 1/2, 1).
inline DomainSpec model_domain(const std::string& name, const Json& params = Json::object()) {
    using H = RationalHermitian;
    DomainSpec d;
    d.name = name;
    if (name == "M1") d.rho = model_rho(1);
    else if (name == "M2") d.rho = model_rho(2);
    else if (name == "M3") d.rho = model_rho(3);
    else if (name == "M4") d.rho = model_m4(params.contains("t") ? parse_rational(params["t"], "t") : Rational(1, 2));
    else if (name == "appendix") {
        Rational eps = params.contains("eps") ? parse_rational(params["eps"], "eps") : Rational(1, 2);
        Rational kappa = params.contains("kappa") ? parse_rational(params["kappa"], "kappa") : Rational(1);
        auto sc = appendix_scenario(1, eps, kappa);
        d.rho = sc.rho;
        d.J = sc.J;
    } else if (name == "unit-disc") {
        d.rho = H::modulus_power(1, 0, Rational(1)) - H::constant(Rational(1));
    } else if (name == "ball") {
        d.rho = H::modulus_power(1, 0, Rational(1)) + H::modulus_power(0, 1, Rational(1)) - H::constant(Rational(1));
    } else {
        throw Error(ErrorKind::SchemaError, "unknown model '" + name + "'");
    }
    return d;
}

/// Domain spec from config: {model, ...params} | {rho, structure, box} | {file}.
/// A "structure" entry overrides the model's structure; relative files resolve against base_dir.
inline DomainSpec parse_domain(const Json& j, const std::filesystem::path& base_dir = ".") {
    if (!j.is_object()) schema_error("domain: expected an object");
    if (j.contains("file")) {
        std::filesystem::path f = j["file"].get<std::string>();
        if (f.is_relative()) f = base_dir / f;
        if (!std::filesystem::exists(f)) schema_error("domain file not found: " + f.string());
        DomainSpec d = parse_domain(read_json_file(f), f.parent_path());
        if (d.name.empty()) d.name = f.stem().string();
        return d;
    }
    DomainSpec d;
    if (j.contains("model")) {
        if (!j["model"].is_string()) schema_error("domain.model must be a string");
        d = model_domain(j["model"].get<std::string>(), j);
    } else if (j.contains("rho")) {
        d.name = j.value("name", "custom");
        d.rho = parse_hermitian(j["rho"]);
    } else {
        schema_error("domain: needs model, rho or file");
    }
    if (j.contains("structure")) d.J = parse_structure(j["structure"]);
    if (j.contains("box")) d.box = parse_box(j["box"]);
    return d;
}

inline Json domain_json(const DomainSpec& d) {
    return {{"name", d.name}, {"rho", hermitian_json(d.rho)}, {"structure", structure_json(d.J)}, {"box", box_json(d.box)}};
}

}  // namespace acxlab
