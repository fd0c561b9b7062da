#pragma once

#include "acxlab/appendix.hpp"
#include "acxlab/disc.hpp"
#include "acxlab/io.hpp"
#include "acxlab/kobayashi.hpp"
#include "acxlab/levi.hpp"
#include "acxlab/models.hpp"
#include "acxlab/peak.hpp"
#include "acxlab/scaling.hpp"
#include "acxlab/type.hpp"

#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

namespace acxlab {

constexpr int kScenarioSchemaVersion = 1;

inline const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{"levi", "psh", "disc", "type", "peak", "kobayashi", "approach", "scale", "appendix"};
    return names;
}

struct Scenario {
    std::string name = "unnamed";
    std::string task;
    DomainSpec domain = model_domain("M2");
    Json params = Json::object();
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::optional<int> grid_n;
    std::optional<double> tol;
};

/// Validates a config document; unknown keys, wrong types and missing files are SchemaErrors.
inline Scenario parse_scenario(const Json& j, const std::filesystem::path& base_dir = ".") {
    if (!j.is_object()) schema_error("scenario: expected a JSON object");
    static const std::set<std::string> keys{"schema_version", "name", "task", "domain", "params", "seed", "out_dir", "grid_n", "tol"};
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) schema_error("scenario: unknown key '" + k + "'");
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
        j["schema_version"].get<int>() != kScenarioSchemaVersion) {
        schema_error("scenario: schema_version must be " + std::to_string(kScenarioSchemaVersion));
    }
    Scenario s;
    if (j.contains("name")) {
        if (!j["name"].is_string()) schema_error("scenario.name must be a string");
        s.name = j["name"].get<std::string>();
    }
    if (j.contains("task")) {
        if (!j["task"].is_string()) schema_error("scenario.task must be a string");
        s.task = j["task"].get<std::string>();
        bool known = false;
        for (const auto& t : task_names()) known = known || t == s.task;
        if (!known) schema_error("scenario.task: unknown task '" + s.task + "'");
    }
    if (j.contains("domain")) s.domain = parse_domain(j["domain"], base_dir);
    if (j.contains("params")) {
        if (!j["params"].is_object()) schema_error("scenario.params must be an object");
        s.params = j["params"];
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) schema_error("scenario.seed must be a nonnegative integer");
        s.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("out_dir")) {
        if (!j["out_dir"].is_string()) schema_error("scenario.out_dir must be a string");
        s.out_dir = j["out_dir"].get<std::string>();
    }
    if (j.contains("grid_n")) {
        if (!j["grid_n"].is_number_integer() || j["grid_n"].get<int>() < 1) schema_error("scenario.grid_n must be a positive integer");
        s.grid_n = j["grid_n"].get<int>();
    }
    if (j.contains("tol")) {
        if (!j["tol"].is_number() || !(j["tol"].get<double>() > 0)) schema_error("scenario.tol must be a positive number");
        s.tol = j["tol"].get<double>();
    }
    return s;
}

struct OutputFile {
    std::string name;
    std::string content;
};

struct TaskOutput {
    Json result = Json::object();
    Json assertions = Json::array();
    std::vector<OutputFile> extra_files;  // CSV tables
    std::string summary;

    void check(const std::string& what, bool passed) { assertions.push_back({{"name", what}, {"passed", passed}}); }
    bool ok() const {
        for (const auto& a : assertions)
            if (!a["passed"].get<bool>()) return false;
        return true;
    }
};

namespace detail {

template <class T>
T param(const Json& p, const char* key, T fallback) {
    if (!p.contains(key)) return fallback;
    try {
        return p[key].get<T>();
    } catch (const nlohmann::json::exception&) {
        schema_error(std::string("params.") + key + ": wrong type");
    }
}

inline double param_number(const Json& p, const char* key, double fallback) {
    return p.contains(key) ? to_double(parse_rational(p[key], std::string("params.") + key)) : fallback;
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

/// Rational grid value k / 1024 so that random queries are exact.
inline Rational grid_rational(double x) { return Rational(long(std::lround(x * 1024.0)), 1024); }

inline std::array<Rational, 4> exact4(const Vec4& v) {
    return {grid_rational(v[0]), grid_rational(v[1]), grid_rational(v[2]), grid_rational(v[3])};
}

inline Vec4 double4(const std::array<Rational, 4>& v) {
    return {to_double(v[0]), to_double(v[1]), to_double(v[2]), to_double(v[3])};
}

inline Json series_json(const BiSeries<double>& s) {
    Json out = Json::array();
    for (int a = 0; a <= s.order(); ++a)
        for (int b = 0; a + b <= s.order(); ++b) {
            auto c = s.at(a, b);
            if (c.re != 0.0 || c.im != 0.0) out.push_back({{"zeta", a}, {"zetabar", b}, {"re", c.re}, {"im", c.im}});
        }
    return out;
}

/// |u_y - J(u) u_x| at zeta, with u_y = i (w_zeta - w_zetabar) in complex coordinates.
inline double disc_residual_at(const Disc& d, const RealStructure& J, std::complex<double> z) {
    auto cd = [](const BiSeries<double>& s, std::complex<double> z, bool bar) {
        auto v = bar ? s.d_zetabar().eval(z) : s.d_zeta().eval(z);
        return v;
    };
    CPoint wz{cd(d.w1, z, false), cd(d.w2, z, false)}, wb{cd(d.w1, z, true), cd(d.w2, z, true)};
    std::complex<double> I(0.0, 1.0);
    Vec4 ux = to_real_point({wz[0] + wb[0], wz[1] + wb[1]});
    Vec4 uy = to_real_point({I * (wz[0] - wb[0]), I * (wz[1] - wb[1])});
    Vec4 jux = matvec(J.eval(d.eval_real(z)), ux);
    Vec4 diff{uy[0] - jux[0], uy[1] - jux[1], uy[2] - jux[2], uy[3] - jux[3]};
    return norm4(diff);
}

inline Json psh_json(const PshReport& r) {
    return {{"min_value", r.min_value},
            {"witness_point", vec4_json(r.witness_point)},
            {"witness_direction", vec4_json(r.witness_direction)},
            {"verdict", psh_verdict_name(r.verdict)},
            {"points", r.points},
            {"directions", r.directions}};
}

inline Json fs_function_json(const FSFunction& f) {
    return {{"degree", f.degree}, {"delta", f.delta}, {"a0", f.a0}, {"a", f.a}, {"b", f.b}};
}

inline FSFunction parse_fs_function(const Json& j) {
    FSFunction f;
    f.degree = j.at("degree").get<int>();
    f.delta = j.at("delta").get<double>();
    f.a0 = j.at("a0").get<double>();
    f.a = j.at("a").get<std::vector<double>>();
    f.b = j.at("b").get<std::vector<double>>();
    return f;
}

inline Json fs_check_json(const FSCheck& c) {
    return {{"range", c.range}, {"norm", c.norm}, {"max_lap", c.max_lap}, {"sum_lap", c.sum_lap}, {"c2_norm", c.c2_norm}, {"ok", c.ok()}};
}

inline Json verification_json(const PeakVerification& v) {
    return {{"phi_at_origin", v.phi_at_origin},
            {"sampled_max", v.sampled_max},
            {"closure_points", v.closure_points},
            {"psh", psh_json(v.psh)},
            {"fs", fs_check_json(v.fs)},
            {"ok", v.ok()}};
}

inline Json estimate_json(const Vec4& p, const Vec4& v, const MetricEstimate& e) {
    Json w = nullptr;
    if (e.disc_witness) {
        const auto& d = *e.disc_witness;
        Json coeffs = Json::array();
        for (const auto& c : d.coefficients)
            coeffs.push_back(Json::array({c[0].real(), c[0].imag(), c[1].real(), c[1].imag()}));
        w = {{"radius", d.radius},
             {"coefficients", coeffs},
             {"solved", d.solved.has_value()},
             {"solver_iterations", d.solved ? d.solved->iterations : 0},
             {"residual", d.residual},
             {"max_rho", d.max_rho},
             {"samples", d.samples}};
    }
    return {{"p", vec4_json(p)},
            {"v", vec4_json(v)},
            {"lower", e.lower},
            {"lower_method", e.lower_method},
            {"log_lower", std::isfinite(e.log_lower) ? Json(e.log_lower) : Json(nullptr)},
            {"upper", e.upper},
            {"upper_method", e.upper_method},
            {"boundary_distance", e.boundary_distance},
            {"feasibility_checks", e.feasibility_checks},
            {"disc_witness", w}};
}

inline Json fit_json(const LinearFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}};
}

inline MetricOptions metric_options(const Json& p, const std::optional<double>& tol) {
    MetricOptions o;
    o.disc_degree = param(p, "disc_degree", o.disc_degree);
    o.optimizer_evals = param(p, "optimizer_evals", o.optimizer_evals);
    o.optimizer_restarts = param(p, "optimizer_restarts", o.optimizer_restarts);
    if (tol) o.relative_tol = *tol;
    return o;
}

}  // namespace detail

// ---------------------------------------------------------------- tasks

inline TaskOutput run_levi(const Scenario& s) {
    using namespace detail;
    TaskOutput out;
    const Json& p = s.params;
    std::vector<std::pair<std::array<Rational, 4>, std::array<Rational, 4>>> queries;
    if (p.contains("queries")) {
        for (const auto& q : p["queries"]) {
            std::array<Rational, 4> a, b;
            for (int i = 0; i < 4; ++i) {
                a[i] = parse_rational(q.at("p")[i], "query p");
                b[i] = parse_rational(q.at("v")[i], "query v");
            }
            queries.push_back({a, b});
        }
    } else {
        int count = param(p, "random", 10);
        double radius = param_number(p, "radius", 0.3);
        std::mt19937_64 rng(s.seed);
        std::uniform_real_distribution<double> u(-radius, radius);
        for (int k = 0; k < count; ++k) {
            Vec4 a{u(rng), u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng), u(rng)};
            queries.push_back({exact4(a), exact4(b)});
        }
    }
    const bool via_disc = param(p, "via_disc", true);
    DiscLeviOptions dopt;
    dopt.h = param_number(p, "h", dopt.h);
    if (s.grid_n) dopt.base.grid_n = *s.grid_n;
    if (s.tol) dopt.base.tol = *s.tol;
    RealStructure Jd = s.domain.J.cast<double>();
    ScalarField f = PolyField::from_hermitian(s.domain.rho).field();
    CsvTable csv;
    csv.columns = {"index", "p_x1", "p_y1", "p_x2", "p_y2", "v_x1", "v_y1", "v_x2", "v_y2",
                   "levi_exact", "levi_general", "levi_via_disc", "observed_order", "disc_residual"};
    Json rows = Json::array();
    double worst_exact = 0.0, worst_disc = 0.0;
    for (std::size_t k = 0; k < queries.size(); ++k) {
        const auto& [pq, vq] = queries[k];
        Vec4 pd = double4(pq), vd = double4(vq);
        Rational exact = levi_general_exact(s.domain.rho, s.domain.J, pq, vq);
        double general = levi_general(f, Jd, pd, vd);
        double ex = to_double(exact);
        worst_exact = std::max(worst_exact, std::abs(general - ex) / (1.0 + std::abs(ex)));
        Json row{{"p", vec4_json(pd)}, {"v", vec4_json(vd)}, {"levi_exact", rational_str(exact)}, {"levi_general", general}};
        std::vector<std::string> cells{CsvTable::cell(int(k))};
        for (double x : pd) cells.push_back(CsvTable::cell(x));
        for (double x : vd) cells.push_back(CsvTable::cell(x));
        cells.push_back(rational_str(exact));
        cells.push_back(CsvTable::cell(general));
        if (via_disc) {
            try {
                DiscLeviResult d = levi_via_disc(f, Jd, pd, vd, dopt);
                row["levi_via_disc"] = d.value;
                row["observed_order"] = std::isfinite(d.observed_order) ? Json(d.observed_order) : Json(nullptr);
                row["disc_residual"] = d.disc_residual;
                worst_disc = std::max(worst_disc, std::abs(general - d.value) / (1.0 + std::abs(general)));
                cells.push_back(CsvTable::cell(d.value));
                cells.push_back(std::isfinite(d.observed_order) ? CsvTable::cell(d.observed_order) : "inf");
                cells.push_back(CsvTable::cell(d.disc_residual));
            } catch (const Error& e) {
                row["disc_error"] = std::string(error_kind_name(e.kind()));
                cells.insert(cells.end(), {"", "", ""});
            }
        } else {
            cells.insert(cells.end(), {"", "", ""});
        }
        rows.push_back(row);
        csv.rows.push_back(cells);
    }
    out.result = {{"queries", rows}, {"max_relative_general_vs_exact", worst_exact}};
    if (via_disc) out.result["max_relative_general_vs_disc"] = worst_disc;
    out.check("floating Levi form matches exact value", worst_exact <= 1e-9);
    out.extra_files.push_back({"levi.csv", csv.text()});
    out.summary = std::to_string(queries.size()) + " queries, max rel |general-exact| " + fmt(worst_exact) +
                  (via_disc ? ", max rel |general-disc| " + fmt(worst_disc) : "");
    return out;
}

inline TaskOutput run_psh(const Scenario& s) {
    using namespace detail;
    TaskOutput out;
    const Json& p = s.params;
    Box box = p.contains("box") ? parse_box(p["box"]) : s.domain.box;
    int n = s.grid_n.value_or(param(p, "grid_n", 6));
    PshOptions o;
    o.directions = param(p, "directions", 64);
    o.seed = s.seed;
    if (s.tol) o.psh_tol = *s.tol;
    auto rep = psh_check(s.domain.rho, s.domain.J.cast<double>(), SampleGrid::box_grid(box, n), o);
    out.result = psh_json(rep);
    out.result["grid_meta"] = {{"grid_n", n}, {"box", box_json(box)}, {"seed", s.seed}, {"psh_tol", o.psh_tol},
                               {"witness_tol", o.witness_tol}};
    out.summary = std::string("verdict ") + psh_verdict_name(rep.verdict) + ", min Levi " + fmt(rep.min_value) + " over " +
                  std::to_string(rep.points) + " points x " + std::to_string(rep.directions) + " directions";
    return out;
}

inline TaskOutput run_disc(const Scenario& s) {
    using namespace detail;
    TaskOutput out;
    const Json& p = s.params;
    Vec4 center = p.contains("p") ? parse_vec4(p["p"], "params.p") : Vec4{};
    Vec4 dir = p.contains("v") ? parse_vec4(p["v"], "params.v") : Vec4{1.0, 0.0, 0.0, 0.0};
    std::vector<Vec4> higher;
    if (p.contains("higher"))
        for (const auto& h : p["higher"]) higher.push_back(parse_vec4(h, "params.higher"));
    DiscSpec spec = disc_spec(center, dir, higher);
    spec.radius_scale = param_number(p, "radius_scale", spec.radius_scale);
    spec.max_iterations = param(p, "max_iterations", spec.max_iterations);
    spec.series_order = param(p, "series_order", spec.series_order);
    if (s.grid_n) spec.grid_n = *s.grid_n;
    if (s.tol) spec.tol = *s.tol;
    RealStructure J = s.domain.J.cast<double>();
    Disc d = solve(J, spec);
    int cap = std::min(param(p, "contact_cap", 12), d.w1.order());
    ContactOrder co = contact_order(s.domain.rho, d, cap);
    Json jet = Json::array();
    for (const auto& j : spec.jet) jet.push_back(vec4_json(j));
    out.result = {{"grid", {{"n", spec.grid_n}, {"series_order", spec.series_order}, {"radius_scale", spec.radius_scale}}},
                  {"jet", jet},
                  {"residual", d.residual},
                  {"iterations", d.iterations},
                  {"residual_history", d.residual_history},
                  {"w1", series_json(d.w1)},
                  {"w2", series_json(d.w2)},
                  {"contact_order", co.exceeds_cap() ? Json(nullptr) : Json(co.order)},
                  {"multiplicity", co.multiplicity},
                  {"contact_cap", cap}};
    out.check("disc residual within tolerance", d.residual <= spec.tol);
    if (param(p, "residual_csv", true)) {
        CsvTable csv;
        csv.columns = {"x", "y", "residual"};
        for (auto z : disc_grid(spec.grid_n))
            csv.rows.push_back({CsvTable::cell(z.real()), CsvTable::cell(z.imag()), CsvTable::cell(disc_residual_at(d, J, z))});
        out.extra_files.push_back({"disc_residual.csv", csv.text()});
    }
    out.summary = "residual " + fmt(d.residual) + " after " + std::to_string(d.iterations) + " iterations, contact order " +
                  (co.exceeds_cap() ? "> " + std::to_string(cap) : std::to_string(co.order));
    return out;
}

inline TaskOutput run_type(const Scenario& s) {
    using namespace detail;
    TaskOutput out;
    const Json& p = s.params;
    int degree_cap = param(p, "degree_cap", 12), mult_cap = param(p, "multiplicity_cap", 2), budget = param(p, "budget", 64);
    BoundaryPointData bp{s.domain.rho, s.domain.J};
    auto reg = regular_type(bp, degree_cap, budget);
    auto dt = dangelo_type(bp, degree_cap, mult_cap, budget);
    Json nf = nullptr;
    if (!reg.exceeds_cap()) {
        NormalForm f = extract_normal_form(bp, degree_cap);
        Json shear = Json::array(), rho_k = Json::array();
        for (const auto& c : f.shear) shear.push_back(complex_json(c));
        for (const auto& c : f.rho_k) rho_k.push_back(complex_json(c));
        nf = {{"m", f.m}, {"h2m", hermitian_json(f.h2m.poly)}, {"rho_k", rho_k}, {"shear", shear},
              {"normalized", hermitian_json(f.normalized)}, {"subharmonic_on_sample", f.subharmonic_on_sample},
              {"findings", f.findings}};
    }
    out.result = {{"regular_type", reg.exceeds_cap() ? Json(nullptr) : Json(reg.value())},
                  {"regular_type_label", reg.disc.label(degree_cap)},
                  {"dangelo_type", dt.exceeds_cap ? Json(nullptr) : Json(to_double(dt.value))},
                  {"dangelo_type_exact", dt.exceeds_cap ? Json(nullptr) : Json(rational_str(dt.value))},
                  {"exceeds_cap", dt.exceeds_cap},
                  {"agrees_with_regular", dt.agrees_with_regular},
                  {"degree_cap", degree_cap},
                  {"multiplicity_cap", mult_cap},
                  {"normal_form", nf},
                  {"findings", dt.findings}};
    out.check("D'Angelo type equals regular type", dt.agrees_with_regular);
    out.summary = "regular type " + reg.disc.label(degree_cap) + ", D'Angelo type " +
                  (dt.exceeds_cap ? "> cap" : rational_str(dt.value));
    return out;
}

inline PeakOptions peak_options(const Scenario& s) {
    using namespace detail;
    PeakOptions o;
    o.psh_points = param(s.params, "psh_points", o.psh_points);
    o.psh_directions = param(s.params, "psh_directions", o.psh_directions);
    o.closure_points = param(s.params, "closure_points", o.closure_points);
    o.radius_halvings = param(s.params, "radius_halvings", o.radius_halvings);
    o.seed = s.seed;
    if (s.tol) o.psh_floor = -*s.tol;
    return o;
}

/// Self-contained peak artifact: all constants, the FS function, the normalized data
/// and the verification settings, enough to re-run the checks.
inline Json peak_artifact_json(const PeakFunction& pf, const RationalHermitian& rho, const RationalStructure& J,
                               const PeakOptions& o) {
    Json rho_k = Json::array();
    for (const auto& c : pf.rho_k) rho_k.push_back(complex_json(c));
    return {{"m", pf.m},
            {"L", rational_str(pf.L)},
            {"C", rational_str(pf.C)},
            {"radius", pf.radius},
            {"hstar_norm", pf.hstar_norm},
            {"fs", detail::fs_function_json(pf.fs)},
            {"h2m", {{"degree", pf.h2m.degree}, {"poly", hermitian_json(pf.h2m.poly)}}},
            {"rho_k", rho_k},
            {"rho_normalized", hermitian_json(rho)},
            {"structure", structure_json(J)},
            {"verification_settings",
             {{"psh_points", o.psh_points}, {"psh_directions", o.psh_directions}, {"closure_points", o.closure_points},
              {"seed", o.seed}, {"psh_floor", o.psh_floor}}}};
}

inline TaskOutput run_peak(const Scenario& s) {
    TaskOutput out;
    BoundaryPointData bp{s.domain.rho, s.domain.J};
    NormalForm nf = extract_normal_form(bp);
    PeakOptions o = peak_options(s);
    PeakBuild b = build_peak(nf, s.domain.J, o);
    RationalStructure Jn = normal_form_structure(nf, s.domain.J);
    out.result = {{"artifact", peak_artifact_json(b.peak, nf.normalized, Jn, o)},
                  {"verification", detail::verification_json(b.verification)},
                  {"candidates_tried", b.candidates_tried}};
    out.check("peak function verified", b.verification.ok(o.psh_floor));
    out.summary = "L " + rational_str(b.peak.L) + ", C " + rational_str(b.peak.C) + ", r " + detail::fmt(b.peak.radius) +
                  ", sampled max " + detail::fmt(b.verification.sampled_max) + ", min Levi " +
                  detail::fmt(b.verification.psh.min_value);
    return out;
}

/// Re-runs the verification stored with a peak artifact (the "result.artifact" of peak.json).
inline TaskOutput run_peak_verify(const Json& artifact) {
    TaskOutput out;
    PeakFunction pf;
    try {
        pf.m = artifact.at("m").get<int>();
        pf.L = parse_rational(artifact.at("L"), "L");
        pf.C = parse_rational(artifact.at("C"), "C");
        pf.radius = artifact.at("radius").get<double>();
        pf.hstar_norm = artifact.at("hstar_norm").get<double>();
        pf.fs = detail::parse_fs_function(artifact.at("fs"));
        pf.h2m.degree = artifact.at("h2m").at("degree").get<int>();
        pf.h2m.poly = parse_hermitian(artifact.at("h2m").at("poly"));
        for (const auto& c : artifact.at("rho_k")) pf.rho_k.push_back(parse_complex(c));
    } catch (const nlohmann::json::exception& e) {
        schema_error(std::string("peak artifact: ") + e.what());
    }
    RationalHermitian rho = parse_hermitian(artifact.at("rho_normalized"));
    RationalStructure J = parse_structure(artifact.at("structure"));
    const Json& vs = artifact.at("verification_settings");
    auto v = verify_peak(pf, rho, J.cast<double>(), vs.at("psh_points").get<int>(), vs.at("psh_directions").get<int>(),
                         vs.at("closure_points").get<int>(), vs.at("seed").get<std::uint64_t>());
    double floor = vs.at("psh_floor").get<double>();
    out.result = {{"verification", detail::verification_json(v)}};
    out.check("peak function verified", v.ok(floor));
    out.summary = std::string(v.ok(floor) ? "verified" : "verification failed") + ", sampled max " +
                  detail::fmt(v.sampled_max) + ", min Levi " + detail::fmt(v.psh.min_value);
    return out;
}

inline TaskOutput run_kobayashi(const Scenario& s) {
    using namespace detail;
    TaskOutput out;
    const Json& p = s.params;
    MetricDomain D(s.domain.rho, s.domain.J.cast<double>());
    MetricOptions o = metric_options(p, s.tol);
    if (param(p, "peak_lower", false)) {
        PeakOptions po = peak_options(s);
        o.peak_lower = std::make_shared<PeakLowerBound>(
            prepare_peak_lower_bound({s.domain.rho, s.domain.J}, s.domain.J.cast<double>(), po));
    }
    Json estimates = Json::array();
    bool ordered = true;
    Json queries = p.contains("queries") ? p["queries"]
                                         : Json::array({{{"p", {0, 0, "-1/100", 0}}, {"v", {1, 0, 0, 0}}}});
    for (const auto& q : queries) {
        Vec4 pt = parse_vec4(q.at("p"), "query p"), v = parse_vec4(q.at("v"), "query v");
        auto e = estimate_metric(D, pt, v, o);
        ordered = ordered && e.lower <= e.upper;
        estimates.push_back(estimate_json(pt, v, e));
    }
    Json distances = Json::array();
    if (p.contains("distances")) {
        for (const auto& q : p["distances"]) {
            Vec4 a = parse_vec4(q.at("from"), "distance from"), b = parse_vec4(q.at("to"), "distance to");
            int rounds = param(q, "rounds", 3);
            auto r = integrated_distance(D, a, b, rounds);
            distances.push_back({{"from", vec4_json(a)}, {"to", vec4_json(b)}, {"value", r.value}, {"rounds", r.rounds}});
        }
    }
    out.result = {{"estimates", estimates}, {"distances", distances}};
    out.check("lower bound <= upper bound", ordered);
    std::string first = estimates.empty() ? "" : ", first upper " + fmt(estimates[0]["upper"].get<double>()) + " (" +
                                                     estimates[0]["upper_method"].get<std::string>() + ")";
    out.summary = std::to_string(estimates.size()) + " estimates, " + std::to_string(distances.size()) + " distances" + first;
    return out;
}

inline TaskOutput run_approach(const Scenario& s) {
    using namespace detail;
    TaskOutput out;
    const Json& p = s.params;
    ApproachExperiment e;
    std::string fam = param<std::string>(p, "family", "normal");
    if (fam == "normal") e.family = ApproachFamily::normal;
    else if (fam == "tangential") e.family = ApproachFamily::tangential;
    else if (fam == "cone") e.family = ApproachFamily::cone;
    else schema_error("params.family must be normal, tangential or cone");
    e.aperture = param_number(p, "aperture", e.aperture);
    e.fit_tail = param(p, "fit_tail", e.fit_tail);
    if (p.contains("t")) {
        for (const auto& t : p["t"]) e.t.push_back(to_double(parse_rational(t, "params.t")));
    } else {
        e.t = ApproachExperiment::default_t();
    }
    MetricDomain D(s.domain.rho, s.domain.J.cast<double>());
    auto r = approach_experiment(D, e, metric_options(p, s.tol));
    Json rows = Json::array();
    CsvTable csv;
    csv.columns = {"t", "K_upper_normal", "K_upper_tangential", "rho", "distance", "hopf_ratio"};
    for (const auto& row : r.rows) {
        rows.push_back({{"t", row.t}, {"p", vec4_json(row.p)}, {"rho", row.rho}, {"distance", row.distance},
                        {"upper_tangential", row.upper_tangential}, {"upper_normal", row.upper_normal},
                        {"hopf_ratio", row.hopf_ratio}});
        csv.rows.push_back({CsvTable::cell(row.t), CsvTable::cell(row.upper_normal), CsvTable::cell(row.upper_tangential),
                            CsvTable::cell(row.rho), CsvTable::cell(row.distance), CsvTable::cell(row.hopf_ratio)});
    }
    out.result = {{"family", approach_family_name(r.family)}, {"aperture", e.aperture}, {"fit_tail", e.fit_tail},
                  {"rows", rows}, {"tangential_fit", fit_json(r.tangential)}, {"normal_fit", fit_json(r.normal)},
                  {"hopf_constant", r.hopf_constant}, {"hopf_drift", r.hopf_drift}};
    out.check("Hopf constant positive", r.hopf_constant > 0.0);
    out.extra_files.push_back({"approach.csv", csv.text()});
    out.summary = fam + ": normal slope " + fmt(r.normal.slope) + ", tangential slope " + fmt(r.tangential.slope) +
                  ", Hopf C " + fmt(r.hopf_constant) + " (drift " + fmt(r.hopf_drift) + ")";
    return out;
}

inline TaskOutput run_scale(const Scenario& s) {
    using namespace detail;
    TaskOutput out;
    const Json& p = s.params;
    int steps = param(p, "steps", 20);
    ScalingSequenceSpec spec;
    if (s.domain.name == "appendix") {
        Json mp = Json::object();
        if (p.contains("eps")) mp["eps"] = p["eps"];
        if (p.contains("kappa")) mp["kappa"] = p["kappa"];
        Rational eps = mp.contains("eps") ? parse_rational(mp["eps"], "eps") : Rational(1, 2);
        Rational kappa = mp.contains("kappa") ? parse_rational(mp["kappa"], "kappa") : Rational(1);
        spec = appendix_scenario(steps, eps, kappa);
    } else {
        spec.rho = s.domain.rho;
        spec.J = s.domain.J;
        spec.deltas = ScalingSequenceSpec::halving_schedule(steps);
        if (p.contains("m")) {
            spec.m = param(p, "m", 2);
        } else {
            auto reg = regular_type({s.domain.rho, RationalStructure::standard()}, 24);
            if (reg.exceeds_cap()) schema_error("params.m required: type at the origin exceeds 24");
            spec.m = reg.value() / 2;
        }
    }
    auto run = run_scaling_sequence(spec);
    int fit_upto = param(p, "fit_upto", 10);
    auto tb = tau_bounds_check(run.states, spec.m, fit_upto);

    // Leading coefficients: the non-normal terms that survive in the last rescaled function.
    std::vector<Exp4> lead;
    for (const auto& c : run.limit.rho_limit)
        if (!(c.exponent == Exp4{0, 0, 1, 0} || c.exponent == Exp4{0, 0, 0, 1})) lead.push_back(c.exponent);
    auto ename = [](const Exp4& e) {
        return "c_" + std::to_string(e[0]) + std::to_string(e[1]) + std::to_string(e[2]) + std::to_string(e[3]);
    };
    CsvTable csv;
    csv.columns = {"nu", "delta", "tau", "gap", "gap_c1"};
    for (const auto& e : lead) {
        csv.columns.push_back(ename(e) + "_re");
        csv.columns.push_back(ename(e) + "_im");
    }
    Json states = Json::array();
    for (const auto& st : run.states) {
        Json shear = Json::array();
        for (const auto& c : st.shear) shear.push_back(complex_json(c));
        Json slices = Json::array();
        for (const auto& sl : st.slices)
            slices.push_back({{"degree", sl.degree}, {"norm", sl.norm}, {"tau", sl.tau}, {"exact", sl.exact}});
        states.push_back({{"nu", st.nu},
                          {"delta", rational_str(st.delta)},
                          {"tau", st.tau},
                          {"tau_exact", st.tau_exact},
                          {"type", st.type},
                          {"slices", slices},
                          {"shear", shear},
                          {"gap", st.gap},
                          {"gap_c1", st.gap_c1},
                          {"image_p_star", Json::array({complex_json(st.image_p_star[0]), complex_json(st.image_p_star[1])})},
                          {"image_p", Json::array({complex_json(st.image_p[0]), complex_json(st.image_p[1])})}});
        std::vector<std::string> row{CsvTable::cell(st.nu), CsvTable::cell(to_double(st.delta)), CsvTable::cell(st.tau),
                                     CsvTable::cell(st.gap), CsvTable::cell(st.gap_c1)};
        for (const auto& e : lead) {
            auto c = st.rho_tilde.coeff(e);
            row.push_back(CsvTable::cell(to_double(c.re)));
            row.push_back(CsvTable::cell(to_double(c.im)));
        }
        csv.rows.push_back(row);
    }
    Json rho_limit = Json::array();
    for (const auto& c : run.limit.rho_limit)
        rho_limit.push_back({{"exponent", exponent_json(c.exponent)}, {"value", c.value},
                             {"rate", std::isfinite(c.rate) ? Json(c.rate) : Json(nullptr)}});
    Json structure_limit = Json::array();
    for (const auto& c : run.limit.structure_limit)
        structure_limit.push_back({{"row", c.row}, {"col", c.col}, {"exponent", exponent_json(c.exponent)}, {"value", c.value}});
    out.result = {{"m", spec.m},
                  {"states", states},
                  {"limit",
                   {{"gaps", run.limit.gaps},
                    {"rho_limit", rho_limit},
                    {"limit_subharmonic", run.limit.limit_subharmonic},
                    {"structure_limit", structure_limit},
                    {"verdict", limit_verdict_name(run.limit.verdict)}}},
                  {"tau_bounds",
                   {{"C", tb.C}, {"fit_upto", tb.fit_upto}, {"lower_ratio", tb.lower_ratio}, {"upper_ratio", tb.upper_ratio},
                    {"holds", tb.holds}}}};
    bool exact_images = true;
    for (const auto& st : run.states) {
        exact_images = exact_images && is_zero(st.image_p_star[0]) && is_zero(st.image_p_star[1]) && is_zero(st.image_p[0]) &&
                       st.image_p[1].re == -st.delta && st.image_p[1].im == 0;
    }
    out.check("tau bounds hold with one fitted C", tb.holds);
    out.check("normalization maps p* to 0 and p to (0, -delta) exactly", exact_images);
    out.extra_files.push_back({"scale.csv", csv.text()});
    out.summary = std::string("verdict ") + limit_verdict_name(run.limit.verdict) + ", gap(" + std::to_string(steps) +
                  ") " + fmt(run.limit.gaps.empty() ? 0.0 : run.limit.gaps.back()) + ", tau bound C " + fmt(tb.C);
    return out;
}

inline TaskOutput run_appendix(const Scenario& s) {
    using namespace detail;
    TaskOutput out;
    const Json& p = s.params;
    AppendixProblem prob;
    auto read4 = [&](const char* key) {
        std::array<Rational, 4> a;
        a.fill(Rational(1));
        if (p.contains(key)) {
            if (!p[key].is_array() || p[key].size() != 4) schema_error(std::string("params.") + key + ": expected 4 values");
            for (int i = 0; i < 4; ++i) a[i] = parse_rational(p[key][i], key);
        }
        return a;
    };
    prob.h3 = read4("h3");
    prob.h3prime = read4("h3prime");
    if (p.contains("alpha")) prob.alpha = parse_rational(p["alpha"], "alpha");
    if (p.contains("beta")) prob.beta = parse_rational(p["beta"], "beta");
    std::string mode = param<std::string>(p, "rhs_mode", "stacked");
    if (p.contains("rhs")) {
        if (!p["rhs"].is_array() || p["rhs"].size() != 8) schema_error("params.rhs: expected 8 values");
        RationalVector y;
        for (const auto& x : p["rhs"]) y.push_back(parse_rational(x, "rhs"));
        prob.rhs = y;
        mode = "explicit";
    } else if (mode == "stacked") {
        RationalVector y(prob.h3.begin(), prob.h3.end());
        y.insert(y.end(), prob.h3prime.begin(), prob.h3prime.end());
        prob.rhs = y;
    } else if (mode != "derived") {
        schema_error("params.rhs_mode must be stacked or derived");
    }
    auto r = appendix_system(prob);
    auto vec_json = [](const RationalVector& v) {
        Json a = Json::array();
        for (const auto& x : v) a.push_back(rational_str(x));
        return a;
    };
    Json lns = Json::array();
    for (const auto& v : r.left_null_space) lns.push_back(vec_json(v));
    Json matrix = Json::array();
    for (const auto& row : prob.system_matrix) {
        Json jr = Json::array();
        for (const auto& x : row) jr.push_back(x.get_si());
        matrix.push_back(jr);
    }
    Rational r5 = p.contains("r5") ? parse_rational(p["r5"], "r5") : Rational(1);
    Rational s5 = p.contains("s5") ? parse_rational(p["s5"], "s5") : Rational(1);
    auto fam = quadratic_cancellation(r5, s5);
    auto shown = displayed_quadratic_family(r5, s5);
    bool kills = first_bracket(fam.R, fam.S).is_zero() && second_bracket(fam.R, fam.S).is_zero();
    out.result = {{"matrix", matrix},
                  {"det", r.det.get_str()},
                  {"rank", r.rank},
                  {"augmented_rank", r.augmented_rank},
                  {"solvable", r.solvable},
                  {"rhs_mode", mode},
                  {"rhs", vec_json(r.rhs)},
                  {"residual_squared", rational_str(r.residual_squared)},
                  {"residual", r.residual},
                  {"left_null_space", lns},
                  {"solution", r.solution ? vec_json(*r.solution) : Json(nullptr)},
                  {"quadratic",
                   {{"r5", rational_str(r5)},
                    {"s5", rational_str(s5)},
                    {"R", poly_json(fam.R)},
                    {"S", poly_json(fam.S)},
                    {"kills_brackets", kills},
                    {"displayed_first_bracket", poly_json(first_bracket(shown.R, shown.S))},
                    {"displayed_second_bracket", poly_json(second_bracket(shown.R, shown.S))}}}};
    out.check("quadratic family kills both brackets exactly", kills);
    out.summary = "det " + r.det.get_str() + ", rank " + std::to_string(r.rank) + ", solvable " +
                  (r.solvable ? "true" : "false") + ", residual " + fmt(r.residual);
    return out;
}

/// Runs one scenario; module errors are rethrown as TaskError with scenario context.
inline TaskOutput run_scenario(const Scenario& s) {
    try {
        if (s.task == "levi") return run_levi(s);
        if (s.task == "psh") return run_psh(s);
        if (s.task == "disc") return run_disc(s);
        if (s.task == "type") return run_type(s);
        if (s.task == "peak") return run_peak(s);
        if (s.task == "kobayashi") return run_kobayashi(s);
        if (s.task == "approach") return run_approach(s);
        if (s.task == "scale") return run_scale(s);
        if (s.task == "appendix") return run_appendix(s);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::SchemaError) throw;
        throw Error(ErrorKind::TaskError, "scenario '" + s.name + "', task " + s.task + ": " + e.what());
    }
    schema_error("unknown task '" + s.task + "'");
}

/// Report document: scenario echo plus the task result and its hard assertions.
inline Json report_json(const Scenario& s, const TaskOutput& out) {
    Json scenario{{"name", s.name}, {"task", s.task}, {"seed", s.seed}, {"params", s.params}};
    if (s.grid_n) scenario["grid_n"] = *s.grid_n;
    if (s.tol) scenario["tol"] = *s.tol;
    if (s.task != "appendix") scenario["domain"] = domain_json(s.domain);
    return {{"schema", "acxlab." + s.task + ".v1"},
            {"scenario", scenario},
            {"result", out.result},
            {"assertions", out.assertions},
            {"ok", out.ok()}};
}

}  // namespace acxlab
