#include "acxlab/scenario.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

using namespace acxlab;

namespace {

constexpr int kExitAssertion = 1;
constexpr int kExitSchema = 2;
constexpr int kExitTask = 3;

const char* kCsvHelp = R"(CSV outputs (written next to the JSON report in --out-dir):
  levi.csv           index, p_x1, p_y1, p_x2, p_y2, v_x1, v_y1, v_x2, v_y2,
                     levi_exact (rational), levi_general, levi_via_disc,
                     observed_order, disc_residual
  disc_residual.csv  x, y, residual  (|u_y - J(u) u_x| on the disc grid)
  approach.csv       t, K_upper_normal, K_upper_tangential, rho, distance, hopf_ratio
  scale.csv          nu, delta, tau, gap, gap_c1, then c_abcd_re, c_abcd_im for each
                     surviving coefficient of z1^a conj(z1)^b z2^c conj(z2)^d in the
                     rescaled defining function
Exit status: 0 ok, 1 hard assertion failed, 2 schema error, 3 task error.)";

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> grid_n;
    std::optional<double> tol;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config, "scenario JSON (schemas/scenario.schema.json)");
    sub->add_option("--seed", f.seed, "RNG seed (overrides config)");
    sub->add_option("--out-dir", f.out_dir, "output directory (overrides config)");
    sub->add_option("--grid-n", f.grid_n, "grid resolution: disc grid side, psh points per axis")->check(CLI::PositiveNumber);
    sub->add_option("--tol", f.tol, "tolerance: disc solver, psh, metric bisection")->check(CLI::PositiveNumber);
}

Scenario build_scenario(const std::string& task, const CommonFlags& f) {
    Scenario s;
    if (!f.config.empty()) {
        std::filesystem::path cfg = f.config;
        s = parse_scenario(read_json_file(cfg), cfg.has_parent_path() ? cfg.parent_path() : ".");
        if (!s.task.empty() && s.task != task) schema_error("config task '" + s.task + "' does not match subcommand " + task);
    } else {
        s.name = task;
    }
    s.task = task;
    if (f.seed) s.seed = *f.seed;
    if (f.out_dir) s.out_dir = *f.out_dir;
    if (f.grid_n) s.grid_n = *f.grid_n;
    if (f.tol) s.tol = *f.tol;
    return s;
}

void write_outputs(const std::filesystem::path& dir, const std::string& stem, const Json& report, const TaskOutput& out) {
    write_file_atomic(dir / (stem + ".json"), json_text(report));
    for (const auto& f : out.extra_files) write_file_atomic(dir / f.name, f.content);
}

int finish(const std::string& label, const TaskOutput& out) {
    std::cout << label << (out.ok() ? " ok: " : " FAILED: ") << out.summary << "\n";
    return out.ok() ? 0 : kExitAssertion;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.kind() == ErrorKind::SchemaError ? kExitSchema : kExitTask;
    } catch (const std::exception& e) {
        std::cerr << "TaskError: " << e.what() << "\n";
        return kExitTask;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acxlab: almost complex finite-type domain laboratory"};
    app.footer(kCsvHelp);
    app.require_subcommand(1);

    struct Entry {
        std::string command;
        std::string task;
        std::string help;
    };
    const std::vector<Entry> entries{
        {"levi", "levi", "Levi form: exact, floating and disc-Laplacian values"},
        {"psh-check", "psh", "sampled plurisubharmonicity check of the defining function"},
        {"disc", "disc", "solve a pseudoholomorphic disc from a jet"},
        {"type", "type", "regular and D'Angelo type with normal form"},
        {"peak", "peak", "construct and verify a local peak function"},
        {"kobayashi", "kobayashi", "Kobayashi pseudometric intervals and integrated distances"},
        {"approach", "approach", "boundary-approach exponents and Hopf ratios"},
        {"scale", "scale", "scaling sequence with limit report"},
        {"appendix", "appendix", "cubic cancellation system and quadratic families"},
    };
    std::vector<CommonFlags> flags(entries.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        auto* sub = app.add_subcommand(entries[i].command, entries[i].help);
        sub->footer(kCsvHelp);
        add_common(sub, flags[i]);
        subs.push_back(sub);
    }
    CLI::App* peak = subs[4];
    std::string artifact;
    CommonFlags verify_flags;
    auto* verify = peak->add_subcommand("verify", "re-run verification from a serialized peak artifact");
    verify->add_option("--artifact", artifact, "peak.json written by the peak subcommand")->required();
    verify->add_option("--out-dir", verify_flags.out_dir, "output directory for peak_verify.json");

    CLI11_PARSE(app, argc, argv);

    if (verify->parsed()) {
        return guarded([&] {
            Json doc = read_json_file(artifact);
            const Json& a = doc.contains("result") ? doc["result"].at("artifact") : doc;
            TaskOutput out = run_peak_verify(a);
            Json report{{"schema", "acxlab.peak_verify.v1"},
                        {"artifact", artifact},
                        {"result", out.result},
                        {"assertions", out.assertions},
                        {"ok", out.ok()}};
            std::filesystem::path dir = verify_flags.out_dir.value_or(std::filesystem::path(artifact).parent_path().string());
            if (dir.empty()) dir = ".";
            write_outputs(dir, "peak_verify", report, out);
            return finish("peak verify", out);
        });
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        return guarded([&] {
            Scenario s = build_scenario(entries[i].task, flags[i]);
            TaskOutput out = run_scenario(s);
            write_outputs(s.out_dir, s.task, report_json(s, out), out);
            return finish(entries[i].command + " " + s.name, out);
        });
    }
    return 0;
}
