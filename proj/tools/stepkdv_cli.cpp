// Command-line driver: scatter, solve, sweep, validate.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "stepkdv/pipeline.hpp"
#include "stepkdv/validation.hpp"

using namespace stepkdv;

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        size_t used = 0;
        const double v = std::stod(item, &used);
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw DomainError("bad number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

int cmd_scatter(const std::string& config, const std::string& out) {
    const RunConfig cfg = load_config(config);
    const ScatteringFile f = run_scatter(cfg);
    const std::string path = out.empty() ? cfg.scattering_out : out;
    if (path.empty()) throw DomainError("no output path (use --out or output.scattering)");
    write_scattering(path, f);
    const Scattering& S = *f.scattering;
    std::cout << "scattering: " << path << "\n";
    std::cout << "family: " << S.data().family << "\nc: " << format_number(S.c()) << "\n";
    std::cout << "poles: " << S.poles().size() << "\n";
    for (const Pole& p : S.poles())
        std::cout << "  z = " << format_number(p.z.real()) << " + " << format_number(p.z.imag()) << "i, c(z) = "
                  << format_number(p.norming_left.real()) << " + " << format_number(p.norming_left.imag())
                  << "i, C(z) = " << format_number(p.norming_right.real()) << " + "
                  << format_number(p.norming_right.imag()) << "i\n";
    std::cout << "generic: " << (S.genericity().generic ? "yes" : "no") << "\n";
    if (!S.genericity().generic) std::cout << "warning: " << S.genericity().message << "\n";
    return 0;
}

int cmd_solve(const std::string& scat, double x, double t) {
    const ScatteringFile f = read_scattering(scat);
    const FieldSample s = run_solve(f, x, t);
    std::cout << "x: " << format_number(s.x) << "\nt: " << format_number(s.t) << "\nu: " << format_number(s.u)
              << "\nregion: " << s.region << "\nresidual: " << format_number(s.residual_norm)
              << "\ncond: " << format_number(s.condition_estimate) << "\nwall_time: " << format_number(s.wall_time)
              << "\n";
    if (!s.ok()) {
        const std::string dump = "stepkdv_failure_contour.json";
        try {
            const double xn = x - 6.0 * f.solve.boost * t;
            std::ofstream(dump) << dump_problem(build_problem(*f.scattering, select_region(xn, t, *f.scattering, f.solve.plan), f.solve));
            std::cerr << "error: " << s.error << " (contour dump: " << dump << ")\n";
        } catch (const std::exception&) {
            std::cerr << "error: " << s.error << "\n";
        }
        return 2;
    }
    return 0;
}

int cmd_sweep(const std::string& scat, double x_min, double x_max, int nx, const std::string& ts,
              const std::string& out) {
    const ScatteringFile f = read_scattering(scat);
    GridSpec g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.nx = nx;
    if (nx < 1 || !(x_min <= x_max)) throw DomainError("grid must be nonempty with x-min <= x-max");
    const std::vector<double> tv = parse_list(ts);
    for (double t : tv)
        if (!(t >= 0.0)) throw DomainError("t must be non-negative");
    const std::vector<FieldSample> samples = run_sweep(f, g.xs(), tv);
    std::ofstream os(out);
    if (!os) throw DomainError("cannot write " + out);
    write_csv(os, samples);
    int failed = 0;
    for (const FieldSample& s : samples) failed += !s.ok();
    std::cout << "rows: " << samples.size() << "\nfailed: " << failed << "\ncsv: " << out << "\n";
    return 0;
}

int cmd_validate(const std::string& scat, bool full) {
    const ScatteringFile f = read_scattering(scat);
    ValidationOptions o;
    o.full = full;
    const ValidationReport r = validate(f, o);
    std::cout << r.text();
    return r.hard_failure() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inverse scattering solver for KdV with step-like initial data"};
    app.require_subcommand(1);
    std::string config, out, scat, ts;
    double x = 0.0, t = 0.0, x_min = 0.0, x_max = 0.0;
    int nx = 0;
    bool full = false;

    auto* sc = app.add_subcommand("scatter", "Compute and store scattering data from a TOML config");
    sc->add_option("--config", config, "run configuration")->required();
    sc->add_option("--out", out, "scattering file (JSON)");
    auto* so = app.add_subcommand("solve", "Solve for u(x,t) at one point");
    so->add_option("--scattering", scat, "scattering file")->required();
    so->add_option("--x", x)->required();
    so->add_option("--t", t)->required();
    auto* sw = app.add_subcommand("sweep", "Solve on an x grid for a list of times and write CSV");
    sw->add_option("--scattering", scat, "scattering file")->required();
    sw->add_option("--x-min", x_min)->required();
    sw->add_option("--x-max", x_max)->required();
    sw->add_option("--nx", nx)->required();
    sw->add_option("--t", ts, "comma-separated times (may be empty)")->required();
    sw->add_option("--out", out, "CSV path")->required();
    auto* va = app.add_subcommand("validate", "Run the validation suite");
    va->add_option("--scattering", scat, "scattering file")->required();
    va->add_flag("--full", full, "include the expensive checks");
    app.footer(std::string("Environment: ") + threads_env + " sets the number of sweep workers.");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*sc) return cmd_scatter(config, out);
        if (*so) return cmd_solve(scat, x, t);
        if (*sw) return cmd_sweep(scat, x_min, x_max, nx, ts, out);
        if (*va) return cmd_validate(scat, full);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
