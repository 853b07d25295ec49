#include "stepkdv/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace stepkdv {

ScatteringFile run_scatter(const RunConfig& cfg) {
    validate_config(cfg);
    ScatteringFile f;
    f.scattering = std::make_shared<Scattering>(make_initial_data(cfg), cfg.scattering);
    f.scattering->analyze();
    f.solve = cfg.solve;
    f.solve.boost = cfg.boost;
    f.rh_tol = cfg.rh_tol;
    return f;
}

FieldSample run_solve(const ScatteringFile& f, double x, double t, OperatorCache* cache) {
    FieldSample s;
    s.x = x;
    s.t = t;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (!(t >= 0.0)) throw DomainError("t must be non-negative");
        const PointSolution p = solve_point(*f.scattering, x, t, f.solve, cache);
        s.region = region_name(p.plan.region);
        s.residual_norm = p.residual;
        s.condition_estimate = p.cond;
        if (!std::isfinite(p.u)) throw NumericalError("non-finite solution");
        if (!(p.residual <= f.rh_tol))
            throw NumericalError("collocation residual " + format_number(p.residual) + " above tolerance");
        if (!(p.cond <= cond_max)) throw NumericalError("collocation system near singular (cond " + format_number(p.cond) + ")");
        s.u = p.u;
    } catch (const std::exception& e) {
        s.u = NAN;
        s.error = e.what();
    }
    s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
}

int parallelism(int requested) {
    if (requested > 0) return requested;
    if (const char* e = std::getenv(threads_env)) {
        const int n = std::atoi(e);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<FieldSample> run_sweep(const ScatteringFile& f, const std::vector<double>& xs, std::vector<double> ts,
                                   int threads) {
    std::stable_sort(ts.begin(), ts.end());
    const size_t n = xs.size() * ts.size();
    std::vector<FieldSample> out(n);
    if (n == 0) return out;
    OperatorCache cache;
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t k; (k = next++) < n;) out[k] = run_solve(f, xs[k % xs.size()], ts[k / xs.size()], &cache);
    };
    const int nt = std::min<int>(parallelism(threads), int(n));
    std::vector<std::thread> pool;
    for (int i = 1; i < nt; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const std::vector<FieldSample>& samples) {
    out << csv_header << '\n';
    for (const FieldSample& s : samples) {
        std::string tag = s.region;
        if (!s.ok()) {
            tag = "error:" + s.error;
            for (char& ch : tag)
                if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
        }
        out << format_number(s.x) << ',' << format_number(s.t) << ',' << format_number(s.u) << ',' << tag << ','
            << format_number(s.residual_norm) << ',' << format_number(s.condition_estimate) << '\n';
    }
}

}  // namespace stepkdv
