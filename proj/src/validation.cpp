#include "stepkdv/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "stepkdv/chebyshev.hpp"

namespace stepkdv {

std::string status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Inconclusive: return "inconclusive";
        case CheckStatus::Skipped: return "skipped";
    }
    return "?";
}

CheckStatus grade(double value, double tol) {
    return std::isfinite(value) && value <= tol ? CheckStatus::Pass : CheckStatus::Fail;
}

bool ValidationReport::hard_failure() const {
    return std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

std::string ValidationReport::text() const {
    std::ostringstream os;
    int counts[4] = {0, 0, 0, 0};
    for (const CheckResult& c : checks) {
        ++counts[int(c.status)];
        os << "[check] " << c.name << "\n";
        os << "  status: " << status_name(c.status) << "\n";
        os << "  value: " << format_number(c.value) << "\n";
        os << "  tolerance: " << format_number(c.tolerance) << "\n";
        char rt[32];
        std::snprintf(rt, sizeof rt, "%.3f", c.runtime);
        os << "  runtime_s: " << rt << "\n";
        if (!c.detail.empty()) os << "  detail: " << c.detail << "\n";
    }
    os << "[summary]\n";
    os << "  checks: " << checks.size() << "\n";
    os << "  pass: " << counts[0] << "\n  fail: " << counts[1] << "\n  inconclusive: " << counts[2]
       << "\n  skipped: " << counts[3] << "\n";
    os << "  result: " << (hard_failure() ? "FAIL" : "OK") << "\n";
    return os.str();
}

// ---- PDE residual -------------------------------------------------------------------------------

KdvResidual kdv_residual(const std::vector<double>& up, const std::vector<double>& u, const std::vector<double>& un,
                         double h, double dt, double tol, double resolution_max) {
    const size_t n = u.size();
    if (n < 7 || up.size() != n - 6 || un.size() != n - 6) throw DomainError("kdv_residual: stencil size mismatch");
    if (!(h > 0.0) || !(dt > 0.0)) throw DomainError("kdv_residual: spacings must be positive");
    KdvResidual r;
    double res = 0.0, scale = 0.0, diff = 0.0, umax = 0.0;
    bool finite = true;
    for (size_t i = 3; i + 3 < n; ++i) {
        const double ux = (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * h);
        const double uxxx4 =
            (u[i - 3] - 8.0 * u[i - 2] + 13.0 * u[i - 1] - 13.0 * u[i + 1] + 8.0 * u[i + 2] - u[i + 3]) / (8.0 * h * h * h);
        const double uxxx2 = (u[i + 2] - 2.0 * u[i + 1] + 2.0 * u[i - 1] - u[i - 2]) / (2.0 * h * h * h);
        const double ut = (un[i - 3] - up[i - 3]) / (2.0 * dt);
        const double ri = ut + 6.0 * u[i] * ux + uxxx4;
        if (!std::isfinite(ri)) finite = false;
        res = std::max(res, std::abs(ri));
        scale = std::max(scale, std::abs(uxxx4));
        diff = std::max(diff, std::abs(uxxx4 - uxxx2));
        umax = std::max(umax, std::abs(u[i]));
    }
    r.absolute = res;
    r.scale = scale;
    const bool flat = scale <= 1e-10 * (1.0 + umax);
    r.relative = flat ? res : res / scale;
    r.resolution = flat ? 0.0 : diff / scale;
    if (!finite) {
        r.status = CheckStatus::Fail;
        r.relative = NAN;
    } else if (r.resolution > resolution_max) {
        r.status = CheckStatus::Inconclusive;
    } else {
        r.status = grade(r.relative, tol);
    }
    return r;
}

KdvResidual kdv_residual(const FieldFn& u, double x_a, double x_b, double t, double h, double dt, double tol) {
    if (!(t - dt >= 0.0)) throw DomainError("kdv_residual: t - dt must be non-negative");
    const int m = std::max(1, int(std::lround((x_b - x_a) / h)) + 1);
    std::vector<double> all, inner;
    for (int i = -3; i < m + 3; ++i) all.push_back(x_a + i * h);
    for (int i = 0; i < m; ++i) inner.push_back(x_a + i * h);
    return kdv_residual(u(inner, t - dt), u(all, t), u(inner, t + dt), h, dt, tol);
}

FieldFn field_of(const ScatteringFile& f, int threads) {
    return [&f, threads](const std::vector<double>& xs, double t) {
        std::vector<double> out;
        for (const FieldSample& s : run_sweep(f, xs, {t}, threads)) out.push_back(s.u);
        return out;
    };
}

// ---- Scattering identities ----------------------------------------------------------------------

std::vector<double> identity_grid(double c, int n) {
    std::vector<double> s;
    const int half = std::max(1, (n + 1) / 2);
    for (int k = 0; k < n; ++k) {
        const double mag = c + 0.1 + 4.0 * (k / 2) / double(half);
        s.push_back(k % 2 ? -mag : mag);
    }
    return s;
}

namespace {

cplx derivative(const std::function<cplx(cplx)>& f, cplx z, double h) {
    return (-f(z + 2.0 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2.0 * h)) / (12.0 * h);
}

template <class F>
CheckResult timed(const std::string& name, F&& body) {
    CheckResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.status = CheckStatus::Fail;
        r.detail = std::string("error: ") + e.what();
    }
    r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace

std::vector<CheckResult> identity_suite(const Scattering& S, double tol) {
    const double c = S.c();
    const std::vector<double> grid = identity_grid(c);
    std::vector<CheckResult> out;
    out.push_back(timed("identity.transmission", [&](CheckResult& r) {
        double worst = 0.0;
        for (double s : grid) {
            const Coefficients kp = S.coefficients(s), km = S.coefficients(-s);
            const cplx lhs = 1.0 - (kp.b / kp.a) * (km.b / km.a);
            const cplx rhs = 1.0 / (kp.A * km.a);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
        r.value = worst;
        r.tolerance = tol;
        r.status = grade(worst, tol);
        r.detail = "1 - R_l(z)R_l(-z) = 1/(A(z)a(-z)) on " + std::to_string(grid.size()) + " points";
    }));
    out.push_back(timed("identity.b_relation", [&](CheckResult& r) {
        double worst = 0.0;
        for (double s : grid) {
            const Coefficients kp = S.coefficients(s), km = S.coefficients(-s);
            worst = std::max(worst, std::abs(kp.B + km.b * s / lambda_map(s, c)));
        }
        r.value = worst;
        r.tolerance = tol;
        r.status = grade(worst, tol);
        r.detail = "B(z) = -b(-z) z/lambda(z)";
    }));
    out.push_back(timed("identity.a_relation", [&](CheckResult& r) {
        double worst = 0.0;
        for (double s : grid) {
            const Coefficients k = S.coefficients(s);
            worst = std::max(worst, std::abs(k.A - k.a * s / lambda_map(s, c)));
        }
        r.value = worst;
        r.tolerance = tol;
        r.status = grade(worst, tol);
        r.detail = "A(z) = a(z) z/lambda(z)";
    }));
    out.push_back(timed("identity.reflection_at_zero", [&](CheckResult& r) {
        r.value = std::abs(S.reflection_left(0.0) + 1.0);
        r.tolerance = tol;
        r.status = grade(r.value, tol);
        r.detail = "R_l(0) = -1";
    }));
    out.push_back(timed("identity.reflection_at_branch", [&](CheckResult& r) {
        r.tolerance = tol;
        if (c == 0.0) {
            r.status = CheckStatus::Skipped;
            r.detail = "no branch points for c = 0";
            return;
        }
        r.value = std::max(std::abs(S.reflection_right_continued(c) + 1.0),
                           std::abs(S.reflection_right_continued(-c) + 1.0));
        r.status = grade(r.value, tol);
        r.detail = "R_r(+-c) = -1";
    }));
    out.push_back(timed("identity.norming", [&](CheckResult& r) {
        r.tolerance = tol;
        if (S.poles().empty()) {
            r.status = CheckStatus::Skipped;
            r.detail = "no discrete spectrum";
            return;
        }
        double worst = 0.0;
        for (const Pole& p : S.poles()) {
            const double h = 1e-3 * std::max(1.0, std::abs(p.z));
            const cplx da = derivative([&](cplx z) { return S.a(z); }, p.z, h);
            const cplx dA = derivative([&](cplx z) { return S.A(z); }, p.z, h);
            worst = std::max(worst, std::abs(p.norming_left * p.norming_right * da * dA - 1.0));
        }
        r.value = worst;
        r.status = grade(worst, tol);
        r.detail = "c(z_j) C(z_j) a'(z_j) A'(z_j) = 1 over " + std::to_string(S.poles().size()) + " poles";
    }));
    return out;
}

CheckResult pure_step_oracle(const Scattering& S, double tol) {
    return timed("oracle.pure_step", [&](CheckResult& r) {
        r.tolerance = tol;
        if (!S.data().is_pure_step()) {
            r.status = CheckStatus::Skipped;
            r.detail = "closed forms exist for the pure step only";
            return;
        }
        const double c = S.c();
        double worst = 0.0;
        for (double s : identity_grid(c)) {
            const cplx lam = lambda_map(s, c);
            const Coefficients k = S.coefficients(s);
            worst = std::max({worst, std::abs(k.a - (s + lam) / (2.0 * s)), std::abs(k.b - (s - lam) / (2.0 * s)),
                              std::abs(k.A - 0.5 * (1.0 + s / lam)), std::abs(k.B - 0.5 * (1.0 - s / lam))});
        }
        r.value = worst;
        r.status = grade(worst, tol);
        r.detail = "a, b, A, B against closed forms on 20 points";
    });
}

std::vector<CheckResult> rh_consistency(const Scattering& S, const SolveOptions& opt, double x, double t, double tol) {
    std::vector<CheckResult> out;
    const DeformationPlan plan = select_region(x - 6.0 * opt.boost * t, t, S, opt.plan);
    const RhProblem P = build_problem(S, plan, opt);
    const Contour& C = P.op->contour();
    const std::string where = "at x = " + format_number(x) + ", t = " + format_number(t) + " (" +
                              construction_name(plan.construction) + ")";
    out.push_back(timed("rh.jump_determinant", [&](CheckResult& r) {
        double worst = 0.0;
        for (int i = 0; i < C.size(); ++i) {
            if (C.role(i) == NodeRole::Zero) continue;
            worst = std::max(worst, std::abs(det2(P.G[i]) - 1.0));
        }
        r.value = worst;
        r.tolerance = tol;
        r.status = grade(worst, tol);
        r.detail = "max |det G - 1| over " + std::to_string(C.size()) + " nodes " + where;
    }));
    out.push_back(timed("rh.plemelj", [&](CheckResult& r) {
        const RhpSolution sol = solve_rhp(*P.op, P.G);
        double worst = 0.0, umax = 0.0;
        std::vector<cplx> row;
        for (size_t k = 0; k < C.pieces().size(); ++k) {
            const Piece& pc = C.pieces()[k];
            row.resize(pc.n);
            for (double tt : {-0.61, 0.137, 0.77}) {
                const Row2 jump = boundary_value(*P.op, sol.U, int(k), tt, 1) - boundary_value(*P.op, sol.U, int(k), tt, -1);
                cheb::bary_row(pc.n, tt, row.data());
                Row2 dens = Row2::Zero();
                for (int j = 0; j < pc.n; ++j) dens += row[j] * sol.U.row(C.offset(int(k)) + j);
                worst = std::max(worst, (jump - dens).cwiseAbs().maxCoeff());
                umax = std::max(umax, dens.cwiseAbs().maxCoeff());
            }
        }
        r.value = worst / std::max(1.0, umax);
        r.tolerance = tol;
        r.status = grade(r.value, tol);
        r.detail = "N+ - N- against the density off the nodes " + where;
    }));
    return out;
}

// ---- Reconstruction -----------------------------------------------------------------------------

RoundTrip roundtrip_t0(const ScatteringFile& f, const std::vector<double>& xs, double exclusion, int threads) {
    const InitialData& d = f.scattering->data();
    std::vector<double> jumps = d.breakpoints;
    if (!d.smooth) jumps.push_back(0.0);
    std::vector<double> keep;
    for (double x : xs) {
        bool near = false;
        for (double b : jumps) near = near || std::abs(x - b) < exclusion;
        if (!near) keep.push_back(x);
    }
    RoundTrip rt;
    rt.points = int(keep.size());
    rt.sup_error = 0.0;
    const std::vector<FieldSample> s = run_sweep(f, keep, {0.0}, threads);
    for (const FieldSample& p : s) {
        if (!p.ok()) {
            ++rt.failures;
            rt.sup_error = INFINITY;
            rt.x_worst = p.x;
            continue;
        }
        const double e = std::abs(p.u - (d.initial(p.x) + f.solve.boost));
        if (!(e <= rt.sup_error)) {
            if (std::isfinite(rt.sup_error)) rt.x_worst = p.x;
            rt.sup_error = std::max(rt.sup_error, e);
        }
    }
    return rt;
}

namespace {

Construction left_construction(const Scattering& S, double x, double t, const SolveOptions& opt) {
    const DeformationPlan p = select_region(x - 6.0 * opt.boost * t, t, S, opt.plan);
    if (p.construction != Construction::Right) return p.construction;
    return t > 0.0 ? Construction::LeftDelta : Construction::LeftLens;
}

}  // namespace

double cross_region(const Scattering& S, double x, double t, const SolveOptions& opt) {
    const PointSolution r = solve_point_with(S, x, t, Construction::Right, opt);
    const PointSolution l = solve_point_with(S, x, t, left_construction(S, x, t, opt), opt);
    return std::abs(r.u - l.u);
}

double deformation_equivalence(const Scattering& S, double x, double t, const SolveOptions& opt) {
    if (!std::isfinite(S.decay_cutoff()))
        throw DomainError("the undeformed problem needs decaying reflection coefficients");
    const PointSolution plain = solve_point_with(S, x, t, Construction::LeftPlain, opt);
    const PointSolution def = solve_point_with(S, x, t, left_construction(S, x, t, opt), opt);
    return std::abs(plain.moment - def.moment);
}

double boost_deviation(const ScatteringFile& f, double a, const std::vector<double>& xs, double t, int threads) {
    ScatteringFile g = f;
    g.solve.boost += a;
    std::vector<double> shifted;
    for (double x : xs) shifted.push_back(x - 6.0 * a * t);
    const std::vector<FieldSample> ub = run_sweep(g, xs, {t}, threads);
    const std::vector<FieldSample> u0 = run_sweep(f, shifted, {t}, threads);
    double worst = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double e = std::abs(ub[i].u - (u0[i].u + a));
        if (!std::isfinite(e)) return INFINITY;
        worst = std::max(worst, e);
    }
    return worst;
}

double parabolic_argmax(const std::vector<double>& xs, const std::vector<double>& us) {
    if (xs.empty() || xs.size() != us.size()) throw DomainError("parabolic_argmax: size mismatch");
    size_t k = 0;
    for (size_t i = 1; i < us.size(); ++i)
        if (us[i] > us[k] || std::isnan(us[k])) k = i;
    if (k == 0 || k + 1 == us.size()) return xs[k];
    const double den = us[k - 1] - 2.0 * us[k] + us[k + 1];
    if (!(den < 0.0)) return xs[k];
    const double h = 0.5 * (xs[k + 1] - xs[k - 1]);
    return xs[k] + 0.5 * h * (us[k - 1] - us[k + 1]) / den;
}

SolitonTrack soliton_track(const ScatteringFile& f, const std::vector<double>& ts, double tol, int threads) {
    SolitonTrack tr;
    const Scattering& S = *f.scattering;
    if (S.poles().empty()) {
        tr.detail = "no discrete spectrum";
        return tr;
    }
    if (ts.size() < 2) throw DomainError("soliton_track needs at least two times");
    cplx z = S.poles().front().z;
    for (const Pole& p : S.poles())
        if (p.z.imag() > z.imag()) z = p.z;
    const double c = S.c(), a = f.solve.boost, kappa2 = z.imag() * z.imag();
    tr.predicted = (-4.0 * z * z).real() + 4.0 * c * c;
    // velocity in the file frame; the frame with vanishing right background is the boost a = c^2
    const double v_file = tr.predicted - 6.0 * c * c + 6.0 * a;
    const InitialData& d = S.data();
    double x0 = 0.0, best = -INFINITY;
    for (double x = -d.L; x <= d.L; x += 0.01) {
        if (d.initial(x) > best) {
            best = d.initial(x);
            x0 = x;
        }
    }
    tr.ts = ts;
    std::ostringstream det;
    bool separable = true;
    int failed = 0;
    for (double t : ts) {
        const double xc = x0 + v_file * t;
        std::vector<double> coarse;
        for (int i = -10; i <= 10; ++i) coarse.push_back(xc + 0.25 * i);
        std::vector<double> uc;
        for (const FieldSample& s : run_sweep(f, coarse, {t}, threads)) {
            failed += !s.ok();
            uc.push_back(s.u);
        }
        const size_t k = size_t(std::max_element(uc.begin(), uc.end(), [](double p, double q) {
                                    return std::isnan(p) || (!std::isnan(q) && p < q);
                                }) - uc.begin());
        const double lo = *std::min_element(uc.begin(), uc.end());
        if (k == 0 || k + 1 == uc.size() || !(uc[k] - lo > 0.5 * kappa2)) separable = false;
        std::vector<double> fine;
        for (int i = -2; i <= 2; ++i) fine.push_back(coarse[k] + 0.05 * i);
        std::vector<double> uf;
        for (const FieldSample& s : run_sweep(f, fine, {t}, threads)) {
            failed += !s.ok();
            uf.push_back(s.u);
        }
        const double xp = parabolic_argmax(fine, uf);
        tr.peaks.push_back(xp);
        det << "t=" << t << ": peak " << format_number(xp) << "; ";
    }
    // least-squares slope
    double mt = 0.0, mx = 0.0;
    for (size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        mx += tr.peaks[i];
    }
    mt /= ts.size();
    mx /= ts.size();
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < ts.size(); ++i) {
        num += (ts[i] - mt) * (tr.peaks[i] - mx);
        den += (ts[i] - mt) * (ts[i] - mt);
    }
    tr.measured = num / den - v_file + tr.predicted;
    tr.relative_error = std::abs(tr.measured - tr.predicted) / std::abs(tr.predicted);
    det << "frame velocity " << format_number(num / den);
    tr.detail = det.str();
    tr.status = separable ? grade(tr.relative_error, tol) : CheckStatus::Inconclusive;
    if (!separable) tr.detail += "; peak not separable from the background";
    if (failed > 0) {
        tr.status = CheckStatus::Fail;
        tr.detail += "; " + std::to_string(failed) + " point solves failed";
    }
    return tr;
}

// ---- Suite --------------------------------------------------------------------------------------

ValidationReport validate(const ScatteringFile& f, const ValidationOptions& opt) {
    const Scattering& S = *f.scattering;
    const double c = S.c();
    const bool smooth = std::isfinite(S.decay_cutoff());
    ValidationReport rep;
    auto full_only = [&](const std::string& name) {
        CheckResult r;
        r.name = name;
        r.detail = "runs with --full";
        return r;
    };

    rep.checks.push_back(timed("scattering.genericity", [&](CheckResult& r) {
        const GenericityReport& g = S.genericity();
        r.value = g.min_abs_a;
        r.status = g.generic ? CheckStatus::Pass : CheckStatus::Fail;
        r.detail = g.message.empty() ? "generic" : g.message;
    }));
    rep.checks.push_back(pure_step_oracle(S));
    for (CheckResult& r : identity_suite(S)) rep.checks.push_back(r);

    const double xr = -1.0, trh = 0.5;
    try {
        for (CheckResult& r : rh_consistency(S, f.solve, xr, trh)) rep.checks.push_back(r);
    } catch (const std::exception& e) {
        for (const char* n : {"rh.jump_determinant", "rh.plemelj"}) {
            CheckResult r;
            r.name = n;
            r.status = CheckStatus::Fail;
            r.detail = std::string("error: ") + e.what();
            rep.checks.push_back(r);
        }
    }

    rep.checks.push_back(timed("roundtrip_t0", [&](CheckResult& r) {
        const int n = opt.full ? 41 : 9;
        std::vector<double> xs;
        for (int i = 0; i < n; ++i) xs.push_back(-8.0 + 16.0 * i / (n - 1) + 0.0137);
        const RoundTrip rt = roundtrip_t0(f, xs, 0.5, opt.threads);
        r.value = rt.sup_error;
        r.tolerance = smooth ? 1e-6 : 1e-5;
        r.status = grade(rt.sup_error, r.tolerance);
        r.detail = std::to_string(rt.points) + " points, worst at x = " + format_number(rt.x_worst) +
                   (rt.failures ? ", " + std::to_string(rt.failures) + " failed" : "");
    }));

    rep.checks.push_back(timed("cross_region", [&](CheckResult& r) {
        const double x = smooth ? 1.0 : 0.0, t = smooth ? 1.0 : 0.5;
        r.value = cross_region(S, x + 6.0 * f.solve.boost * t, t, f.solve);
        r.tolerance = smooth ? 1e-5 : 1e-6;
        r.status = grade(r.value, r.tolerance);
        r.detail = "right vs left normalization at x_n = " + format_number(x) + ", t = " + format_number(t);
    }));

    if (!opt.full) {
        for (const char* n : {"deformation_equivalence", "kdv_residual", "boost", "soliton_track"})
            rep.checks.push_back(full_only(n));
        return rep;
    }

    rep.checks.push_back(timed("deformation_equivalence", [&](CheckResult& r) {
        r.tolerance = 1e-6;
        if (!smooth) {
            r.status = CheckStatus::Skipped;
            r.detail = "undeformed problem needs decaying reflection coefficients";
            return;
        }
        double worst = 0.0;
        for (auto [x, t] : {std::pair{-0.5, 0.05}, {0.0, 0.0}}) worst = std::max(worst, deformation_equivalence(S, x, t, f.solve));
        r.value = worst;
        r.status = grade(worst, r.tolerance);
        r.detail = "first moment, undeformed vs deformed at (-0.5, 0.05) and (0, 0)";
    }));

    rep.checks.push_back(timed("kdv_residual", [&](CheckResult& r) {
        const double t = 1.0, cc = std::max(c * c, 1.0);
        const FieldFn u = field_of(f, opt.threads);
        double worst = 0.0;
        CheckStatus st = CheckStatus::Pass;
        std::ostringstream det;
        for (double xc : {-6.0 * cc * t, -0.5 * cc * t}) {
            const double x = xc + 6.0 * f.solve.boost * t;
            const KdvResidual k = kdv_residual(u, x - 0.1, x + 0.1, t, 0.02, 1e-3);
            worst = std::max(worst, std::isfinite(k.relative) ? k.relative : INFINITY);
            if (k.status == CheckStatus::Fail) st = CheckStatus::Fail;
            else if (k.status == CheckStatus::Inconclusive && st == CheckStatus::Pass) st = CheckStatus::Inconclusive;
            det << "window at " << format_number(x) << ": " << format_number(k.relative) << " (" << status_name(k.status)
                << "); ";
        }
        r.value = worst;
        r.tolerance = 1e-4;
        r.status = st;
        r.detail = det.str() + "t = 1, h = 0.02, dt = 1e-3";
    }));

    rep.checks.push_back(timed("boost", [&](CheckResult& r) {
        const double a = c > 0.0 ? -c * c : -1.0, t = 0.5;
        std::vector<double> xs;
        for (double x : {-4.0, -1.5, 0.25, 2.0}) xs.push_back(x + 6.0 * (f.solve.boost + a) * t);
        r.value = boost_deviation(f, a, xs, t, opt.threads);
        r.tolerance = 1e-6;
        r.status = grade(r.value, r.tolerance);
        r.detail = "u_a(x,t) - u(x - 6at, t) - a with a = " + format_number(a) + " at t = 0.5";
    }));

    rep.checks.push_back(timed("soliton_track", [&](CheckResult& r) {
        const double tol = c == 0.0 ? 0.05 : 0.10;
        const SolitonTrack tr = soliton_track(f, {1.0, 2.0, 3.0}, tol, opt.threads);
        r.status = tr.status;
        r.value = tr.relative_error;
        r.tolerance = tol;
        r.detail = tr.detail;
        if (std::isfinite(tr.measured))
            r.detail += "; measured " + format_number(tr.measured) + " vs -4z^2+4c^2 = " + format_number(tr.predicted);
    }));
    return rep;
}

}  // namespace stepkdv
