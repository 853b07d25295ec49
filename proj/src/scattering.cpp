#include "stepkdv/scattering.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "stepkdv/chebyshev.hpp"

namespace stepkdv {

namespace odeint = boost::numeric::odeint;

namespace {

cplx normalize_zero(cplx z) {
    // treat -0.0 imaginary parts as +0.0 so that cut points are always taken from above
    if (z.imag() == 0.0) return {z.real(), 0.0};
    return z;
}

using State = std::array<cplx, 2>;

// N'' = 2 i kappa N' - q N integrated from x0 to x1 with N(x0) = 1, N'(x0) = 0.
State integrate_renormalized(const InitialData& d, cplx kappa, double x0, double x1,
                             const std::vector<double>& stops, const JostOptions& opt) {
    State y{cplx(1.0), cplx(0.0)};
    // segment ends are nudged inward so that one-sided limits are used at discontinuities
    double lo = 0.0, hi = 0.0;
    auto rhs = [&](const State& s, State& ds, double x) {
        if (x <= lo) x = std::nextafter(lo, hi);
        if (x >= hi) x = std::nextafter(hi, lo);
        ds[0] = s[1];
        ds[1] = 2.0 * I * kappa * s[1] - d.u0(x) * s[0];
    };
    using Stepper = odeint::runge_kutta_fehlberg78<State, double, State, double>;
    std::vector<double> pts;
    pts.push_back(x0);
    for (double b : stops)
        if ((b - x0) * (b - x1) < 0.0) pts.push_back(b);
    pts.push_back(x1);
    if (x1 < x0) {
        std::sort(pts.begin() + 1, pts.end() - 1, std::greater<double>());
    } else {
        std::sort(pts.begin() + 1, pts.end() - 1);
    }
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
        const double a = pts[k], b = pts[k + 1];
        if (a == b) continue;
        lo = std::min(a, b);
        hi = std::max(a, b);
        // step guess resolves the oscillation of the dominated mode
        const double h0 = std::copysign(std::min(0.05, 0.5 / (1.0 + std::abs(kappa))), b - a);
        odeint::integrate_adaptive(odeint::make_controlled(opt.atol, opt.rtol, Stepper()), rhs, y, a, b, h0);
    }
    return y;
}

}  // namespace

cplx lambda_map(cplx z, double c, int side) {
    if (z.imag() == 0.0 && std::abs(z.real()) < c) {
        if (side == 0) throw DomainError("lambda on the cut requires a side");
        const double r = std::sqrt(c * c - z.real() * z.real());
        return cplx(0.0, side > 0 ? r : -r);
    }
    return std::sqrt(z - c) * std::sqrt(z + c);
}

cplx lambda_up(cplx z, double c) {
    z = normalize_zero(z);
    if (z.imag() == 0.0 && std::abs(z.real()) < c) return lambda_map(z, c, 1);
    return std::sqrt(z - c) * std::sqrt(z + c);
}

cplx phase_left(cplx z, double x, double t) { return std::exp(-2.0 * I * z * x - 8.0 * I * z * z * z * t); }

cplx phase_right(cplx z, double c, double x, double t) {
    const cplx lam = lambda_up(z, c);
    return std::exp(2.0 * I * lam * x + 8.0 * I * phi_cubic(lam, c) * t);
}

JostValues solve_jost(const InitialData& d, cplx z, JostSide side, const JostOptions& opt) {
    JostValues J;
    J.z = normalize_zero(z);
    J.lambda = lambda_up(J.z, d.c);
    const bool trivial = d.is_pure_step();
    // f = N, f' = N' - i kappa N
    auto one = [&](cplx kappa, double x0) {
        State y{cplx(1.0), cplx(0.0)};
        if (!trivial && x0 != 0.0) y = integrate_renormalized(d, kappa, x0, 0.0, d.breakpoints, opt);
        return std::pair<cplx, cplx>{y[0], y[1] - I * kappa * y[0]};
    };
    if (side != JostSide::Right) {
        std::tie(J.phi_m, J.dphi_m) = one(J.z, -d.L);
        std::tie(J.phi_p, J.dphi_p) = one(-J.z, -d.L);
    }
    if (side != JostSide::Left) {
        std::tie(J.psi_p, J.dpsi_p) = one(-J.lambda, d.L);
        std::tie(J.psi_m, J.dpsi_m) = one(J.lambda, d.L);
    }
    return J;
}

Scattering::Scattering(InitialData data, ScatteringOptions opt) : data_(std::move(data)), opt_(opt) {
    if (!data_.u0) throw DomainError("initial data without a profile");
}

JostValues Scattering::jost(cplx z) const {
    z = normalize_zero(z);
    const std::pair<double, double> key{z.real(), z.imag()};
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    JostValues J = solve_jost(data_, z, JostSide::Both, opt_.jost);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cache_.size() > 2000000) cache_.clear();
    cache_.emplace(key, J);
    return J;
}

cplx Scattering::w_mp(cplx z) const {
    const JostValues J = jost(z);
    return wronskian(J.phi_m, J.dphi_m, J.psi_p, J.dpsi_p);
}

Coefficients Scattering::coefficients(cplx z) const {
    if (z == cplx(0.0)) throw DomainError("scattering coefficients are singular at z = 0");
    const JostValues J = jost(z);
    Coefficients k;
    const cplx wmp = wronskian(J.phi_m, J.dphi_m, J.psi_p, J.dpsi_p);
    const cplx wpp = wronskian(J.phi_p, J.dphi_p, J.psi_p, J.dpsi_p);
    const cplx wmm = wronskian(J.psi_m, J.dpsi_m, J.phi_m, J.dphi_m);
    k.a = wmp / (2.0 * I * J.z);
    k.b = -wpp / (2.0 * I * J.z);
    k.A = wmp / (2.0 * I * J.lambda);
    k.B = wmm / (2.0 * I * J.lambda);
    return k;
}

cplx Scattering::a(cplx z) const { return w_mp(z) / (2.0 * I * normalize_zero(z)); }

cplx Scattering::A(cplx z) const { return w_mp(z) / (2.0 * I * lambda_up(z, data_.c)); }

cplx Scattering::reflection_left(cplx z) const {
    z = normalize_zero(z);
    if (std::abs(z.real()) > cutoff_) return 0.0;
    if (z.imag() == 0.0 && std::abs(z.real()) < data_.c) {
        return -w_mp(-z.real()) / w_mp(z);
    }
    const JostValues J = jost(z);
    const cplx wmp = wronskian(J.phi_m, J.dphi_m, J.psi_p, J.dpsi_p);
    const cplx wpp = wronskian(J.phi_p, J.dphi_p, J.psi_p, J.dpsi_p);
    return -wpp / wmp;
}

cplx Scattering::reflection_right_continued(cplx z) const {
    z = normalize_zero(z);
    if (std::abs(z.real()) > cutoff_) return 0.0;
    const JostValues J = jost(z);
    const cplx wmp = wronskian(J.phi_m, J.dphi_m, J.psi_p, J.dpsi_p);
    const cplx wmm = wronskian(J.psi_m, J.dpsi_m, J.phi_m, J.dphi_m);
    return wmm / wmp;
}

cplx Scattering::cut_jump(double s) const {
    const double c = data_.c;
    if (!(std::abs(s) <= c)) throw DomainError("cut_jump is defined on [-c, c]");
    const cplx lam = lambda_map(s, c, 1);
    return 4.0 * s * lam / (w_mp(-s) * w_mp(s));
}

cplx Scattering::reflection_right(double s) const {
    const double c = data_.c;
    if (std::abs(s) >= c) return reflection_right_continued(s);
    if (!matching_.valid) throw DomainError("cut matching data not available");
    const double r = std::sqrt(c * c - s * s);
    const cplx lam = cplx(0.0, r);
    const cplx ell = matching_.alpha * s * s + matching_.beta * r;
    // (1/2 + l/(s r)) * 4 s lam/(W(-s) W(s)), written to stay finite at s = 0
    return (0.5 * s + ell / r) * 4.0 * lam / (w_mp(-s) * w_mp(s));
}

double Scattering::strip_bound() const {
    double h = std::min(data_.nu, opt_.strip_height_max);
    for (size_t j = 0; j < poles_.size(); ++j) {
        double gap = poles_[j].z.imag();
        for (size_t k = 0; k < poles_.size(); ++k)
            if (k != j) gap = std::min(gap, std::abs(poles_[j].z - poles_[k].z));
        const double r = 0.5 * gap;
        h = std::min(h, poles_[j].z.imag() - r);
    }
    return h;
}

double Scattering::estimate_decay_cutoff() const {
    if (!data_.smooth) return INFINITY;
    const double h = strip_bound();
    const double c = data_.c;
    for (double s : {6.0, 8.0, 10.0, 12.0, 16.0, 20.0, 24.0, 32.0, 40.0}) {
        if (s <= c + 1.0) continue;
        bool small = true;
        for (double x : {s, -s})
            for (double y : {0.0, h}) {
                const JostValues J = solve_jost(data_, cplx(x, y), JostSide::Both, opt_.jost);
                const cplx wmp = wronskian(J.phi_m, J.dphi_m, J.psi_p, J.dpsi_p);
                const cplx wpp = wronskian(J.phi_p, J.dphi_p, J.psi_p, J.dpsi_p);
                const cplx wmm = wronskian(J.psi_m, J.dpsi_m, J.phi_m, J.dphi_m);
                // off the axis the Volterra solve loses e^{2|y|L} relative accuracy; below that floor R is noise
                const double tol = std::max(opt_.decay_tol, 1e3 * std::numeric_limits<double>::epsilon() * std::exp(2.0 * y * data_.L));
                if (std::abs(wpp / wmp) > tol || std::abs(wmm / wmp) > tol) small = false;
            }
        if (small) return s;
    }
    return INFINITY;
}

std::vector<double> chebyshev_eigenvalues(const InitialData& d, int n, double X) {
    const auto t = cheb::lobatto(n);
    const Eigen::MatrixXd D = *cheb::diff_matrix(n) / X;
    const Eigen::MatrixXd D2 = D * D;
    const int m = n - 2;
    Eigen::MatrixXd H = -D2.block(1, 1, m, m);
    for (int i = 0; i < m; ++i) H(i, i) -= d.initial(X * t[i + 1]);
    Eigen::EigenSolver<Eigen::MatrixXd> es(H, false);
    std::vector<double> out;
    for (int i = 0; i < m; ++i) {
        const cplx e = es.eigenvalues()(i);
        if (e.real() < -1e-10 && std::abs(e.imag()) < 1e-6 * std::max(1.0, std::abs(e.real())))
            out.push_back(e.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<cplx> Scattering::discrete_spectrum() const {
    if (data_.is_pure_step()) return {};
    const double X = opt_.spectrum_domain > 0.0 ? opt_.spectrum_domain : std::max(data_.L, 10.0) + 15.0;
    int n = opt_.spectrum_n;
    std::vector<double> E1 = chebyshev_eigenvalues(data_, n, X);
    std::vector<double> accepted;
    for (int round = 0; round < 3; ++round) {
        const std::vector<double> E2 = chebyshev_eigenvalues(data_, 2 * n, X);
        accepted.clear();
        bool all = true;
        for (double e : E2) {
            bool ok = false;
            for (double f : E1)
                if (std::abs(e - f) <= opt_.spectrum_tol * std::max(1.0, std::abs(e))) ok = true;
            if (ok) accepted.push_back(e);
            else all = false;
        }
        if (all && E1.size() == E2.size()) break;
        E1 = E2;
        n *= 2;
    }
    // refine each eigenvalue as a zero of W(phi^m, psi^p) along the imaginary axis
    std::vector<cplx> zs;
    for (double e : accepted) {
        cplx z0(0.0, std::sqrt(-e));
        cplx z1 = z0 * (1.0 + 1e-7);
        cplx f0 = w_mp(z0), f1 = w_mp(z1);
        bool conv = false;
        for (int it = 0; it < 40; ++it) {
            if (f1 == f0) break;
            const cplx z2 = z1 - f1 * (z1 - z0) / (f1 - f0);
            z0 = z1;
            f0 = f1;
            z1 = cplx(0.0, z2.imag());
            f1 = w_mp(z1);
            if (std::abs(z1 - z0) < 1e-14 * std::abs(z1)) {
                conv = true;
                break;
            }
        }
        if (!conv || !(z1.imag() > 0.0)) throw NumericalError("eigenvalue refinement did not converge");
        bool dup = false;
        for (cplx w : zs)
            if (std::abs(w - z1) < 1e-8) dup = true;
        if (!dup) zs.push_back(z1);
    }
    std::sort(zs.begin(), zs.end(), [](cplx p, cplx q) { return p.imag() > q.imag(); });
    return zs;
}

Pole Scattering::norming_constants(cplx zj) const {
    const JostValues J = jost(zj);
    // psi^p(z_j; x) = b_j phi^m(z_j; x): least-squares fit from the values and derivatives at x = 0
    const cplx bj = (J.psi_p * std::conj(J.phi_m) + J.dpsi_p * std::conj(J.dphi_m)) /
                    (std::norm(J.phi_m) + std::norm(J.dphi_m));
    const double h = 1e-3 * std::max(1.0, std::abs(zj));
    auto af = [&](cplx z) { return a(z); };
    const cplx da = (-af(zj + 2.0 * h) + 8.0 * af(zj + h) - 8.0 * af(zj - h) + af(zj - 2.0 * h)) / (12.0 * h);
    if (std::abs(da) < 1e-10) throw NumericalError("a'(z_j) vanishes: pole is not simple");
    const cplx dA = da * zj / lambda_up(zj, data_.c);
    Pole p;
    p.z = zj;
    p.norming_left = bj / da;
    p.norming_right = 1.0 / (bj * dA);
    return p;
}

MatchingData Scattering::cut_matching_data() const {
    MatchingData m;
    const double c = data_.c;
    if (!(c > 0.0)) return m;
    const int K = opt_.fit_points;
    std::vector<double> eps(K);
    for (int k = 0; k < K; ++k) eps[k] = opt_.fit_radius * c * std::pow(opt_.fit_ratio, k);
    auto fit = [&](const std::function<cplx(double)>& f, double& resid) {
        // least squares in powers of sqrt(eps): eps^{1/2}, eps, ..., eps^3
        const int P = 6;
        Eigen::MatrixXcd V(K, P);
        Eigen::VectorXcd y(K);
        for (int k = 0; k < K; ++k) {
            const double r = std::sqrt(eps[k]);
            double pw = r;
            for (int q = 0; q < P; ++q, pw *= r) V(k, q) = pw;
            y(k) = f(eps[k]);
        }
        const Eigen::VectorXd colscale = V.cwiseAbs().colwise().maxCoeff().transpose();
        const Eigen::MatrixXcd Vs = V * colscale.cwiseInverse().asDiagonal();
        Eigen::VectorXcd coef = Vs.colPivHouseholderQr().solve(y);
        resid = (Vs * coef - y).lpNorm<Eigen::Infinity>() / std::max(1e-300, y.lpNorm<Eigen::Infinity>());
        coef = coef.cwiseQuotient(colscale.cast<cplx>());
        return coef;
    };
    double r1 = 0.0, r2 = 0.0;
    const auto k = fit([&](double e) { return cut_jump(-c + e); }, r1);
    const auto g = fit([&](double e) { return reflection_right_continued(-c - e) + 1.0; }, r2);
    m.kappa1 = k(0);
    m.kappa2 = k(1);
    m.gamma = g(0);
    m.fit_residual = std::max(r1, r2);
    const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
    if (std::abs(m.kappa1) < opt_.genericity_tol * scale) return m;
    const double sc = std::sqrt(c);
    m.alpha = std::sqrt(2.0) / (m.kappa1 * sc);
    m.beta = (c / m.kappa1) * (0.5 * m.kappa1 - m.kappa2 * m.alpha * sc / std::sqrt(2.0) + I * m.gamma);
    m.valid = true;
    return m;
}

GenericityReport Scattering::genericity_check() const {
    GenericityReport g;
    const double c = data_.c;
    auto rel = [](cplx f, cplx df, cplx h, cplx dh) {
        const double scale = std::abs(f) * std::abs(dh) + std::abs(df) * std::abs(h);
        return scale > 0.0 ? std::abs(wronskian(f, df, h, dh)) / scale : 0.0;
    };
    if (c > 0.0) {
        const JostValues Jc = jost(c);
        g.wronskian_c = rel(Jc.phi_m, Jc.dphi_m, Jc.psi_p, Jc.dpsi_p);
        const JostValues J0 = jost(0.0);
        g.wronskian_0 = rel(J0.psi_m, J0.dpsi_m, J0.phi_p, J0.dphi_p);
    } else {
        g.wronskian_c = g.wronskian_0 = 1.0;
    }
    g.min_abs_a = INFINITY;
    for (int k = 0; k <= 40; ++k) {
        const double s = c + 0.01 + 0.25 * k;
        g.min_abs_a = std::min({g.min_abs_a, std::abs(a(s)), std::abs(a(-s))});
    }
    g.min_pole_gap = INFINITY;
    for (size_t j = 0; j < poles_.size(); ++j)
        for (size_t k = j + 1; k < poles_.size(); ++k)
            g.min_pole_gap = std::min(g.min_pole_gap, std::abs(poles_[j].z - poles_[k].z));
    const double tol = opt_.genericity_tol;
    g.generic = true;
    if (c > 0.0 && g.wronskian_c < tol) {
        g.generic = false;
        g.message += "W(phi^m(c), psi^p(c)) vanishes; ";
    }
    if (c > 0.0 && g.wronskian_0 < tol) {
        g.generic = false;
        g.message += "W(psi^m(0), phi^p(0)) vanishes; ";
    }
    if (g.min_abs_a < tol) {
        g.generic = false;
        g.message += "a(s) vanishes on the real line; ";
    }
    if (g.min_pole_gap < tol) {
        g.generic = false;
        g.message += "repeated poles; ";
    }
    return g;
}

void Scattering::analyze() {
    poles_.clear();
    for (cplx z : discrete_spectrum()) poles_.push_back(norming_constants(z));
    cutoff_ = estimate_decay_cutoff();
    matching_ = cut_matching_data();
    generic_ = genericity_check();
}

}  // namespace stepkdv
