#include "stepkdv/deformation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace stepkdv {

std::string region_name(Region r) {
    switch (r) {
        case Region::Right: return "right";
        case Region::LeftDispersive: return "left-dispersive";
        case Region::Bridged: return "bridged";
    }
    return "?";
}

std::string construction_name(Construction c) {
    switch (c) {
        case Construction::Right: return "right";
        case Construction::LeftLens: return "left-lens";
        case Construction::LeftDelta: return "left-delta";
        case Construction::LeftPlain: return "left-plain";
    }
    return "?";
}

cplx theta_right(cplx z, double c, double x, double t) {
    const cplx lam = lambda_up(z, c);
    return 2.0 * I * lam * x + 8.0 * I * phi_cubic(lam, c) * t;
}

namespace {

bool is_left(Construction c) { return c != Construction::Right; }

double quantize_down(double h, double base) {
    // largest base * 0.8^k not above h
    if (h >= base) return base;
    const int k = int(std::ceil(std::log(h / base) / std::log(0.8) - 1e-12));
    return base * std::pow(0.8, k);
}

// R_l(-z)/T(z) = b(-z) a(z) z/lambda(z), continued into the upper half-plane.
cplx lens_coefficient_u(const Scattering& S, cplx z) {
    if (std::abs(z.real()) > S.decay_cutoff()) return 0.0;
    const JostValues Jm = S.jost(-z);
    const cplx wpp = wronskian(Jm.phi_p, Jm.dphi_p, Jm.psi_p, Jm.dpsi_p);
    return -wpp * S.w_mp(z) / (4.0 * z * lambda_up(z, S.c()));
}

// T(s) = 1/(A(s) a(-s)) for real s with s^2 > c^2.
cplx transmission_product(const Scattering& S, double s) {
    if (std::abs(s) > S.decay_cutoff()) return 1.0;
    const cplx lam = lambda_map(s, S.c());
    return 4.0 * s * lam / (S.w_mp(s) * S.w_mp(-s));
}

}  // namespace

Mat2 jump_left(const Scattering& S, double s, double x, double t) {
    const cplx Rp = S.reflection_left(s), Rm = S.reflection_left(-s);
    const cplx e = std::exp(theta_left(s, x, t));
    return mat2(1.0 - Rp * Rm, -Rm * e, Rp / e, 1.0);
}

LensFactors lens_factor_left(const Scattering& S, double s, double x, double t) {
    const cplx Rp = S.reflection_left(s), Rm = S.reflection_left(-s);
    const cplx e = std::exp(theta_left(s, x, t));
    return {mat2(1.0, -Rm * e, 0.0, 1.0), mat2(1.0, 0.0, -Rp / e, 1.0)};
}

LduFactors ldu_factor(const Scattering& S, double s, double x, double t) {
    const double c = S.c();
    if (s * s <= c * c) throw DomainError("LDU factorization requires s^2 > c^2");
    const cplx T = transmission_product(S, s);
    const cplx Rp = S.reflection_left(s), Rm = S.reflection_left(-s);
    const cplx e = std::exp(theta_left(s, x, t));
    LduFactors f;
    f.T = T;
    f.L = mat2(1.0, 0.0, Rp / T / e, 1.0);
    f.D = mat2(T, 0.0, 0.0, 1.0 / T);
    f.U = mat2(1.0, Rm / T * e, 0.0, 1.0);
    return f;
}

Mat2 parametrix_w(cplx z, double c) {
    if (c == 0.0) return identity2();
    const cplx k = lambda_map(z, c) / (z - c);
    return 0.5 * mat2(k + 1.0, 1.0 - k, 1.0 - k, k + 1.0);
}

Mat2 parametrix_w_inv(cplx z, double c) {
    if (c == 0.0) return identity2();
    const cplx q = (z - c) / lambda_map(z, c);
    return 0.5 * mat2(1.0 + q, 1.0 - q, 1.0 - q, 1.0 + q);
}

ScalarDelta::ScalarDelta(const Scattering& S, double z0, int n) : z0_(z0) {
    if (!(z0 > S.c())) throw DomainError("Delta requires z0 > c");
    const double L = std::max(1.0, z0);
    rays_.push_back(make_ray_in(-z0, -1.0, L, n, "delta-"));
    rays_.push_back(make_ray_out(z0, 1.0, L, n, "delta+"));
    for (const Piece& p : rays_) {
        std::vector<cplx> v(p.n, 0.0);
        for (int j = 0; j < p.n; ++j) {
            if (std::isnan(p.s[j].real())) continue;
            v[j] = std::log(transmission_product(S, p.s[j].real()));
        }
        logT_.push_back(std::move(v));
    }
}

cplx ScalarDelta::log_delta(cplx z, int side) const {
    cplx total = 0.0;
    std::vector<cplx> row;
    const bool on_line = std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z));
    for (size_t k = 0; k < rays_.size(); ++k) {
        const Piece& p = rays_[k];
        row.assign(p.n, 0.0);
        const bool on_piece = on_line && (k == 0 ? z.real() < -z0_ : z.real() > z0_);
        if (on_piece) {
            if (side == 0) throw DomainError("Delta on its contour needs a side");
            cauchy::boundary_row_at(p, p.inverse(cplx(z.real(), 0.0)).real(), side, row.data());
        } else {
            cauchy::piece_row(p, z, row.data());
        }
        for (int j = 0; j < p.n; ++j) total += row[j] * logT_[k][j];
    }
    return total;
}

Mat2 residue_to_jump(cplx z, cplx zp, cplx alpha) {
    // N_in = N_out K with K = [[1,0],[-alpha/(z-z'),1]]; + side = exterior: N+ = N- K^{-1}
    return mat2(1.0, 0.0, alpha / (z - zp), 1.0);
}

std::shared_ptr<const CauchyOperator> OperatorCache::get(const std::string& key, const std::vector<Piece>& pieces) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].first == key) {
                ++hits_;
                auto e = entries_[i];
                entries_.erase(entries_.begin() + long(i));
                entries_.insert(entries_.begin(), e);
                return e.second;
            }
        }
        ++misses_;
    }
    auto op = std::make_shared<const CauchyOperator>(std::make_shared<const Contour>(pieces));
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.insert(entries_.begin(), {key, op});
    if (entries_.size() > capacity_) entries_.resize(capacity_);
    return op;
}

// ---------------------------------------------------------------------------------------------
// Region selection

namespace {

struct PoleGeom {
    std::vector<double> radius;
    double min_radius = INFINITY;
};

PoleGeom pole_geometry(const Scattering& S) {
    PoleGeom g;
    const auto& P = S.poles();
    for (size_t j = 0; j < P.size(); ++j) {
        double gap = P[j].z.imag();
        for (size_t k = 0; k < P.size(); ++k)
            if (k != j) gap = std::min(gap, std::abs(P[j].z - P[k].z));
        g.radius.push_back(0.5 * gap);
        g.min_radius = std::min(g.min_radius, 0.5 * gap);
    }
    return g;
}

}  // namespace

namespace {

double lens_base(const Scattering& S, const PlanOptions& opt) {
    const double h = opt.strip_fraction * S.strip_bound();
    return opt.alpha_max > 0.0 ? std::min(h, opt.alpha_max) : h;
}

// half-width of the pieces crossing the branch points
double crossing_width(double c, double h, const PlanOptions& opt) {
    if (opt.epsilon_c > 0.0) return opt.epsilon_c;
    return c > 0.0 ? std::min(0.25 * c, 0.5 * h) : 0.5 * h;
}

}  // namespace

DeformationPlan select_region(double x, double t, const Scattering& S, const PlanOptions& opt) {
    if (!(t >= 0.0)) throw DomainError("t must be non-negative");
    const double c = S.c();
    DeformationPlan p;
    p.x = x;
    p.t = t;
    p.delta = opt.delta;
    p.cutoff = S.decay_cutoff();
    p.alpha = lens_base(S, opt);
    p.alpha_mid = p.alpha;
    p.epsilon_c = crossing_width(c, p.alpha, opt);
    p.angle = t > 0.0 ? pi / 6.0 : pi / 4.0;
    const PoleGeom pg = pole_geometry(S);
    p.pole_radius = pg.min_radius;
    const double g = opt.growth_max;
    const bool smooth = std::isfinite(p.cutoff);

    if (t == 0.0) {
        p.z_star = INFINITY;
        p.region = x >= 0.0 ? Region::Right : Region::LeftDispersive;
        p.construction = x >= 0.0 ? Construction::Right : Construction::LeftLens;
        return p;
    }
    p.z_star = x < 0.0 ? std::sqrt(-x / (12.0 * t)) : 0.0;
    if (x >= -2.0 * c * c * t) {
        p.region = Region::Right;
        p.construction = Construction::Right;
        // bounded growth of e^{theta2} along the lens (line, plus rays for non-smooth data)
        for (int it = 0; it < 60; ++it) {
            const double h = p.alpha;
            const double S0 = smooth ? p.cutoff : c + std::max(1.0, 2.0 * h);
            double worst = -INFINITY;
            for (int k = 0; k <= 400; ++k) {
                const double s = -S0 + 2.0 * S0 * k / 400.0;
                worst = std::max(worst, theta_right(cplx(s, h), c, x, t).real());
            }
            if (!smooth) {
                for (int k = 1; k <= 200; ++k) {
                    const cplx z = cplx(S0, h) + 0.1 * k * std::polar(1.0, p.angle);
                    worst = std::max(worst, theta_right(z, c, x, t).real());
                }
            }
            if (worst <= g) break;
            p.alpha *= 0.8;
        }
        p.epsilon_c = crossing_width(c, p.alpha, opt);
        return p;
    }
    p.region = p.z_star >= c + opt.delta ? Region::LeftDispersive : Region::Bridged;
    p.z0 = std::max(p.z_star, c + opt.delta);
    const double base = p.alpha;
    // outer lens height: e^{8 t h^3} bounded
    p.alpha = std::min(base, std::cbrt(g / (8.0 * t)));
    const double slope = x + 12.0 * t * p.z0 * p.z0;  // >= 0
    p.alpha_mid = slope > 0.0 ? quantize_down(std::min(base, g / (2.0 * slope)), base) : base;
    if (smooth && p.z0 + 2.0 * p.alpha >= p.cutoff) {
        // stationary points beyond the data: a single lens suffices
        p.construction = Construction::LeftLens;
        const double sl = x + 12.0 * t * p.cutoff * p.cutoff;
        p.alpha = sl > 0.0 ? quantize_down(std::min(base, g / (2.0 * sl)), base) : base;
        p.alpha_mid = p.alpha;
        p.epsilon_c = crossing_width(c, p.alpha, opt);
        return p;
    }
    p.construction = Construction::LeftDelta;
    const double r0 = std::max(0.5 * (p.z_star - c - opt.delta), 0.5 * opt.delta);
    p.r_star = std::min({r0, r0 / std::sqrt(t), 1.2 * p.alpha_mid, 1.2 * p.alpha, 0.5 * (p.z0 - c)});
    p.epsilon_c = crossing_width(c, p.alpha_mid, opt);
    return p;
}

// ---------------------------------------------------------------------------------------------
// Problem assembly

namespace {

enum class Lens { None, P, U };

struct Layer {
    Lens lens = Lens::None;
    int pole = -1;          // inside the circle about pole j
    bool background = true;
};

struct SideRef {
    int layer = 0;
    bool lower = false;
};

struct Spec {
    Piece piece;
    SideRef left, right;
    bool axis = false;
};

class Assembler {
public:
    Assembler(const Scattering& S, const DeformationPlan& plan, const SolveOptions& opt)
        : S_(S), plan_(plan), c_(S.c()), a_(opt.boost), x_(plan.x + 6.0 * opt.boost * plan.t), t_(plan.t),
          left_(is_left(plan.construction)) {
        const PoleGeom pg = pole_geometry(S);
        for (size_t j = 0; j < S.poles().size(); ++j) {
            const Pole& P = S.poles()[j];
            SolitonData d;
            d.z = P.z;
            d.radius = pg.radius[j];
            if (left_) {
                const cplx r = opt.sign_residue * P.norming_left * std::exp(-th_left(P.z));
                d.rho = Dual(r, -2.0 * I * P.z * r);
            } else {
                const cplx lam = lambda_up(P.z, c_);
                const cplx r = opt.sign_residue * P.norming_right * std::exp(th_right(P.z));
                d.rho = Dual(r, 2.0 * I * lam * r);
            }
            d.transformed = std::abs(d.rho.v) > 1.0;
            sol_.push_back(d);
        }
        if (plan.construction == Construction::LeftDelta) delta_ = std::make_unique<ScalarDelta>(S, plan.z0);
    }

    const std::vector<SolitonData>& solitons() const { return sol_; }
    std::vector<Layer> layers;

    // Blaschke factor of pole k and its derivative at the pole.
    cplx blaschke(int k, cplx z) const {
        if (left_) return (z - sol_[k].z) / (z + sol_[k].z);
        const cplx l = lambda_up(z, c_), lk = lambda_up(sol_[k].z, c_);
        return (l - lk) / (l + lk);
    }
    cplx blaschke_prime(int k) const {
        const cplx zk = sol_[k].z;
        if (left_) return 1.0 / (2.0 * zk);
        const cplx lk = lambda_up(zk, c_);
        return zk / (2.0 * lk * lk);
    }

    DMat2 solitons_up(int pole, cplx z) const {
        cplx q = 1.0;
        for (size_t k = 0; k < sol_.size(); ++k)
            if (sol_[k].transformed) q *= blaschke(int(k), z);
        DMat2 Q = constant(mat2(q, 0.0, 0.0, 1.0 / q));
        if (pole < 0) return Q;
        const SolitonData& d = sol_[pole];
        cplx dj = 1.0;
        for (size_t k = 0; k < sol_.size(); ++k)
            if (sol_[k].transformed && int(k) != pole) dj *= blaschke(int(k), d.z);
        const Dual inv_pole(1.0 / (z - d.z));
        if (d.transformed) {
            const cplx bp = blaschke_prime(pole);
            const Dual beta = Dual(1.0) / (d.rho * Dual(bp * bp * dj * dj));
            return Q * dmat(1.0, -beta * inv_pole, 0.0, 1.0);
        }
        const Dual rp = d.rho * Dual(dj * dj);
        return Q * dmat(1.0, 0.0, -rp * inv_pole, 1.0);
    }

    DMat2 lens_up(Lens L, cplx z) const {
        if (L == Lens::None) return DMat2{};
        if (left_) {
            const cplx th = th_left(z);
            if (L == Lens::P) {
                const cplx R = S_.reflection_left(z);
                if (R == cplx(0.0)) return DMat2{};
                const Dual e = exp(Dual(-th, -2.0 * I * z));
                return dmat(1.0, 0.0, Dual(-R) * e, 1.0);
            }
            const cplx rho = lens_coefficient_u(S_, z);
            if (rho == cplx(0.0)) return DMat2{};
            const Dual e = exp(Dual(th, 2.0 * I * z));
            return dmat(1.0, Dual(rho) * e, 0.0, 1.0);
        }
        const cplx R = S_.reflection_right_continued(z);
        if (R == cplx(0.0)) return DMat2{};
        const cplx lam = lambda_up(z, c_);
        const Dual e = exp(Dual(th_right(z), 2.0 * I * lam));
        return dmat(1.0, 0.0, Dual(-R) * e, 1.0);
    }

    Mat2 background(cplx z, int side) const {
        if (plan_.construction == Construction::Right) return parametrix_w_inv(z, c_);
        if (delta_) {
            const cplx ld = delta_->log_delta(z, side);
            return mat2(std::exp(-ld), 0.0, 0.0, std::exp(ld));
        }
        return identity2();
    }

    DMat2 factor(SideRef r, cplx z) const {
        const Layer& L = layers[r.layer];
        DMat2 F;
        if (!r.lower) {
            F = lens_up(L.lens, z) * solitons_up(L.pole, z);
        } else {
            F = flip(lens_up(L.lens, -z)) * flip(solitons_up(L.pole, -z));
        }
        if (L.background) F = F * constant(background(z, r.lower ? -1 : 1));
        return F;
    }

    DMat2 axis_jump(double s) const {
        const cplx Rp = S_.reflection_left(s), Rm = S_.reflection_left(-s);
        const Dual e = exp(Dual(th_left(s), 2.0 * I * s));
        const Dual ei = Dual(1.0) / e;
        return dmat(1.0 - Rp * Rm, Dual(-Rm) * e, Dual(Rp) * ei, 1.0);
    }

    DMat2 jump(const Spec& sp, cplx z) const {
        const DMat2 FL = factor(sp.left, z);
        const DMat2 FR = factor(sp.right, z);
        if (sp.axis) return inverse(FR) * axis_jump(z.real()) * FL;
        return inverse(FR) * FL;
    }

private:
    // phases in frame coordinates x_ = x + 6at: the boost enters as -3/2 a z (resp. lambda) in the cubic term
    cplx th_left(cplx z) const { return 2.0 * I * z * x_ + 8.0 * I * (z * z * z - 1.5 * a_ * z) * t_; }
    cplx th_right(cplx z) const {
        const cplx lam = lambda_up(z, c_);
        return 2.0 * I * lam * x_ + 8.0 * I * (phi_cubic(lam, c_) - 1.5 * a_ * lam) * t_;
    }

    const Scattering& S_;
    DeformationPlan plan_;
    double c_, a_, x_, t_;
    bool left_;
    std::vector<SolitonData> sol_;
    std::unique_ptr<ScalarDelta> delta_;
};

// Breakpoints on [a,b] graded geometrically (ratio 3) about each centre.
std::vector<double> graded_breaks(double a, double b, const std::vector<double>& centres, double eps, double maxlen) {
    std::vector<double> br{a, b};
    for (double c0 : centres) {
        const double reach = (b - a) + std::max({0.0, a - c0, c0 - b});
        for (double e = eps; e < reach; e *= 3.0) {
            for (double v : {c0 - e, c0 + e})
                if (v > a && v < b) br.push_back(v);
        }
    }
    std::sort(br.begin(), br.end());
    std::vector<double> out{br.front()};
    for (size_t i = 1; i < br.size(); ++i) {
        if (br[i] - out.back() < 0.25 * eps && i + 1 < br.size()) continue;
        if (br[i] - out.back() < 0.25 * eps) {
            out.back() = br[i];
            continue;
        }
        out.push_back(br[i]);
    }
    std::vector<double> fin{out.front()};
    for (size_t i = 1; i < out.size(); ++i) {
        const double len = out[i] - fin.back();
        const int m = std::max(1, int(std::ceil(len / maxlen - 1e-9)));
        const double base = fin.back();
        for (int k = 1; k <= m; ++k) fin.push_back(base + len * k / m);
    }
    return fin;
}

// Phase rate |d theta/ds| where the lens exponential is not negligible (0 elsewhere).
using RateFn = std::function<double(cplx)>;

void add_line(std::vector<Spec>& out, double a, double b, double h, const std::vector<double>& centres, double eps,
              double maxlen, int n, SideRef left, SideRef right, const std::string& label, const RateFn& rate) {
    // a -> b at height h (a > b runs leftwards)
    const bool rev = a > b;
    const auto br0 = graded_breaks(std::min(a, b), std::max(a, b), centres, eps, maxlen);
    std::vector<double> br{br0.front()};
    for (size_t i = 0; i + 1 < br0.size(); ++i) {
        const double u = br0[i], v = br0[i + 1];
        double r = 0.0;
        for (int k = 0; k <= 8; ++k) r = std::max(r, rate(cplx(u + (v - u) * k / 8.0, h)));
        const int m = std::max(1, int(std::ceil(r * (v - u) / 20.0)));
        for (int k = 1; k <= m; ++k) br.push_back(u + (v - u) * k / m);
    }
    if (rev) std::reverse(br.begin(), br.end());
    for (size_t i = 0; i + 1 < br.size(); ++i)
        out.push_back({make_segment(cplx(br[i], h), cplx(br[i + 1], h), n, label), left, right, false});
}

void add_segment(std::vector<Spec>& out, cplx a, cplx b, int n, SideRef left, SideRef right, const std::string& label,
                 const RateFn& rate) {
    double r = 0.0;
    for (int k = 0; k <= 8; ++k) r = std::max(r, rate(a + (b - a) * (k / 8.0)));
    const int m = std::max(1, int(std::ceil(r * std::abs(b - a) / 20.0)));
    for (int k = 0; k < m; ++k)
        out.push_back({make_segment(a + (b - a) * (double(k) / m), a + (b - a) * (double(k + 1) / m), n, label), left,
                       right, false});
}

double ray_scale(double x, double t, double beta) {
    double L = 3.0;
    if (t > 0.0) L = std::min(L, std::cbrt(3.0 / t));
    if (x != 0.0) L = std::min(L, 1.0 / (std::abs(x) * std::sin(beta)));
    return std::clamp(L, 0.3, 3.0);
}

std::vector<Spec> geometry(const DeformationPlan& p, const Scattering& S, const PlanOptions& po,
                           const std::vector<SolitonData>& sol, std::vector<Layer>& layers) {
    const double c = S.c();
    const bool smooth = std::isfinite(p.cutoff);
    const int ns = po.nodes_segment, nr = po.nodes_ray, na = po.nodes_arc;
    std::vector<Spec> up;
    std::vector<Spec> axis;
    std::vector<double> cs;
    if (c > 0.0) cs = {-c, c};
    else cs = {0.0};
    const double maxlen = 6.0;
    // phase rates of the lens exponentials (about 20 radians per piece)
    const double x = p.x, t = p.t;
    const RateFn rate_p = [&](cplx z) -> double {
        if (p.construction == Construction::Right) {
            if (theta_right(z, c, x, t).real() < -30.0) return 0.0;
            const cplx lam = lambda_up(z, c);
            return std::abs((2.0 * x + 8.0 * t * (3.0 * lam * lam + 1.5 * c * c)) * z / lam);
        }
        if (-theta_left(z, x, t).real() < -30.0) return 0.0;
        return std::abs(2.0 * x + 24.0 * t * z * z);
    };
    const RateFn rate_u = [&](cplx z) -> double {
        if (theta_left(z, x, t).real() < -30.0) return 0.0;
        return std::abs(2.0 * x + 24.0 * t * z * z);
    };
    int first_pole_layer = 0;
    const SideRef out0{0, false};

    if (p.construction == Construction::LeftPlain) {
        layers = {Layer{Lens::None, -1, false}};
        first_pole_layer = 1;
        if (!smooth) throw DomainError("the undeformed problem needs data with decaying reflection");
        const double Sx = p.cutoff;
        std::vector<double> br{-Sx, Sx};
        std::vector<double> centres = cs;
        for (double c0 : centres) {
            br.push_back(c0);
            for (int k = 0; k < 16; ++k) {
                const double e = 0.5 * std::pow(1.0 / 3.0, k);
                br.push_back(c0 - e);
                br.push_back(c0 + e);
            }
        }
        std::sort(br.begin(), br.end());
        br.erase(std::unique(br.begin(), br.end()), br.end());
        std::vector<double> fin{br.front()};
        for (size_t i = 1; i < br.size(); ++i) {
            const double len = br[i] - fin.back();
            const int m = std::max(1, int(std::ceil(len / po.plain_length_max - 1e-9)));
            const double b0 = fin.back();
            for (int k = 1; k <= m; ++k) fin.push_back(b0 + len * k / m);
        }
        for (size_t i = 0; i + 1 < fin.size(); ++i) {
            const double len = fin[i + 1] - fin[i];
            const int n = len < 0.4 ? 20 : ns;
            axis.push_back({make_segment(fin[i], fin[i + 1], n, "axis"), {0, false}, {0, true}, true});
        }
    } else if (p.construction == Construction::Right || p.construction == Construction::LeftLens) {
        layers = {Layer{Lens::None, -1, true}, Layer{Lens::P, -1, true}};
        first_pole_layer = 2;
        const double h = p.construction == Construction::Right ? p.alpha : p.alpha_mid;
        const SideRef strip{1, false};
        if (smooth) {
            add_line(up, -p.cutoff, p.cutoff, h, cs, std::max(p.epsilon_c, h), maxlen, ns, out0, strip, "lens", rate_p);
        } else {
            const double S0 = c + std::max(1.0, 2.0 * h);
            const double beta = p.angle;
            const double L = ray_scale(p.x, p.t, beta);
            add_line(up, -S0, S0, h, cs, std::max(p.epsilon_c, h), maxlen, ns, out0, strip, "lens", rate_p);
            up.push_back({make_ray_in(cplx(-S0, h), std::polar(1.0, pi - beta), L, nr, "lens-ray"), out0, strip, false});
            up.push_back({make_ray_out(cplx(S0, h), std::polar(1.0, beta), L, nr, "lens-ray"), out0, strip, false});
        }
    } else {  // LeftDelta
        layers = {Layer{Lens::None, -1, true}, Layer{Lens::P, -1, true}, Layer{Lens::U, -1, true},
                  Layer{Lens::None, -1, false}};
        first_pole_layer = 4;
        const double z0 = p.z0, r = p.r_star, h = p.alpha, hm = p.alpha_mid;
        const SideRef mid{1, false}, outer{2, false}, disk{3, false};
        const double q1 = pi / 4.0, q3 = 3.0 * pi / 4.0;
        // disks (counterclockwise arcs: interior on the left)
        up.push_back({make_arc(z0, r, 0.0, q1, na / 2, "disk"), disk, outer, false});
        up.push_back({make_arc(z0, r, q1, q3, na / 2, "disk"), disk, out0, false});
        up.push_back({make_arc(z0, r, q3, pi, na / 2, "disk"), disk, mid, false});
        up.push_back({make_arc(-z0, r, 0.0, q1, na / 2, "disk"), disk, mid, false});
        up.push_back({make_arc(-z0, r, q1, q3, na / 2, "disk"), disk, out0, false});
        up.push_back({make_arc(-z0, r, q3, pi, na / 2, "disk"), disk, outer, false});
        for (double zc : {-z0, z0})
            axis.push_back({make_segment(zc - r, zc + r, ns, "disk-axis"), {3, false}, {3, true}, true});
        const cplx e1 = std::polar(1.0, q1), e3 = std::polar(1.0, q3);
        // inner V lines and the middle lens
        const cplx ir = z0 + r * e3, il = -z0 + r * e1;
        const cplx tr(z0 - hm, hm), tl(-z0 + hm, hm);
        add_segment(up, ir, tr, ns, mid, out0, "v-inner", rate_p);
        add_segment(up, il, tl, ns, out0, mid, "v-inner", rate_p);
        add_line(up, tl.real(), tr.real(), hm, cs, std::max(p.epsilon_c, hm), maxlen, ns, out0, mid, "lens-mid", rate_p);
        // outer lines
        const cplx orr = z0 + r * e1, ol = -z0 + r * e3;
        if (smooth) {
            const cplx cr(z0 + h, h), cl(-z0 - h, h);
            add_segment(up, orr, cr, ns, out0, outer, "v-outer", rate_u);
            add_segment(up, ol, cl, ns, outer, out0, "v-outer", rate_u);
            add_line(up, cr.real(), p.cutoff, h, {}, 1.0, maxlen, ns, out0, outer, "lens-outer", rate_u);
            add_line(up, cl.real(), -p.cutoff, h, {}, 1.0, maxlen, ns, outer, out0, "lens-outer", rate_u);
        } else {
            const double L = std::clamp(1.0 / std::sqrt(std::max(p.t, 1e-12) * z0), 0.3, 3.0);
            up.push_back({make_ray_out(orr, e1, L, nr, "v-outer"), out0, outer, false});
            up.push_back({make_ray_out(ol, e3, L, nr, "v-outer"), outer, out0, false});
        }
    }
    // soliton circles
    for (size_t j = 0; j < sol.size(); ++j) {
        Layer L{Lens::None, int(j), layers[0].background};
        layers.push_back(L);
        const SideRef in{first_pole_layer + int(j), false};
        up.push_back({make_arc(sol[j].z, sol[j].radius, -pi / 2.0, pi / 2.0, na, "pole"), in, out0, false});
        up.push_back({make_arc(sol[j].z, sol[j].radius, pi / 2.0, 1.5 * pi, na, "pole"), in, out0, false});
    }
    std::vector<Spec> all = up;
    for (const Spec& sp : up) {
        Spec m;
        m.piece = reflect_piece(sp.piece, sp.piece.label);
        m.left = {sp.right.layer, true};
        m.right = {sp.left.layer, true};
        all.push_back(m);
    }
    for (const Spec& sp : axis) all.push_back(sp);
    return all;
}

std::string geometry_key(const std::vector<Spec>& specs) {
    std::ostringstream os;
    os.precision(17);
    for (const Spec& sp : specs) {
        const Piece& p = sp.piece;
        os << int(p.kind) << ':' << p.n << ':' << p.a << p.b << p.c << p.d << ':' << p.inf_end << ';';
    }
    return os.str();
}

}  // namespace

namespace {

RhProblem assemble(const Scattering& S, const DeformationPlan& plan, const SolveOptions& opt, OperatorCache* cache,
                   std::vector<Spec>* keep) {
    Assembler A(S, plan, opt);
    std::vector<Spec> specs = geometry(plan, S, opt.plan, A.solitons(), A.layers);
    std::vector<Piece> pieces;
    for (const Spec& sp : specs) pieces.push_back(sp.piece);
    RhProblem P;
    P.plan = plan;
    P.key = geometry_key(specs);
    if (cache) {
        P.op = cache->get(P.key, pieces);
    } else {
        P.op = std::make_shared<const CauchyOperator>(std::make_shared<const Contour>(pieces));
    }
    const Contour& C = P.op->contour();
    P.G.assign(C.size(), identity2());
    P.Gx.assign(C.size(), Mat2::Zero());
    for (size_t k = 0; k < specs.size(); ++k) {
        const Piece& pc = C.pieces()[k];
        for (int j = 0; j < pc.n; ++j) {
            const int g = C.global(int(k), j);
            if (C.role(g) == NodeRole::Zero || std::isnan(pc.s[j].real())) continue;
            const DMat2 J = A.jump(specs[k], pc.s[j]);
            if (!J.v.allFinite() || !J.d.allFinite())
                throw NumericalError("non-finite jump on piece '" + pc.label + "'");
            P.G[g] = J.v;
            P.Gx[g] = J.d;
        }
    }
    if (keep) *keep = std::move(specs);
    return P;
}

// [1 1] F1 (first entry) for the large-z expansion F = I + F1/z + ...
cplx moment_shift(const Scattering& S, const DeformationPlan& plan, const SolveOptions& opt) {
    Assembler A(S, plan, opt);
    const bool left = is_left(plan.construction);
    cplx shift = 0.0;
    for (const SolitonData& d : A.solitons()) {
        if (!d.transformed) continue;
        shift += -2.0 * (left ? d.z : lambda_up(d.z, S.c()));
    }
    if (plan.construction == Construction::LeftDelta) {
        // log Delta ~ -L/z, L = (1/2 pi i) int log T; Delta^{-1} = diag(1/Delta, Delta)
        const double y = 1e7;
        const ScalarDelta D(S, plan.z0);
        const cplx L = -cplx(0.0, y) * D.log_delta(cplx(0.0, y));
        shift += L;
    }
    return shift;
}

}  // namespace

RhProblem build_problem(const Scattering& S, const DeformationPlan& plan, const SolveOptions& opt,
                        OperatorCache* cache) {
    return assemble(S, plan, opt, cache, nullptr);
}

PointSolution solve_problem(const Scattering& S, const RhProblem& P, const SolveOptions& opt) {
    const Contour& C = P.op->contour();
    const RhpSolution sol = solve_rhp(*P.op, P.G, &P.Gx, P.plan.construction != Construction::Right || S.c() == 0.0);
    PointSolution out;
    out.plan = P.plan;
    out.residual = sol.residual;
    out.cond = sol.cond;
    out.unknowns = 2 * C.size();
    const bool left = is_left(P.plan.construction);
    const Row2 mx = contour_integral(C, sol.Ux);
    const Row2 m0 = contour_integral(C, sol.U);
    const double c = S.c();
    out.u = (left ? (mx(0) / pi).real() : (-mx(0) / pi).real() - c * c) + opt.boost;
    // m = lim z (N - [1 1]) = -(1/2 pi i) int U - [1 1] F1
    const cplx m = -m0(0) / (2.0 * pi * I) - moment_shift(S, P.plan, opt);
    out.moment = (-2.0 * I * m).real();
    if (opt.jump_check) {
        Assembler A(S, P.plan, opt);
        const std::vector<Spec> specs = geometry(P.plan, S, opt.plan, A.solitons(), A.layers);
        double worst = 0.0;
        for (size_t k = 0; k < specs.size(); ++k) {
            const Piece& pc = C.pieces()[k];
            const int h = pc.n / 2;
            for (double tt : {0.5 * (pc.t[1] + pc.t[2]), 0.5 * (pc.t[h - 1] + pc.t[h]),
                              0.5 * (pc.t[pc.n - 3] + pc.t[pc.n - 2])}) {
                const cplx z = pc.map(tt);
                if (!std::isfinite(z.real())) continue;
                const Row2 Np = boundary_value(*P.op, sol.U, int(k), tt, 1);
                const Row2 Nm = boundary_value(*P.op, sol.U, int(k), tt, -1);
                const Mat2 G = A.jump(specs[k], z).v;
                const double scale = std::max(1.0, Nm.cwiseAbs().maxCoeff() * G.cwiseAbs().maxCoeff());
                const double e = (Np - Nm * G).cwiseAbs().maxCoeff() / scale;
                worst = std::max(worst, e);
            }
        }
        out.jump_residual = worst;
    }
    return out;
}

PointSolution solve_point(const Scattering& S, double x, double t, const SolveOptions& opt, OperatorCache* cache) {
    const DeformationPlan plan = select_region(x - 6.0 * opt.boost * t, t, S, opt.plan);
    return solve_problem(S, build_problem(S, plan, opt, cache), opt);
}

PointSolution solve_point_with(const Scattering& S, double x, double t, Construction c, const SolveOptions& opt,
                               OperatorCache* cache) {
    x -= 6.0 * opt.boost * t;
    DeformationPlan plan = select_region(x, t, S, opt.plan);
    if (plan.construction != c) {
        const double cc = S.c();
        if (c == Construction::LeftDelta) {
            if (t <= 0.0) throw DomainError("the Delta construction needs t > 0");
            plan.z_star = x < 0.0 ? std::sqrt(-x / (12.0 * t)) : 0.0;
            plan.z0 = std::max(plan.z_star, cc + plan.delta);
            const double base = lens_base(S, opt.plan);
            plan.alpha = std::min(base, std::cbrt(opt.plan.growth_max / (8.0 * t)));
            const double slope = x + 12.0 * t * plan.z0 * plan.z0;
            plan.alpha_mid = slope > 0.0 ? quantize_down(std::min(base, opt.plan.growth_max / (2.0 * slope)), base) : base;
            const double r0 = std::max(0.5 * (plan.z_star - cc - plan.delta), 0.5 * plan.delta);
            plan.r_star = std::min({r0, r0 / std::sqrt(t), 1.2 * plan.alpha_mid, 1.2 * plan.alpha, 0.5 * (plan.z0 - cc)});
            plan.epsilon_c = crossing_width(cc, plan.alpha_mid, opt.plan);
        } else if (c == Construction::LeftLens || c == Construction::Right) {
            const double base = lens_base(S, opt.plan);
            plan.alpha = base;
            plan.alpha_mid = base;
            if (t > 0.0) {
                // bounded growth on the lens line
                const double S0 = std::isfinite(plan.cutoff) ? plan.cutoff : cc + 2.0;
                for (int it = 0; it < 60; ++it) {
                    double worst = -INFINITY;
                    for (int k = 0; k <= 400; ++k) {
                        const cplx z(-S0 + 2.0 * S0 * k / 400.0, plan.alpha);
                        const double g = c == Construction::Right ? theta_right(z, cc, x, t).real()
                                                                  : -theta_left(z, x, t).real();
                        worst = std::max(worst, g);
                    }
                    if (worst <= opt.plan.growth_max) break;
                    plan.alpha *= 0.8;
                }
                if (plan.alpha < 1e-2 * base)
                    throw DomainError("lens growth cannot be bounded for the " + construction_name(c) + " construction here");
                plan.alpha_mid = plan.alpha;
            } else if (c == Construction::LeftLens && x > 0.0) {
                plan.alpha = std::min(base, opt.plan.growth_max / (2.0 * x));
                plan.alpha_mid = plan.alpha;
            }
            plan.epsilon_c = crossing_width(cc, plan.alpha, opt.plan);
        }
        plan.construction = c;
    }
    return solve_problem(S, build_problem(S, plan, opt, cache), opt);
}

std::string dump_problem(const RhProblem& P) {
    nlohmann::json j;
    j["construction"] = construction_name(P.plan.construction);
    j["region"] = region_name(P.plan.region);
    j["x"] = P.plan.x;
    j["t"] = P.plan.t;
    j["alpha"] = P.plan.alpha;
    j["alpha_mid"] = P.plan.alpha_mid;
    j["z0"] = P.plan.z0;
    j["r"] = P.plan.r_star;
    const Contour& C = P.op->contour();
    nlohmann::json pieces = nlohmann::json::array();
    for (size_t k = 0; k < C.pieces().size(); ++k) {
        const Piece& pc = C.pieces()[k];
        nlohmann::json q;
        q["label"] = pc.label;
        q["n"] = pc.n;
        nlohmann::json nodes = nlohmann::json::array();
        for (int i = 0; i < pc.n; ++i) {
            const cplx s = pc.s[i];
            const Mat2& G = P.G[C.global(int(k), i)];
            nodes.push_back({std::isfinite(s.real()) ? s.real() : 0.0, std::isfinite(s.imag()) ? s.imag() : 0.0,
                             G(0, 0).real(), G(0, 0).imag(), G(0, 1).real(), G(0, 1).imag(), G(1, 0).real(),
                             G(1, 0).imag(), G(1, 1).real(), G(1, 1).imag()});
        }
        q["nodes"] = nodes;
        pieces.push_back(q);
    }
    j["pieces"] = pieces;
    return j.dump();
}

}  // namespace stepkdv
