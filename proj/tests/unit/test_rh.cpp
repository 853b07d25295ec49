#include <catch_amalgamated.hpp>

#include <gsl/gsl_integration.h>

#include <cmath>
#include <functional>

#include "stepkdv/chebyshev.hpp"
#include "stepkdv/rh.hpp"

using namespace stepkdv;

namespace {

std::vector<Mat2> jumps_at_nodes(const Contour& C, const std::function<Mat2(int, cplx)>& G) {
    std::vector<Mat2> out(C.size(), identity2());
    for (int g = 0; g < C.size(); ++g) {
        if (C.role(g) == NodeRole::Zero) continue;
        out[g] = G(C.piece_of(g), C.point(g));
    }
    return out;
}

std::vector<cplx> sample(const Piece& p, const std::function<cplx(cplx)>& f) {
    std::vector<cplx> v(p.n, 0.0);
    for (int j = 0; j < p.n; ++j)
        if (!((p.inf_end == 1 && j == p.n - 1) || (p.inf_end == -1 && j == 0))) v[j] = f(p.s[j]);
    return v;
}

cplx dotrow(const std::vector<cplx>& row, const std::vector<cplx>& v) {
    cplx s = 0.0;
    for (size_t j = 0; j < v.size(); ++j) s += row[j] * v[j];
    return s;
}

double qagi(std::function<double(double)> f) {
    gsl_integration_workspace* w = gsl_integration_workspace_alloc(2000);
    gsl_function F;
    F.function = [](double x, void* p) { return (*static_cast<std::function<double(double)>*>(p))(x); };
    F.params = &f;
    double r, e;
    gsl_integration_qagi(&F, 1e-13, 1e-12, 2000, w, &r, &e);
    gsl_integration_workspace_free(w);
    return r;
}

}  // namespace

TEST_CASE("interval Cauchy transform of polynomials", "[rh]") {
    const int n = 20;
    const auto t = cheb::lobatto(n);
    std::vector<cplx> f(n);
    for (int j = 0; j < n; ++j) f[j] = t[j] * t[j];
    std::vector<cplx> row(n);
    for (cplx zeta : {cplx(0.3, 0.01), cplx(0.999, -1e-3), cplx(3.0, 2.0), cplx(-40.0, 1.0), cplx(0.0, 0.2)}) {
        cheb::bary_row(n, 0.0, row.data());
        cauchy::interval_row(n, zeta, row.data());
        const cplx L = std::log((zeta - 1.0) / (zeta + 1.0));
        const cplx exact = (2.0 * zeta + zeta * zeta * L) / (2.0 * pi * I);
        CHECK(std::abs(dotrow(row, f) - exact) < 1e-13 * std::max(1.0, std::abs(exact)) + 1e-14);
    }
}

TEST_CASE("Cauchy transform on the real line and the Plemelj jump", "[rh]") {
    const int n = 60;
    const Piece left = make_ray_in(0.0, -1.0, 1.0, n);
    const Piece right = make_ray_out(0.0, 1.0, 1.0, n);
    auto f = [](cplx s) { return 1.0 / ((s - I) * (s - I)); };
    const auto fl = sample(left, f), fr = sample(right, f);
    std::vector<cplx> rl(n), rr(n);
    auto transform = [&](cplx z) {
        cauchy::piece_row(left, z, rl.data());
        cauchy::piece_row(right, z, rr.data());
        return dotrow(rl, fl) + dotrow(rr, fr);
    };
    // f is analytic below: C f = 0 above, C f = -f below
    CHECK(std::abs(transform(cplx(0.3, 2.0))) < 1e-12);
    CHECK(std::abs(transform(cplx(-1.0, 0.5))) < 1e-11);
    CHECK(std::abs(transform(cplx(0.7, -0.4)) + f(cplx(0.7, -0.4))) < 1e-11);
    // boundary values at interior nodes: C+ - C- = f, C- = -f
    for (int i : {5, 17, 30, 44}) {
        cauchy::boundary_row(right, i, 1, rr.data());
        cauchy::piece_row(left, right.s[i], rl.data());
        const cplx plus = dotrow(rr, fr) + dotrow(rl, fl);
        cauchy::boundary_row(right, i, -1, rr.data());
        const cplx minus = dotrow(rr, fr) + dotrow(rl, fl);
        CHECK(std::abs(plus - minus - f(right.s[i])) < 1e-13);
        CHECK(std::abs(minus + f(right.s[i])) < 1e-12);
    }
}

TEST_CASE("constant density on a circle", "[rh]") {
    const int n = 40;
    const Piece a1 = make_arc(cplx(1.0, 1.0), 0.5, 0.0, pi, n);
    const Piece a2 = make_arc(cplx(1.0, 1.0), 0.5, pi, 2 * pi, n);
    const std::vector<cplx> one(n, 1.0);
    std::vector<cplx> r1(n), r2(n);
    for (cplx z : {cplx(1.0, 1.0), cplx(1.3, 1.2), cplx(0.55, 1.0)}) {
        cauchy::piece_row(a1, z, r1.data());
        cauchy::piece_row(a2, z, r2.data());
        CHECK(std::abs(dotrow(r1, one) + dotrow(r2, one) - 1.0) < 1e-10);
    }
    for (cplx z : {cplx(0.0, 0.0), cplx(1.0, 1.6), cplx(30.0, -5.0)}) {
        cauchy::piece_row(a1, z, r1.data());
        cauchy::piece_row(a2, z, r2.data());
        CHECK(std::abs(dotrow(r1, one) + dotrow(r2, one)) < 1e-12);
    }
}

TEST_CASE("trivial jump gives zero density", "[rh]") {
    auto C = std::make_shared<Contour>(std::vector<Piece>{make_ray_in(0.0, -1.0, 1.0, 30),
                                                          make_ray_out(0.0, 1.0, 1.0, 30)});
    CauchyOperator op(C);
    const auto G = jumps_at_nodes(*C, [](int, cplx) { return identity2(); });
    const auto sol = solve_rhp(op, G);
    CHECK(sol.U.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("scalar diagonal problem on the line", "[rh]") {
    const int n = 80;
    auto C = std::make_shared<Contour>(std::vector<Piece>{make_ray_in(0.0, -1.0, 2.0, n),
                                                          make_ray_out(0.0, 1.0, 2.0, n)});
    CauchyOperator op(C);
    auto T = [](cplx s) { return 1.0 + 0.5 * std::exp(-s * s) * (1.0 + 0.3 * s); };
    const auto G = jumps_at_nodes(*C, [&](int, cplx s) { return mat2(T(s), 0.0, 0.0, 1.0 / T(s)); });
    std::vector<Mat2> Gx(C->size(), Mat2::Zero());
    const auto sol = solve_rhp(op, G, &Gx);
    CHECK(sol.residual < 1e-12);
    CHECK(sol.Ux.cwiseAbs().maxCoeff() < 1e-14);
    // Delta(z) = exp((1/2 pi i) int log T(s)/(s - z) ds)
    auto delta = [&](cplx z) {
        auto re = [&](double s) { return (std::log(T(s)) / (s - z)).real(); };
        auto im = [&](double s) { return (std::log(T(s)) / (s - z)).imag(); };
        return std::exp(cplx(qagi(re), qagi(im)) / (2.0 * pi * I));
    };
    for (cplx z : {cplx(0.2, 0.5), cplx(-1.0, -0.3), cplx(2.0, 1.0)}) {
        const Row2 N = evaluate(op, sol.U, z);
        const cplx d = delta(z);
        CHECK(std::abs(N(0) - d) < 1e-10);
        CHECK(std::abs(N(1) - 1.0 / d) < 1e-10);
    }
    // first moment: int u ds = [int log T, -int log T]
    const double logint = qagi([&](double s) { return std::log(T(s)).real(); });
    const Row2 m = contour_integral(*C, sol.U);
    CHECK(std::abs(m(0) - logint) < 1e-10);
    CHECK(std::abs(m(1) + logint) < 1e-10);
    // jump residual off the nodes
    for (double x : {-0.77, 0.05, 0.61}) {
        const Row2 Np = boundary_value(op, sol.U, 1, x, 1);
        const Row2 Nm = boundary_value(op, sol.U, 1, x, -1);
        const cplx s = C->pieces()[1].map(x);
        CHECK((Np - Nm * mat2(T(s), 0.0, 0.0, 1.0 / T(s))).norm() < 1e-11);
    }
}

TEST_CASE("four-ray junction with a known sectionally analytic solution", "[rh]") {
    const int n = 60;
    std::vector<Piece> rays;
    for (int k = 0; k < 4; ++k) rays.push_back(make_ray_out(0.0, std::exp(I * (k * pi / 2 + 0.2)), 1.0, n));
    auto C = std::make_shared<Contour>(rays);
    CauchyOperator op(C);
    // sector k lies between rays k and k+1; poles placed in the opposite sector
    auto F = [](int k, cplx z) {
        const double th = k * pi / 2 + 0.2 + pi / 4 + pi;
        const cplx p = 1.2 * std::exp(I * th), q = 0.9 * std::exp(I * (th + 0.2));
        const cplx ak = 0.4 + 0.1 * k, ck = 0.3 - 0.2 * k;
        return Mat2(mat2(1.0, ak / ((z - q) * (z - q)), 0.0, 1.0) *
                    mat2(1.0, 0.0, ck / ((z - p) * (z - p)), 1.0));
    };
    const auto G = jumps_at_nodes(*C, [&](int k, cplx s) {
        return Mat2(inv2(F((k + 3) % 4, s)) * F(k, s));
    });
    const auto sol = solve_rhp(op, G);
    CHECK(sol.residual < 1e-12);
    for (cplx z : {cplx(0.5, 0.7), cplx(-0.3, 0.2), cplx(-2.0, -1.0), cplx(1.0, -0.4), cplx(0.05, 0.08)}) {
        double a = std::arg(z) - 0.2;
        while (a < 0) a += 2 * pi;
        const int k = int(a / (pi / 2)) % 4;
        const Row2 exact = ones_row() * F(k, z);
        CHECK((evaluate(op, sol.U, z) - exact).norm() < 1e-10);
    }
}

TEST_CASE("pole removed by a circle jump", "[rh]") {
    const int n = 40;
    const cplx w(0.3, 0.8), beta(0.7, -0.2);
    auto C = std::make_shared<Contour>(std::vector<Piece>{make_arc(w, 0.4, -pi / 2, pi / 2, n),
                                                          make_arc(w, 0.4, pi / 2, 3 * pi / 2, n)});
    CauchyOperator op(C);
    auto Fout = [&](cplx z) { return mat2(1.0, beta / (z - w), 0.0, 1.0); };
    const auto G = jumps_at_nodes(*C, [&](int, cplx s) { return inv2(Fout(s)); });
    const auto sol = solve_rhp(op, G);
    CHECK((evaluate(op, sol.U, w + 0.1) - ones_row()).norm() < 1e-12);
    const cplx z(2.0, -1.0);
    CHECK((evaluate(op, sol.U, z) - ones_row() * Fout(z)).norm() < 1e-12);
    const Row2 m = contour_integral(*C, sol.U);
    // N = [1 1] + [0, beta]/z + ...  =>  int u ds = -2 pi i [0, beta]
    CHECK(std::abs(m(0)) < 1e-12);
    CHECK(std::abs(m(1) + 2.0 * pi * I * beta) < 1e-12);
}

TEST_CASE("small jump: density is the Neumann leading term", "[rh]") {
    const int n = 60;
    auto C = std::make_shared<Contour>(std::vector<Piece>{make_ray_in(0.0, -1.0, 2.0, n),
                                                          make_ray_out(0.0, 1.0, 2.0, n)});
    CauchyOperator op(C);
    for (double eps : {1e-3, 1e-4}) {
        auto E = [](cplx s) {
            if (!std::isfinite(s.real())) return Mat2(Mat2::Zero());
            return Mat2(std::exp(-s * s) * mat2(0.2, 1.0, 0.5 * s, -0.2));
        };
        const auto G = jumps_at_nodes(*C, [&](int, cplx s) { return Mat2(identity2() + eps * E(s)); });
        const auto sol = solve_rhp(op, G);
        double worst = 0.0;
        for (int g = 0; g < C->size(); ++g) {
            if (C->role(g) == NodeRole::Zero) continue;
            const Row2 lead = ones_row() * (G[g] - identity2());
            worst = std::max(worst, (sol.U.row(g) - lead).cwiseAbs().maxCoeff());
        }
        CHECK(worst < 10.0 * eps * eps);
        CHECK(worst > 0.0);
    }
}

TEST_CASE("point symmetry of contours", "[rh]") {
    const int n = 24;
    // two parallel lines Im z = +-1, each split at its midpoint: the mirror of a piece is another piece
    std::vector<Piece> ps{make_ray_in(I, -1.0, 1.0, n), make_ray_out(I, 1.0, 1.0, n)};
    ps.push_back(reflect_piece(ps[0]));
    ps.push_back(reflect_piece(ps[1]));
    const Contour C(ps);
    REQUIRE(C.symmetric());
    for (int g = 0; g < C.size(); ++g) {
        const int h = C.mirror(g);
        CHECK(C.mirror(h) == g);
        const cplx a = C.point(g), b = C.point(h);
        if (std::isfinite(a.real())) CHECK(std::abs(a + b) < 1e-12);
        CHECK(std::abs(C.mirror_sign(g)) == 1);
    }
    // the real line through 0 contains a self-symmetric junction
    const Contour L(std::vector<Piece>{make_ray_in(0.0, -1.0, 1.0, n), make_ray_out(0.0, 1.0, 1.0, n)});
    CHECK_FALSE(L.symmetric());
    // a single segment symmetric about the origin maps to itself
    const Contour S(std::vector<Piece>{make_segment(cplx(-1.0, 0.0), cplx(1.0, 0.0), n)});
    CHECK_FALSE(S.symmetric());
}
