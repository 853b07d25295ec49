#include <catch_amalgamated.hpp>

#include <gsl/gsl_integration.h>

#include <cmath>
#include <functional>

#include "stepkdv/deformation.hpp"

using namespace stepkdv;

namespace {

double qagiu(std::function<double(double)> f, double a) {
    gsl_integration_workspace* w = gsl_integration_workspace_alloc(4000);
    gsl_function F;
    F.function = [](double x, void* p) { return (*static_cast<std::function<double(double)>*>(p))(x); };
    F.params = &f;
    double r, e;
    gsl_integration_qagiu(&F, a, 1e-13, 1e-11, 4000, w, &r, &e);
    gsl_integration_workspace_free(w);
    return r;
}

const Scattering& pure_step(double c) {
    static std::map<double, std::unique_ptr<Scattering>> cache;
    auto& p = cache[c];
    if (!p) {
        p = std::make_unique<Scattering>(make_initial_data("pure-step", c));
        p->analyze();
    }
    return *p;
}

}  // namespace

TEST_CASE("LDU factorization of the left jump", "[deformation]") {
    const Scattering& S = pure_step(1.0);
    const LduFactors f = ldu_factor(S, 1.5, 0.7, 0.2);
    CHECK(std::abs(f.T - 0.9787138) < 1e-7);
    const Mat2 J = jump_left(S, 1.5, 0.7, 0.2);
    CHECK((f.L * f.D * inv2(f.U) - J).norm() < 1e-13);
    CHECK(std::abs(det2(J) - 1.0) < 1e-13);
    CHECK_THROWS_AS(ldu_factor(S, 0.5, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(ldu_factor(S, -0.99, 0.0, 0.0), DomainError);
}

TEST_CASE("lens factors reproduce the jump", "[deformation]") {
    const Scattering& S = pure_step(1.0);
    for (double s : {1.5, -0.4, 3.0}) {
        const LensFactors f = lens_factor_left(S, s, 1.0, 0.0);
        CHECK((f.M1 * inv2(f.P1) - jump_left(S, s, 1.0, 0.0)).norm() < 1e-12);
    }
}

TEST_CASE("global parametrix", "[deformation]") {
    const double c = 1.3;
    for (double s : {-1.0, -0.2, 0.6, 1.2}) {
        const Mat2 Wp = parametrix_w(cplx(s, 1e-14), c), Wm = parametrix_w(cplx(s, -1e-14), c);
        CHECK((Wp - Wm * sigma1()).norm() < 1e-6);
    }
    for (cplx z : {cplx(0.3, 0.8), cplx(-2.0, -0.5), cplx(4.0, 1.0)}) {
        CHECK((parametrix_w(z, c) * parametrix_w_inv(z, c) - identity2()).norm() < 1e-13);
        // det W = lambda / (z - c), so det W -> 1 only at infinity
        const cplx k = std::sqrt((z - c) * (z + c)) / (z - c);
        CHECK((std::abs(det2(parametrix_w(z, c)) - k) < 1e-12 || std::abs(det2(parametrix_w(z, c)) + k) < 1e-12));
    }
    const cplx big(0.0, 1e4);
    CHECK((parametrix_w(big, c) - identity2()).norm() < 1e-3);
    CHECK((ones_row() * parametrix_w(big, c) - ones_row()).norm() < 1e-7);
}

TEST_CASE("scalar Delta against adaptive quadrature", "[deformation]") {
    const Scattering& S = pure_step(1.0);
    const double z0 = 2.0;
    const ScalarDelta D(S, z0);
    auto logT = [&](double s) { return std::log(ldu_factor(S, s, 0.0, 0.0).T); };
    for (cplx z : {cplx(0.0, 1.0), cplx(0.5, -0.7), cplx(-3.0, 0.4)}) {
        auto f = [&](double s, bool im) {
            const cplx v = logT(s) / (s - z) + logT(-s) / (-s - z);
            return im ? v.imag() : v.real();
        };
        const cplx integral(qagiu([&](double s) { return f(s, false); }, z0),
                            qagiu([&](double s) { return f(s, true); }, z0));
        CHECK(std::abs(D.log_delta(z) - integral / (2.0 * pi * I)) < 1e-9);
    }
}

TEST_CASE("region selection", "[deformation]") {
    const Scattering& S = pure_step(1.0);
    CHECK(select_region(0.0, 1.0, S).region == Region::Right);
    CHECK(select_region(-60.0, 1.0, S).region == Region::LeftDispersive);
    CHECK(select_region(-3.0, 1.0, S).region == Region::Bridged);
    CHECK(select_region(-3.0, 0.0, S).construction == Construction::LeftLens);
    CHECK(select_region(3.0, 0.0, S).construction == Construction::Right);
    CHECK_THROWS_AS(select_region(0.0, -1.0, S), DomainError);
}

TEST_CASE("residue condition as a circle jump", "[deformation]") {
    const cplx zp(0.0, 0.9), alpha(0.3, 2.0);
    for (cplx z : {zp + 0.1, zp + cplx(0.0, -0.1)}) {
        const Mat2 G = residue_to_jump(z, zp, alpha);
        CHECK(std::abs(det2(G) - 1.0) < 1e-14);
        const Mat2 inner = mat2(1.0, 0.0, -alpha / (z - zp), 1.0);
        CHECK((G * inner - identity2()).norm() < 1e-14);
    }
}

TEST_CASE("initial data recovered by the pure step problem", "[deformation]") {
    const Scattering& S = pure_step(1.0);
    CHECK(std::abs(solve_point(S, 10.0, 0.0).u + 1.0) < 1e-6);
    CHECK(std::abs(solve_point(S, -10.0, 0.0).u) < 1e-6);
}

TEST_CASE("right and left normalizations agree", "[deformation]") {
    const Scattering& S = pure_step(1.0);
    const double ur = solve_point_with(S, 0.0, 0.5, Construction::Right).u;
    const double ul = solve_point_with(S, 0.0, 0.5, Construction::LeftDelta).u;
    CHECK(std::abs(ur - ul) < 1e-6);
}

TEST_CASE("vanishing reflection gives the zero solution exactly", "[deformation]") {
    Scattering S(make_initial_data("pure-step", 0.0));
    S.analyze();
    const double ur = solve_point_with(S, 0.3, 0.5, Construction::Right).u;
    const double ul = solve_point_with(S, 0.3, 0.5, Construction::LeftDelta).u;
    CHECK(std::abs(ur) < 1e-14);
    CHECK(std::abs(ur - ul) < 1e-14);
}

TEST_CASE("reflectionless sech2 with c = 0 is the exact one-soliton", "[deformation]") {
    Scattering S(make_initial_data("sech2", 0.0));
    S.analyze();
    REQUIRE(S.poles().size() == 1);
    // the soliton centre x = 4t is where the unreduced right problem is singular
    for (auto [x, t] : {std::pair{0.0, 0.0}, {0.7, 0.0}, {4.0, 1.0}, {2.5, 1.0}, {-4.0, 1.0}}) {
        const PointSolution p = solve_point(S, x, t);
        const double exact = 2.0 / std::pow(std::cosh(x - 4.0 * t), 2);
        CHECK(std::abs(p.u - exact) <= 1e-9 * std::max(1.0, exact));
        CHECK(p.residual < 1e-12);
        CHECK(p.cond < 1e6);
    }
}

TEST_CASE("symmetric reduction matches the full collocation solve", "[deformation]") {
    const Scattering& S = pure_step(std::sqrt(2.0));
    SolveOptions o;
    o.plan.nodes_segment = 20;
    o.plan.nodes_ray = 30;
    o.plan.nodes_arc = 20;
    const RhProblem P = build_problem(S, select_region(-8.0, 0.5, S, o.plan), o);
    REQUIRE(P.plan.construction == Construction::LeftDelta);
    REQUIRE(P.op->contour().symmetric());
    const RhpSolution full = solve_rhp(*P.op, P.G, &P.Gx, false);
    const RhpSolution red = solve_rhp(*P.op, P.G, &P.Gx, true);
    CHECK((full.U - red.U).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((full.Ux - red.Ux).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(red.residual < 1e-12);
}

TEST_CASE("Galilean boost in the phases", "[deformation]") {
    const Scattering& S = pure_step(1.0);
    SolveOptions b;
    b.boost = -1.0;
    const double t = 0.4, x = 0.5;
    const double ub = solve_point(S, x, t, b).u;
    const double u0 = solve_point(S, x + 6.0 * t, t).u;
    CHECK(std::abs(ub - (u0 - 1.0)) < 1e-9);
}
