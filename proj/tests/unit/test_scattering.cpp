#include <catch_amalgamated.hpp>

#include <boost/numeric/odeint.hpp>
#include <array>
#include <cmath>
#include <random>

#include "stepkdv/scattering.hpp"

using namespace stepkdv;
using Catch::Approx;

namespace {

// Independent oracle: integrate -f'' - q f = k^2 f directly for f, from plane-wave data.
std::pair<cplx, cplx> shoot(const InitialData& d, cplx k, double x0, cplx sign) {
    using S = std::array<cplx, 2>;
    S y{std::exp(sign * I * k * x0), sign * I * k * std::exp(sign * I * k * x0)};
    auto rhs = [&](const S& s, S& ds, double x) {
        ds[0] = s[1];
        ds[1] = -(k * k + d.u0(x)) * s[0];
    };
    namespace ode = boost::numeric::odeint;
    ode::integrate_adaptive(ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<S, double, S, double>()),
                            rhs, y, x0, 0.0, x0 < 0 ? 1e-3 : -1e-3);
    return {y[0], y[1]};
}

}  // namespace

TEST_CASE("lambda map branches", "[scattering]") {
    CHECK(std::abs(lambda_map(1.25, 1.0) - 0.75) < 1e-15);
    CHECK(std::abs(lambda_map(cplx(0.3, -0.2), 0.0) - cplx(0.3, -0.2)) < 1e-15);
    CHECK(std::abs(lambda_map(0.0, 1.0, 1) - I) < 1e-15);
    CHECK(std::abs(lambda_map(cplx(0.0, 1e-9), 1.0) - I) < 1e-8);
    CHECK_THROWS_AS(lambda_map(0.2, 1.0), DomainError);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        const cplx z(U(rng), U(rng));
        const cplx l = lambda_map(z, 1.3);
        CHECK(std::abs(l * l - (z * z - 1.69)) < 1e-12);
        CHECK(std::abs(lambda_map(-z, 1.3) + l) < 1e-12);
        CHECK(z.imag() * l.imag() > 0.0);
    }
}

TEST_CASE("pure step closed forms", "[scattering]") {
    for (double c : {1.0, std::sqrt(2.0)}) {
        Scattering S(make_initial_data("pure-step", c));
        for (double s : {1.5, -2.0, 3.7, -1.6}) {
            if (s * s <= c * c) continue;
            const cplx lam = lambda_map(s, c);
            const auto k = S.coefficients(s);
            CHECK(std::abs(k.a - (s + lam) / (2.0 * s)) < 1e-14);
            CHECK(std::abs(k.b - (s - lam) / (2.0 * s)) < 1e-14);
            CHECK(std::abs(k.A - 0.5 * (1.0 + s / lam)) < 1e-14);
            CHECK(std::abs(k.B - 0.5 * (1.0 - s / lam)) < 1e-14);
        }
    }
    Scattering S(make_initial_data("pure-step", 1.0));
    CHECK(std::abs(S.reflection_left(1.5) - 0.1458980337503155) < 1e-12);
    CHECK(std::abs(S.coefficients(1.5).a - 0.8726779962499649) < 1e-12);
    CHECK(std::abs(S.reflection_left(1.0 / std::sqrt(2.0)) + I) < 1e-14);
    CHECK(std::abs(S.reflection_left(0.0) + 1.0) < 1e-14);
    CHECK(S.discrete_spectrum().empty());
    const auto m = S.cut_matching_data();
    REQUIRE(m.valid);
    CHECK(std::abs(m.kappa1 - cplx(0.0, -4.0 * std::sqrt(2.0))) < 1e-6);
    CHECK(std::abs(m.kappa2) < 1e-6);
    CHECK(std::abs(m.gamma - 2.0 * std::sqrt(2.0)) < 1e-6);
    CHECK(std::abs(-I * m.gamma - m.kappa1 - I * std::conj(m.gamma)) < 1e-6);
    S.set_matching(m);
    CHECK(std::abs(S.reflection_right(1.5) + 0.1458980337503155) < 1e-12);
    for (double s : {-0.9, -0.3, 0.0, 0.4, 0.8}) {
        CHECK(std::abs(S.reflection_right(s) - S.reflection_right(-s) - S.cut_jump(s)) < 1e-12);
    }
    CHECK(std::abs(S.reflection_right(-1.0 + 1e-10) + 1.0) < 1e-4);
    CHECK(S.genericity_check().generic);
}

TEST_CASE("Jost values against a direct shooting oracle", "[scattering]") {
    const InitialData d = make_initial_data("gaussian-bump", 1.0);
    const JostValues J = solve_jost(d, 1.0);
    const auto [pm, dpm] = shoot(d, 1.0, -d.L, -1.0);
    CHECK(std::abs(J.phi_m - pm) < 1e-8);
    CHECK(std::abs(J.dphi_m - dpm) < 1e-8);
    const auto [pp, dpp] = shoot(d, 1.0, -d.L, 1.0);
    CHECK(std::abs(J.phi_p - pp) < 1e-8);
    CHECK(std::abs(J.dphi_p - dpp) < 1e-8);
    // right side: lambda = 0 at z = 1, c = 1; use z = 2 instead
    const JostValues K = solve_jost(d, 2.0);
    const auto [qp, dqp] = shoot(d, K.lambda, d.L, 1.0);
    CHECK(std::abs(K.psi_p - qp) < 1e-8);
    CHECK(std::abs(K.dpsi_p - dqp) < 1e-8);
    // Wronskian normalization W(phi^p, phi^m) = -2iz
    CHECK(std::abs(wronskian(J.phi_p, J.dphi_p, J.phi_m, J.dphi_m) + 2.0 * I) < 1e-10);
    CHECK(std::abs(wronskian(K.psi_p, K.dpsi_p, K.psi_m, K.dpsi_m) + 2.0 * I * K.lambda) < 1e-10);
}

TEST_CASE("smooth family identities", "[scattering]") {
    Scattering S(make_initial_data("erf-squared", 1.0));
    for (double s : {1.2, -1.7, 2.5, 4.0}) {
        const auto kp = S.coefficients(s), km = S.coefficients(-s);
        const cplx lam = lambda_map(s, 1.0);
        const cplx Rl = kp.b / kp.a, Rlm = km.b / km.a;
        CHECK(std::abs(kp.A * km.a * (1.0 - Rl * Rlm) - 1.0) < 1e-8);
        CHECK(std::abs(kp.B + km.b * s / lam) < 1e-8);
        CHECK(std::abs(kp.A - kp.a * s / lam) < 1e-12);
        CHECK(std::abs(std::conj(S.reflection_left(s)) - S.reflection_left(-s)) < 1e-9);
        CHECK(std::abs(S.reflection_left(s)) <= 1.0 + 1e-9);
    }
    CHECK(std::abs(S.reflection_left(0.0) + 1.0) < 1e-9);
    for (double s : {-0.8, -0.2, 0.5}) CHECK(std::abs(std::abs(S.reflection_left(s)) - 1.0) < 1e-8);
    CHECK(std::abs(S.reflection_right_continued(1.0) + 1.0) < 1e-9);
    CHECK(std::abs(S.reflection_right_continued(-1.0) + 1.0) < 1e-9);
    CHECK(S.discrete_spectrum().empty());
    const auto m = S.cut_matching_data();
    REQUIRE(m.valid);
    CHECK(std::abs(-I * m.gamma - m.kappa1 - I * std::conj(m.gamma)) < 1e-5);
    // 2iz(a(z) - 1) -> int u0 as z -> i infinity
    const double y = 200.0;
    const cplx lim = 2.0 * I * cplx(0.0, y) * (S.a(cplx(0.0, y)) - 1.0);
    double integral = 0.0;
    for (double x = -S.data().L; x < S.data().L; x += 1e-3) integral += 1e-3 * S.data().u0(x + 5e-4);
    CHECK(std::abs(lim - integral) < 1e-2 * std::max(1.0, std::abs(integral)));
}

TEST_CASE("soliton data for the gaussian bump", "[scattering]") {
    Scattering S(make_initial_data("gaussian-bump", 1.0));
    const auto zs = S.discrete_spectrum();
    REQUIRE(zs.size() == 1);
    CHECK(std::abs(zs[0] - cplx(0.0, 0.950681)) < 1e-4);
    const Pole p = S.norming_constants(zs[0]);
    CHECK(std::abs(p.norming_left - cplx(0.0, 3.48119)) < 1e-3);
    CHECK(std::abs(p.norming_right - cplx(0.0, 3.90351)) < 1e-3);
}

TEST_CASE("Poeschl-Teller well", "[scattering]") {
    Scattering S(make_initial_data("sech2", 0.0));
    const auto zs = S.discrete_spectrum();
    REQUIRE(zs.size() == 1);
    CHECK(std::abs(zs[0] - I) < 1e-8);
    // reflectionless: b vanishes on the real line
    CHECK(std::abs(S.reflection_left(0.7)) < 1e-9);
}
