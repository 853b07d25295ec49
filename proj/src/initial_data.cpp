#include "stepkdv/initial_data.hpp"

#include <gsl/gsl_interp.h>

#include <algorithm>
#include <cmath>
#include <memory>

namespace stepkdv {

namespace {

double param(const std::map<std::string, double>& p, const std::string& k, double def) {
    auto it = p.find(k);
    return it == p.end() ? def : it->second;
}

}  // namespace

double truncation_length(const std::function<double(double)>& u0, double tol, double xmax) {
    // scan inward from xmax; L is the last abscissa where |u0| exceeds tol
    const double dx = 0.05;
    for (double x = xmax; x > 0.0; x -= dx) {
        if (std::abs(u0(x)) > tol || std::abs(u0(-x)) > tol) return std::min(xmax, x + dx);
    }
    return 1.0;
}

InitialData make_initial_data(const std::string& family, double c,
                              const std::map<std::string, double>& params) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("step parameter c must be non-negative");
    InitialData d;
    d.family = family;
    d.c = c;
    d.params = params;
    const double c2 = c * c;
    if (family == "pure-step") {
        d.u0 = [](double) { return 0.0; };
        d.smooth = false;
        d.nu = 1e3;
        d.L = 1.0;
        return d;
    }
    if (family == "erf-squared" || family == "gaussian-bump") {
        const double amp = family == "gaussian-bump" ? param(params, "amplitude", 2.0) : 0.0;
        if (family == "gaussian-bump") d.params["amplitude"] = amp;
        // u(x,0) = -c^2/4 (1+erf x)^2 + amp e^{-x^2/2}; u0 = u(x,0) - H_c(x)
        d.u0 = [c2, amp](double x) {
            const double e = 1.0 + std::erf(x);
            double v = amp * std::exp(-0.5 * x * x);
            if (x > 0.0) {
                // c^2 (1 - (1+erf)^2/4) = c^2 erfc(x) (3 + erf x)/4, free of cancellation
                v += c2 * std::erfc(x) * (3.0 + std::erf(x)) / 4.0;
            } else {
                v -= 0.25 * c2 * e * e;
            }
            return v;
        };
        d.smooth = true;
        d.nu = 1e3;
    } else if (family == "box") {
        const double h = param(params, "height", 1.0);
        const double l = param(params, "left", -1.0);
        const double r = param(params, "right", 1.0);
        if (!(l < r)) throw DomainError("box requires left < right");
        d.params["height"] = h;
        d.params["left"] = l;
        d.params["right"] = r;
        d.u0 = [h, l, r](double x) { return (x >= l && x <= r) ? h : 0.0; };
        for (double b : {l, r})
            if (b != 0.0) d.breakpoints.push_back(b);
        std::sort(d.breakpoints.begin(), d.breakpoints.end());
        d.smooth = false;
        d.nu = 1e3;
        d.L = std::max(std::abs(l), std::abs(r)) + 1.0;
        return d;
    } else if (family == "sech2") {
        const double amp = param(params, "amplitude", 2.0);
        d.params["amplitude"] = amp;
        d.u0 = [amp](double x) {
            const double s = 1.0 / std::cosh(x);
            return amp * s * s;
        };
        d.smooth = true;
        d.nu = 0.99;
    } else {
        throw DomainError("unknown initial-data family '" + family + "'");
    }
    d.L = truncation_length(d.u0, 1e-17 * std::max(1.0, c2));
    return d;
}

InitialData make_tabulated(double c, std::vector<double> xs, std::vector<double> us, double nu) {
    if (xs.size() != us.size() || xs.size() < 4) throw DomainError("tabulated data needs >= 4 samples");
    for (size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw DomainError("tabulated abscissae must be strictly increasing");
    if (!(c >= 0.0)) throw DomainError("step parameter c must be non-negative");
    InitialData d;
    d.family = "tabulated";
    d.c = c;
    d.nu = nu;
    d.xs = xs;
    d.us = us;
    d.smooth = false;
    auto interp = std::shared_ptr<gsl_interp>(gsl_interp_alloc(gsl_interp_cspline, xs.size()), gsl_interp_free);
    auto X = std::make_shared<std::vector<double>>(std::move(xs));
    auto U = std::make_shared<std::vector<double>>(std::move(us));
    gsl_interp_init(interp.get(), X->data(), U->data(), X->size());
    d.u0 = [interp, X, U](double x) {
        if (x < X->front() || x > X->back()) return 0.0;
        return gsl_interp_eval(interp.get(), X->data(), U->data(), x, nullptr);
    };
    d.L = std::max(std::abs(X->front()), std::abs(X->back()));
    // the spline is cut off at the table ends
    for (double b : {X->front(), X->back()})
        if (b != 0.0) d.breakpoints.push_back(b);
    std::sort(d.breakpoints.begin(), d.breakpoints.end());
    d.breakpoints.erase(std::unique(d.breakpoints.begin(), d.breakpoints.end()), d.breakpoints.end());
    return d;
}

nlohmann::json to_json(const InitialData& d) {
    nlohmann::json j;
    j["family"] = d.family;
    j["c"] = d.c;
    j["nu"] = d.nu;
    j["L"] = d.L;
    j["params"] = d.params;
    if (d.family == "tabulated") {
        j["x"] = d.xs;
        j["u0"] = d.us;
    }
    return j;
}

InitialData initial_data_from_json(const nlohmann::json& j) {
    const std::string fam = j.at("family").get<std::string>();
    const double c = j.at("c").get<double>();
    if (fam == "tabulated") {
        return make_tabulated(c, j.at("x").get<std::vector<double>>(), j.at("u0").get<std::vector<double>>(),
                              j.value("nu", 10.0));
    }
    std::map<std::string, double> p;
    if (j.contains("params")) p = j.at("params").get<std::map<std::string, double>>();
    InitialData d = make_initial_data(fam, c, p);
    if (j.contains("nu")) d.nu = j.at("nu").get<double>();
    return d;
}

}  // namespace stepkdv
