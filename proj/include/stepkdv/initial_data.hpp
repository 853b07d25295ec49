#pragma once

// Step-like initial data u(x,0) = u0(x) + H_c(x) in the normalized frame:
// u -> 0 as x -> -inf and u -> -c^2 as x -> +inf, H_c = -c^2 on x > 0.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stepkdv/types.hpp"

namespace stepkdv {

struct InitialData {
    std::string family;                    // pure-step | erf-squared | gaussian-bump | box | sech2 | tabulated
    double c = 1.0;                        // step parameter
    double nu = 10.0;                      // exponential decay rate of u0
    double L = 10.0;                       // |u0| below truncation tolerance for |x| > L
    std::vector<double> breakpoints;       // possible discontinuities of u0 other than x = 0
    std::map<std::string, double> params;  // family parameters
    std::vector<double> xs, us;            // samples of u0 (tabulated family)
    bool smooth = false;                   // u(x,0) smooth: reflection coefficients decay spectrally
    std::function<double(double)> u0;      // perturbation of H_c

    bool is_pure_step() const { return family == "pure-step"; }
    double heaviside(double x) const { return x > 0.0 ? -c * c : 0.0; }
    // full initial profile in the normalized frame
    double initial(double x) const { return u0(x) + heaviside(x); }
    // potentials entering the Jost problems on x <= 0 and x >= 0
    double left_potential(double x) const { return u0(x); }
    double right_potential(double x) const { return u0(x); }
};

// Builds a family by name. Missing parameters take their defaults:
//   erf-squared:   u(x,0) = -c^2/4 (1 + erf x)^2
//   gaussian-bump: u(x,0) = -c^2/4 (1 + erf x)^2 + amplitude exp(-x^2/2)   (amplitude = 2)
//   box:           u0 = height on [left, right]                          (height = 1, [-1, 1])
//   sech2:         u0 = amplitude sech^2(x)                               (amplitude = 2)
// Throws DomainError for unknown families or invalid parameters.
InitialData make_initial_data(const std::string& family, double c,
                              const std::map<std::string, double>& params = {});

// Tabulated perturbation (cubic spline through the samples, zero outside).
InitialData make_tabulated(double c, std::vector<double> xs, std::vector<double> us, double nu = 10.0);

// Truncation length so that |u0| < tol beyond it.
double truncation_length(const std::function<double(double)>& u0, double tol = 1e-16,
                         double xmax = 60.0);

nlohmann::json to_json(const InitialData& d);
InitialData initial_data_from_json(const nlohmann::json& j);

}  // namespace stepkdv
