#pragma once

// Run configuration (TOML, versioned schema).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stepkdv/deformation.hpp"
#include "stepkdv/scattering.hpp"

namespace stepkdv {

inline constexpr int config_schema_version = 1;

struct GridSpec {
    double x_min = -10.0, x_max = 10.0;
    int nx = 201;
    std::vector<double> t;
    std::vector<double> xs() const;  // uniform, endpoints included
};

struct RunConfig {
    int schema_version = config_schema_version;
    // initial data: a builtin family with parameters, or a sample table
    std::string family = "pure-step";
    double c = 1.0;
    std::map<std::string, double> params;
    std::string table_path;            // two columns x,u0 (tabulated family)
    std::vector<double> breakpoints;   // extra discontinuities of a table
    double nu = 10.0;                  // decay rate of a table
    // tolerances
    double volterra_tol = 1e-13;       // Jost integration (relative)
    double rh_tol = 1e-8;              // collocation residual above which a sample is flagged
    double fit_tol = 1e-8;             // eigenvalue acceptance under refinement
    ScatteringOptions scattering;
    SolveOptions solve;
    double boost = 0.0;                // Galilean boost a: u(x,t) = u_n(x - 6at, t) + a
    GridSpec grid;
    std::string scattering_out, csv_out;
    int threads = 0;                   // 0: environment or hardware default
};

// Throws DomainError with a message naming the offending key.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// Checks value ranges (c > 0, positive tolerances, t >= 0, nonempty grid).
void validate_config(const RunConfig& cfg);

InitialData make_initial_data(const RunConfig& cfg);

}  // namespace stepkdv
