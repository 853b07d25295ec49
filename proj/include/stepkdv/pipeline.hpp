#pragma once

// Orchestration: scattering analysis from a configuration, point solves and grid sweeps.

#include <iosfwd>
#include <string>
#include <vector>

#include "stepkdv/config.hpp"
#include "stepkdv/scattering_io.hpp"

namespace stepkdv {

// Environment variable holding the number of sweep workers.
inline constexpr const char* threads_env = "STEPKDV_THREADS";

struct FieldSample {
    double x = 0.0, t = 0.0;
    double u = NAN;
    std::string region;               // region tag, or empty on failure
    double residual_norm = NAN;       // relative collocation residual
    double condition_estimate = NAN;  // reciprocal of the LU condition estimate
    double wall_time = 0.0;           // seconds
    std::string error;                // nonempty for failed samples
    bool ok() const { return error.empty(); }
};

// Builds the scattering data for the configuration (analysis included).
ScatteringFile run_scatter(const RunConfig& cfg);

// u(x,t) in the frame of the file (boost applied); never throws for numerical failures.
FieldSample run_solve(const ScatteringFile& f, double x, double t, OperatorCache* cache = nullptr);

// Worker count: explicit request, else the environment variable, else hardware concurrency.
int parallelism(int requested = 0);

// Samples ordered by t (ascending), then x (as given); independent of the worker count.
std::vector<FieldSample> run_sweep(const ScatteringFile& f, const std::vector<double>& xs,
                                   std::vector<double> ts, int threads = 0);

// Condition estimates above this mark a point as failed: the residual alone cannot see a near-singular system.
inline constexpr double cond_max = 1e12;

inline constexpr const char* csv_header = "x,t,u,region,residual,cond";
// Failed samples carry region "error:<message>" and nan values.
void write_csv(std::ostream& out, const std::vector<FieldSample>& samples);
std::string format_number(double v);  // 17 significant digits

}  // namespace stepkdv
