#pragma once

// Versioned scattering files: the initial data, analysis results (poles, norming constants,
// matching data, genericity, cutoff), solver settings and a table of reflection samples.

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "stepkdv/deformation.hpp"
#include "stepkdv/scattering.hpp"

namespace stepkdv {

inline constexpr int scattering_file_version = 1;

struct ScatteringFile {
    std::shared_ptr<Scattering> scattering;  // shared read-only between copies
    SolveOptions solve;   // solve.boost: reported field is u(x,t) = u_n(x - 6at, t) + a
    double rh_tol = 1e-8; // collocation residual above which a sample is reported as failed
};

struct ReflectionTableSpec {
    int samples = 201;
    double s_max = 0.0;  // 0: max(4, 2c + 2)
};

nlohmann::json to_json(const ScatteringFile& f, const ReflectionTableSpec& table = {});
ScatteringFile scattering_from_json(const nlohmann::json& j);

void write_scattering(const std::string& path, const ScatteringFile& f, const ReflectionTableSpec& table = {});
// Throws DomainError on unreadable files, schema mismatches or missing fields.
ScatteringFile read_scattering(const std::string& path);

}  // namespace stepkdv
