#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "stepkdv/pipeline.hpp"

using namespace stepkdv;

namespace {

const char* base_config = R"(
schema_version = 1
[initial_data]
family = "gaussian-bump"
c = 1.0
[initial_data.params]
amplitude = 2.0
[nodes]
segment = 30
[frame]
boost = 0.5
[grid]
x_min = -2.0
x_max = 2.0
nx = 5
t = [0.0, 1.0]
)";

std::string replace(std::string s, const std::string& a, const std::string& b) {
    const size_t p = s.find(a);
    REQUIRE(p != std::string::npos);
    return s.replace(p, a.size(), b);
}

}  // namespace

TEST_CASE("configuration parsing", "[pipeline]") {
    const RunConfig cfg = parse_config(base_config);
    CHECK(cfg.family == "gaussian-bump");
    CHECK(cfg.c == 1.0);
    CHECK(cfg.params.at("amplitude") == 2.0);
    CHECK(cfg.solve.plan.nodes_segment == 30);
    CHECK(cfg.solve.plan.nodes_ray == PlanOptions{}.nodes_ray);
    CHECK(cfg.boost == 0.5);
    CHECK(cfg.grid.xs() == std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0});
    CHECK(cfg.grid.t == std::vector<double>{0.0, 1.0});

    CHECK_THROWS_AS(parse_config(replace(base_config, "c = 1.0", "c = 0.0")), DomainError);
    CHECK_THROWS_AS(parse_config(replace(base_config, "c = 1.0", "c = -1.0")), DomainError);
    CHECK_THROWS_AS(parse_config(replace(base_config, "schema_version = 1", "")), DomainError);
    CHECK_THROWS_AS(parse_config(replace(base_config, "schema_version = 1", "schema_version = 7")), DomainError);
    CHECK_THROWS_AS(parse_config(replace(base_config, "c = 1.0", "c = \"one\"")), DomainError);
    CHECK_THROWS_AS(parse_config(replace(base_config, "t = [0.0, 1.0]", "t = [-1.0]")), DomainError);
    CHECK_THROWS_AS(parse_config(replace(base_config, "nx = 5", "nx = 0")), DomainError);
    CHECK_THROWS_AS(parse_config("schema_version = 1\n[initial_data\n"), DomainError);
    try {
        parse_config(replace(base_config, "c = 1.0", "c = 0.0"));
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("initial_data.c") != std::string::npos);
    }
}

TEST_CASE("scattering file round trip", "[pipeline]") {
    const ScatteringFile f = run_scatter(parse_config(base_config));
    REQUIRE(f.scattering->poles().size() == 1);
    const auto path = std::filesystem::temp_directory_path() / "stepkdv_test_scattering.json";
    write_scattering(path.string(), f, {21, 0.0});
    const ScatteringFile g = read_scattering(path.string());
    std::filesystem::remove(path);
    const Scattering &A = *f.scattering, &B = *g.scattering;
    CHECK(B.data().family == "gaussian-bump");
    CHECK(B.c() == A.c());
    CHECK(B.poles()[0].z == A.poles()[0].z);
    CHECK(B.poles()[0].norming_left == A.poles()[0].norming_left);
    CHECK(B.poles()[0].norming_right == A.poles()[0].norming_right);
    CHECK(B.decay_cutoff() == A.decay_cutoff());
    CHECK(B.matching().gamma == A.matching().gamma);
    CHECK(g.solve.boost == 0.5);
    CHECK(g.solve.plan.nodes_segment == 30);
    CHECK(B.strip_bound() == A.strip_bound());
    const nlohmann::json j = to_json(f, {3, 2.0});
    CHECK(j["version"] == scattering_file_version);
    CHECK(j["reflection"].size() == 3);
    nlohmann::json bad = j;
    bad["version"] = 99;
    CHECK_THROWS_AS(scattering_from_json(bad), DomainError);
    bad = j;
    bad.erase("poles");
    CHECK_THROWS_AS(scattering_from_json(bad), DomainError);
}

TEST_CASE("CSV output and sweep ordering", "[pipeline]") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-2.0) == "-2");
    CHECK(format_number(NAN) == "nan");

    RunConfig cfg = parse_config(replace(base_config, "gaussian-bump", "pure-step"));
    cfg.boost = 0.0;
    const ScatteringFile f = run_scatter(cfg);

    std::ostringstream empty;
    write_csv(empty, run_sweep(f, {0.0, 1.0}, {}));
    CHECK(empty.str() == "x,t,u,region,residual,cond\n");

    const std::vector<FieldSample> s = run_sweep(f, {-3.0, 3.0}, {0.0, -1.0}, 1);
    REQUIRE(s.size() == 4);
    CHECK(s[0].t == -1.0);
    CHECK(s[1].t == -1.0);
    CHECK(s[0].x == -3.0);
    CHECK(s[1].x == 3.0);
    CHECK_FALSE(s[0].ok());
    CHECK(s[2].ok());
    CHECK(std::abs(s[2].u) < 1e-6);
    CHECK(std::abs(s[3].u + 1.0) < 1e-6);
    for (const FieldSample& p : s) {
        CHECK(p.wall_time >= 0.0);
        if (p.ok()) {
            CHECK(std::isfinite(p.residual_norm));
            CHECK(std::isfinite(p.condition_estimate));
            CHECK(!p.region.empty());
        }
    }
    std::ostringstream a, b;
    write_csv(a, s);
    write_csv(b, run_sweep(f, {-3.0, 3.0}, {0.0, -1.0}, 2));
    CHECK(a.str() == b.str());
    std::istringstream lines(a.str());
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(row.rfind("-3,-1,nan,error:", 0) == 0);
    CHECK(std::count(row.begin(), row.end(), ',') == 5);
}

TEST_CASE("parallelism from the environment", "[pipeline]") {
    CHECK(parallelism(3) == 3);
    setenv(threads_env, "5", 1);
    CHECK(parallelism() == 5);
    setenv(threads_env, "junk", 1);
    CHECK(parallelism() >= 1);
    unsetenv(threads_env);
    CHECK(parallelism() >= 1);
}
