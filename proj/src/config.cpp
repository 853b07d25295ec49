#include "stepkdv/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <toml.hpp>

namespace stepkdv {

std::vector<double> GridSpec::xs() const {
    std::vector<double> out;
    if (nx <= 0) return out;
    if (nx == 1) return {x_min};
    for (int i = 0; i < nx; ++i) out.push_back(x_min + (x_max - x_min) * i / (nx - 1));
    return out;
}

namespace {

double number(const toml::node_view<const toml::node>& v, const std::string& key, double def) {
    if (!v) return def;
    if (auto d = v.value<double>()) return *d;
    throw DomainError("config: '" + key + "' must be a number");
}

int integer(const toml::node_view<const toml::node>& v, const std::string& key, int def) {
    if (!v) return def;
    if (auto d = v.value<int64_t>()) return int(*d);
    throw DomainError("config: '" + key + "' must be an integer");
}

std::string text(const toml::node_view<const toml::node>& v, const std::string& key, const std::string& def) {
    if (!v) return def;
    if (auto d = v.value<std::string>()) return *d;
    throw DomainError("config: '" + key + "' must be a string");
}

std::vector<double> numbers(const toml::node_view<const toml::node>& v, const std::string& key) {
    std::vector<double> out;
    if (!v) return out;
    const toml::array* a = v.as_array();
    if (!a) throw DomainError("config: '" + key + "' must be an array");
    for (const auto& e : *a) {
        auto d = e.value<double>();
        if (!d) throw DomainError("config: '" + key + "' must contain numbers");
        out.push_back(*d);
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& src, const std::string& base_dir) {
    toml::table tbl;
    try {
        tbl = toml::parse(src);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "config: " << e.description() << " at line " << e.source().begin.line;
        throw DomainError(os.str());
    }
    const toml::node_view<const toml::node> root{static_cast<const toml::node&>(tbl)};
    RunConfig cfg;
    if (!root["schema_version"]) throw DomainError("config: missing 'schema_version'");
    cfg.schema_version = integer(root["schema_version"], "schema_version", 0);
    if (cfg.schema_version != config_schema_version)
        throw DomainError("config: unsupported schema_version " + std::to_string(cfg.schema_version));

    const auto id = root["initial_data"];
    if (!id) throw DomainError("config: missing [initial_data]");
    cfg.family = text(id["family"], "initial_data.family", "pure-step");
    if (!id["c"]) throw DomainError("config: missing 'initial_data.c'");
    cfg.c = number(id["c"], "initial_data.c", 1.0);
    if (const toml::table* p = id["params"].as_table()) {
        for (const auto& [k, v] : *p) {
            auto d = v.value<double>();
            if (!d) throw DomainError("config: initial_data.params." + std::string(k.str()) + " must be a number");
            cfg.params[std::string(k.str())] = *d;
        }
    }
    cfg.table_path = text(id["table"], "initial_data.table", "");
    if (!cfg.table_path.empty() && std::filesystem::path(cfg.table_path).is_relative())
        cfg.table_path = (std::filesystem::path(base_dir) / cfg.table_path).string();
    cfg.breakpoints = numbers(id["breakpoints"], "initial_data.breakpoints");
    cfg.nu = number(id["nu"], "initial_data.nu", cfg.nu);

    const auto tol = root["tolerances"];
    cfg.volterra_tol = number(tol["volterra_tol"], "tolerances.volterra_tol", cfg.volterra_tol);
    cfg.rh_tol = number(tol["rh_tol"], "tolerances.rh_tol", cfg.rh_tol);
    cfg.fit_tol = number(tol["fit_tol"], "tolerances.fit_tol", cfg.fit_tol);
    cfg.scattering.jost.rtol = cfg.volterra_tol;
    cfg.scattering.spectrum_tol = cfg.fit_tol;
    cfg.scattering.spectrum_n = integer(tol["spectrum_n"], "tolerances.spectrum_n", cfg.scattering.spectrum_n);

    PlanOptions& po = cfg.solve.plan;
    const auto nodes = root["nodes"];
    po.nodes_segment = integer(nodes["segment"], "nodes.segment", po.nodes_segment);
    po.nodes_ray = integer(nodes["ray"], "nodes.ray", po.nodes_ray);
    po.nodes_arc = integer(nodes["arc"], "nodes.arc", po.nodes_arc);
    const auto plan = root["plan"];
    po.delta = number(plan["delta"], "plan.delta", po.delta);
    po.epsilon_c = number(plan["epsilon_c"], "plan.epsilon_c", po.epsilon_c);
    po.alpha_max = number(plan["alpha"], "plan.alpha", po.alpha_max);
    po.growth_max = number(plan["growth_max"], "plan.growth_max", po.growth_max);

    cfg.boost = number(root["frame"]["boost"], "frame.boost", 0.0);

    const auto grid = root["grid"];
    cfg.grid.x_min = number(grid["x_min"], "grid.x_min", cfg.grid.x_min);
    cfg.grid.x_max = number(grid["x_max"], "grid.x_max", cfg.grid.x_max);
    cfg.grid.nx = integer(grid["nx"], "grid.nx", cfg.grid.nx);
    cfg.grid.t = numbers(grid["t"], "grid.t");

    cfg.scattering_out = text(root["output"]["scattering"], "output.scattering", "");
    cfg.csv_out = text(root["output"]["csv"], "output.csv", "");
    cfg.threads = integer(root["run"]["threads"], "run.threads", 0);
    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("config: cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

void validate_config(const RunConfig& cfg) {
    if (!(cfg.c > 0.0) || !std::isfinite(cfg.c)) throw DomainError("config: initial_data.c must be positive");
    for (auto [k, v] : {std::pair{"volterra_tol", cfg.volterra_tol}, {"rh_tol", cfg.rh_tol}, {"fit_tol", cfg.fit_tol}})
        if (!(v > 0.0)) throw DomainError(std::string("config: tolerances.") + k + " must be positive");
    if (cfg.grid.nx < 1) throw DomainError("config: grid.nx must be at least 1");
    if (!(cfg.grid.x_min <= cfg.grid.x_max)) throw DomainError("config: grid.x_min must not exceed grid.x_max");
    for (double t : cfg.grid.t)
        if (!(t >= 0.0)) throw DomainError("config: grid.t must be non-negative");
    const PlanOptions& po = cfg.solve.plan;
    if (po.nodes_segment < 4 || po.nodes_ray < 4 || po.nodes_arc < 4)
        throw DomainError("config: node counts must be at least 4");
    if (!(po.delta > 0.0)) throw DomainError("config: plan.delta must be positive");
    if (po.epsilon_c < 0.0 || po.alpha_max < 0.0) throw DomainError("config: plan overrides must be non-negative");
    if (cfg.threads < 0) throw DomainError("config: run.threads must be non-negative");
    if (cfg.family == "tabulated" && cfg.table_path.empty())
        throw DomainError("config: tabulated data needs initial_data.table");
}

InitialData make_initial_data(const RunConfig& cfg) {
    if (cfg.family != "tabulated") return make_initial_data(cfg.family, cfg.c, cfg.params);
    std::ifstream in(cfg.table_path);
    if (!in) throw DomainError("config: cannot read table " + cfg.table_path);
    std::vector<double> xs, us;
    std::string line;
    while (std::getline(in, line)) {
        for (char& ch : line)
            if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
        std::istringstream ls(line);
        double x, u;
        if (ls >> x >> u) {
            xs.push_back(x);
            us.push_back(u);
        }
    }
    InitialData d = make_tabulated(cfg.c, xs, us, cfg.nu);
    for (double b : cfg.breakpoints) d.breakpoints.push_back(b);
    std::sort(d.breakpoints.begin(), d.breakpoints.end());
    d.breakpoints.erase(std::unique(d.breakpoints.begin(), d.breakpoints.end()), d.breakpoints.end());
    return d;
}

}  // namespace stepkdv
