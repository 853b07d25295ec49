#include "stepkdv/scattering_io.hpp"

#include <cmath>
#include <fstream>

namespace stepkdv {

namespace {

nlohmann::json cjson(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

cplx cread(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double read_or_inf(const nlohmann::json& j) { return j.is_null() ? INFINITY : j.get<double>(); }

}  // namespace

nlohmann::json to_json(const ScatteringFile& f, const ReflectionTableSpec& table) {
    const Scattering& S = *f.scattering;
    const double c = S.c();
    nlohmann::json j;
    j["format"] = "stepkdv-scattering";
    j["version"] = scattering_file_version;
    j["initial_data"] = to_json(S.data());

    const ScatteringOptions& so = S.options();
    j["options"] = {{"jost_rtol", so.jost.rtol},       {"jost_atol", so.jost.atol},
                    {"spectrum_n", so.spectrum_n},     {"spectrum_domain", so.spectrum_domain},
                    {"spectrum_tol", so.spectrum_tol}, {"genericity_tol", so.genericity_tol},
                    {"fit_points", so.fit_points},     {"fit_radius", so.fit_radius},
                    {"fit_ratio", so.fit_ratio},       {"decay_tol", so.decay_tol},
                    {"strip_height_max", so.strip_height_max}};
    const PlanOptions& po = f.solve.plan;
    j["solver"] = {{"delta", po.delta},
                   {"nodes_segment", po.nodes_segment},
                   {"nodes_ray", po.nodes_ray},
                   {"nodes_arc", po.nodes_arc},
                   {"growth_max", po.growth_max},
                   {"strip_fraction", po.strip_fraction},
                   {"alpha_max", po.alpha_max},
                   {"epsilon_c", po.epsilon_c},
                   {"sign_residue", f.solve.sign_residue},
                   {"rh_tol", f.rh_tol}};
    j["frame"] = {{"boost", f.solve.boost}};

    nlohmann::json poles = nlohmann::json::array();
    for (const Pole& p : S.poles())
        poles.push_back({{"z", cjson(p.z)}, {"norming_left", cjson(p.norming_left)},
                         {"norming_right", cjson(p.norming_right)}});
    j["poles"] = poles;
    const MatchingData& m = S.matching();
    j["matching"] = {{"kappa1", cjson(m.kappa1)}, {"kappa2", cjson(m.kappa2)}, {"gamma", cjson(m.gamma)},
                     {"alpha", cjson(m.alpha)},   {"beta", cjson(m.beta)},     {"fit_residual", finite_or_null(m.fit_residual)},
                     {"valid", m.valid}};
    const GenericityReport& g = S.genericity();
    j["genericity"] = {{"generic", g.generic},         {"wronskian_c", finite_or_null(g.wronskian_c)},
                       {"wronskian_0", finite_or_null(g.wronskian_0)}, {"min_abs_a", finite_or_null(g.min_abs_a)},
                       {"min_pole_gap", finite_or_null(g.min_pole_gap)}, {"message", g.message}};
    j["decay_cutoff"] = finite_or_null(S.decay_cutoff());

    // reflection samples on a real grid (grid points on 0 and +-c are nudged off)
    nlohmann::json rows = nlohmann::json::array();
    if (table.samples > 1) {
        const double smax = table.s_max > 0.0 ? table.s_max : std::max(4.0, 2.0 * c + 2.0);
        for (int k = 0; k < table.samples; ++k) {
            double s = -smax + 2.0 * smax * k / (table.samples - 1);
            for (double bad : {0.0, c, -c})
                if (std::abs(s - bad) < 1e-9) s = bad + 1e-6;
            nlohmann::json r;
            r["s"] = s;
            r["R_left"] = cjson(S.reflection_left(s));
            r["R_right"] = cjson(S.reflection_right(s));
            rows.push_back(r);
        }
    }
    j["reflection"] = rows;
    return j;
}

ScatteringFile scattering_from_json(const nlohmann::json& j) {
    try {
        if (j.value("format", std::string()) != "stepkdv-scattering")
            throw DomainError("not a scattering file");
        const int v = j.at("version").get<int>();
        if (v != scattering_file_version)
            throw DomainError("unsupported scattering file version " + std::to_string(v));
        ScatteringOptions so;
        const auto& o = j.at("options");
        so.jost.rtol = o.at("jost_rtol").get<double>();
        so.jost.atol = o.at("jost_atol").get<double>();
        so.spectrum_n = o.at("spectrum_n").get<int>();
        so.spectrum_domain = o.at("spectrum_domain").get<double>();
        so.spectrum_tol = o.at("spectrum_tol").get<double>();
        so.genericity_tol = o.at("genericity_tol").get<double>();
        so.fit_points = o.at("fit_points").get<int>();
        so.fit_radius = o.at("fit_radius").get<double>();
        so.fit_ratio = o.at("fit_ratio").get<double>();
        so.decay_tol = o.at("decay_tol").get<double>();
        so.strip_height_max = o.at("strip_height_max").get<double>();

        ScatteringFile f;
        f.scattering = std::make_shared<Scattering>(initial_data_from_json(j.at("initial_data")), so);
        Scattering& S = *f.scattering;

        const auto& s = j.at("solver");
        f.solve.plan.delta = s.at("delta").get<double>();
        f.solve.plan.nodes_segment = s.at("nodes_segment").get<int>();
        f.solve.plan.nodes_ray = s.at("nodes_ray").get<int>();
        f.solve.plan.nodes_arc = s.at("nodes_arc").get<int>();
        f.solve.plan.growth_max = s.at("growth_max").get<double>();
        f.solve.plan.strip_fraction = s.at("strip_fraction").get<double>();
        f.solve.plan.alpha_max = s.at("alpha_max").get<double>();
        f.solve.plan.epsilon_c = s.at("epsilon_c").get<double>();
        f.solve.sign_residue = s.at("sign_residue").get<double>();
        f.rh_tol = s.at("rh_tol").get<double>();
        f.solve.boost = j.at("frame").at("boost").get<double>();

        std::vector<Pole> poles;
        for (const auto& p : j.at("poles"))
            poles.push_back({cread(p.at("z")), cread(p.at("norming_left")), cread(p.at("norming_right"))});
        S.set_poles(std::move(poles));
        const auto& m = j.at("matching");
        MatchingData md;
        md.kappa1 = cread(m.at("kappa1"));
        md.kappa2 = cread(m.at("kappa2"));
        md.gamma = cread(m.at("gamma"));
        md.alpha = cread(m.at("alpha"));
        md.beta = cread(m.at("beta"));
        md.fit_residual = read_or_inf(m.at("fit_residual"));
        md.valid = m.at("valid").get<bool>();
        S.set_matching(md);
        const auto& g = j.at("genericity");
        GenericityReport gr;
        gr.generic = g.at("generic").get<bool>();
        gr.wronskian_c = read_or_inf(g.at("wronskian_c"));
        gr.wronskian_0 = read_or_inf(g.at("wronskian_0"));
        gr.min_abs_a = read_or_inf(g.at("min_abs_a"));
        gr.min_pole_gap = read_or_inf(g.at("min_pole_gap"));
        gr.message = g.at("message").get<std::string>();
        S.set_genericity(gr);
        S.set_decay_cutoff(read_or_inf(j.at("decay_cutoff")));
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed scattering file: ") + e.what());
    }
}

void write_scattering(const std::string& path, const ScatteringFile& f, const ReflectionTableSpec& table) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path);
    out << to_json(f, table).dump(1) << '\n';
    if (!out) throw DomainError("write failed: " + path);
}

ScatteringFile read_scattering(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("malformed scattering file: " + std::string(e.what()));
    }
    return scattering_from_json(j);
}

}  // namespace stepkdv
