#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbmpb/errors.hpp"
#include "rbmpb/sde.hpp"

namespace rbmpb {

// Full description of one experiment run. Either Q_plus/N_plus (direct
// simulation) or rho_inf (charge iteration) selects the mode.
struct ExperimentConfig {
    std::string preset;

    int dimension = 1;
    double inner = 1.0;  // a (1D) or R (shell)
    double outer = 15.0;

    double nu = 1.0;
    double Q_f = 2.0;
    std::array<double, 3> x_c{0.0, 0.0, 0.0};

    std::optional<double> Q_plus;
    std::optional<std::size_t> N_plus;
    std::optional<double> rho_inf;
    double q = 1e-4;  // charge per particle in iteration mode

    double tau = 0.01;
    double T = 50.0;
    ReflectionScheme scheme = ReflectionScheme::reflection();

    double init_lo = 7.0;
    double init_hi = 8.0;
    bool init_whole_domain = false;

    std::size_t bins = 100;
    std::size_t frames = 100;
    std::size_t frame_stride = 1;

    std::uint64_t seed = 1;
    int threads = 1;

    // convergence study
    std::vector<std::size_t> N_plus_list;
    std::size_t repetitions = 50;

    // charge iteration
    double T_c = 50.0;
    double epsilon = 1e-5;
    int max_iters = 20;
    double h_bulk = 2.0;
    double Q_plus_init = 1.0;

    // capacitance
    std::vector<double> qf_grid;
    std::string capacitance_runner = "fd";

    // truncation study / fd-solve
    std::vector<double> L_list;
    double L_ref = 40.0;
    std::optional<double> sigma_f;
    std::size_t fd_nodes = 4001;

    // kde
    std::size_t kde_grid = 100;

    bool direct_mode() const { return !rho_inf.has_value(); }
};

inline std::map<std::string, ExperimentConfig> builtin_presets() {
    std::map<std::string, ExperimentConfig> p;

    ExperimentConfig fig2;
    fig2.dimension = 1;
    fig2.inner = 1.0;
    fig2.outer = 15.0;
    fig2.nu = 1.0;
    fig2.Q_f = 2.0;
    fig2.Q_plus = 1.0;
    fig2.N_plus = 100000;
    fig2.tau = 0.01;
    fig2.T = 50.0;
    fig2.init_lo = 7.0;
    fig2.init_hi = 8.0;
    fig2.bins = 100;
    fig2.frames = 100;
    fig2.frame_stride = 1;
    p["fig2"] = fig2;

    ExperimentConfig fig2d = fig2;
    fig2d.N_plus = 10000;
    p["fig2-desk"] = fig2d;

    ExperimentConfig fig3 = fig2;
    fig3.nu = 0.01;
    fig3.Q_f = 0.04;   // 4 nu
    fig3.Q_plus = 0.4;
    fig3.tau = 2e-4;   // 0.02 nu
    fig3.T = 15.0;
    fig3.bins = 280;
    p["fig3"] = fig3;

    ExperimentConfig fig3d = fig3;
    fig3d.N_plus = 10000;
    p["fig3-desk"] = fig3d;

    ExperimentConfig fig4 = fig2;
    fig4.N_plus_list = {100, 1000, 10000, 100000};
    fig4.repetitions = 100;
    p["fig4"] = fig4;

    ExperimentConfig fig4d = fig2;
    fig4d.N_plus_list = {100, 1000, 10000};
    fig4d.repetitions = 50;
    p["fig4-desk"] = fig4d;

    ExperimentConfig fig5;
    fig5.dimension = 1;
    fig5.inner = 1.0;
    fig5.outer = 30.0;
    fig5.nu = 1.0;
    fig5.Q_f = 2.0;
    fig5.rho_inf = 0.0218;
    fig5.Q_plus.reset();
    fig5.N_plus.reset();
    fig5.q = 1e-4;
    fig5.tau = 0.1;
    fig5.T_c = 50.0;
    fig5.epsilon = 1e-5;
    fig5.max_iters = 20;
    fig5.h_bulk = 2.0;
    fig5.Q_plus_init = 1.0;
    fig5.init_lo = 7.0;
    fig5.init_hi = 8.0;
    fig5.bins = 100;
    p["fig5"] = fig5;

    ExperimentConfig fig6 = fig5;
    fig6.qf_grid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    fig6.capacitance_runner = "fd";
    fig6.epsilon = 1.5e-3;
    fig6.max_iters = 12;
    p["fig6"] = fig6;

    ExperimentConfig fig7;
    fig7.dimension = 3;
    fig7.inner = 1.0;
    fig7.outer = 10.0;
    fig7.nu = 1.0;
    fig7.Q_f = 10.0;  // 10 nu
    fig7.Q_plus = 20.0;
    fig7.N_plus = 10000;
    fig7.tau = 0.01;  // 0.01 nu
    fig7.T = 100.0;
    fig7.init_whole_domain = true;
    fig7.bins = 12;
    fig7.frames = 100;
    fig7.frame_stride = 160;
    p["fig7-nu1"] = fig7;
    p["fig7"] = fig7;
    p["fig7-desk"] = fig7;

    ExperimentConfig fig7b = fig7;
    fig7b.nu = 0.1;
    fig7b.Q_f = 1.0;
    fig7b.tau = 1e-3;
    fig7b.T = 60.0;
    p["fig7-nu0.1"] = fig7b;

    ExperimentConfig fig7c = fig7;
    fig7c.nu = 0.01;
    fig7c.Q_f = 0.1;
    fig7c.tau = 1e-4;
    fig7c.T = 30.0;
    p["fig7-nu0.01"] = fig7c;

    ExperimentConfig fig9;
    fig9.dimension = 3;
    fig9.inner = 2.0;
    fig9.outer = 10.0;
    fig9.nu = 1.0;
    fig9.Q_f = 15.0;
    fig9.x_c = {0.0, 1.5, 0.0};
    fig9.Q_plus = 10.0;
    fig9.N_plus = 10000;
    fig9.tau = 0.01;
    fig9.T = 60.0;
    fig9.init_whole_domain = true;
    fig9.bins = 18;
    fig9.frames = 100;
    fig9.frame_stride = 20;
    fig9.kde_grid = 80;
    p["fig9"] = fig9;

    ExperimentConfig trunc;
    trunc.dimension = 1;
    trunc.inner = 1.0;
    trunc.nu = 1.0;
    trunc.rho_inf = 0.0218;
    trunc.sigma_f = 1.0;
    trunc.L_list = {5.0, 10.0, 15.0, 20.0};
    trunc.L_ref = 40.0;
    p["thm51"] = trunc;

    return p;
}

namespace detail {

template <typename T>
inline T get_checked(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: invalid value for key '" + key + "'");
    }
}

inline void validate(const ExperimentConfig& c) {
    auto require = [](bool ok, const std::string& key, const std::string& why) {
        if (!ok) throw ConfigError("config: key '" + key + "' " + why);
    };
    require(c.dimension == 1 || c.dimension == 2 || c.dimension == 3, "dimension",
            "must be 1, 2 or 3");
    require(c.inner > 0.0 && c.inner < c.outer, "domain", "requires 0 < inner < outer");
    require(c.nu > 0.0, "nu", "must be positive");
    require(c.tau > 0.0, "tau", "must be positive");
    require(c.T > 0.0, "T", "must be positive");
    require(c.q > 0.0, "q", "must be positive");
    require(c.bins >= 1, "bins", "must be at least 1");
    const bool has_direct = c.Q_plus.has_value() || c.N_plus.has_value();
    require(has_direct != c.rho_inf.has_value(), "mode",
            "needs exactly one of {Q_plus/N_plus, rho_inf}");
    if (c.Q_plus) require(*c.Q_plus > 0.0, "Q_plus", "must be positive");
    if (c.rho_inf) require(*c.rho_inf > 0.0, "rho_inf", "must be positive");
    if (c.N_plus) require(*c.N_plus > 0, "N_plus", "must be positive");
    require(c.epsilon > 0.0, "epsilon", "must be positive");
    require(!(c.scheme.kind == SchemeKind::Penalization &&
              (c.scheme.lambda <= 0.0 || c.scheme.lambda > 1.0)),
            "scheme", "penalization weight must lie in (0, 1]");
    if (c.dimension == 1)
        require(c.init_lo >= c.inner && c.init_hi <= c.outer && c.init_lo < c.init_hi, "init",
                "must be an interval inside the domain");
}

inline ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (j.contains("preset")) {
        const auto name = j.at("preset").get<std::string>();
        const auto presets = builtin_presets();
        const auto it = presets.find(name);
        if (it == presets.end()) {
            std::ostringstream msg;
            msg << "config: unknown preset '" << name << "'; known presets:";
            for (const auto& [k, v] : presets) msg << ' ' << k;
            throw ConfigError(msg.str());
        }
        c = it->second;
        c.preset = name;
    }

    c.dimension = get_checked(j, "dimension", c.dimension);
    c.inner = get_checked(j, "inner", c.inner);
    c.outer = get_checked(j, "outer", c.outer);
    c.nu = get_checked(j, "nu", c.nu);
    c.Q_f = get_checked(j, "Q_f", c.Q_f);
    if (j.contains("x_c")) {
        const auto v = j.at("x_c").get<std::vector<double>>();
        if (v.size() != static_cast<std::size_t>(c.dimension))
            throw ConfigError("config: key 'x_c' must have 'dimension' entries");
        for (std::size_t i = 0; i < v.size(); ++i) c.x_c[i] = v[i];
    }
    if (j.contains("Q_plus")) c.Q_plus = get_checked(j, "Q_plus", 0.0);
    if (j.contains("N_plus")) c.N_plus = get_checked<std::size_t>(j, "N_plus", 0);
    if (j.contains("rho_inf")) c.rho_inf = get_checked(j, "rho_inf", 0.0);
    c.q = get_checked(j, "q", c.q);
    c.tau = get_checked(j, "tau", c.tau);
    c.T = get_checked(j, "T", c.T);
    c.init_lo = get_checked(j, "init_lo", c.init_lo);
    c.init_hi = get_checked(j, "init_hi", c.init_hi);
    c.init_whole_domain = get_checked(j, "init_whole_domain", c.init_whole_domain);
    c.bins = get_checked(j, "bins", c.bins);
    c.frames = get_checked(j, "frames", c.frames);
    c.frame_stride = get_checked(j, "frame_stride", c.frame_stride);
    c.seed = get_checked(j, "seed", c.seed);
    c.threads = get_checked(j, "threads", c.threads);
    if (j.contains("N_plus_list"))
        c.N_plus_list = j.at("N_plus_list").get<std::vector<std::size_t>>();
    c.repetitions = get_checked(j, "repetitions", c.repetitions);
    c.T_c = get_checked(j, "T_c", c.T_c);
    c.epsilon = get_checked(j, "epsilon", c.epsilon);
    c.max_iters = get_checked(j, "max_iters", c.max_iters);
    c.h_bulk = get_checked(j, "h_bulk", c.h_bulk);
    c.Q_plus_init = get_checked(j, "Q_plus_init", c.Q_plus_init);
    if (j.contains("qf_grid")) c.qf_grid = j.at("qf_grid").get<std::vector<double>>();
    c.capacitance_runner = get_checked(j, "capacitance_runner", c.capacitance_runner);
    if (j.contains("L_list")) c.L_list = j.at("L_list").get<std::vector<double>>();
    c.L_ref = get_checked(j, "L_ref", c.L_ref);
    if (j.contains("sigma_f")) c.sigma_f = get_checked(j, "sigma_f", 0.0);
    c.fd_nodes = get_checked(j, "fd_nodes", c.fd_nodes);
    c.kde_grid = get_checked(j, "kde_grid", c.kde_grid);

    if (j.contains("scheme")) {
        const auto& s = j.at("scheme");
        if (s.is_string()) {
            const auto name = s.get<std::string>();
            if (name == "reflection")
                c.scheme = ReflectionScheme::reflection();
            else if (name == "projection")
                c.scheme = ReflectionScheme::projection();
            else
                throw ConfigError("config: key 'scheme' must be 'reflection', 'projection' or "
                                  "{\"penalization\": lambda}");
        } else if (s.is_object() && s.contains("penalization")) {
            c.scheme = ReflectionScheme::penalization(s.at("penalization").get<double>());
        } else {
            throw ConfigError("config: key 'scheme' has an unrecognized form");
        }
    }

    validate(c);
    return c;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return detail::from_json(j);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

inline ExperimentConfig preset_config(const std::string& name) {
    return parse_config("{\"preset\": \"" + name + "\"}");
}

}
