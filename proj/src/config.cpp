#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dynamics.hpp"
#include "errors.hpp"
#include "kernels/kernels.hpp"

namespace uswg {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* a : allowed)
            if (it.key() == a) { known = true; break; }
        if (!known)
            throw ConfigError("config: unknown key '" + prefix + it.key() + "'");
    }
}

double get_num(const json& j, const char* key, const std::string& prefix,
               double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number())
        throw ConfigError("config: " + prefix + key + " must be a number");
    return v.get<double>();
}

long long get_int(const json& j, const char* key, const std::string& prefix,
                  long long fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer())
        throw ConfigError("config: " + prefix + key + " must be an integer");
    return v.get<long long>();
}

std::string get_str(const json& j, const char* key, const std::string& prefix,
                    const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_string())
        throw ConfigError("config: " + prefix + key + " must be a string");
    return v.get<std::string>();
}

bool get_bool(const json& j, const char* key, const std::string& prefix,
              bool fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_boolean())
        throw ConfigError("config: " + prefix + key + " must be a boolean");
    return v.get<bool>();
}

} // namespace

double RunConfig::delta() const {
    return delta_abs > 0.0 ? delta_abs : delta_over_omega_c * wg.omega_c();
}

double RunConfig::x_sep() const {
    if (x_far) return std::numeric_limits<double>::infinity();
    if (x_sep_abs >= 0.0) return x_sep_abs;
    if (x_sep_dx >= 0.0) return x_sep_dx * wg.dx();
    return 2.0 * M_PI * wg.v_g / delta();  // caption default x = 2 pi v_g / delta
}

double RunConfig::dynamics_dt() const {
    return dynamics.dt > 0.0 ? dynamics.dt : 0.05 / (2.0 * wg.omega_c());
}

double RunConfig::dde_dt() const {
    return dde.dt > 0.0 ? dde.dt : 0.05 / (2.0 * wg.omega_c());
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");

    check_keys(j, "",
               {"N", "L", "v_g", "alpha", "delta", "delta_over_omega_c",
                "x_sep", "x_sep_dx", "x_far", "kernels", "threads", "out",
                "dynamics", "dde", "oracle", "spectral", "recipe"});

    RunConfig c;
    c.wg.N = static_cast<int>(get_int(j, "N", "", c.wg.N));
    c.wg.L = get_num(j, "L", "", c.wg.L);
    c.wg.v_g = get_num(j, "v_g", "", c.wg.v_g);
    c.wg.alpha = get_num(j, "alpha", "", c.wg.alpha);
    c.wg.validate();

    if (j.contains("delta") && j.contains("delta_over_omega_c"))
        throw ConfigError(
            "config: specify only one of delta, delta_over_omega_c");
    c.delta_abs = get_num(j, "delta", "", 0.0);
    if (j.contains("delta") && !(c.delta_abs > 0.0))
        throw ConfigError("config: delta must be positive");
    c.delta_over_omega_c = get_num(j, "delta_over_omega_c", "", 0.2);
    if (!(c.delta_over_omega_c > 0.0))
        throw ConfigError("config: delta_over_omega_c must be positive");

    int n_x_keys = (j.contains("x_sep") ? 1 : 0) +
                   (j.contains("x_sep_dx") ? 1 : 0) +
                   (j.contains("x_far") ? 1 : 0);
    if (n_x_keys > 1)
        throw ConfigError("config: specify only one of x_sep, x_sep_dx, x_far");
    c.x_sep_abs = get_num(j, "x_sep", "", -1.0);
    if (j.contains("x_sep") && c.x_sep_abs < 0.0)
        throw ConfigError("config: x_sep must be >= 0");
    c.x_sep_dx = get_num(j, "x_sep_dx", "", -1.0);
    if (j.contains("x_sep_dx") && c.x_sep_dx < 0.0)
        throw ConfigError("config: x_sep_dx must be >= 0");
    c.x_far = get_bool(j, "x_far", "", false);

    c.kernels = get_str(j, "kernels", "", "auto");
    kernels::parse_isa(c.kernels);  // validates the spelling
    c.threads = static_cast<int>(get_int(j, "threads", "", 1));
    if (c.threads < 1) throw ConfigError("config: threads must be >= 1");
    c.out_dir = get_str(j, "out", "", "out");

    if (j.contains("dynamics")) {
        const auto& d = j.at("dynamics");
        if (!d.is_object()) throw ConfigError("config: dynamics must be an object");
        check_keys(d, "dynamics.", {"init", "dt", "t_max", "stride", "epsilon"});
        c.dynamics.init = get_str(d, "init", "dynamics.", c.dynamics.init);
        parse_init(c.dynamics.init);
        c.dynamics.dt = get_num(d, "dt", "dynamics.", 0.0);
        if (d.contains("dt") && !(c.dynamics.dt > 0.0))
            throw ConfigError("config: dynamics.dt must be positive");
        c.dynamics.t_max = get_num(d, "t_max", "dynamics.", c.dynamics.t_max);
        if (!(c.dynamics.t_max > 0.0))
            throw ConfigError("config: dynamics.t_max must be positive");
        c.dynamics.stride =
            static_cast<int>(get_int(d, "stride", "dynamics.", c.dynamics.stride));
        if (c.dynamics.stride < 1)
            throw ConfigError("config: dynamics.stride must be >= 1");
        c.dynamics.epsilon = get_num(d, "epsilon", "dynamics.", 0.0);
    }

    if (j.contains("dde")) {
        const auto& d = j.at("dde");
        if (!d.is_object()) throw ConfigError("config: dde must be an object");
        check_keys(d, "dde.", {"init", "dt", "t_max"});
        c.dde.init = get_str(d, "init", "dde.", c.dde.init);
        if (c.dde.init != "sym" && c.dde.init != "antisym")
            throw ConfigError("config: dde.init must be sym or antisym, got '" +
                              c.dde.init + "'");
        c.dde.dt = get_num(d, "dt", "dde.", 0.0);
        if (d.contains("dt") && !(c.dde.dt > 0.0))
            throw ConfigError("config: dde.dt must be positive");
        c.dde.t_max = get_num(d, "t_max", "dde.", c.dde.t_max);
        if (!(c.dde.t_max > 0.0))
            throw ConfigError("config: dde.t_max must be positive");
    }

    if (j.contains("oracle")) {
        const auto& d = j.at("oracle");
        if (!d.is_object()) throw ConfigError("config: oracle must be an object");
        check_keys(d, "oracle.", {"n_modes", "n_ph_max", "n_qubits"});
        c.oracle.n_modes =
            static_cast<int>(get_int(d, "n_modes", "oracle.", c.oracle.n_modes));
        c.oracle.n_ph_max =
            static_cast<int>(get_int(d, "n_ph_max", "oracle.", c.oracle.n_ph_max));
        c.oracle.n_qubits =
            static_cast<int>(get_int(d, "n_qubits", "oracle.", c.oracle.n_qubits));
    }

    if (j.contains("spectral")) {
        const auto& d = j.at("spectral");
        if (!d.is_object()) throw ConfigError("config: spectral must be an object");
        check_keys(d, "spectral.", {"n_bins"});
        c.spectral.n_bins =
            static_cast<int>(get_int(d, "n_bins", "spectral.", c.spectral.n_bins));
    }

    if (j.contains("recipe")) {
        const auto& d = j.at("recipe");
        if (!d.is_object()) throw ConfigError("config: recipe must be an object");
        check_keys(d, "recipe.", {"alphas", "t_max", "dt", "stride", "n_bins"});
        if (d.contains("alphas")) {
            const auto& a = d.at("alphas");
            if (!a.is_array())
                throw ConfigError("config: recipe.alphas must be an array");
            c.recipe.alphas_given = true;
            for (const auto& v : a) {
                if (!v.is_number())
                    throw ConfigError("config: recipe.alphas entries must be numbers");
                if (v.get<double>() < 0.0)
                    throw ConfigError("config: recipe.alphas entries must be >= 0");
                c.recipe.alphas.push_back(v.get<double>());
            }
            if (c.recipe.alphas.empty())
                throw ConfigError("config: recipe.alphas must be non-empty");
        }
        c.recipe.t_max = get_num(d, "t_max", "recipe.", 0.0);
        c.recipe.dt = get_num(d, "dt", "recipe.", 0.0);
        c.recipe.stride =
            static_cast<int>(get_int(d, "stride", "recipe.", 0));
        c.recipe.n_bins = static_cast<int>(get_int(d, "n_bins", "recipe.", 0));
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) return RunConfig{};
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

nlohmann::json RunConfig::manifest() const {
    json m;
    m["schema"] = 1;
    m["waveguide"] = {{"N", wg.N},         {"L", wg.L},
                      {"v_g", wg.v_g},     {"alpha", wg.alpha},
                      {"omega_c", wg.omega_c()}, {"dx", wg.dx()}};
    m["delta"] = {{"value", delta()},
                  {"from_ratio", !(delta_abs > 0.0)},
                  {"delta_over_omega_c", delta_over_omega_c}};
    if (x_far) {
        m["x_sep"] = {{"far", true}, {"value", nullptr}};
    } else {
        m["x_sep"] = {{"far", false},
                      {"value", x_sep()},
                      {"defaulted", x_sep_abs < 0.0 && x_sep_dx < 0.0}};
    }
    m["kernels"] = kernels;
    m["threads"] = threads;
    m["out"] = out_dir;
    m["dynamics"] = {{"init", dynamics.init},   {"dt", dynamics_dt()},
                     {"t_max", dynamics.t_max}, {"stride", dynamics.stride},
                     {"epsilon", dynamics.epsilon}};
    m["dde"] = {{"init", dde.init}, {"dt", dde_dt()}, {"t_max", dde.t_max}};
    m["oracle"] = {{"n_modes", oracle.n_modes},
                   {"n_ph_max", oracle.n_ph_max},
                   {"n_qubits", oracle.n_qubits}};
    m["spectral"] = {{"n_bins", spectral.n_bins}};
    return m;
}

} // namespace uswg
