#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "waveguide.hpp"

// Run configuration: JSON document -> fully resolved values. Strict: any key
// the schema does not know is fatal, with the full key path in the message.
// Every default that was applied ends up in the manifest, so a run is
// reproducible from the manifest alone.

namespace uswg {

struct DynamicsConfig {
    std::string init = "sym";
    double dt = 0.0;      // 0 = auto (0.05 / omega_max)
    double t_max = 100.0;
    int stride = 5;
    double epsilon = 0.0;
};

struct DdeConfig {
    std::string init = "antisym";
    double dt = 0.0;      // 0 = auto (0.05 / omega_max)
    double t_max = 100.0;
};

struct OracleConfig {
    int n_modes = 7;
    int n_ph_max = 2;
    int n_qubits = 2;
};

struct SpectralConfig {
    int n_bins = 10;
};

struct RecipeConfig {
    // empty/zero means: use the recipe's built-in values
    std::vector<double> alphas;
    bool alphas_given = false;
    double t_max = 0.0;
    double dt = 0.0;
    int stride = 0;
    int n_bins = 0;
};

struct RunConfig {
    WaveguideConfig wg;              // N, L, v_g, alpha
    double delta_over_omega_c = 0.2; // used unless delta set absolutely
    double delta_abs = 0.0;          // 0 = derive from the ratio
    double x_sep_abs = -1.0;         // <0 = derive (x_sep_dx or default)
    double x_sep_dx = -1.0;          // separation in units of dx
    bool x_far = false;              // infinite separation requested
    std::string kernels = "auto";
    int threads = 1;
    std::string out_dir = "out";
    DynamicsConfig dynamics;
    DdeConfig dde;
    OracleConfig oracle;
    SpectralConfig spectral;
    RecipeConfig recipe;

    double delta() const;            // resolved bare splitting
    double x_sep() const;            // resolved separation (inf when far)
    double dynamics_dt() const;      // resolved step
    double dde_dt() const;

    nlohmann::json manifest() const; // every resolved value
};

// Parse and validate a JSON document (the file contents). Unknown keys,
// wrong types, out-of-range values and delta/x conflicts are ConfigErrors.
RunConfig parse_config(const std::string& json_text);

// Load from a file path; empty path returns the defaults.
RunConfig load_config(const std::string& path);

} // namespace uswg
