#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "csv.hpp"
#include "dde.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "kernels/kernels.hpp"
#include "oracle.hpp"
#include "polaron.hpp"
#include "recipes.hpp"
#include "waveguide.hpp"

// Exit codes: 0 ok, 2 configuration or usage error, 3 numeric failure.

namespace {

using namespace uswg;

double parse_num_arg(const std::string& t, const char* ctx) {
    std::size_t pos = 0;
    double v = 0.0;
    bool ok = !t.empty();
    if (ok) {
        try {
            v = std::stod(t, &pos);
        } catch (const std::exception&) {
            ok = false;
        }
    }
    if (!ok || pos != t.size())
        throw ConfigError(std::string(ctx) + ": not a number: '" + t + "'");
    return v;
}

struct Sweep {
    bool given = false;
    std::vector<double> values;
};

// --sweep alpha=a0:a1:n  /  --sweep x=x0:x1:n  (n points, endpoints inclusive)
void parse_sweep(const std::string& spec, Sweep& alpha, Sweep& x) {
    const auto fail = [&spec] {
        throw ConfigError("bad sweep '" + spec +
                          "' (expected alpha=a0:a1:n or x=x0:x1:n)");
    };
    const auto eq = spec.find('=');
    if (eq == std::string::npos) fail();
    const std::string var = spec.substr(0, eq);
    Sweep* dst = nullptr;
    if (var == "alpha")
        dst = &alpha;
    else if (var == "x")
        dst = &x;
    else
        fail();
    if (dst->given)
        throw ConfigError("duplicate sweep for '" + var + "'");

    const std::string rest = spec.substr(eq + 1);
    const auto c1 = rest.find(':');
    const auto c2 = rest.rfind(':');
    if (c1 == std::string::npos || c2 == c1) fail();
    const double a0 = parse_num_arg(rest.substr(0, c1), "sweep start");
    const double a1 = parse_num_arg(rest.substr(c1 + 1, c2 - c1 - 1), "sweep stop");
    const double nn = parse_num_arg(rest.substr(c2 + 1), "sweep count");
    const int n = static_cast<int>(nn);
    if (nn != n || n < 1 || n > 100000)
        throw ConfigError("sweep count must be an integer in [1, 100000]");

    dst->given = true;
    dst->values.clear();
    if (n == 1) {
        dst->values.push_back(a0);
    } else {
        for (int i = 0; i < n; ++i)
            dst->values.push_back(a0 + (a1 - a0) * i / (n - 1));
    }
}

void apply_x_sep_arg(RunConfig& cfg, const std::string& arg) {
    if (arg == "far") {
        cfg.x_far = true;
        cfg.x_sep_abs = -1.0;
        cfg.x_sep_dx = -1.0;
        return;
    }
    const double v = parse_num_arg(arg, "--x-sep");
    if (v < 0.0) throw ConfigError("--x-sep must be >= 0 (or 'far')");
    cfg.x_far = false;
    cfg.x_sep_dx = -1.0;
    cfg.x_sep_abs = v;
}

void write_run_manifest(const RunConfig& cfg, const std::string& command,
                        const kernels::Table& kern,
                        std::vector<std::string> files) {
    nlohmann::json man;
    man["command"] = command;
    man["kernel"] = kern.name;
    files.push_back("manifest.json");
    man["files"] = files;
    man["config"] = cfg.manifest();
    write_text_atomic(std::filesystem::path(cfg.out_dir) / "manifest.json",
                      man.dump(2) + "\n");
}

int cmd_ground_state(const RunConfig& cfg, const kernels::Table& kern,
                     const Sweep& sweep_alpha, const Sweep& sweep_x) {
    const std::vector<double> alphas =
        sweep_alpha.given ? sweep_alpha.values
                          : std::vector<double>{cfg.wg.alpha};
    std::vector<double> xs;
    bool far = false;
    if (sweep_x.given) {
        if (cfg.x_far)
            throw ConfigError("cannot sweep x together with far separation");
        xs = sweep_x.values;
        for (double x : xs)
            if (x < 0.0) throw ConfigError("sweep x values must be >= 0");
    } else {
        const double x = cfg.x_sep();
        if (std::isfinite(x))
            xs.push_back(x);
        else
            far = true;
    }

    const double delta = cfg.delta();
    const std::filesystem::path out(cfg.out_dir);
    CsvWriter w(out / "ground_state.csv", kGroundStateHeader);
    int rows = 0, bad = 0;
    for (double a : alphas) {
        WaveguideConfig wg = cfg.wg;
        wg.alpha = a;
        const ModeSet modes = build_modes(wg);
        if (far) {
            const PolaronSolution sol = solve_far(delta, modes);
            if (!sol.converged) ++bad;
            w.row(ground_state_row(sol, modes, a, -1.0));
            ++rows;
        } else {
            for (double x : xs) {
                const PolaronSolution sol = solve_two(delta, x, modes);
                if (!sol.converged) ++bad;
                w.row(ground_state_row(sol, modes, a, x));
                ++rows;
            }
        }
    }
    w.close();
    std::printf("ground-state: %d row(s) -> %s/ground_state.csv\n", rows,
                cfg.out_dir.c_str());
    write_run_manifest(cfg, "ground-state", kern, {"ground_state.csv"});
    if (bad > 0)
        throw NumericError(std::to_string(bad) + " of " + std::to_string(rows) +
                           " ground-state solve(s) did not converge "
                           "(output kept)");
    return 0;
}

int cmd_dynamics(const RunConfig& cfg, const kernels::Table& kern) {
    const double x = cfg.x_sep();
    if (!std::isfinite(x))
        throw ConfigError("dynamics needs a finite x_sep, not 'far'");
    const double delta = cfg.delta();
    const ModeSet modes = build_modes(cfg.wg);
    const PolaronSolution two = solve_two(delta, x, modes);
    if (!two.converged)
        throw NumericError("two-qubit polaron solve did not converge");
    const PolaronSolution single = solve_single(delta, modes);
    if (!single.converged)
        throw NumericError("single-qubit polaron solve did not converge");

    const EffectiveSystem sys =
        build_effective(two, single, modes, cfg.dynamics.epsilon);
    const ExcitationState st = make_init(sys, parse_init(cfg.dynamics.init));
    const Trajectory traj =
        evolve(sys, st, cfg.dynamics_dt(), cfg.dynamics.t_max,
               cfg.dynamics.stride, kern);
    write_trajectory_csv(std::filesystem::path(cfg.out_dir) / "dynamics.csv",
                         traj);
    std::printf("dynamics: %zu sample(s), norm drift %.3g, kernel %s -> "
                "%s/dynamics.csv\n",
                traj.samples.size(), traj.max_norm_drift, traj.kernel_name,
                cfg.out_dir.c_str());
    write_run_manifest(cfg, "dynamics", kern, {"dynamics.csv"});
    return 0;
}

int cmd_dde(const RunConfig& cfg, const kernels::Table& kern) {
    const double x = cfg.x_sep();
    if (!std::isfinite(x)) throw ConfigError("dde needs a finite x_sep, not 'far'");
    const double delta = cfg.delta();
    const ModeSet modes = build_modes(cfg.wg);
    const PolaronSolution two = solve_two(delta, x, modes);
    if (!two.converged)
        throw NumericError("two-qubit polaron solve did not converge");

    const DDESystem sys = build_dde(two, modes, x, modes.v_g);
    const bool sym = cfg.dde.init == "sym";
    const double r = 1.0 / std::sqrt(2.0);
    const cplx c1_0(r, 0.0), c2_0(sym ? r : -r, 0.0);
    const DdeTrajectory traj =
        solve_dde(sys, c1_0, c2_0, cfg.dde_dt(), cfg.dde.t_max);

    std::printf("dde: alpha = %g, x = %g, tau = %.6g\n", cfg.wg.alpha, x,
                sys.tau_delay);
    std::printf("  gamma = %.6g   gamma*tau/2 = %.6g   J = %.6g\n", sys.gamma,
                0.5 * sys.gamma * sys.tau_delay, sys.ising_J);
    std::printf("  delta_r = %.6g   tilde_delta_r = %.6g\n", sys.delta_r,
                sys.tilde_delta_r);
    std::printf("  delay phase = %.6g  (mod 2pi: %.6g)\n", sys.phase_raw,
                sys.phase_mod);
    try {
        const LambShift ls = lamb_shift(two, modes);
        std::printf("  lamb shift (neglected) = %.4g, method spread %.2g\n",
                    ls.value(), ls.spread());
    } catch (const std::exception& e) {
        std::printf("  lamb shift: n/a (%s)\n", e.what());
    }

    std::string footer;
    try {
        const SteadyState ss =
            steady_state(sys, sym ? DdeParity::Sym : DdeParity::Antisym);
        std::printf("  steady state [%s]: amplitude = %.6g, magnetization = "
                    "%.6g  (%s resonance)\n",
                    cfg.dde.init.c_str(), ss.amplitude, ss.magnetization,
                    ss.phase_convention.c_str());
        footer = "# steady_state," + cfg.dde.init + "," +
                 format_g17(ss.amplitude) + "," + format_g17(ss.magnetization) +
                 "," + ss.phase_convention;
    } catch (const ConfigError&) {
        std::printf("  steady state: no closed form (off-resonant or J too "
                    "large)\n");
        footer = "# steady_state,none,nan,nan,off-resonant";
    }

    CsvWriter w(std::filesystem::path(cfg.out_dir) / "dde.csv", kDdeHeader);
    for (const auto& s : traj.samples)
        w.row({format_g17(s.t), format_g17(s.c1.real()),
               format_g17(s.c1.imag()), format_g17(s.c2.real()),
               format_g17(s.c2.imag()), format_g17(s.norm)});
    w.line(footer);
    w.close();
    std::printf("dde: %zu sample(s) -> %s/dde.csv\n", traj.samples.size(),
                cfg.out_dir.c_str());
    write_run_manifest(cfg, "dde", kern, {"dde.csv"});
    return 0;
}

int cmd_oracle(const RunConfig& cfg, const kernels::Table& kern) {
    const double delta = cfg.delta();
    const double x = cfg.oracle.n_qubits == 2 ? cfg.x_sep() : 0.0;
    if (!std::isfinite(x))
        throw ConfigError("oracle needs a finite x_sep, not 'far'");
    const ModeSet modes = build_modes(cfg.wg);
    const OracleModel model = build_oracle(modes, delta, cfg.oracle.n_modes,
                                           cfg.oracle.n_ph_max,
                                           cfg.oracle.n_qubits, x);
    const OracleGround g = exact_ground(model);
    const ModeSet subset = subset_mode_set(model, modes);
    const double e_pol = cfg.oracle.n_qubits == 2
                             ? solve_two(delta, x, subset).e_gs
                             : solve_single(delta, subset).e_gs;

    std::printf("oracle: n_modes = %d, n_ph_max = %d, n_qubits = %d, dim = "
                "%zu\n",
                model.n_modes, model.n_ph_max, model.n_qubits, model.dim());
    std::printf("  subset m = [");
    for (std::size_t i = 0; i < model.mode_m.size(); ++i)
        std::printf("%s%d", i ? ", " : "", model.mode_m[i]);
    std::printf("]  (plus the decoupled m = 0 mode)\n");
    std::printf("  e_exact   = %.12g\n", g.energy);
    std::printf("  e_polaron = %.12g  (variational, same subset)\n", e_pol);
    std::printf("  gap       = %.12g\n", g.gap);
    std::printf("  parity    = %+.3f%s\n", g.parity,
                g.parity_definite ? "" : "  (NOT definite)");

    CsvWriter w(std::filesystem::path(cfg.out_dir) / "oracle.csv",
                kOracleHeader);
    w.row({format_g17(cfg.wg.alpha), format_g17(x), format_g17(g.energy),
           format_g17(e_pol), format_g17(g.gap), format_g17(g.parity)});
    w.close();
    write_run_manifest(cfg, "oracle", kern, {"oracle.csv"});
    return 0;
}

int cmd_spectral(const RunConfig& cfg, const kernels::Table& kern) {
    const ModeSet modes = build_modes(cfg.wg);
    const auto bins = spectral_function_reconstruct(modes, cfg.spectral.n_bins);
    int empty = 0;
    CsvWriter w(std::filesystem::path(cfg.out_dir) / "spectral.csv",
                kSpectralHeader);
    for (const auto& b : bins) {
        if (std::isnan(b.J_binned)) ++empty;
        w.row({format_g17(b.omega_center), format_g17(b.J_binned),
               format_g17(spectral_function_analytic(b.omega_center,
                                                     modes.alpha))});
    }
    w.close();
    if (empty > 0)
        std::fprintf(stderr,
                     "spectral: %d of %zu bin(s) hold no mode, written as "
                     "nan\n",
                     empty, bins.size());
    std::printf("spectral: %zu bin(s) -> %s/spectral.csv\n", bins.size(),
                cfg.out_dir.c_str());
    write_run_manifest(cfg, "spectral", kern, {"spectral.csv"});
    return 0;
}

int cmd_recipe(const RunConfig& cfg, const kernels::Table& kern,
               const std::string& name) {
    const auto files = run_recipe(name, cfg, kern);
    std::printf("recipe %s: %zu file(s) in %s/\n", name.c_str(), files.size(),
                cfg.out_dir.c_str());
    for (const auto& f : files) std::printf("  %s\n", f.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ultrastrong waveguide QED: polaron ground states, "
                 "single-excitation dynamics, delay equations"};
    app.require_subcommand(1);

    std::string config_path, out_dir, kernels_arg, x_sep_arg;
    int threads = -1;
    double opt_alpha = NAN, opt_delta = NAN, opt_tmax = NAN, opt_dt = NAN;
    int opt_stride = -1, opt_nmodes = -1, opt_nph = -1;
    std::string init_arg;
    std::vector<std::string> sweep_args;
    std::string recipe_name;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--threads", threads, "worker threads for recipes");
    app.add_option("--kernels", kernels_arg,
                   "inner-loop implementation: auto|scalar|avx2");

    auto* gs = app.add_subcommand("ground-state",
                                  "variational two-emitter ground state");
    gs->add_option("--alpha", opt_alpha, "coupling strength");
    gs->add_option("--x-sep", x_sep_arg, "separation (number, or 'far')");
    gs->add_option("--delta", opt_delta, "bare splitting (absolute units)");
    gs->add_option("--sweep", sweep_args,
                   "alpha=a0:a1:n or x=x0:x1:n (repeatable)");

    auto* dyn = app.add_subcommand("dynamics",
                                   "mode-resolved single-excitation dynamics");
    dyn->add_option("--alpha", opt_alpha, "coupling strength");
    dyn->add_option("--x-sep", x_sep_arg, "separation");
    dyn->add_option("--init", init_arg, "initial state: sym|antisym|eg");
    dyn->add_option("--t-max", opt_tmax, "integration horizon");
    dyn->add_option("--dt", opt_dt, "step (default 0.05/omega_max)");
    dyn->add_option("--stride", opt_stride, "sample every n-th step");

    auto* dde = app.add_subcommand("dde", "retarded two-amplitude reduction");
    dde->add_option("--alpha", opt_alpha, "coupling strength");
    dde->add_option("--x-sep", x_sep_arg, "separation");
    dde->add_option("--init", init_arg, "initial state: sym|antisym");
    dde->add_option("--t-max", opt_tmax, "integration horizon");
    dde->add_option("--dt", opt_dt, "nominal step (grid snaps to tau/nd)");

    auto* orc = app.add_subcommand("oracle",
                                   "exact diagonalization on a mode subset");
    orc->add_option("--n-modes", opt_nmodes, "subset size (odd, 3..9)");
    orc->add_option("--n-ph-max", opt_nph, "total photon cutoff (1..3)");
    orc->add_option("--alpha", opt_alpha, "coupling strength");
    orc->add_option("--x-sep", x_sep_arg, "separation");

    auto* spc = app.add_subcommand("spectral",
                                   "binned reconstruction of the spectral "
                                   "function");
    spc->add_option("--alpha", opt_alpha, "coupling strength");

    auto* rec = app.add_subcommand("recipe", "run a named figure recipe");
    rec->add_option("name", recipe_name, "fig1a fig2 ... fig8")->required();

    for (auto* s : {gs, dyn, dde, orc, spc, rec}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (threads >= 0) {
            if (threads < 1) throw ConfigError("--threads must be >= 1");
            cfg.threads = threads;
        }
        if (!kernels_arg.empty()) cfg.kernels = kernels_arg;
        if (!std::isnan(opt_alpha)) cfg.wg.alpha = opt_alpha;
        if (!std::isnan(opt_delta)) {
            if (!(opt_delta > 0.0))
                throw ConfigError("--delta must be positive");
            cfg.delta_abs = opt_delta;
        }
        if (!x_sep_arg.empty()) apply_x_sep_arg(cfg, x_sep_arg);
        if (!init_arg.empty()) {
            cfg.dynamics.init = init_arg;
            if (dde->parsed()) {
                if (init_arg != "sym" && init_arg != "antisym")
                    throw ConfigError("dde --init must be sym or antisym");
                cfg.dde.init = init_arg;
            } else {
                parse_init(init_arg);  // validates
            }
        }
        if (!std::isnan(opt_tmax)) {
            cfg.dynamics.t_max = opt_tmax;
            cfg.dde.t_max = opt_tmax;
        }
        if (!std::isnan(opt_dt)) {
            cfg.dynamics.dt = opt_dt;
            cfg.dde.dt = opt_dt;
        }
        if (opt_stride >= 0) {
            if (opt_stride < 1) throw ConfigError("--stride must be >= 1");
            cfg.dynamics.stride = opt_stride;
        }
        if (opt_nmodes >= 0) cfg.oracle.n_modes = opt_nmodes;
        if (opt_nph >= 0) cfg.oracle.n_ph_max = opt_nph;
        cfg.wg.validate();

        std::filesystem::create_directories(cfg.out_dir);
        const kernels::Table& kern =
            kernels::select(kernels::parse_isa(cfg.kernels));

        Sweep sweep_alpha, sweep_x;
        for (const auto& s : sweep_args) parse_sweep(s, sweep_alpha, sweep_x);

        if (gs->parsed())
            return cmd_ground_state(cfg, kern, sweep_alpha, sweep_x);
        if (dyn->parsed()) return cmd_dynamics(cfg, kern);
        if (dde->parsed()) return cmd_dde(cfg, kern);
        if (orc->parsed()) return cmd_oracle(cfg, kern);
        if (spc->parsed()) return cmd_spectral(cfg, kern);
        if (rec->parsed()) return cmd_recipe(cfg, kern, recipe_name);
        return 2;  // unreachable: require_subcommand(1)
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 3;
    }
}
