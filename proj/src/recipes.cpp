#include "recipes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>

#include <json.hpp>

#include "csv.hpp"
#include "errors.hpp"

namespace uswg {

namespace {

using nlohmann::json;

constexpr const char* kFig2Header = "x,ising_J,ising_sinc,ising_corrected";

std::string num_tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// bounded-parallel task runner; exceptions surface with their original type
void run_tasks(const std::vector<std::function<void()>>& tasks, int threads) {
    if (threads <= 1) {
        for (const auto& t : tasks) t();
        return;
    }
    for (std::size_t base = 0; base < tasks.size();
         base += static_cast<std::size_t>(threads)) {
        std::vector<std::future<void>> fs;
        const std::size_t end =
            std::min(tasks.size(), base + static_cast<std::size_t>(threads));
        for (std::size_t i = base; i < end; ++i)
            fs.push_back(std::async(std::launch::async, tasks[i]));
        std::exception_ptr first;
        for (auto& f : fs) {
            try {
                f.get();
            } catch (...) {
                if (!first) first = std::current_exception();
            }
        }
        if (first) std::rethrow_exception(first);
    }
}

std::vector<double> default_grid_fig34() {
    std::vector<double> a;
    for (int i = 0; i <= 120; ++i) a.push_back(i / 100.0);
    return a;
}

struct RecipeResult {
    std::vector<std::string> files;
    json resolved;
};

} // namespace

std::vector<std::string> recipe_names() {
    return {"fig1a", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"};
}

std::vector<std::string> ground_state_row(const PolaronSolution& sol,
                                          const ModeSet& modes, double alpha,
                                          double x_cell) {
    double mag, ent;
    if (std::isfinite(sol.x_sep)) {
        const AuxiliaryPhases ph = auxiliary_phases(sol, modes, sol.x_sep);
        mag = gs_magnetization(sol, ph);
        ent = linear_entropy(sol, ph);
    } else {
        const double c2t =
            sol.cos_theta * sol.cos_theta - sol.sin_theta * sol.sin_theta;
        mag = -(sol.delta_r / sol.bare_delta) * c2t;
        ent = linear_entropy_far(sol);
    }
    return {format_g17(alpha),
            format_g17(x_cell),
            format_g17(sol.delta_r),
            format_g17(sol.ising_J),
            format_g17(sol.theta),
            format_g17(sol.e_gs),
            format_g17(mag),
            format_g17(ent),
            format_int(sol.converged ? 1 : 0),
            format_int(sol.iterations)};
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj) {
    CsvWriter w(path, kDynamicsHeader);
    for (const auto& s : traj.samples)
        w.row({format_g17(s.t), format_g17(s.c1re), format_g17(s.c1im),
               format_g17(s.c2re), format_g17(s.c2im), format_g17(s.sz1_pol),
               format_g17(s.sz2_pol), format_g17(s.sz1_lab),
               format_g17(s.sz2_lab), format_g17(s.gamma1),
               format_g17(s.gamma2), format_g17(s.norm)});
    w.close();
}

namespace {

RecipeResult recipe_fig1a(const RunConfig& cfg, const std::filesystem::path& out) {
    // spectral reconstruction on a unit-cutoff line: omega_c = v_g N / L = 1
    WaveguideConfig wg;
    wg.N = cfg.wg.N;
    wg.v_g = 1.0;
    wg.L = static_cast<double>(wg.N);
    const int n_bins = cfg.recipe.n_bins > 0 ? cfg.recipe.n_bins : 25;
    std::vector<double> alphas =
        cfg.recipe.alphas_given ? cfg.recipe.alphas : std::vector<double>{0.1};

    RecipeResult res;
    for (double a : alphas) {
        wg.alpha = a;
        wg.validate();
        const ModeSet modes = build_modes(wg);
        const auto bins = spectral_function_reconstruct(modes, n_bins);
        const std::string name =
            alphas.size() == 1 ? "fig1a_spectral.csv"
                               : "fig1a_spectral_alpha" + num_tag(a) + ".csv";
        CsvWriter w(out / name, kSpectralHeader);
        for (const auto& b : bins)
            w.row({format_g17(b.omega_center), format_g17(b.J_binned),
                   format_g17(spectral_function_analytic(b.omega_center, a))});
        w.close();
        res.files.push_back(name);
    }
    res.resolved = {{"N", wg.N}, {"L", wg.L},           {"v_g", wg.v_g},
                    {"omega_c", wg.omega_c()},          {"n_bins", n_bins},
                    {"alphas", alphas}};
    return res;
}

RecipeResult recipe_fig2(const RunConfig& cfg, const std::filesystem::path& out,
                         const kernels::Table&, std::atomic<int>& bad) {
    const std::vector<double> alphas =
        cfg.recipe.alphas_given ? cfg.recipe.alphas
                                : std::vector<double>{0.05, 0.1, 0.2};
    const double delta = cfg.delta();
    RecipeResult res;
    std::vector<std::function<void()>> tasks;
    for (double a : alphas) {
        const std::string name = "fig2_alpha" + num_tag(a) + ".csv";
        res.files.push_back(name);
        tasks.push_back([&cfg, &out, &bad, a, delta, name] {
            WaveguideConfig wg = cfg.wg;
            wg.alpha = a;
            const ModeSet modes = build_modes(wg);
            CsvWriter w(out / name, kFig2Header);
            for (int jx = 0; jx <= 40; ++jx) {
                const double x = jx * modes.dx;
                const PolaronSolution sol = solve_two(delta, x, modes);
                if (!sol.converged) ++bad;
                w.row({format_g17(x), format_g17(sol.ising_J),
                       format_g17(ising_sinc(a, modes.omega_c, x, modes.v_g)),
                       format_g17(ising_corrected(a, modes.omega_c, x,
                                                  modes.v_g, sol.delta_r))});
            }
            w.close();
        });
    }
    run_tasks(tasks, cfg.threads);
    res.resolved = {{"alphas", alphas},
                    {"delta", delta},
                    {"x_grid", "j*dx, j=0..40"}};
    return res;
}

RecipeResult recipe_fig34(const std::string& prefix, const RunConfig& cfg,
                          const std::filesystem::path& out,
                          std::atomic<int>& bad) {
    const std::vector<double> alphas =
        cfg.recipe.alphas_given ? cfg.recipe.alphas : default_grid_fig34();
    const double delta = cfg.delta();
    struct Curve {
        const char* tag;
        double x_dx;  // <0 encodes far separation
    };
    const Curve curves[] = {{"x1dx", 1.0}, {"x8dx", 8.0}, {"far", -1.0}};

    RecipeResult res;
    std::vector<std::function<void()>> tasks;
    for (const Curve& cv : curves) {
        const std::string name = prefix + "_" + cv.tag + ".csv";
        res.files.push_back(name);
        tasks.push_back([&cfg, &out, &bad, &alphas, cv, delta, name] {
            CsvWriter w(out / name, kGroundStateHeader);
            for (double a : alphas) {
                WaveguideConfig wg = cfg.wg;
                wg.alpha = a;
                const ModeSet modes = build_modes(wg);
                PolaronSolution sol;
                double x_cell;
                if (cv.x_dx < 0.0) {
                    sol = solve_far(delta, modes);
                    x_cell = -1.0;  // sentinel: infinite separation
                } else {
                    const double x = cv.x_dx * modes.dx;
                    sol = solve_two(delta, x, modes);
                    x_cell = x;
                }
                if (!sol.converged) ++bad;
                w.row(ground_state_row(sol, modes, a, x_cell));
            }
            w.close();
        });
    }
    run_tasks(tasks, cfg.threads);
    res.resolved = {{"alphas", alphas},
                    {"delta", delta},
                    {"curves", {"x = dx", "x = 8 dx", "far (x column -1)"}}};
    return res;
}

RecipeResult recipe_dynamics(const std::string& prefix,
                             const std::vector<const char*>& inits,
                             double default_tmax, const RunConfig& cfg,
                             const std::filesystem::path& out,
                             const kernels::Table& kern,
                             std::atomic<int>& bad) {
    const std::vector<double> alphas =
        cfg.recipe.alphas_given ? cfg.recipe.alphas
                                : std::vector<double>{0.01, 0.1, 0.5, 1.0};
    const double delta = cfg.delta();
    const double x = cfg.x_sep();
    if (!std::isfinite(x))
        throw ConfigError(prefix + ": dynamics recipes need a finite x_sep");
    const double dt = cfg.recipe.dt > 0.0 ? cfg.recipe.dt : cfg.dynamics_dt();
    const double t_max = cfg.recipe.t_max > 0.0 ? cfg.recipe.t_max : default_tmax;
    const int stride = cfg.recipe.stride > 0 ? cfg.recipe.stride : 5;

    RecipeResult res;
    std::vector<std::function<void()>> tasks;
    for (double a : alphas) {
        for (const char* init : inits) {
            const std::string name =
                prefix + "_alpha" + num_tag(a) + "_" + init + ".csv";
            res.files.push_back(name);
            tasks.push_back([&cfg, &out, &bad, &kern, a, init, delta, x, dt,
                             t_max, stride, name] {
                WaveguideConfig wg = cfg.wg;
                wg.alpha = a;
                const ModeSet modes = build_modes(wg);
                const PolaronSolution two = solve_two(delta, x, modes);
                const PolaronSolution single = solve_single(delta, modes);
                if (!two.converged || !single.converged) {
                    ++bad;
                    return;
                }
                const EffectiveSystem sys =
                    build_effective(two, single, modes, cfg.dynamics.epsilon);
                const ExcitationState st = make_init(sys, parse_init(init));
                const Trajectory traj = evolve(sys, st, dt, t_max, stride, kern);
                write_trajectory_csv(out / name, traj);
            });
        }
    }
    run_tasks(tasks, cfg.threads);
    res.resolved = {{"alphas", alphas}, {"delta", delta}, {"x_sep", x},
                    {"dt", dt},         {"t_max", t_max}, {"stride", stride}};
    return res;
}

} // namespace

std::vector<std::string> run_recipe(const std::string& name,
                                    const RunConfig& cfg,
                                    const kernels::Table& kern) {
    const std::filesystem::path out(cfg.out_dir);
    std::atomic<int> bad{0};
    RecipeResult res;
    if (name == "fig1a") {
        res = recipe_fig1a(cfg, out);
    } else if (name == "fig2") {
        res = recipe_fig2(cfg, out, kern, bad);
    } else if (name == "fig3" || name == "fig4") {
        res = recipe_fig34(name, cfg, out, bad);
    } else if (name == "fig5") {
        res = recipe_dynamics("fig5", {"sym", "antisym"}, 100.0, cfg, out, kern, bad);
    } else if (name == "fig6") {
        res = recipe_dynamics("fig6", {"eg"}, 100.0, cfg, out, kern, bad);
    } else if (name == "fig7") {
        res = recipe_dynamics("fig7", {"sym", "antisym"}, 121.0, cfg, out, kern, bad);
    } else if (name == "fig8") {
        res = recipe_dynamics("fig8", {"eg"}, 121.0, cfg, out, kern, bad);
    } else {
        std::string known;
        for (const auto& n : recipe_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown recipe '" + name + "' (known: " + known + ")");
    }

    json man;
    man["recipe"] = name;
    man["kernel"] = kern.name;
    man["resolved"] = res.resolved;
    man["config"] = cfg.manifest();
    man["files"] = res.files;
    const std::string man_name = name + "_manifest.json";
    write_text_atomic(out / man_name, man.dump(2) + "\n");
    res.files.push_back(man_name);

    if (bad.load() > 0)
        throw NumericError("recipe " + name + ": " + std::to_string(bad.load()) +
                           " solve(s) did not converge");
    return res.files;
}

} // namespace uswg
