#include "dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "errors.hpp"

namespace uswg {

namespace {

constexpr double kGammaFloorSq = 1e-16;  // |c|^2 floor for gamma evaluation

struct Complex2 {
    double re = 0.0, im = 0.0;
};

// dc_1/dt = i J c_2 - i cos(th) Q_1 written out, Q_j = sum_k G_k e^{-ikx_j} psi_k
inline void qubit_rhs(const EffectiveSystem& sys, const double* y,
                      const Complex2& q1, const Complex2& q2, double* dy) {
    const double J = sys.ising_J, ct = sys.cos_theta;
    dy[0] = -J * y[3] + ct * q1.im;
    dy[1] = J * y[2] - ct * q1.re;
    dy[2] = -J * y[1] + ct * q2.im;
    dy[3] = J * y[0] - ct * q2.re;
}

} // namespace

double ExcitationState::norm_sq() const {
    double s = 0.0;
    for (double v : y) s += v * v;
    return s;
}

InitKind parse_init(const std::string& s) {
    if (s == "sym") return InitKind::Sym;
    if (s == "antisym") return InitKind::Antisym;
    if (s == "eg") return InitKind::Eg;
    throw ConfigError("init must be one of sym|antisym|eg, got '" + s + "'");
}

EffectiveSystem build_effective(const PolaronSolution& sol,
                                const PolaronSolution& sol_single,
                                const ModeSet& modes, double epsilon) {
    if (sol.n_qubits != 2)
        throw ConfigError("build_effective: need a two-qubit solution");
    if (sol_single.n_qubits != 1)
        throw ConfigError("build_effective: need a single-qubit solution for f0");
    if (!sol.converged || !sol_single.converged)
        throw ConfigError("build_effective: solutions must be converged");
    if (sol.f.size() != modes.size() || sol_single.f.size() != modes.size())
        throw ConfigError("build_effective: solution/mode set size mismatch");
    if (!std::isfinite(sol.x_sep))
        throw ConfigError("build_effective: infinite-separation solution has no geometry");
    if (std::abs(sol.bare_delta - sol_single.bare_delta) >
        1e-12 * sol.bare_delta)
        throw ConfigError("build_effective: solutions disagree on delta");

    EffectiveSystem sys;
    sys.delta_r = sol.delta_r;
    sys.ising_J = sol.ising_J;
    sys.theta = sol.theta;
    sys.cos_theta = sol.cos_theta;
    sys.sin_theta = sol.sin_theta;
    const double c2t = sol.cos_theta * sol.cos_theta - sol.sin_theta * sol.sin_theta;
    const double s2t = 2.0 * sol.sin_theta * sol.cos_theta;
    sys.tilde_delta_r = sol.delta_r * c2t + sol.ising_J * s2t;
    sys.bare_delta = sol.bare_delta;
    sys.epsilon = epsilon;
    sys.x_sep = sol.x_sep;
    sys.L = modes.L;
    sys.v_g = modes.v_g;
    sys.alpha = modes.alpha;
    sys.x1 = modes.L / 2.0 - sol.x_sep / 2.0;
    sys.x2 = modes.L / 2.0 + sol.x_sep / 2.0;
    sys.omega_max = 0.0;

    const double dr_s = sol_single.delta_r;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes.omega[i] > sys.omega_max) sys.omega_max = modes.omega[i];
        if (modes.g[i] <= 0.0) continue;
        const double f0 = modes.g[i] / (modes.omega[i] + dr_s);
        sys.wp.push_back(sys.tilde_delta_r - modes.omega[i]);
        sys.G.push_back(2.0 * sol.delta_r * f0 +
                        epsilon * (sol.delta_r - modes.omega[i]));
        sys.f.push_back(sol.f[i]);
        sys.e1c.push_back(std::cos(modes.k[i] * sys.x1));
        sys.e1s.push_back(std::sin(modes.k[i] * sys.x1));
        sys.e2c.push_back(std::cos(modes.k[i] * sys.x2));
        sys.e2s.push_back(std::sin(modes.k[i] * sys.x2));
    }
    return sys;
}

ExcitationState make_init(const EffectiveSystem& sys, InitKind kind) {
    ExcitationState st(sys.n());
    const double r = 1.0 / std::sqrt(2.0);
    switch (kind) {
    case InitKind::Sym:
        st.c1re() = r;
        st.c2re() = r;
        break;
    case InitKind::Antisym:
        st.c1re() = r;
        st.c2re() = -r;
        break;
    case InitKind::Eg:
        st.c1re() = 1.0;
        break;
    }
    return st;
}

std::pair<double, double> polaron_sigma_z(const ExcitationState& state,
                                          double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double p1 = state.c1re() * state.c1re() + state.c1im() * state.c1im();
    const double p2 = state.c2re() * state.c2re() + state.c2im() * state.c2im();
    const double z1 = c * c * (2.0 * p1 - 1.0) - s * s * (2.0 * p2 - 1.0);
    const double z2 = c * c * (2.0 * p2 - 1.0) - s * s * (2.0 * p1 - 1.0);
    return {z1, z2};
}

std::pair<double, double> lab_sigma_z(const ExcitationState& state,
                                      const EffectiveSystem& sys,
                                      const kernels::Table& kern) {
    const std::size_t n = sys.n();
    Complex2 P1, P2;
    if (n > 0) {
        kern.phased_dot(n, sys.f.data(), sys.e1c.data(), sys.e1s.data(),
                        state.psi_re(), state.psi_im(), &P1.re, &P1.im);
        kern.phased_dot(n, sys.f.data(), sys.e2c.data(), sys.e2s.data(),
                        state.psi_re(), state.psi_im(), &P2.re, &P2.im);
    }
    const auto pol = polaron_sigma_z(state, sys.theta);
    const double R = sys.bare_delta > 0.0 ? sys.delta_r / sys.bare_delta : 0.0;
    const double ct = sys.cos_theta, st = sys.sin_theta;
    const double c2t = ct * ct - st * st;
    // Re[c P*] per emitter pairing plus the |P_i|^2 field-displacement term
    const double r11 = state.c1re() * P1.re + state.c1im() * P1.im;
    const double r21 = state.c2re() * P1.re + state.c2im() * P1.im;
    const double r22 = state.c2re() * P2.re + state.c2im() * P2.im;
    const double r12 = state.c1re() * P2.re + state.c1im() * P2.im;
    const double z1 = R * (pol.first + 4.0 * ct * r11 - 4.0 * st * r21 +
                           4.0 * c2t * (P1.re * P1.re + P1.im * P1.im));
    const double z2 = R * (pol.second + 4.0 * ct * r22 - 4.0 * st * r12 +
                           4.0 * c2t * (P2.re * P2.re + P2.im * P2.im));
    return {z1, z2};
}

Trajectory evolve(const EffectiveSystem& sys, const ExcitationState& init,
                  double dt, double t_max, int stride,
                  const kernels::Table& kern) {
    const std::size_t n = sys.n();
    const std::size_t M = 4 + 2 * n;
    if (init.y.size() != M)
        throw ConfigError("evolve: state size does not match the system");
    if (stride < 1) throw ConfigError("evolve: stride must be >= 1");
    if (dt == 0.0 || !std::isfinite(dt)) throw ConfigError("evolve: dt must be nonzero");
    if (!(t_max > 0.0)) throw ConfigError("evolve: t_max must be positive");
    if (sys.omega_max > 0.0 && std::abs(dt) > 0.1 / sys.omega_max * (1.0 + 1e-12))
        throw ConfigError("evolve: |dt| must be <= 0.1/omega_max = " +
                          std::to_string(0.1 / sys.omega_max));
    if (sys.L > 0.0 && t_max >= (sys.L - sys.x_sep) / sys.v_g)
        throw ConfigError(
            "evolve: t_max must stay below the ring recurrence time (L - x)/v_g = " +
            std::to_string((sys.L - sys.x_sep) / sys.v_g));
    const double drift0 = std::abs(init.norm_sq() - 1.0);
    if (!(drift0 <= 1e-6))
        throw ConfigError("evolve: initial state is not normalized (|norm^2 - 1| = " +
                          std::to_string(drift0) + ")");

    const std::size_t n_steps =
        static_cast<std::size_t>(std::ceil(t_max / std::abs(dt) - 1e-12));
    const double h = std::copysign(t_max / static_cast<double>(n_steps), dt);

    const kernels::SitePhases ph{sys.e1c.data(), sys.e1s.data(), sys.e2c.data(),
                                 sys.e2s.data()};
    const double back = 2.0 * sys.delta_r *
                        (sys.cos_theta * sys.cos_theta -
                         sys.sin_theta * sys.sin_theta);

    auto rhs = [&](const double* y, double* dy) {
        Complex2 P1, P2, Q1, Q2;
        if (n > 0) {
            const double* pre = y + 4;
            const double* pim = y + 4 + n;
            kern.phased_dot(n, sys.f.data(), sys.e1c.data(), sys.e1s.data(),
                            pre, pim, &P1.re, &P1.im);
            kern.phased_dot(n, sys.f.data(), sys.e2c.data(), sys.e2s.data(),
                            pre, pim, &P2.re, &P2.im);
            kern.phased_dot(n, sys.G.data(), sys.e1c.data(), sys.e1s.data(),
                            pre, pim, &Q1.re, &Q1.im);
            kern.phased_dot(n, sys.G.data(), sys.e2c.data(), sys.e2s.data(),
                            pre, pim, &Q2.re, &Q2.im);
        }
        qubit_rhs(sys, y, Q1, Q2, dy);
        if (n > 0) {
            const double ct = sys.cos_theta;
            kernels::FieldDrive d{ct * y[0], ct * y[1], ct * y[2], ct * y[3],
                                  P1.re, P1.im, P2.re, P2.im, back};
            kern.rhs_psi(n, sys.wp.data(), sys.G.data(), sys.f.data(), ph, d,
                         y + 4, y + 4 + n, dy + 4, dy + 4 + n);
        }
    };

    Trajectory traj;
    traj.kernel_name = kern.name;
    traj.final_state = init;
    ExcitationState& st = traj.final_state;

    std::vector<double> k1(M), k2(M), k3(M), k4(M), tmp(M);

    auto record = [&](std::size_t step) {
        TrajectorySample smp;
        smp.t = static_cast<double>(step) * h;
        smp.c1re = st.c1re();
        smp.c1im = st.c1im();
        smp.c2re = st.c2re();
        smp.c2im = st.c2im();
        const auto pol = polaron_sigma_z(st, sys.theta);
        smp.sz1_pol = pol.first;
        smp.sz2_pol = pol.second;
        const auto lab = lab_sigma_z(st, sys, kern);
        smp.sz1_lab = lab.first;
        smp.sz2_lab = lab.second;
        // gamma_i = -2 Re[cdot_i / c_i] from the analytic right-hand side;
        // only the qubit components are needed here
        Complex2 Q1, Q2;
        if (n > 0) {
            kern.phased_dot(n, sys.G.data(), sys.e1c.data(), sys.e1s.data(),
                            st.psi_re(), st.psi_im(), &Q1.re, &Q1.im);
            kern.phased_dot(n, sys.G.data(), sys.e2c.data(), sys.e2s.data(),
                            st.psi_re(), st.psi_im(), &Q2.re, &Q2.im);
        }
        double dy4[4];
        qubit_rhs(sys, st.y.data(), Q1, Q2, dy4);
        const double m1 = st.c1re() * st.c1re() + st.c1im() * st.c1im();
        const double m2 = st.c2re() * st.c2re() + st.c2im() * st.c2im();
        smp.gamma1 = m1 > kGammaFloorSq
                         ? -2.0 * (dy4[0] * st.c1re() + dy4[1] * st.c1im()) / m1
                         : std::numeric_limits<double>::quiet_NaN();
        smp.gamma2 = m2 > kGammaFloorSq
                         ? -2.0 * (dy4[2] * st.c2re() + dy4[3] * st.c2im()) / m2
                         : std::numeric_limits<double>::quiet_NaN();
        smp.norm = st.norm_sq();
        traj.samples.push_back(smp);
    };

    for (std::size_t i = 0;; ++i) {
        const double normsq = st.norm_sq();
        if (!std::isfinite(normsq))
            throw NumericError("evolve: non-finite state at t = " +
                               std::to_string(static_cast<double>(i) * h));
        const double drift = std::abs(normsq - 1.0);
        if (drift > traj.max_norm_drift) traj.max_norm_drift = drift;
        if (drift > 1e-6) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "evolve: norm drift %.3e exceeds 1e-6 at t = %.6f (step %zu)",
                          drift, static_cast<double>(i) * h, i);
            throw NumericError(buf);
        }
        if (i % static_cast<std::size_t>(stride) == 0 || i == n_steps) record(i);
        if (i == n_steps) break;

        rhs(st.y.data(), k1.data());
        kern.axpy_out(M, tmp.data(), st.y.data(), k1.data(), 0.5 * h);
        rhs(tmp.data(), k2.data());
        kern.axpy_out(M, tmp.data(), st.y.data(), k2.data(), 0.5 * h);
        rhs(tmp.data(), k3.data());
        kern.axpy_out(M, tmp.data(), st.y.data(), k3.data(), h);
        rhs(tmp.data(), k4.data());
        kern.rk4_combine(M, st.y.data(), k1.data(), k2.data(), k3.data(),
                         k4.data(), h);
    }
    return traj;
}

} // namespace uswg
