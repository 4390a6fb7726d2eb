#include "dde.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "errors.hpp"

namespace uswg {

namespace {

// Simpson rule, n forced even
template <class F>
double simpson(F f, double a, double b, int n) {
    if (b <= a) return 0.0;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// cubic Lagrange weights for the half-grid point between nodes 1 and 2 of a
// 4-point stencil {-1, 0, 1, 2} (interior), or {0, 1, 2, 3} at the left edge
constexpr double kMid[4] = {-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16};
constexpr double kEdge[4] = {5.0 / 16, 15.0 / 16, -5.0 / 16, 1.0 / 16};

} // namespace

double LambShift::spread() const {
    const double v[4] = {a_coarse, a_fine, b_coarse, b_fine};
    double lo = v[0], hi = v[0];
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi - lo;
}

DDESystem build_dde(const PolaronSolution& sol, const ModeSet& modes, double x,
                    double v_g) {
    if (!sol.converged) throw ConfigError("build_dde: solution not converged");
    if (x < 0.0) throw ConfigError("build_dde: x must be >= 0");
    if (!(v_g > 0.0)) throw ConfigError("build_dde: v_g must be positive");

    DDESystem sys;
    sys.ising_J = sol.ising_J;
    sys.delta_r = sol.delta_r;
    const double c2t = sol.cos_theta * sol.cos_theta - sol.sin_theta * sol.sin_theta;
    const double s2t = 2.0 * sol.sin_theta * sol.cos_theta;
    sys.tilde_delta_r = sol.delta_r * c2t + sol.ising_J * s2t;

    double w_max = 0.0;
    for (double w : modes.omega) w_max = std::max(w_max, w);
    if (!(sys.tilde_delta_r > 0.0) || sys.tilde_delta_r >= w_max)
        throw ConfigError(
            "build_dde: effective frequency outside the mode band (0, " +
            std::to_string(w_max) + ")");

    const double Jw = spectral_function_analytic(sys.tilde_delta_r, modes.alpha);
    const double den = sol.delta_r + sys.tilde_delta_r;
    sys.gamma = 4.0 * sol.delta_r * sol.delta_r * Jw * sol.cos_theta *
                sol.cos_theta / (den * den);
    sys.tau_delay = x / v_g;
    sys.phase_raw = sys.tilde_delta_r * sys.tau_delay;
    sys.phase_mod = std::fmod(sys.phase_raw, 2.0 * M_PI);
    return sys;
}

std::pair<cplx, cplx> dde_prehorizon(const DDESystem& sys, cplx c1_0, cplx c2_0,
                                     double t) {
    const double J = sys.ising_J;
    const cplx damp = std::exp(cplx(-0.5 * sys.gamma * t, 0.0));
    const cplx cc = std::cos(J * t), ss = cplx(0.0, 1.0) * std::sin(J * t);
    return {damp * (c1_0 * cc + c2_0 * ss), damp * (c2_0 * cc + c1_0 * ss)};
}

DdeTrajectory solve_dde(const DDESystem& sys, cplx c1_0, cplx c2_0, double dt,
                        double t_max) {
    const double n0 = std::norm(c1_0) + std::norm(c2_0);
    if (n0 > 1.0 + 1e-12)
        throw ConfigError("solve_dde: initial amplitudes exceed unit norm");
    if (!(dt > 0.0)) throw ConfigError("solve_dde: dt must be positive");
    if (!(t_max > 0.0)) throw ConfigError("solve_dde: t_max must be positive");
    const double tau = sys.tau_delay;
    if (!(tau > 0.0)) throw ConfigError("solve_dde: needs a positive delay");
    if (dt > tau / 10.0)
        throw ConfigError("solve_dde: dt must be <= tau/10 = " +
                          std::to_string(tau / 10.0) +
                          " (history resolution)");

    const std::size_t nd =
        static_cast<std::size_t>(std::ceil(tau / dt - 1e-12));
    const double h = tau / static_cast<double>(nd);
    const std::size_t ntot =
        static_cast<std::size_t>(std::ceil(t_max / h - 1e-9));

    std::vector<std::array<cplx, 2>> C(ntot + 1);
    const std::size_t pre = std::min(nd, ntot);
    for (std::size_t n = 0; n <= pre; ++n) {
        const auto p = dde_prehorizon(sys, c1_0, c2_0, static_cast<double>(n) * h);
        C[n] = {p.first, p.second};
    }

    const cplx eph = std::exp(cplx(0.0, sys.phase_raw));
    const double g2 = 0.5 * sys.gamma;
    const cplx iJ(0.0, sys.ising_J);
    auto rhs = [&](const std::array<cplx, 2>& c, const std::array<cplx, 2>& cd) {
        return std::array<cplx, 2>{iJ * c[1] - g2 * c[0] - g2 * eph * cd[1],
                                   iJ * c[0] - g2 * c[1] - g2 * eph * cd[0]};
    };

    for (std::size_t n = nd; n < ntot; ++n) {
        const std::size_t j = n - nd;  // delayed index: t_n - tau = t_j exactly
        const auto& cd0 = C[j];
        const auto& cd1 = C[j + 1];
        // half-step history value by cubic interpolation
        const std::size_t b = j == 0 ? 0 : j - 1;
        const double* w = j == 0 ? kEdge : kMid;
        std::array<cplx, 2> cdh{};
        for (int q = 0; q < 4; ++q) {
            cdh[0] += w[q] * C[b + q][0];
            cdh[1] += w[q] * C[b + q][1];
        }
        const auto& y = C[n];
        const auto k1 = rhs(y, cd0);
        const auto k2 = rhs({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]}, cdh);
        const auto k3 = rhs({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]}, cdh);
        const auto k4 = rhs({y[0] + h * k3[0], y[1] + h * k3[1]}, cd1);
        C[n + 1] = {y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                    y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
    }

    DdeTrajectory traj;
    traj.h = h;
    traj.samples.resize(ntot + 1);
    for (std::size_t n = 0; n <= ntot; ++n) {
        auto& s = traj.samples[n];
        s.t = static_cast<double>(n) * h;
        s.c1 = C[n][0];
        s.c2 = C[n][1];
        s.norm = std::norm(s.c1) + std::norm(s.c2);
    }
    return traj;
}

SteadyState steady_state(const DDESystem& sys, DdeParity parity) {
    if (std::abs(sys.ising_J) * sys.tau_delay > 0.1)
        throw ConfigError(
            "steady_state: closed forms need negligible exchange, "
            "|J| tau <= 0.1, got " +
            std::to_string(std::abs(sys.ising_J) * sys.tau_delay));
    const double wrap_t =
        std::abs(std::remainder(sys.tilde_delta_r * sys.tau_delay, 2.0 * M_PI));
    const double wrap_d =
        std::abs(std::remainder(sys.delta_r * sys.tau_delay, 2.0 * M_PI));
    const bool ok_t = wrap_t <= 0.1, ok_d = wrap_d <= 0.1;
    if (!ok_t && !ok_d)
        throw ConfigError(
            "steady_state: phase is off resonance in both conventions "
            "(wraps " +
            std::to_string(wrap_d) + ", " + std::to_string(wrap_t) +
            " rad); no closed form");

    SteadyState out;
    out.phase_convention = ok_t && ok_d ? "both" : (ok_d ? "delta_r" : "tilde_delta_r");
    if (parity == DdeParity::Sym) {
        out.amplitude = 0.0;
        out.magnetization = -1.0;
    } else {
        const double A = 1.0 / (1.0 + 0.5 * sys.gamma * sys.tau_delay);
        out.amplitude = A / std::sqrt(2.0);
        out.magnetization = A * A - 1.0;
    }
    return out;
}

LambShift lamb_shift(const PolaronSolution& sol, const ModeSet& modes) {
    const double wc = modes.omega_c, alpha = modes.alpha, dr = sol.delta_r;
    const double c2t = sol.cos_theta * sol.cos_theta - sol.sin_theta * sol.sin_theta;
    const double s2t = 2.0 * sol.sin_theta * sol.cos_theta;
    const double dtr = dr * c2t + sol.ising_J * s2t;
    if (!(dtr > 0.0) || dtr >= wc)
        throw ConfigError("lamb_shift: pole must lie inside (0, omega_c)");
    if (dtr < 1e-9 * wc || wc - dtr < 1e-9 * wc)
        throw ConfigError("lamb_shift: pole too close to an integration endpoint");

    auto g = [&](double w) {
        const double d = w + dr;
        return M_PI * alpha * w / (d * d);
    };
    auto gp = [&](double w) {
        const double d = w + dr;
        return M_PI * alpha * (dr - w) / (d * d * d);
    };

    auto method_a = [&](int n) {
        const double a = std::min(dtr, wc - dtr);
        auto F = [&](double u) {
            if (u < 1e-14 * wc) return -2.0 * gp(dtr);
            return (g(dtr - u) - g(dtr + u)) / u;
        };
        double pv = simpson(F, 0.0, a, n);
        auto tail = [&](double w) { return g(w) / (dtr - w); };
        if (dtr - a > 1e-15 * wc) pv += simpson(tail, 0.0, dtr - a, n);
        if (wc - (dtr + a) > 1e-15 * wc) pv += simpson(tail, dtr + a, wc, n);
        return 2.0 / M_PI * dr * dr * pv;
    };
    auto method_b = [&](int n) {
        const double gpole = g(dtr);
        auto F = [&](double w) {
            if (std::abs(w - dtr) < 1e-12 * wc) return -gp(dtr);
            return (g(w) - gpole) / (dtr - w);
        };
        const double pv =
            simpson(F, 0.0, wc, n) + gpole * std::log(dtr / (wc - dtr));
        return 2.0 / M_PI * dr * dr * pv;
    };

    LambShift out;
    out.a_coarse = method_a(4000);
    out.a_fine = method_a(8000);
    out.b_coarse = method_b(4000);
    out.b_fine = method_b(8000);
    return out;
}

} // namespace uswg
