#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "polaron.hpp"
#include "waveguide.hpp"

// Markovian-bath reduction of the two-emitter dynamics: a pair of amplitude
// equations with a single retarded coupling term,
//
//   dc_i/dt = i J c_j - (g/2) c_i - (g/2) e^{i dtr x/v_g} c_j(t - x/v_g) H(t - x/v_g)
//
// with spontaneous rate g = 4 dr^2 J(dtr) cos^2(th) / (dr + dtr)^2 and the
// Heaviside gate exact (H(0) = 1). Serves as the analytic reference for the
// full mode-resolved dynamics at weak coupling.

namespace uswg {

using cplx = std::complex<double>;

struct DDESystem {
    double gamma = 0.0;          // spontaneous rate
    double ising_J = 0.0;
    double delta_r = 0.0;
    double tilde_delta_r = 0.0;
    double tau_delay = 0.0;      // x / v_g
    double phase_raw = 0.0;      // dtr * tau
    double phase_mod = 0.0;      // phase_raw mod 2 pi, in [0, 2 pi)
};

struct DdeSample {
    double t = 0.0;
    cplx c1, c2;
    double norm = 0.0;  // |c1|^2 + |c2|^2
};

struct DdeTrajectory {
    std::vector<DdeSample> samples;
    double h = 0.0;  // actual grid step (tau / nd)
};

struct SteadyState {
    double amplitude = 0.0;      // |c_i(infinity)| per emitter
    double magnetization = 0.0;  // polaron-frame sigma-z limit
    // which resonance convention (phase mod 2pi within 0.1 rad) was met:
    // "delta_r", "tilde_delta_r" or "both"
    std::string phase_convention;
};

struct LambShift {
    // principal value computed two ways at two resolutions; value() is the
    // fine symmetric-window result. Diagnostic only, never fed back.
    double a_coarse = 0.0, a_fine = 0.0;
    double b_coarse = 0.0, b_fine = 0.0;
    double value() const { return a_fine; }
    double spread() const;
};

// gamma from the converged solution; J(w) = pi alpha w analytic. Rejects
// tilde_delta_r outside the band (0, max mode frequency).
DDESystem build_dde(const PolaronSolution& sol, const ModeSet& modes, double x,
                    double v_g);

// Exact delay-free 2x2 flow, valid for t in [0, tau]:
// c1(t) = e^{-g t/2} (c1(0) cos(Jt) + i c2(0) sin(Jt)), c2 symmetric.
std::pair<cplx, cplx> dde_prehorizon(const DDESystem& sys, cplx c1_0, cplx c2_0,
                                     double t);

// Method of steps: the grid step is tau/nd with nd = ceil(tau/dt), so the
// delayed argument of every full step lands on the grid; half-step history
// values use 4-point cubic interpolation. The pre-horizon segment is the
// exact flow above, not integrated. Rejects dt > tau/10.
DdeTrajectory solve_dde(const DDESystem& sys, cplx c1_0, cplx c2_0, double dt,
                        double t_max);

enum class DdeParity { Sym, Antisym };

// Closed-form long-time limits at resonance with negligible J:
// sym -> (0, -1); antisym -> ((1+g tau/2)^{-1}/sqrt 2, (1+g tau/2)^{-2} - 1).
// Outside that regime (|J| tau > 0.1 or phase off resonance by > 0.1 rad in
// both conventions) there is no closed form and a ConfigError is thrown.
SteadyState steady_state(const DDESystem& sys, DdeParity parity);

// Neglected Lamb-shift correction, as a diagnostic:
// (2/pi) dr^2 PV int_0^wc dw J(w) / ((w+dr)^2 (dtr - w)).
LambShift lamb_shift(const PolaronSolution& sol, const ModeSet& modes);

} // namespace uswg
