#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "kernels/kernels.hpp"
#include "polaron.hpp"
#include "waveguide.hpp"

// Single-excitation dynamics on top of the converged two-qubit ground state.
// The excitation-conserving effective Hamiltonian couples the two amplitude
// variables c_1, c_2 to one field amplitude per mode:
//
//   i dc_1/dt  = -J c_2 + cos(th) sum_k G_k e^{-i k x_1} psi_k   (1 <-> 2)
//   i dpsi_k/dt = -(dtr - w_k) psi_k + cos(th) G_k sum_j e^{i k x_j} c_j
//                 + 2 dr cos(2 th) f_k sum_j e^{i k x_j} P_j
//
// with P_j = sum_k f_k e^{-i k x_j} psi_k, dtr = dr cos(2th) + J sin(2th),
// and G_k = 2 dr f_k^{(0)} + eps (dr - w_k) built from the single-qubit
// displacement f^{(0)} = g/(w + dr_single). The psi-psi term is applied in
// the factored O(N) form via the P_j projections.

namespace uswg {

struct EffectiveSystem {
    // per-mode arrays, restricted to coupled modes (g > 0); uncoupled modes
    // stay exactly empty under this Hamiltonian so they are dropped
    std::vector<double> wp;          // dtr - omega_k
    std::vector<double> G;           // coupling G_k
    std::vector<double> f;           // two-qubit displacement f_k
    std::vector<double> e1c, e1s;    // cos(k x1), sin(k x1)
    std::vector<double> e2c, e2s;    // cos(k x2), sin(k x2)

    double delta_r = 0.0;
    double ising_J = 0.0;
    double theta = 0.0;
    double cos_theta = 1.0;
    double sin_theta = 0.0;
    double tilde_delta_r = 0.0;
    double bare_delta = 0.0;
    double epsilon = 0.0;

    // geometry: emitters symmetric about the ring midpoint
    double x1 = 0.0, x2 = 0.0, x_sep = 0.0;
    double L = 0.0, v_g = 0.0, alpha = 0.0;
    double omega_max = 0.0;

    std::size_t n() const { return wp.size(); }
};

// State layout: one flat array [c1re, c1im, c2re, c2im, psire(n), psiim(n)]
// so the integrator kernels can treat it as a single vector.
struct ExcitationState {
    std::vector<double> y;

    explicit ExcitationState(std::size_t n_modes = 0) : y(4 + 2 * n_modes, 0.0) {}

    std::size_t n_modes() const { return (y.size() - 4) / 2; }
    double& c1re() { return y[0]; }
    double& c1im() { return y[1]; }
    double& c2re() { return y[2]; }
    double& c2im() { return y[3]; }
    double c1re() const { return y[0]; }
    double c1im() const { return y[1]; }
    double c2re() const { return y[2]; }
    double c2im() const { return y[3]; }
    const double* psi_re() const { return y.data() + 4; }
    const double* psi_im() const { return y.data() + 4 + n_modes(); }
    double* psi_re() { return y.data() + 4; }
    double* psi_im() { return y.data() + 4 + n_modes(); }

    double norm_sq() const;
};

enum class InitKind { Sym, Antisym, Eg };

InitKind parse_init(const std::string& s);  // "sym" | "antisym" | "eg"

struct TrajectorySample {
    double t = 0.0;
    double c1re = 0.0, c1im = 0.0, c2re = 0.0, c2im = 0.0;
    double sz1_pol = 0.0, sz2_pol = 0.0;
    double sz1_lab = 0.0, sz2_lab = 0.0;
    double gamma1 = 0.0, gamma2 = 0.0;  // NaN marks |c_i| below the 1e-8 floor
    double norm = 0.0;                  // |c1|^2 + |c2|^2 + sum |psi|^2
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    ExcitationState final_state;
    double max_norm_drift = 0.0;
    const char* kernel_name = "";
};

// Builds the effective system from a converged two-qubit solution plus the
// single-qubit solution at the same alpha (for f^{(0)}). Both must live on
// the same ModeSet; far-separation solutions (infinite x) are rejected.
EffectiveSystem build_effective(const PolaronSolution& sol,
                                const PolaronSolution& sol_single,
                                const ModeSet& modes, double epsilon = 0.0);

ExcitationState make_init(const EffectiveSystem& sys, InitKind kind);

// Fixed-step classical RK4. dt may be negative (time reversal); t_max is the
// duration. Requires |dt| <= 0.1/omega_max and t_max below the ring
// recurrence time (L - x)/v_g. Norm drift beyond 1e-6 or non-finite values
// abort with a NumericError.
Trajectory evolve(const EffectiveSystem& sys, const ExcitationState& init,
                  double dt, double t_max, int stride,
                  const kernels::Table& kern);

// <sigma^z_i> in the polaron frame: cos^2(th)(2|c_i|^2 - 1) - sin^2(th)(2|c_j|^2 - 1)
std::pair<double, double> polaron_sigma_z(const ExcitationState& state,
                                          double theta);

// Lab-frame magnetizations including the field-displacement cross terms.
std::pair<double, double> lab_sigma_z(const ExcitationState& state,
                                      const EffectiveSystem& sys,
                                      const kernels::Table& kern);

} // namespace uswg
