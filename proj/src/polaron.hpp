#pragma once

#include <array>
#include <vector>

#include "waveguide.hpp"

namespace uswg {

// Converged variational data for one or two qubits. f is aligned with the
// ModeSet (entries are 0 where g=0, including k=0). For the single-qubit
// solve ising_J = 0 and theta = 0; x_sep is NaN for single, +inf for the
// infinite-separation pair solve.
struct PolaronSolution {
    std::vector<double> f;
    double delta_r = 0.0;
    double ising_J = 0.0;
    double calE = 0.0;       // sqrt(delta_r^2 + ising_J^2)
    double theta = 0.0;
    double cos_theta = 1.0;
    double sin_theta = 0.0;
    double e_gs = 0.0;
    double x_sep = 0.0;
    double bare_delta = 0.0;
    bool converged = false;
    bool localized = false;  // delta_r = 0 branch selected
    int iterations = 0;
    double residual = 0.0;   // max fixed-point residual, units of bare_delta
    int n_qubits = 1;
};

// phi(x) = 4 sum_k f_k^2 sin(k x), zeta(x) = 4 sum_k f_k^2 cos(k x), both
// over all signed k. With real k-symmetric f the sine sum vanishes
// identically; it is still computed as written.
struct AuxiliaryPhases {
    double phi_x = 0.0;
    double zeta_x = 0.0;
};

AuxiliaryPhases auxiliary_phases(const PolaronSolution& sol, const ModeSet& modes,
                                 double x);
// Sensitivity variant restricted to k > 0, where phi does not cancel.
// Not used by any default code path.
AuxiliaryPhases auxiliary_phases_positive_k(const PolaronSolution& sol,
                                            const ModeSet& modes, double x);

// Fixed point of dr -> delta*exp(-2 sum f^2), f_k = g_k/(omega_k + dr).
// Damped iteration from dr = delta; collapse below 1e-12*delta reports the
// localized phase. tol is relative to delta.
PolaronSolution solve_single(double delta, const ModeSet& modes,
                             double tol = 1e-10, int max_iter = 100000);

// Joint fixed point of {f_k, delta_r, J} for two qubits at separation x:
//   f_k = g_k (E + J cos kx) / (omega_k (E + J cos kx) + delta_r^2)
//   J   = 2 sum_k f_k (2 g_k - omega_k f_k) cos kx
//   delta_r = delta exp(-2 sum f^2),  E = hypot(delta_r, J)
// Outer damped iteration on J (eta = 0.5, halved when the residual flips
// sign), inner monotone iteration on delta_r at fixed J. The delocalized
// fixed point and the delta_r = 0 candidate (f = g/omega) are both
// evaluated and the lower-energy branch is returned.
PolaronSolution solve_two(double delta, double x, const ModeSet& modes,
                          double tol = 1e-10, int max_iter = 100000);

// Infinite-separation pair: the two-qubit equations with the cross terms
// dropped (J = 0, theta = 0), which coincide with the single-qubit form.
// e_gs is the pair energy (twice the single-qubit value).
PolaronSolution solve_far(double delta, const ModeSet& modes,
                          double tol = 1e-10, int max_iter = 100000);

// J ~ alpha*omega_c*sinc(omega_c x/v_g), the leading long-range form.
double ising_sinc(double alpha, double omega_c, double x, double v_g);

// Corrected closed form with the Ci/Si terms; reduces to ising_sinc at
// delta_r = 0 and to alpha*omega_c^2/(delta_r+omega_c) at x = 0.
double ising_corrected(double alpha, double omega_c, double x, double v_g,
                       double delta_r);

// Scaling-limit references: delta*(delta/omega_c)^(alpha/(1-alpha)) for a
// single qubit and delta*(e*delta/omega_c)^(alpha/(1-alpha)) for the
// far-separated pair. Require alpha < 1.
double scaling_delta_r_single(double delta, double omega_c, double alpha);
double scaling_delta_r_far(double delta, double omega_c, double alpha);

// <sigma^z>_GS = -(delta_r/delta) cos(2 theta) cos(phi(x))
double gs_magnetization(const PolaronSolution& sol, const AuxiliaryPhases& ph);

// Two-qubit linear entanglement entropy S_L = 1 - Tr[rho^2] from the
// closed form; uses zeta(x).
double linear_entropy(const PolaronSolution& sol, const AuxiliaryPhases& ph);

// Infinite-distance limit S_L = (3 - 2 r^2 - r^4)/4 with r = delta_r/delta.
double linear_entropy_far(const PolaronSolution& sol);

// Reduced 4x4 qubit density matrix in the sigma^x product basis
// (++, +-, -+, --), row-major. Real symmetric; trace and symmetry are
// asserted. Tr[rho^2] equals 1 - linear_entropy.
std::array<double, 16> reduced_density_matrix(const PolaronSolution& sol,
                                              const AuxiliaryPhases& ph);

// Sine and cosine integrals (wrappers kept here so every caller shares one
// implementation).
double sine_integral(double x);
double cosine_integral(double x);

} // namespace uswg
