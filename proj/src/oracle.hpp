#pragma once

#include <Eigen/Dense>
#include <vector>

#include "waveguide.hpp"

// Brute-force diagonalization of the truncated spin-boson Hamiltonian on a
// small symmetric mode subset, as an independent check on the variational
// machinery. The subset keeps the k = 0 mode and the lowest +-k pair plus
// the pairs nearest resonance; the Fock space is truncated by total photon
// number. The k = 0 mode carries no coupling, so its occupation is frozen
// at zero and the basis is built over the coupled modes only.

namespace uswg {

struct OracleModel {
    int n_qubits = 1;
    int n_modes = 0;    // requested subset size, including the decoupled k=0 mode
    int n_ph_max = 0;   // total photon number cutoff
    double delta = 0.0;
    double x_sep = 0.0; // two-qubit separation (ignored for one qubit)
    double x1 = 0.0, x2 = 0.0;

    // coupled subset arrays (size n_modes - 1), in selection order
    std::vector<int> mode_m;
    std::vector<double> k, omega, g;

    // basis: qubit configuration major, occupation list minor; occupation
    // lists enumerated with the last mode index varying fastest
    std::vector<std::vector<int>> occs;
    Eigen::MatrixXcd H;

    std::size_t n_occ() const { return occs.size(); }
    std::size_t dim() const { return H.rows(); }
    // the untruncated-sector dimension bound used for the desk-scale guard:
    // 2^{n_qubits} * C(n_modes + n_ph_max, n_ph_max)
    std::size_t full_dimension() const;
};

struct OracleGround {
    double energy = 0.0;
    double gap = 0.0;        // E1 - E0
    double parity = 0.0;     // <sigma^z_1 sigma^z_2 (-1)^{sum n}> of the ground state
    bool parity_definite = false;
    Eigen::MatrixXcd qubit_rdm;  // 2^{n_qubits} square, partial trace over Fock
    Eigen::VectorXcd ground_vec;
};

struct OracleSamplePoint {
    double t = 0.0;
    double sz1 = 0.0, sz2 = 0.0;          // lab-frame <sigma^z_j>
    double sz1_pol = 0.0, sz2_pol = 0.0;  // polaron-frame, when a unitary is supplied
    double leakage = 0.0;                 // population of the top photon shell
    double norm = 0.0;
};

struct OracleTrajectory {
    std::vector<OracleSamplePoint> samples;
    double max_leakage = 0.0;
    bool trusted = true;  // false once max_leakage > 1e-3
};

// Builds the subset (modes with omega nearest delta, +-k symmetric, plus
// {0, +-1}) and the dense Hamiltonian. n_modes odd in [3, 9], n_ph_max in
// [1, 3], n_qubits 1 or 2. Dimensions above 2e5 are rejected.
OracleModel build_oracle(const ModeSet& modes, double delta, int n_modes,
                         int n_ph_max, int n_qubits, double x_sep);

// A reduced ModeSet holding exactly the oracle's subset modes, so the
// variational solvers can run on the identical truncated environment.
ModeSet subset_mode_set(const OracleModel& model, const ModeSet& modes);

OracleGround exact_ground(const OracleModel& model);

// Truncated polaron-dressing unitary for the one-qubit model: the matrix
// exponential of the displacement generator with f = g/(omega + dr), dr
// converged on the subset. Evaluated spectrally (the generator is
// anti-Hermitian). Also returns dr through *dr_out when non-null.
Eigen::MatrixXcd polaron_unitary(const OracleModel& model,
                                 double* dr_out = nullptr);

// Polaron-frame |e, vacuum> mapped through U for the one-qubit model.
Eigen::VectorXcd polaron_init(const OracleModel& model,
                              const Eigen::MatrixXcd& U);

// Spectral-decomposition propagation, nt samples on [0, t_max] inclusive.
// polaron_u (optional) fills the polaron-frame columns.
OracleTrajectory exact_evolve(const OracleModel& model,
                              const Eigen::VectorXcd& psi0, double t_max,
                              int nt, const Eigen::MatrixXcd* polaron_u = nullptr);

} // namespace uswg
