#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "errors.hpp"

namespace uswg {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cd = std::complex<double>;

std::size_t binomial(std::size_t n, std::size_t r) {
    std::size_t v = 1;
    for (std::size_t i = 1; i <= r; ++i) v = v * (n - r + i) / i;
    return v;
}

// all occupation lists with digits in [0, P] and total <= P, last index
// varying fastest (plain odometer enumeration, then filter)
std::vector<std::vector<int>> enumerate_occs(int nm, int P) {
    std::vector<std::vector<int>> occs;
    std::vector<int> o(nm, 0);
    for (;;) {
        if (std::accumulate(o.begin(), o.end(), 0) <= P) occs.push_back(o);
        int pos = nm - 1;
        while (pos >= 0 && o[pos] == P) o[pos--] = 0;
        if (pos < 0) break;
        ++o[pos];
    }
    return occs;
}

struct OccIndex {
    int base = 0;
    std::vector<int> pow, table;
    OccIndex(int nm, int P, const std::vector<std::vector<int>>& occs)
        : base(P + 1), pow(nm, 1) {
        for (int i = 1; i < nm; ++i) pow[i] = pow[i - 1] * base;
        int total = pow.empty() ? 1 : pow.back() * base;
        table.assign(total, -1);
        for (std::size_t j = 0; j < occs.size(); ++j) table[key(occs[j])] = static_cast<int>(j);
    }
    int key(const std::vector<int>& o) const {
        int k = 0;
        for (std::size_t i = 0; i < o.size(); ++i) k += o[i] * pow[i];
        return k;
    }
    int at(const std::vector<int>& o) const { return table[key(o)]; }
};

double sz_diag(const OracleModel& m, int q, int which) {
    if (m.n_qubits == 1) return which == 0 ? 2.0 * q - 1.0 : 0.0;
    return which == 0 ? 2.0 * (q >> 1) - 1.0 : 2.0 * (q & 1) - 1.0;
}

} // namespace

std::size_t OracleModel::full_dimension() const {
    return (std::size_t(1) << n_qubits) *
           binomial(static_cast<std::size_t>(n_modes + n_ph_max),
                    static_cast<std::size_t>(n_ph_max));
}

OracleModel build_oracle(const ModeSet& modes, double delta, int n_modes,
                         int n_ph_max, int n_qubits, double x_sep) {
    if (n_modes < 3 || n_modes > 9 || n_modes % 2 == 0)
        throw ConfigError("oracle: n_modes must be odd and in [3, 9]");
    if (n_ph_max < 1 || n_ph_max > 3)
        throw ConfigError("oracle: n_ph_max must be in [1, 3]");
    if (n_qubits != 1 && n_qubits != 2)
        throw ConfigError("oracle: n_qubits must be 1 or 2");
    if (!(delta > 0.0)) throw ConfigError("oracle: delta must be positive");
    if (n_qubits == 2 && x_sep < 0.0)
        throw ConfigError("oracle: x_sep must be >= 0");

    OracleModel m;
    m.n_qubits = n_qubits;
    m.n_modes = n_modes;
    m.n_ph_max = n_ph_max;
    m.delta = delta;
    m.x_sep = n_qubits == 2 ? x_sep : 0.0;
    if (m.full_dimension() > 200000)
        throw ConfigError("oracle: dimension exceeds the desk-scale limit 2e5");

    // subset: {0, +1, -1} then +-pairs nearest resonance
    const int half = (modes.N - 1) / 2;
    std::vector<int> cand;
    for (int mm = 2; mm <= half; ++mm) cand.push_back(mm);
    if (static_cast<int>(cand.size()) < (n_modes - 3) / 2)
        throw ConfigError("oracle: parent mode set too small for the subset");
    auto dist = [&](int mm) {
        return std::abs(modes.omega[static_cast<std::size_t>(mm + half)] - delta);
    };
    std::stable_sort(cand.begin(), cand.end(),
                     [&](int a, int b) { return dist(a) < dist(b); });
    std::vector<int> ms = {0, 1, -1};
    for (int p = 0; p < (n_modes - 3) / 2; ++p) {
        ms.push_back(cand[p]);
        ms.push_back(-cand[p]);
    }
    // the k = 0 mode is exactly decoupled; keep only the others in the basis
    for (int mm : ms) {
        if (mm == 0) continue;
        const std::size_t i = static_cast<std::size_t>(mm + half);
        m.mode_m.push_back(mm);
        m.k.push_back(modes.k[i]);
        m.omega.push_back(modes.omega[i]);
        m.g.push_back(modes.g[i]);
    }

    const int nm = static_cast<int>(m.mode_m.size());
    m.x1 = n_qubits == 2 ? modes.L / 2.0 - x_sep / 2.0 : modes.L / 2.0;
    m.x2 = n_qubits == 2 ? modes.L / 2.0 + x_sep / 2.0 : modes.L / 2.0;
    m.occs = enumerate_occs(nm, n_ph_max);
    const OccIndex oidx(nm, n_ph_max, m.occs);
    const std::size_t no = m.occs.size();
    const std::size_t nq_conf = std::size_t(1) << n_qubits;
    const std::size_t dim = nq_conf * no;

    m.H = MatrixXcd::Zero(dim, dim);
    std::vector<int> o2;
    for (std::size_t q = 0; q < nq_conf; ++q) {
        for (std::size_t oi = 0; oi < no; ++oi) {
            const std::size_t i = q * no + oi;
            const auto& o = m.occs[oi];
            double diag = 0.0;
            for (int j = 0; j < n_qubits; ++j)
                diag += delta / 2.0 * sz_diag(m, static_cast<int>(q), j);
            for (int km = 0; km < nm; ++km) diag += m.omega[km] * o[km];
            m.H(i, i) = diag;
            const int tot = std::accumulate(o.begin(), o.end(), 0);
            for (int j = 0; j < n_qubits; ++j) {
                const std::size_t qf =
                    n_qubits == 2 ? (q ^ (j == 0 ? 2u : 1u)) : (q ^ 1u);
                const double xq = j == 0 ? m.x1 : m.x2;
                for (int km = 0; km < nm; ++km) {
                    const cd up = std::exp(cd(0.0, -m.k[km] * xq));
                    if (tot + 1 <= n_ph_max) {
                        o2 = o;
                        ++o2[km];
                        const std::size_t jj = qf * no + oidx.at(o2);
                        m.H(jj, i) += m.g[km] * std::sqrt(o[km] + 1.0) * up;
                    }
                    if (o[km] > 0) {
                        o2 = o;
                        --o2[km];
                        const std::size_t jj = qf * no + oidx.at(o2);
                        m.H(jj, i) += m.g[km] * std::sqrt(double(o[km])) * std::conj(up);
                    }
                }
            }
        }
    }
    const double herm = (m.H - m.H.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-13)
        throw NumericError("oracle: Hamiltonian not Hermitian, deviation " +
                           std::to_string(herm));
    return m;
}

ModeSet subset_mode_set(const OracleModel& model, const ModeSet& modes) {
    ModeSet sub;
    sub.N = modes.N;
    sub.L = modes.L;
    sub.v_g = modes.v_g;
    sub.omega_c = modes.omega_c;
    sub.dx = modes.dx;
    sub.alpha = modes.alpha;
    const int half = (modes.N - 1) / 2;
    // include the decoupled k = 0 entry as well, mirroring the selection
    sub.k.push_back(0.0);
    sub.omega.push_back(0.0);
    sub.g.push_back(0.0);
    for (std::size_t j = 0; j < model.mode_m.size(); ++j) {
        const std::size_t i = static_cast<std::size_t>(model.mode_m[j] + half);
        sub.k.push_back(modes.k[i]);
        sub.omega.push_back(modes.omega[i]);
        sub.g.push_back(modes.g[i]);
    }
    return sub;
}

OracleGround exact_ground(const OracleModel& model) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(model.H);
    if (es.info() != Eigen::Success)
        throw NumericError("oracle: eigensolver failed");
    OracleGround out;
    out.energy = es.eigenvalues()(0);
    out.gap = es.eigenvalues()(1) - es.eigenvalues()(0);
    out.ground_vec = es.eigenvectors().col(0);

    const std::size_t no = model.n_occ();
    double pexp = 0.0;
    for (std::size_t i = 0; i < model.dim(); ++i) {
        const std::size_t q = i / no, oi = i % no;
        double pq = 1.0;
        for (int j = 0; j < model.n_qubits; ++j)
            pq *= sz_diag(model, static_cast<int>(q), j);
        const int tot = std::accumulate(model.occs[oi].begin(),
                                        model.occs[oi].end(), 0);
        pexp += pq * (tot % 2 ? -1.0 : 1.0) * std::norm(out.ground_vec(i));
    }
    out.parity = pexp;
    out.parity_definite = std::abs(std::abs(pexp) - 1.0) < 1e-8;
    if (!out.parity_definite)
        throw NumericError("oracle: ground state parity not definite: " +
                           std::to_string(pexp));

    const std::size_t nq_conf = std::size_t(1) << model.n_qubits;
    out.qubit_rdm = MatrixXcd::Zero(nq_conf, nq_conf);
    for (std::size_t a = 0; a < nq_conf; ++a)
        for (std::size_t b = 0; b < nq_conf; ++b)
            for (std::size_t oi = 0; oi < no; ++oi)
                out.qubit_rdm(a, b) += out.ground_vec(a * no + oi) *
                                       std::conj(out.ground_vec(b * no + oi));
    return out;
}

Eigen::MatrixXcd polaron_unitary(const OracleModel& model, double* dr_out) {
    if (model.n_qubits != 1)
        throw ConfigError("oracle: polaron unitary only built for one qubit");
    const int nm = static_cast<int>(model.mode_m.size());
    const std::size_t no = model.n_occ();
    const OccIndex oidx(nm, model.n_ph_max, model.occs);

    // single-qubit renormalization converged on the subset itself
    double dr = model.delta;
    for (int it = 0; it < 100000; ++it) {
        double s = 0.0;
        for (int km = 0; km < nm; ++km) {
            const double f = model.g[km] / (model.omega[km] + dr);
            s += f * f;
        }
        const double drn = model.delta * std::exp(-2.0 * s);
        const bool done = std::abs(drn - dr) <= 1e-13 * model.delta;
        dr = drn;
        if (done) break;
    }
    if (dr_out) *dr_out = dr;

    std::vector<double> f(nm);
    for (int km = 0; km < nm; ++km)
        f[km] = model.g[km] / (model.omega[km] + dr);

    // generator of the dressing transformation, anti-Hermitian by construction
    MatrixXcd M = MatrixXcd::Zero(model.dim(), model.dim());
    std::vector<int> o2;
    for (std::size_t q = 0; q < 2; ++q) {
        for (std::size_t oi = 0; oi < no; ++oi) {
            const std::size_t i = q * no + oi;
            const auto& o = model.occs[oi];
            const int tot = std::accumulate(o.begin(), o.end(), 0);
            const std::size_t qf = 1 - q;
            for (int km = 0; km < nm; ++km) {
                const cd up = std::exp(cd(0.0, model.k[km] * model.x1));
                if (tot + 1 <= model.n_ph_max) {
                    o2 = o;
                    ++o2[km];
                    M(qf * no + oidx.at(o2), i) +=
                        -f[km] * std::sqrt(o[km] + 1.0) * up;
                }
                if (o[km] > 0) {
                    o2 = o;
                    --o2[km];
                    M(qf * no + oidx.at(o2), i) +=
                        f[km] * std::sqrt(double(o[km])) * std::conj(up);
                }
            }
        }
    }
    const double anti = (M + M.adjoint()).cwiseAbs().maxCoeff();
    if (anti > 1e-13)
        throw NumericError("oracle: dressing generator not anti-Hermitian");

    // U = exp(M) via the Hermitian matrix K = iM: U = W e^{-i lambda} W^dag
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(cd(0.0, 1.0) * M);
    if (es.info() != Eigen::Success)
        throw NumericError("oracle: generator eigensolver failed");
    const VectorXd lam = es.eigenvalues();
    VectorXcd ph(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        ph(i) = std::exp(cd(0.0, -lam(i)));
    return es.eigenvectors() * ph.asDiagonal() *
           es.eigenvectors().adjoint();
}

Eigen::VectorXcd polaron_init(const OracleModel& model,
                              const Eigen::MatrixXcd& U) {
    if (model.n_qubits != 1)
        throw ConfigError("oracle: polaron init only built for one qubit");
    // |e, vacuum>: the all-zero occupation list is the first one enumerated
    const std::size_t i = model.n_occ();
    return U.col(i);
}

OracleTrajectory exact_evolve(const OracleModel& model,
                              const Eigen::VectorXcd& psi0, double t_max,
                              int nt, const Eigen::MatrixXcd* polaron_u) {
    if (psi0.size() != static_cast<Eigen::Index>(model.dim()))
        throw ConfigError("oracle: initial state has wrong dimension");
    if (std::abs(psi0.norm() - 1.0) > 1e-10)
        throw ConfigError("oracle: initial state not normalized");
    if (nt < 2) throw ConfigError("oracle: need at least two samples");
    if (!(t_max > 0.0)) throw ConfigError("oracle: t_max must be positive");

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(model.H);
    if (es.info() != Eigen::Success)
        throw NumericError("oracle: eigensolver failed");
    const MatrixXcd& V = es.eigenvectors();
    const VectorXd& ev = es.eigenvalues();
    const VectorXcd amps = V.adjoint() * psi0;

    const std::size_t no = model.n_occ();
    VectorXd sz1d(model.dim()), sz2d(model.dim()), shell(model.dim());
    for (std::size_t i = 0; i < model.dim(); ++i) {
        const std::size_t q = i / no, oi = i % no;
        sz1d(i) = sz_diag(model, static_cast<int>(q), 0);
        sz2d(i) = sz_diag(model, static_cast<int>(q), 1);
        const int tot = std::accumulate(model.occs[oi].begin(),
                                        model.occs[oi].end(), 0);
        shell(i) = tot == model.n_ph_max ? 1.0 : 0.0;
    }
    MatrixXcd B1, B2;
    if (polaron_u) {
        B1 = (*polaron_u) * sz1d.asDiagonal() * polaron_u->adjoint();
        if (model.n_qubits == 2)
            B2 = (*polaron_u) * sz2d.asDiagonal() * polaron_u->adjoint();
    }

    OracleTrajectory traj;
    traj.samples.resize(nt);
    VectorXcd phased(amps.size()), st;
    for (int s = 0; s < nt; ++s) {
        const double t = t_max * s / (nt - 1);
        for (Eigen::Index i = 0; i < amps.size(); ++i)
            phased(i) = std::exp(cd(0.0, -ev(i) * t)) * amps(i);
        st = V * phased;
        auto& smp = traj.samples[s];
        smp.t = t;
        smp.norm = st.squaredNorm();
        smp.sz1 = st.dot(sz1d.asDiagonal() * st).real();
        smp.sz2 = st.dot(sz2d.asDiagonal() * st).real();
        smp.leakage = st.dot(shell.asDiagonal() * st).real();
        if (polaron_u) {
            smp.sz1_pol = st.dot(B1 * st).real();
            if (model.n_qubits == 2) smp.sz2_pol = st.dot(B2 * st).real();
        }
        if (smp.leakage > traj.max_leakage) traj.max_leakage = smp.leakage;
    }
    traj.trusted = traj.max_leakage <= 1e-3;
    return traj;
}

} // namespace uswg
