#include "polaron.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_expint.h>

#include "errors.hpp"

namespace uswg {

namespace {

constexpr double kCollapse = 1e-12;  // delta_r/delta below this means localized

// Coupled-mode views (g > 0), summation order fixed: m ascending.
struct Coupled {
    std::vector<double> w, g, coskx;
    double sum_g2_over_w = 0.0;  // bath energy of the f = g/omega point
    double J_loc = 0.0;          // Ising coupling evaluated at f = g/omega
};

Coupled gather(const ModeSet& modes, double x, bool with_cross) {
    Coupled c;
    c.w.reserve(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes.g[i] <= 0.0) continue;
        c.w.push_back(modes.omega[i]);
        c.g.push_back(modes.g[i]);
        c.coskx.push_back(with_cross ? std::cos(modes.k[i] * x) : 0.0);
    }
    for (std::size_t i = 0; i < c.w.size(); ++i) {
        const double r = c.g[i] * c.g[i] / c.w[i];
        c.sum_g2_over_w += r;
        c.J_loc += 2.0 * r * c.coskx[i];
    }
    return c;
}

// Fixed point of dr -> delta*exp(-2 sum f^2) at fixed J. The map is
// monotone increasing in dr, so iterating from dr = delta descends to the
// LARGEST root while iterating from 0+ climbs to the SMALLEST one. Near the
// localization transition both roots exist and are distinct stationary
// points of the variational energy; the callers compare their energies.
double inner_dr(double delta, const Coupled& c, double J, double tol,
                int max_iter, int* used, bool from_below = false) {
    double dr = from_below ? kCollapse * delta : delta;
    int it = 0;
    for (; it < max_iter; ++it) {
        const double E = std::hypot(dr, J);
        double s = 0.0;
        for (std::size_t i = 0; i < c.w.size(); ++i) {
            const double a = E + J * c.coskx[i];
            const double f = c.g[i] * a / (c.w[i] * a + dr * dr);
            s += f * f;
        }
        const double drn = delta * std::exp(-2.0 * s);
        const bool done = std::abs(drn - dr) <= tol * delta;
        dr = drn;
        if (done) break;
        if (dr < kCollapse * delta) break;
    }
    if (used) *used = it;
    return dr;
}

void fill_f(const ModeSet& modes, double x, double dr, double J,
            std::vector<double>& f) {
    const double E = std::hypot(dr, J);
    f.assign(modes.size(), 0.0);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes.g[i] <= 0.0) continue;
        const double a = E + J * std::cos(modes.k[i] * x);
        const double den = modes.omega[i] * a + dr * dr;
        f[i] = den != 0.0 ? modes.g[i] * a / den : 0.0;
    }
}

// Ground state of the 2x2 block of the effective spin Hamiltonian in
// span{|gg>, |ee>}, i.e. [[-dr, J], [J, +dr]]: eigenvalue -E with
// eigenvector (dr + E, -J)/r. The angle formulas below are exactly that
// eigenvector, valid for either sign of J.
void set_angles(PolaronSolution& s) {
    s.calE = std::hypot(s.delta_r, s.ising_J);
    const double r = std::hypot(s.delta_r + s.calE, s.ising_J);
    if (r > 0.0) {
        s.cos_theta = (s.delta_r + s.calE) / r;
        s.sin_theta = s.ising_J / r;
    } else {  // delta_r = J = 0: degenerate block, take theta = 0
        s.cos_theta = 1.0;
        s.sin_theta = 0.0;
    }
    s.theta = std::atan2(s.sin_theta, s.cos_theta);
}

void localize_two(PolaronSolution& s, const ModeSet& modes, double x,
                  const Coupled& c) {
    s.delta_r = 0.0;
    s.ising_J = c.J_loc;
    s.localized = true;
    s.residual = 0.0;  // f = g/omega is an exact stationary point
    fill_f(modes, x, 0.0, c.J_loc, s.f);  // reduces to f = g/omega
    s.e_gs = -std::abs(c.J_loc) - 2.0 * c.sum_g2_over_w;
    set_angles(s);
}

} // namespace

AuxiliaryPhases auxiliary_phases(const PolaronSolution& sol, const ModeSet& modes,
                                 double x) {
    AuxiliaryPhases ph;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double f2 = sol.f[i] * sol.f[i];
        if (f2 == 0.0) continue;
        ph.phi_x += 4.0 * f2 * std::sin(modes.k[i] * x);
        ph.zeta_x += 4.0 * f2 * std::cos(modes.k[i] * x);
    }
    return ph;
}

AuxiliaryPhases auxiliary_phases_positive_k(const PolaronSolution& sol,
                                            const ModeSet& modes, double x) {
    AuxiliaryPhases ph;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes.k[i] <= 0.0) continue;
        const double f2 = sol.f[i] * sol.f[i];
        ph.phi_x += 4.0 * f2 * std::sin(modes.k[i] * x);
        ph.zeta_x += 4.0 * f2 * std::cos(modes.k[i] * x);
    }
    return ph;
}

namespace {

struct SingleBranch {
    double dr = 0.0;
    int it = 0;
    bool converged = false;
};

SingleBranch single_branch(double delta, const Coupled& c, double tol,
                           int max_iter, bool from_below) {
    SingleBranch b;
    double dr = from_below ? kCollapse * delta : delta;
    for (; b.it < max_iter; ++b.it) {
        double sum = 0.0;
        for (std::size_t i = 0; i < c.w.size(); ++i) {
            const double f = c.g[i] / (c.w[i] + dr);
            sum += f * f;
        }
        const double drn = delta * std::exp(-2.0 * sum);
        const bool done = std::abs(drn - dr) <= tol * delta;
        dr = drn;
        if (done) { b.converged = true; break; }
        if (dr < kCollapse * delta) { b.converged = true; break; }
    }
    b.dr = dr < kCollapse * delta ? 0.0 : dr;
    return b;
}

// -dr/2 + sum f (w f - 2 g) at f = g/(w + dr); valid for dr = 0 too,
// where it reduces to the fully localized value -sum g^2/w.
double single_energy(double delta, const Coupled& c, double dr) {
    (void)delta;
    double ebath = 0.0;
    for (std::size_t i = 0; i < c.w.size(); ++i) {
        const double f = c.g[i] / (c.w[i] + dr);
        ebath += f * (c.w[i] * f - 2.0 * c.g[i]);
    }
    return -dr / 2.0 + ebath;
}

} // namespace

PolaronSolution solve_single(double delta, const ModeSet& modes, double tol,
                             int max_iter) {
    if (!(delta > 0.0)) throw ConfigError("solve_single: delta must be positive");
    const Coupled c = gather(modes, 0.0, false);

    PolaronSolution s;
    s.bare_delta = delta;
    s.n_qubits = 1;
    s.x_sep = std::numeric_limits<double>::quiet_NaN();

    // stationary candidates: descent root, ascent root, exact dr = 0; the
    // variational winner is the lowest energy, ties to the larger dr
    const SingleBranch hi = single_branch(delta, c, tol, max_iter, false);
    const SingleBranch lo = single_branch(delta, c, tol, max_iter, true);

    double dr = hi.dr;
    s.iterations = hi.it;
    s.converged = hi.converged;
    double e = single_energy(delta, c, dr);
    // ascent and descent land on the same root except near the transition;
    // only a genuinely distinct small-dr root enters the comparison
    if (lo.converged && std::abs(lo.dr - hi.dr) > 1e3 * tol * delta) {
        const double e_lo = single_energy(delta, c, lo.dr);
        if (e_lo < e) {
            dr = lo.dr;
            e = e_lo;
            s.iterations = lo.it;
            s.converged = lo.converged;
        }
    }
    if (-c.sum_g2_over_w < e) dr = 0.0;

    if (dr == 0.0) {
        s.delta_r = 0.0;
        s.localized = true;
        s.converged = true;
        s.f.assign(modes.size(), 0.0);
        for (std::size_t i = 0; i < modes.size(); ++i)
            if (modes.g[i] > 0.0) s.f[i] = modes.g[i] / modes.omega[i];
        s.e_gs = -c.sum_g2_over_w;
        set_angles(s);
        return s;
    }

    s.delta_r = dr;
    s.f.assign(modes.size(), 0.0);
    double ebath = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes.g[i] <= 0.0) continue;
        s.f[i] = modes.g[i] / (modes.omega[i] + dr);
        ebath += s.f[i] * (modes.omega[i] * s.f[i] - 2.0 * modes.g[i]);
        sum += s.f[i] * s.f[i];
    }
    s.e_gs = -dr / 2.0 + ebath;
    s.residual = std::abs(delta * std::exp(-2.0 * sum) - dr) / delta;
    set_angles(s);
    return s;
}

namespace {

struct TwoBranch {
    double dr = 0.0, J = 0.0;
    int it = 0;
    bool converged = false;
    bool collapsed = false;
};

TwoBranch two_branch(double delta, const Coupled& c, double J0, double tol,
                     int max_iter, bool from_below) {
    const double inner_tol = 1e-2 * tol;
    TwoBranch b;
    double J = J0;
    double eta = 0.5;
    double prev = 0.0;
    bool have_prev = false;
    double dr = delta;
    for (; b.it < max_iter; ++b.it) {
        dr = inner_dr(delta, c, J, inner_tol, max_iter, nullptr, from_below);
        const double E = std::hypot(dr, J);
        double Jn = 0.0;
        for (std::size_t i = 0; i < c.w.size(); ++i) {
            const double a = E + J * c.coskx[i];
            const double f = c.g[i] * a / (c.w[i] * a + dr * dr);
            Jn += 2.0 * f * (2.0 * c.g[i] - c.w[i] * f) * c.coskx[i];
        }
        const double r = Jn - J;
        if (std::abs(r) <= tol * delta) {
            J = Jn;
            b.converged = true;
            break;
        }
        if (have_prev && r * prev < 0.0) eta *= 0.5;  // oscillation detected
        prev = r;
        have_prev = true;
        J += eta * r;
    }
    b.dr = inner_dr(delta, c, J, inner_tol, max_iter, nullptr, from_below);
    b.J = J;
    if (b.dr < kCollapse * delta) {
        b.dr = 0.0;
        b.collapsed = true;
    }
    return b;
}

// -E + 2 sum f (w f - 2 g) evaluated on the coupled arrays
double two_energy(const Coupled& c, double dr, double J) {
    const double E = std::hypot(dr, J);
    double ebath = 0.0;
    for (std::size_t i = 0; i < c.w.size(); ++i) {
        const double a = E + J * c.coskx[i];
        const double den = c.w[i] * a + dr * dr;
        const double f = den != 0.0 ? c.g[i] * a / den : 0.0;
        ebath += f * (c.w[i] * f - 2.0 * c.g[i]);
    }
    return -E + 2.0 * ebath;
}

} // namespace

PolaronSolution solve_two(double delta, double x, const ModeSet& modes,
                          double tol, int max_iter) {
    if (!(delta > 0.0)) throw ConfigError("solve_two: delta must be positive");
    if (x < 0.0) throw ConfigError("solve_two: x must be >= 0");
    const Coupled c = gather(modes, x, true);

    PolaronSolution s;
    s.bare_delta = delta;
    s.n_qubits = 2;
    s.x_sep = x;

    // candidates: nested solve tracking the large-dr inner root (init from
    // the sinc form), the same tracking the small-dr root (init from the
    // dr -> 0 Ising value), and the exactly localized point. Lowest energy
    // wins, ties to the larger dr, so the delocalized branch survives
    // degeneracy at the transition.
    const TwoBranch hi = two_branch(
        delta, c, ising_sinc(modes.alpha, modes.omega_c, x, modes.v_g), tol,
        max_iter, false);
    const TwoBranch lo = two_branch(delta, c, c.J_loc, tol, max_iter, true);

    // ascent and descent land on the same fixed point except near the
    // transition; only a genuinely distinct small-dr branch is compared
    const bool distinct = std::abs(lo.dr - hi.dr) > 1e3 * tol * delta ||
                          std::abs(lo.J - hi.J) > 1e3 * tol * delta;
    TwoBranch win;
    double e_win = std::numeric_limits<double>::infinity();
    bool have = false;
    for (const TwoBranch* b : {&hi, &lo}) {
        if (!b->converged || b->collapsed) continue;
        if (b == &lo && !distinct) continue;
        const double e = two_energy(c, b->dr, b->J);
        // strict < keeps the first (larger-dr) candidate on exact ties
        if (!have || e < e_win) {
            win = *b;
            e_win = e;
            have = true;
        }
    }
    const double e_loc = -std::abs(c.J_loc) - 2.0 * c.sum_g2_over_w;
    const bool loc_wins = have && e_loc < e_win;
    if (loc_wins || (!have && (hi.collapsed || lo.collapsed))) {
        s.iterations = std::max(hi.it, lo.it);
        localize_two(s, modes, x, c);
        s.converged = true;
        return s;
    }
    if (!have) {  // hard non-convergence: report the descent iterate as-is
        win = hi;
    }
    s.iterations = win.it;
    s.converged = have;

    const double dr = win.dr;
    const double J = win.J;
    s.delta_r = dr;
    s.ising_J = J;
    fill_f(modes, x, dr, J, s.f);
    double ebath = 0.0, sum = 0.0, Jchk = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes.g[i] <= 0.0) continue;
        const double f = s.f[i];
        ebath += f * (modes.omega[i] * f - 2.0 * modes.g[i]);
        sum += f * f;
        Jchk += 2.0 * f * (2.0 * modes.g[i] - modes.omega[i] * f) *
                std::cos(modes.k[i] * x);
    }
    set_angles(s);
    s.e_gs = -s.calE + 2.0 * ebath;
    const double res_d = std::abs(delta * std::exp(-2.0 * sum) - dr);
    const double res_j = std::abs(Jchk - J);
    s.residual = std::max(res_d, res_j) / delta;
    return s;
}

PolaronSolution solve_far(double delta, const ModeSet& modes, double tol,
                          int max_iter) {
    PolaronSolution s = solve_single(delta, modes, tol, max_iter);
    s.n_qubits = 2;
    s.x_sep = std::numeric_limits<double>::infinity();
    // pair energy without cross terms is twice the single-qubit value;
    // the localized comparison in solve_single scales the same way
    s.e_gs *= 2.0;
    return s;
}

double ising_sinc(double alpha, double omega_c, double x, double v_g) {
    if (x < 0.0) throw ConfigError("ising_sinc: x must be >= 0");
    const double u = omega_c * x / v_g;
    const double sinc = u < 1e-12 ? 1.0 : std::sin(u) / u;
    return alpha * omega_c * sinc;
}

double ising_corrected(double alpha, double omega_c, double x, double v_g,
                       double delta_r) {
    if (delta_r < 0.0) throw ConfigError("ising_corrected: delta_r must be >= 0");
    const double dg = delta_r + omega_c;
    if (x == 0.0) {
        // analytic limit: the sinc, cos and Ci/Si groups combine to
        // alpha*omega_c^2/(delta_r + omega_c)
        return alpha * omega_c * omega_c / dg;
    }
    const double t1 = ising_sinc(alpha, omega_c, x, v_g);
    if (delta_r == 0.0) return t1;  // correction terms carry delta_r factors
    const double u = omega_c * x / v_g;
    const double ud = delta_r * x / v_g;
    const double us = dg * x / v_g;
    const double t2 = alpha * delta_r * delta_r * std::cos(u) / dg;
    const double t3 =
        alpha * delta_r *
        (ud * std::sin(ud) * (cosine_integral(ud) - cosine_integral(us)) +
         ud * std::cos(ud) * (sine_integral(us) - sine_integral(ud)) - 1.0);
    return t1 + t2 + t3;
}

double scaling_delta_r_single(double delta, double omega_c, double alpha) {
    if (alpha >= 1.0)
        throw ConfigError("scaling formula needs alpha < 1");
    return delta * std::pow(delta / omega_c, alpha / (1.0 - alpha));
}

double scaling_delta_r_far(double delta, double omega_c, double alpha) {
    if (alpha >= 1.0)
        throw ConfigError("scaling formula needs alpha < 1");
    return delta * std::pow(M_E * delta / omega_c, alpha / (1.0 - alpha));
}

double gs_magnetization(const PolaronSolution& sol, const AuxiliaryPhases& ph) {
    const double c2t = sol.cos_theta * sol.cos_theta - sol.sin_theta * sol.sin_theta;
    return -(sol.delta_r / sol.bare_delta) * c2t * std::cos(ph.phi_x);
}

double linear_entropy(const PolaronSolution& sol, const AuxiliaryPhases& ph) {
    const double r = sol.delta_r / sol.bare_delta;
    const double sc = sol.sin_theta * sol.cos_theta;
    const double c2t = sol.cos_theta * sol.cos_theta - sol.sin_theta * sol.sin_theta;
    const double am = 0.5 - sc, apl = 0.5 + sc;
    // (delta_r/delta)^4 e^{+-2 zeta} computed in log form; the exponent is
    // <= 0 on the minus combination so neither branch can overflow
    double Tm = 0.0, Tp = 0.0;
    if (r > 0.0) {
        Tp = std::exp(4.0 * std::log(r) + 2.0 * ph.zeta_x);
        Tm = std::exp(4.0 * std::log(r) - 2.0 * ph.zeta_x);
    }
    return 1.0 - 0.5 * r * r * c2t * c2t - 0.5 * am * am - 0.5 * apl * apl -
           0.5 * Tp * am * am - 0.5 * Tm * apl * apl;
}

double linear_entropy_far(const PolaronSolution& sol) {
    const double r = sol.delta_r / sol.bare_delta;
    return 0.25 * (3.0 - 2.0 * r * r - r * r * r * r);
}

std::array<double, 16> reduced_density_matrix(const PolaronSolution& sol,
                                              const AuxiliaryPhases& ph) {
    const double c = sol.cos_theta, s = sol.sin_theta;
    const double r = sol.delta_r / sol.bare_delta;
    // amplitudes of the spin part in the sigma^x basis:
    // cos(th)|gg> - sin(th)|ee> = ((c-s)(|++>+|-->) + (c+s)(|+->+|-+>))/2
    const double A[4] = {0.5 * (c - s), 0.5 * (c + s), 0.5 * (c + s),
                         0.5 * (c - s)};
    // bath-overlap factors: one spin flipped -> r; both flipped -> r^2 e^{+-zeta}
    double sqTp = 0.0, sqTm = 0.0;
    if (r > 0.0) {
        sqTp = std::exp(2.0 * std::log(r) + ph.zeta_x);
        sqTm = std::exp(2.0 * std::log(r) - ph.zeta_x);
    }
    auto spin = [](int b, int which) {
        return which == 0 ? (b < 2 ? 1 : -1) : (b % 2 == 0 ? 1 : -1);
    };
    std::array<double, 16> rho{};
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const int f1 = spin(a, 0) != spin(b, 0);
            const int f2 = spin(a, 1) != spin(b, 1);
            double O = 1.0;
            if (f1 + f2 == 1) {
                O = r;
            } else if (f1 + f2 == 2) {
                // aligned pair (++/--) picks up the +zeta cross phase,
                // anti-aligned (+-/-+) the -zeta one
                const bool aligned = spin(a, 0) == spin(a, 1);
                O = aligned ? sqTp : sqTm;
            }
            rho[a * 4 + b] = A[a] * A[b] * O;
        }
    }
    double tr = rho[0] + rho[5] + rho[10] + rho[15];
    if (std::abs(tr - 1.0) > 1e-12)
        throw NumericError("reduced_density_matrix: trace deviates from 1 by " +
                           std::to_string(tr - 1.0));
    return rho;
}

double sine_integral(double x) {
    gsl_set_error_handler_off();
    gsl_sf_result r;
    if (gsl_sf_Si_e(x, &r) != GSL_SUCCESS)
        throw NumericError("Si(" + std::to_string(x) + ") failed");
    return r.val;
}

double cosine_integral(double x) {
    gsl_set_error_handler_off();
    gsl_sf_result r;
    if (x <= 0.0) throw NumericError("Ci needs x > 0");
    if (gsl_sf_Ci_e(x, &r) != GSL_SUCCESS)
        throw NumericError("Ci(" + std::to_string(x) + ") failed");
    return r.val;
}

} // namespace uswg
