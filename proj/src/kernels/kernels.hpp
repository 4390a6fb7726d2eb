#pragma once

#include <cstddef>
#include <string>

// Hot loops of the field evolution, in two builds: a scalar reference and an
// AVX2+FMA variant. Both are compiled unconditionally on x86-64; which one
// runs is decided at startup (or forced via --kernels). The two must agree to
// near machine precision, which test_kernels checks on random data.

namespace uswg::kernels {

// per-mode phase factors of the two emitter sites
struct SitePhases {
    const double* c1;  // cos(k x1)
    const double* s1;  // sin(k x1)
    const double* c2;  // cos(k x2)
    const double* s2;  // sin(k x2)
};

// scalar inputs of the field equation of motion for one RHS evaluation
struct FieldDrive {
    double c1re, c1im, c2re, c2im;  // qubit amplitudes
    double p1re, p1im, p2re, p2im;  // P_j = sum_k f_k e^{-i k x_j} psi_k
    double back;                    // prefactor of the f_k P_j feedback term
};

struct Table {
    // out = sum_k f_k e^{-ikx} psi_k, with c = cos(kx), s = sin(kx):
    // out_re = sum f (c xre + s xim), out_im = sum f (c xim - s xre)
    void (*phased_dot)(std::size_t n, const double* f, const double* c,
                       const double* s, const double* xre, const double* xim,
                       double* out_re, double* out_im);

    // dpsi_k = i (wp_k psi_k - src_k) written out componentwise, where
    // wp_k is the (detuning - omega_k) array and
    // src_k = G_k sum_j e^{+ikx_j} c_j + back * f_k sum_j e^{+ikx_j} P_j
    void (*rhs_psi)(std::size_t n, const double* wp, const double* G,
                    const double* f, const SitePhases& ph, const FieldDrive& d,
                    const double* psire, const double* psiim, double* dre,
                    double* dim);

    // y[i] = x[i] + a * k[i]
    void (*axpy_out)(std::size_t n, double* y, const double* x,
                     const double* k, double a);

    // y[i] += (h/6) (k1 + 2 k2 + 2 k3 + k4)[i]
    void (*rk4_combine)(std::size_t n, double* y, const double* k1,
                        const double* k2, const double* k3, const double* k4,
                        double h);

    const char* name;
};

enum class Isa { Auto, Scalar, Avx2 };

// "auto" | "scalar" | "avx2", anything else is a ConfigError
Isa parse_isa(const std::string& s);

bool avx2_supported();

// Auto picks avx2 when the CPU has it, else scalar. Forcing avx2 on a
// machine without it is a ConfigError.
const Table& select(Isa isa);

extern const Table scalar_table;
extern const Table avx2_table;  // only linked into x86-64 builds

} // namespace uswg::kernels
