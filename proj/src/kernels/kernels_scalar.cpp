#include "kernels.hpp"

namespace uswg::kernels {

namespace {

void phased_dot_scalar(std::size_t n, const double* f, const double* c,
                       const double* s, const double* xre, const double* xim,
                       double* out_re, double* out_im) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += f[i] * (c[i] * xre[i] + s[i] * xim[i]);
        im += f[i] * (c[i] * xim[i] - s[i] * xre[i]);
    }
    *out_re = re;
    *out_im = im;
}

void rhs_psi_scalar(std::size_t n, const double* wp, const double* G,
                    const double* f, const SitePhases& ph, const FieldDrive& d,
                    const double* psire, const double* psiim, double* dre,
                    double* dim) {
    for (std::size_t i = 0; i < n; ++i) {
        // e^{+ikx_j} (c_j + back-weighted P_j), accumulated over both sites
        const double b = d.back * f[i];
        const double a1re = G[i] * d.c1re + b * d.p1re;
        const double a1im = G[i] * d.c1im + b * d.p1im;
        const double a2re = G[i] * d.c2re + b * d.p2re;
        const double a2im = G[i] * d.c2im + b * d.p2im;
        const double src_re = ph.c1[i] * a1re - ph.s1[i] * a1im +
                              ph.c2[i] * a2re - ph.s2[i] * a2im;
        const double src_im = ph.c1[i] * a1im + ph.s1[i] * a1re +
                              ph.c2[i] * a2im + ph.s2[i] * a2re;
        dre[i] = -wp[i] * psiim[i] + src_im;
        dim[i] = wp[i] * psire[i] - src_re;
    }
}

void axpy_out_scalar(std::size_t n, double* y, const double* x, const double* k,
                     double a) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * k[i];
}

void rk4_combine_scalar(std::size_t n, double* y, const double* k1,
                        const double* k2, const double* k3, const double* k4,
                        double h) {
    const double w = h / 6.0;
    for (std::size_t i = 0; i < n; ++i)
        y[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

} // namespace

const Table scalar_table = {phased_dot_scalar, rhs_psi_scalar, axpy_out_scalar,
                            rk4_combine_scalar, "scalar"};

} // namespace uswg::kernels
