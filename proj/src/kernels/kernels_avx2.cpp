// Compiled with -mavx2 -mfma (see CMakeLists); only dispatched to after a
// runtime CPU check, so it is safe to link this file into a generic binary
// as long as nothing here runs at static-init time.

#include <immintrin.h>

#include "kernels.hpp"

namespace uswg::kernels {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void phased_dot_avx2(std::size_t n, const double* f, const double* c,
                     const double* s, const double* xre, const double* xim,
                     double* out_re, double* out_im) {
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vf = _mm256_loadu_pd(f + i);
        const __m256d vc = _mm256_loadu_pd(c + i);
        const __m256d vs = _mm256_loadu_pd(s + i);
        const __m256d vre = _mm256_loadu_pd(xre + i);
        const __m256d vim = _mm256_loadu_pd(xim + i);
        const __m256d tre = _mm256_fmadd_pd(vs, vim, _mm256_mul_pd(vc, vre));
        const __m256d tim = _mm256_fnmadd_pd(vs, vre, _mm256_mul_pd(vc, vim));
        acc_re = _mm256_fmadd_pd(vf, tre, acc_re);
        acc_im = _mm256_fmadd_pd(vf, tim, acc_im);
    }
    double re = hsum(acc_re), im = hsum(acc_im);
    for (; i < n; ++i) {
        re += f[i] * (c[i] * xre[i] + s[i] * xim[i]);
        im += f[i] * (c[i] * xim[i] - s[i] * xre[i]);
    }
    *out_re = re;
    *out_im = im;
}

void rhs_psi_avx2(std::size_t n, const double* wp, const double* G,
                  const double* f, const SitePhases& ph, const FieldDrive& d,
                  const double* psire, const double* psiim, double* dre,
                  double* dim) {
    const __m256d back = _mm256_set1_pd(d.back);
    const __m256d c1re = _mm256_set1_pd(d.c1re), c1im = _mm256_set1_pd(d.c1im);
    const __m256d c2re = _mm256_set1_pd(d.c2re), c2im = _mm256_set1_pd(d.c2im);
    const __m256d p1re = _mm256_set1_pd(d.p1re), p1im = _mm256_set1_pd(d.p1im);
    const __m256d p2re = _mm256_set1_pd(d.p2re), p2im = _mm256_set1_pd(d.p2im);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vG = _mm256_loadu_pd(G + i);
        const __m256d vb = _mm256_mul_pd(back, _mm256_loadu_pd(f + i));
        const __m256d a1re = _mm256_fmadd_pd(vb, p1re, _mm256_mul_pd(vG, c1re));
        const __m256d a1im = _mm256_fmadd_pd(vb, p1im, _mm256_mul_pd(vG, c1im));
        const __m256d a2re = _mm256_fmadd_pd(vb, p2re, _mm256_mul_pd(vG, c2re));
        const __m256d a2im = _mm256_fmadd_pd(vb, p2im, _mm256_mul_pd(vG, c2im));
        const __m256d e1c = _mm256_loadu_pd(ph.c1 + i);
        const __m256d e1s = _mm256_loadu_pd(ph.s1 + i);
        const __m256d e2c = _mm256_loadu_pd(ph.c2 + i);
        const __m256d e2s = _mm256_loadu_pd(ph.s2 + i);
        __m256d src_re = _mm256_mul_pd(e1c, a1re);
        src_re = _mm256_fnmadd_pd(e1s, a1im, src_re);
        src_re = _mm256_fmadd_pd(e2c, a2re, src_re);
        src_re = _mm256_fnmadd_pd(e2s, a2im, src_re);
        __m256d src_im = _mm256_mul_pd(e1c, a1im);
        src_im = _mm256_fmadd_pd(e1s, a1re, src_im);
        src_im = _mm256_fmadd_pd(e2c, a2im, src_im);
        src_im = _mm256_fmadd_pd(e2s, a2re, src_im);
        const __m256d vwp = _mm256_loadu_pd(wp + i);
        const __m256d vpre = _mm256_loadu_pd(psire + i);
        const __m256d vpim = _mm256_loadu_pd(psiim + i);
        _mm256_storeu_pd(dre + i, _mm256_fnmadd_pd(vwp, vpim, src_im));
        _mm256_storeu_pd(dim + i, _mm256_fmsub_pd(vwp, vpre, src_re));
    }
    for (; i < n; ++i) {
        const double b = d.back * f[i];
        const double a1r = G[i] * d.c1re + b * d.p1re;
        const double a1i = G[i] * d.c1im + b * d.p1im;
        const double a2r = G[i] * d.c2re + b * d.p2re;
        const double a2i = G[i] * d.c2im + b * d.p2im;
        const double sr = ph.c1[i] * a1r - ph.s1[i] * a1i + ph.c2[i] * a2r -
                          ph.s2[i] * a2i;
        const double si = ph.c1[i] * a1i + ph.s1[i] * a1r + ph.c2[i] * a2i +
                          ph.s2[i] * a2r;
        dre[i] = -wp[i] * psiim[i] + si;
        dim[i] = wp[i] * psire[i] - sr;
    }
}

void axpy_out_avx2(std::size_t n, double* y, const double* x, const double* k,
                   double a) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(k + i),
                                          _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] = x[i] + a * k[i];
}

void rk4_combine_avx2(std::size_t n, double* y, const double* k1,
                      const double* k2, const double* k3, const double* k4,
                      double h) {
    const double w = h / 6.0;
    const __m256d vw = _mm256_set1_pd(w);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d s = _mm256_loadu_pd(k1 + i);
        s = _mm256_fmadd_pd(two, _mm256_loadu_pd(k2 + i), s);
        s = _mm256_fmadd_pd(two, _mm256_loadu_pd(k3 + i), s);
        s = _mm256_add_pd(s, _mm256_loadu_pd(k4 + i));
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vw, s, _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i)
        y[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

} // namespace

const Table avx2_table = {phased_dot_avx2, rhs_psi_avx2, axpy_out_avx2,
                          rk4_combine_avx2, "avx2"};

} // namespace uswg::kernels
