/* Chunked uniform-to-draw transforms for the compiled kernels.
 *
 * Draw i reads uniforms u[i*nu .. i*nu + nu - 1]. The loops are written so
 * GCC can vectorize them; when FK_USE_LIBMVEC is defined the libm calls map
 * to glibc's vector math library and an AVX2 clone is selected at load time.
 */
#ifndef FK_VECMATH_H
#define FK_VECMATH_H

#include <math.h>

#if defined(FK_USE_LIBMVEC) && defined(__GNUC__) && defined(__x86_64__) && !defined(__FAST_MATH__)
#define FK_SIMD_DECL __attribute__((simd("notinbranch")))
FK_SIMD_DECL extern double exp(double);
FK_SIMD_DECL extern double log1p(double);
FK_SIMD_DECL extern double expm1(double);
FK_SIMD_DECL extern double sin(double);
FK_SIMD_DECL extern double cos(double);
FK_SIMD_DECL extern double pow(double, double);
#define FK_CLONES __attribute__((target_clones("avx2", "default")))
#define FK_SIMD _Pragma("omp simd")
#else
#define FK_CLONES
#define FK_SIMD
#endif

#define FK_TWO_PI 6.283185307179586
#define FK_PI 3.141592653589793

#define FK_BLOCK 256

FK_CLONES static void fk_mixture_block(const double *restrict pick, const double *restrict u1,
                                       const double *restrict u2, double *restrict out, long n,
                                       double thr, double mu1, double s1, double mu2, double s2,
                                       double scale, double shift)
{
    long i;
    FK_SIMD
    for (i = 0; i < n; i++) {
        double z = sqrt(-2.0 * log1p(-u1[i])) * cos(FK_TWO_PI * u2[i]);
        int first = pick[i] < thr;
        double mu = first ? mu1 : mu2;
        double s = first ? s1 : s2;
        out[i] = scale * (mu + s * z) + shift;
    }
}

/* Two-regime Gaussian mixtures (codes 7 and 8). The stride-3 uniforms are
 * split into contiguous blocks first so the main loop vectorizes. A zero
 * regime mean keeps code 7 exact: 0 + s z == s z. */
static void fk_mixture(int code, const double *restrict p, const double *restrict u,
                       double *restrict out, long m)
{
    double pick[FK_BLOCK], u1[FK_BLOCK], u2[FK_BLOCK];
    long start, i, n;
    for (start = 0; start < m; start += FK_BLOCK) {
        const double *ub = u + 3 * start;
        n = m - start < FK_BLOCK ? m - start : FK_BLOCK;
        for (i = 0; i < n; i++) {
            pick[i] = ub[3 * i];
            u1[i] = ub[3 * i + 1];
            u2[i] = ub[3 * i + 2];
        }
        if (code == 7)
            fk_mixture_block(pick, u1, u2, out + start, n, p[0], 0.0, p[1], 0.0, p[2], p[6], p[7]);
        else
            fk_mixture_block(pick, u1, u2, out + start, n, p[0], p[1], p[2], p[3], p[4], p[6], p[7]);
    }
}

/* Families with code 4 (gamma) are transformed by the caller. */
FK_CLONES static void fk_transform(int code, const double *restrict p, const double *restrict d,
                                   const double *restrict u, double *restrict out, long m)
{
    long i;
    const double scale = p[6], shift = p[7];
    switch (code) {
    case 0:
        FK_SIMD
        for (i = 0; i < m; i++) {
            double z = sqrt(-2.0 * log1p(-u[2 * i])) * cos(FK_TWO_PI * u[2 * i + 1]);
            out[i] = scale * (p[0] + p[1] * z) + shift;
        }
        break;
    case 1:
        FK_SIMD
        for (i = 0; i < m; i++) {
            double x = p[1] * cos(FK_TWO_PI * u[2 * i])
                       * sqrt(p[0] * expm1(d[0] * log1p(-u[2 * i + 1])));
            out[i] = scale * x + shift;
        }
        break;
    case 2:
        FK_SIMD
        for (i = 0; i < m; i++)
            out[i] = scale * (p[1] * exp(d[0] * log1p(-u[i]))) + shift;
        break;
    case 3:
        FK_SIMD
        for (i = 0; i < m; i++)
            out[i] = scale * (-log1p(-u[i]) / p[0]) + shift;
        break;
    case 5:
        FK_SIMD
        for (i = 0; i < m; i++) {
            double z = sqrt(-2.0 * log1p(-u[2 * i])) * cos(FK_TWO_PI * u[2 * i + 1]);
            out[i] = scale * exp(p[0] + p[1] * z) + shift;
        }
        break;
    case 6:
        FK_SIMD
        for (i = 0; i < m; i++) {
            double v = FK_PI * (u[2 * i] - 0.5);
            double w = -log1p(-u[2 * i + 1]);
            double a = p[0] * (v + d[0]);
            double x = d[1] * sin(a) / pow(cos(v), d[2]) * pow(cos(v - a) / w, d[3]);
            out[i] = scale * (p[3] * x + p[2]) + shift;
        }
        break;
    case 7:
    case 8:
        fk_mixture(code, p, u, out, m);
        break;
    default:
        break;
    }
}

#endif
