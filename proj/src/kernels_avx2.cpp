#include "wirefilm/kernels.hpp"

// AVX2 variants.  Compiled with -mavx2 in this TU only; callers reach it
// through the runtime-dispatched table.  Multiplies and adds are kept
// separate (no FMA) and the four accumulator lanes are combined in the
// same order as the scalar reference, so outputs match it bit-for-bit.

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <cmath>

namespace wf::kernels {
namespace {

inline double combine4(__m256d acc)
{
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double k_dot(const double* a, const double* b, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double s = combine4(acc);
    for (std::size_t i = n4; i < n; ++i) s += a[i] * b[i];
    return s;
}

double k_wdot(const double* w, const double* a, const double* b, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d vw = _mm256_loadu_pd(w + i);
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vw, _mm256_mul_pd(va, vb)));
    }
    double s = combine4(acc);
    for (std::size_t i = n4; i < n; ++i) s += w[i] * (a[i] * b[i]);
    return s;
}

double k_wsumsq(const double* w, const double* a, std::size_t n)
{
    return k_wdot(w, a, a, n);
}

double k_max_abs(const double* a, std::size_t n)
{
    const __m256d signmask = _mm256_set1_pd(-0.0);
    __m256d vm = _mm256_setzero_pd();
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d va = _mm256_andnot_pd(signmask, _mm256_loadu_pd(a + i));
        vm = _mm256_max_pd(vm, va);
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, vm);
    double m = std::max(std::max(lane[0], lane[1]), std::max(lane[2], lane[3]));
    for (std::size_t i = n4; i < n; ++i) m = std::max(m, std::fabs(a[i]));
    return m;
}

void k_axpy(double alpha, const double* x, double* y, std::size_t n)
{
    const __m256d va = _mm256_set1_pd(alpha);
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (std::size_t i = n4; i < n; ++i) y[i] += alpha * x[i];
}

void k_xpay(const double* x, double alpha, double* y, std::size_t n)
{
    const __m256d va = _mm256_set1_pd(alpha);
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vx, _mm256_mul_pd(va, vy)));
    }
    for (std::size_t i = n4; i < n; ++i) y[i] = x[i] + alpha * y[i];
}

double k_dwell_sum(const double* w, const double* p1, const double* p2,
                   const double* p3, std::size_t n)
{
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc = _mm256_setzero_pd();
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d v1 = _mm256_loadu_pd(p1 + i);
        const __m256d v2 = _mm256_loadu_pd(p2 + i);
        const __m256d v3 = _mm256_loadu_pd(p3 + i);
        const __m256d q = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(v1, v1), _mm256_mul_pd(v2, v2)),
            _mm256_mul_pd(v3, v3));
        const __m256d u = _mm256_sub_pd(q, one);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(u, u)));
    }
    double s = combine4(acc);
    for (std::size_t i = n4; i < n; ++i) {
        const double q = (p1[i] * p1[i] + p2[i] * p2[i]) + p3[i] * p3[i];
        const double u = q - 1.0;
        s += w[i] * (u * u);
    }
    return s;
}

void k_dwell_grad(double c, const double* w, const double* p1, const double* p2,
                  const double* p3, double* g1, double* g2, double* g3, std::size_t n)
{
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d vc = _mm256_set1_pd(c);
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d v1 = _mm256_loadu_pd(p1 + i);
        const __m256d v2 = _mm256_loadu_pd(p2 + i);
        const __m256d v3 = _mm256_loadu_pd(p3 + i);
        const __m256d q = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(v1, v1), _mm256_mul_pd(v2, v2)),
            _mm256_mul_pd(v3, v3));
        const __m256d t = _mm256_mul_pd(_mm256_mul_pd(vc, _mm256_loadu_pd(w + i)),
                                        _mm256_sub_pd(q, one));
        _mm256_storeu_pd(g1 + i, _mm256_add_pd(_mm256_loadu_pd(g1 + i), _mm256_mul_pd(t, v1)));
        _mm256_storeu_pd(g2 + i, _mm256_add_pd(_mm256_loadu_pd(g2 + i), _mm256_mul_pd(t, v2)));
        _mm256_storeu_pd(g3 + i, _mm256_add_pd(_mm256_loadu_pd(g3 + i), _mm256_mul_pd(t, v3)));
    }
    for (std::size_t i = n4; i < n; ++i) {
        const double q = (p1[i] * p1[i] + p2[i] * p2[i]) + p3[i] * p3[i];
        const double t = (c * w[i]) * (q - 1.0);
        g1[i] += t * p1[i];
        g2[i] += t * p2[i];
        g3[i] += t * p3[i];
    }
}

void k_central_diff(const double* u, double* out, std::size_t n, double inv2d)
{
    const __m256d vs = _mm256_set1_pd(inv2d);
    out[0] = ((4.0 * u[1] - 3.0 * u[0]) - u[2]) * inv2d;
    std::size_t i = 1;
    for (; i + 4 < n; i += 4) {
        const __m256d hi = _mm256_loadu_pd(u + i + 1);
        const __m256d lo = _mm256_loadu_pd(u + i - 1);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_sub_pd(hi, lo), vs));
    }
    for (; i + 1 < n; ++i) out[i] = (u[i + 1] - u[i - 1]) * inv2d;
    out[n - 1] = ((3.0 * u[n - 1] - 4.0 * u[n - 2]) + u[n - 3]) * inv2d;
}

}  // namespace

const Ops& avx2_ops()
{
    static const Ops table = {
        k_dot, k_wdot, k_wsumsq, k_max_abs, k_axpy, k_xpay,
        k_dwell_sum, k_dwell_grad, k_central_diff,
    };
    return table;
}

}  // namespace wf::kernels

#endif  // x86_64
