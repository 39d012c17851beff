#include "wirefilm/kernels.hpp"

#include <cmath>

// Reference kernels.  The block-of-4 accumulator pattern here defines the
// summation order that the SIMD variants must reproduce bit-for-bit.

namespace wf::kernels {
namespace {

double k_dot(const double* a, const double* b, std::size_t n)
{
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        acc0 += a[i] * b[i];
        acc1 += a[i + 1] * b[i + 1];
        acc2 += a[i + 2] * b[i + 2];
        acc3 += a[i + 3] * b[i + 3];
    }
    double s = (acc0 + acc1) + (acc2 + acc3);
    for (std::size_t i = n4; i < n; ++i) s += a[i] * b[i];
    return s;
}

double k_wdot(const double* w, const double* a, const double* b, std::size_t n)
{
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        acc0 += w[i] * (a[i] * b[i]);
        acc1 += w[i + 1] * (a[i + 1] * b[i + 1]);
        acc2 += w[i + 2] * (a[i + 2] * b[i + 2]);
        acc3 += w[i + 3] * (a[i + 3] * b[i + 3]);
    }
    double s = (acc0 + acc1) + (acc2 + acc3);
    for (std::size_t i = n4; i < n; ++i) s += w[i] * (a[i] * b[i]);
    return s;
}

double k_wsumsq(const double* w, const double* a, std::size_t n)
{
    return k_wdot(w, a, a, n);
}

double k_max_abs(const double* a, std::size_t n)
{
    double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        m0 = std::max(m0, std::fabs(a[i]));
        m1 = std::max(m1, std::fabs(a[i + 1]));
        m2 = std::max(m2, std::fabs(a[i + 2]));
        m3 = std::max(m3, std::fabs(a[i + 3]));
    }
    double m = std::max(std::max(m0, m1), std::max(m2, m3));
    for (std::size_t i = n4; i < n; ++i) m = std::max(m, std::fabs(a[i]));
    return m;
}

void k_axpy(double alpha, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void k_xpay(const double* x, double alpha, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + alpha * y[i];
}

double k_dwell_sum(const double* w, const double* p1, const double* p2,
                   const double* p3, std::size_t n)
{
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
#define WF_DW_TERM(k)                                                              \
    {                                                                              \
        const double q = (p1[i + k] * p1[i + k] + p2[i + k] * p2[i + k]) +         \
                         p3[i + k] * p3[i + k];                                    \
        const double u = q - 1.0;                                                  \
        acc##k += w[i + k] * (u * u);                                              \
    }
        WF_DW_TERM(0)
        WF_DW_TERM(1)
        WF_DW_TERM(2)
        WF_DW_TERM(3)
#undef WF_DW_TERM
    }
    double s = (acc0 + acc1) + (acc2 + acc3);
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
    for (std::size_t i = 0; i < n; ++i) {
        const double q = (p1[i] * p1[i] + p2[i] * p2[i]) + p3[i] * p3[i];
        const double t = (c * w[i]) * (q - 1.0);
        g1[i] += t * p1[i];
        g2[i] += t * p2[i];
        g3[i] += t * p3[i];
    }
}

void k_central_diff(const double* u, double* out, std::size_t n, double inv2d)
{
    out[0] = ((4.0 * u[1] - 3.0 * u[0]) - u[2]) * inv2d;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (u[i + 1] - u[i - 1]) * inv2d;
    out[n - 1] = ((3.0 * u[n - 1] - 4.0 * u[n - 2]) + u[n - 3]) * inv2d;
}

}  // namespace

const Ops& scalar_ops()
{
    static const Ops table = {
        k_dot, k_wdot, k_wsumsq, k_max_abs, k_axpy, k_xpay,
        k_dwell_sum, k_dwell_grad, k_central_diff,
    };
    return table;
}

}  // namespace wf::kernels
