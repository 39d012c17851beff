#include "wirefilm/kernels.hpp"

// NEON variants (aarch64 baseline).  Two float64x2 accumulators stand in
// for scalar accumulators (0,1) and (2,3); lanes are extracted and combined
// in the reference order, and no FMA/FMLA is emitted in these loops.

#if defined(__aarch64__)
#include <arm_neon.h>

#include <cmath>

namespace wf::kernels {
namespace {

inline double combine4(float64x2_t accA, float64x2_t accB)
{
    const double l0 = vgetq_lane_f64(accA, 0);
    const double l1 = vgetq_lane_f64(accA, 1);
    const double l2 = vgetq_lane_f64(accB, 0);
    const double l3 = vgetq_lane_f64(accB, 1);
    return (l0 + l1) + (l2 + l3);
}

double k_dot(const double* a, const double* b, std::size_t n)
{
    float64x2_t accA = vdupq_n_f64(0.0), accB = vdupq_n_f64(0.0);
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        accA = vaddq_f64(accA, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        accB = vaddq_f64(accB, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    double s = combine4(accA, accB);
    for (std::size_t i = n4; i < n; ++i) s += a[i] * b[i];
    return s;
}

double k_wdot(const double* w, const double* a, const double* b, std::size_t n)
{
    float64x2_t accA = vdupq_n_f64(0.0), accB = vdupq_n_f64(0.0);
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        accA = vaddq_f64(accA, vmulq_f64(vld1q_f64(w + i),
                                         vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
        accB = vaddq_f64(accB, vmulq_f64(vld1q_f64(w + i + 2),
                                         vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2))));
    }
    double s = combine4(accA, accB);
    for (std::size_t i = n4; i < n; ++i) s += w[i] * (a[i] * b[i]);
    return s;
}

double k_wsumsq(const double* w, const double* a, std::size_t n)
{
    return k_wdot(w, a, a, n);
}

double k_max_abs(const double* a, std::size_t n)
{
    float64x2_t mA = vdupq_n_f64(0.0), mB = vdupq_n_f64(0.0);
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        mA = vmaxq_f64(mA, vabsq_f64(vld1q_f64(a + i)));
        mB = vmaxq_f64(mB, vabsq_f64(vld1q_f64(a + i + 2)));
    }
    const double l0 = vgetq_lane_f64(mA, 0), l1 = vgetq_lane_f64(mA, 1);
    const double l2 = vgetq_lane_f64(mB, 0), l3 = vgetq_lane_f64(mB, 1);
    double m = std::max(std::max(l0, l1), std::max(l2, l3));
    for (std::size_t i = n4; i < n; ++i) m = std::max(m, std::fabs(a[i]));
    return m;
}

void k_axpy(double alpha, const double* x, double* y, std::size_t n)
{
    const float64x2_t va = vdupq_n_f64(alpha);
    const std::size_t n2 = n & ~std::size_t(1);
    for (std::size_t i = 0; i < n2; i += 2) {
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    }
    for (std::size_t i = n2; i < n; ++i) y[i] += alpha * x[i];
}

void k_xpay(const double* x, double alpha, double* y, std::size_t n)
{
    const float64x2_t va = vdupq_n_f64(alpha);
    const std::size_t n2 = n & ~std::size_t(1);
    for (std::size_t i = 0; i < n2; i += 2) {
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(x + i), vmulq_f64(va, vld1q_f64(y + i))));
    }
    for (std::size_t i = n2; i < n; ++i) y[i] = x[i] + alpha * y[i];
}

inline float64x2_t dwell_q(const double* p1, const double* p2, const double* p3, std::size_t i)
{
    const float64x2_t v1 = vld1q_f64(p1 + i);
    const float64x2_t v2 = vld1q_f64(p2 + i);
    const float64x2_t v3 = vld1q_f64(p3 + i);
    return vaddq_f64(vaddq_f64(vmulq_f64(v1, v1), vmulq_f64(v2, v2)), vmulq_f64(v3, v3));
}

double k_dwell_sum(const double* w, const double* p1, const double* p2,
                   const double* p3, std::size_t n)
{
    const float64x2_t one = vdupq_n_f64(1.0);
    float64x2_t accA = vdupq_n_f64(0.0), accB = vdupq_n_f64(0.0);
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const float64x2_t uA = vsubq_f64(dwell_q(p1, p2, p3, i), one);
        const float64x2_t uB = vsubq_f64(dwell_q(p1, p2, p3, i + 2), one);
        accA = vaddq_f64(accA, vmulq_f64(vld1q_f64(w + i), vmulq_f64(uA, uA)));
        accB = vaddq_f64(accB, vmulq_f64(vld1q_f64(w + i + 2), vmulq_f64(uB, uB)));
    }
    double s = combine4(accA, accB);
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
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t vc = vdupq_n_f64(c);
    const std::size_t n2 = n & ~std::size_t(1);
    for (std::size_t i = 0; i < n2; i += 2) {
        const float64x2_t u = vsubq_f64(dwell_q(p1, p2, p3, i), one);
        const float64x2_t t = vmulq_f64(vmulq_f64(vc, vld1q_f64(w + i)), u);
        vst1q_f64(g1 + i, vaddq_f64(vld1q_f64(g1 + i), vmulq_f64(t, vld1q_f64(p1 + i))));
        vst1q_f64(g2 + i, vaddq_f64(vld1q_f64(g2 + i), vmulq_f64(t, vld1q_f64(p2 + i))));
        vst1q_f64(g3 + i, vaddq_f64(vld1q_f64(g3 + i), vmulq_f64(t, vld1q_f64(p3 + i))));
    }
    for (std::size_t i = n2; i < n; ++i) {
        const double q = (p1[i] * p1[i] + p2[i] * p2[i]) + p3[i] * p3[i];
        const double t = (c * w[i]) * (q - 1.0);
        g1[i] += t * p1[i];
        g2[i] += t * p2[i];
        g3[i] += t * p3[i];
    }
}

void k_central_diff(const double* u, double* out, std::size_t n, double inv2d)
{
    const float64x2_t vs = vdupq_n_f64(inv2d);
    out[0] = ((4.0 * u[1] - 3.0 * u[0]) - u[2]) * inv2d;
    std::size_t i = 1;
    for (; i + 2 < n; i += 2) {
        const float64x2_t hi = vld1q_f64(u + i + 1);
        const float64x2_t lo = vld1q_f64(u + i - 1);
        vst1q_f64(out + i, vmulq_f64(vsubq_f64(hi, lo), vs));
    }
    for (; i + 1 < n; ++i) out[i] = (u[i + 1] - u[i - 1]) * inv2d;
    out[n - 1] = ((3.0 * u[n - 1] - 4.0 * u[n - 2]) + u[n - 3]) * inv2d;
}

}  // namespace

const Ops& neon_ops()
{
    static const Ops table = {
        k_dot, k_wdot, k_wsumsq, k_max_abs, k_axpy, k_xpay,
        k_dwell_sum, k_dwell_grad, k_central_diff,
    };
    return table;
}

}  // namespace wf::kernels

#endif  // __aarch64__
