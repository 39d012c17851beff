#pragma once

#include <cstddef>
#include <string>

namespace wf::kernels {

// Inner-loop kernels behind the discrete operators, quadrature and CG.
//
// Reduction kernels accumulate into four independent partial sums over
// blocks of four entries and combine them as ((acc0+acc1)+(acc2+acc3)),
// with any remainder added sequentially afterwards.  Every ISA variant
// implements exactly this order and avoids FMA contraction, so scalar,
// AVX2 and NEON results are bit-identical.
struct Ops {
    // sum a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum w[i]*a[i]*b[i]
    double (*wdot)(const double* w, const double* a, const double* b, std::size_t n);
    // sum w[i]*a[i]*a[i]
    double (*wsumsq)(const double* w, const double* a, std::size_t n);
    // max |a[i]|, 0 for empty
    double (*max_abs)(const double* a, std::size_t n);
    // y[i] += alpha*x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y[i] = x[i] + alpha*y[i]
    void (*xpay)(const double* x, double alpha, double* y, std::size_t n);
    // sum w[i]*((p1^2+p2^2+p3^2) - 1)^2
    double (*dwell_sum)(const double* w, const double* p1, const double* p2,
                        const double* p3, std::size_t n);
    // g_k[i] += c*w[i]*(|p(i)|^2 - 1)*p_k[i]
    void (*dwell_grad)(double c, const double* w, const double* p1, const double* p2,
                       const double* p3, double* g1, double* g2, double* g3, std::size_t n);
    // second-order central difference on a contiguous line, one-sided ends, n >= 3
    void (*central_diff)(const double* u, double* out, std::size_t n, double inv2d);
};

enum class Isa { scalar, avx2, neon };

const Ops& ops();         // active table (auto-detected on first use)
Isa active_isa();
void set_isa(Isa isa);    // throws std::runtime_error if unsupported on this host
bool isa_supported(Isa isa);
std::string isa_name(Isa isa);

const Ops& scalar_ops();  // always available; reference for equivalence tests

}  // namespace wf::kernels
