#include "wirefilm/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "wirefilm/kernels.hpp"

namespace wf {

namespace {

thread_local std::vector<double> tl_line;

// One strided line: out(row) = c * sum stencil(row) u, or += with Acc.
template <bool Acc>
void diff_line(const double* u, double* out, int n, std::ptrdiff_t stride, double c)
{
    auto put = [&](int m, double v) {
        if constexpr (Acc)
            out[m * stride] += v;
        else
            out[m * stride] = v;
    };
    put(0, c * ((4.0 * u[stride] - 3.0 * u[0]) - u[2 * stride]));
    for (int m = 1; m + 1 < n; ++m)
        put(m, c * (u[(m + 1) * stride] - u[(m - 1) * stride]));
    put(n - 1, c * ((3.0 * u[(n - 1) * stride] - 4.0 * u[(n - 2) * stride]) + u[(n - 3) * stride]));
}

// Transposed stencil, always accumulating: out += c * D^T v along one line.
void diff_line_t(const double* v, double* out, int n, std::ptrdiff_t stride, double c)
{
    const double v0 = v[0];
    const double vl = v[(n - 1) * stride];
    out[0] += c * (-3.0 * v0);
    out[stride] += c * (4.0 * v0);
    out[2 * stride] += c * (-v0);
    for (int m = 1; m + 1 < n; ++m) {
        const double vm = v[m * stride];
        out[(m - 1) * stride] -= c * vm;
        out[(m + 1) * stride] += c * vm;
    }
    out[(n - 3) * stride] += c * vl;
    out[(n - 2) * stride] += c * (-4.0 * vl);
    out[(n - 1) * stride] += c * (3.0 * vl);
}

template <bool Acc>
void axis_diff_impl(int n1, int n2, int n3, double d1, double d2, double d3, int axis,
                    const double* u, double* out, double scale)
{
    const std::size_t plane = std::size_t(n1) * n2;
    if (axis == 0) {
        const double inv2d = scale / (2.0 * d1);
        if constexpr (!Acc) {
            for (int k = 0; k < n3; ++k)
                for (int j = 0; j < n2; ++j) {
                    const std::size_t off = std::size_t(k) * plane + std::size_t(j) * n1;
                    kernels::ops().central_diff(u + off, out + off, std::size_t(n1), inv2d);
                }
        } else {
            auto& buf = tl_line;
            buf.resize(std::size_t(n1));
            for (int k = 0; k < n3; ++k)
                for (int j = 0; j < n2; ++j) {
                    const std::size_t off = std::size_t(k) * plane + std::size_t(j) * n1;
                    kernels::ops().central_diff(u + off, buf.data(), std::size_t(n1), inv2d);
                    kernels::ops().axpy(1.0, buf.data(), out + off, std::size_t(n1));
                }
        }
    } else if (axis == 1) {
        const double c = scale / (2.0 * d2);
        for (int k = 0; k < n3; ++k)
            for (int i = 0; i < n1; ++i)
                diff_line<Acc>(u + std::size_t(k) * plane + i, out + std::size_t(k) * plane + i,
                               n2, n1, c);
    } else {
        const double c = scale / (2.0 * d3);
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i)
                diff_line<Acc>(u + std::size_t(j) * n1 + i, out + std::size_t(j) * n1 + i,
                               n3, std::ptrdiff_t(plane), c);
    }
}

void axis_diff_t_impl(int n1, int n2, int n3, double d1, double d2, double d3, int axis,
                      const double* v, double* out, double scale)
{
    const std::size_t plane = std::size_t(n1) * n2;
    if (axis == 0) {
        const double c = scale / (2.0 * d1);
        for (int k = 0; k < n3; ++k)
            for (int j = 0; j < n2; ++j) {
                const std::size_t off = std::size_t(k) * plane + std::size_t(j) * n1;
                diff_line_t(v + off, out + off, n1, 1, c);
            }
    } else if (axis == 1) {
        const double c = scale / (2.0 * d2);
        for (int k = 0; k < n3; ++k)
            for (int i = 0; i < n1; ++i)
                diff_line_t(v + std::size_t(k) * plane + i, out + std::size_t(k) * plane + i,
                            n2, n1, c);
    } else {
        const double c = scale / (2.0 * d3);
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i)
                diff_line_t(v + std::size_t(j) * n1 + i, out + std::size_t(j) * n1 + i,
                            n3, std::ptrdiff_t(plane), c);
    }
}

}  // namespace

void axis_diff(const Grid3& g, int axis, const double* u, double* out, double scale)
{
    axis_diff_impl<false>(g.n1, g.n2, g.n3, g.d1, g.d2, g.d3, axis, u, out, scale);
}

void axis_diff_t_acc(const Grid3& g, int axis, const double* v, double* out, double scale)
{
    axis_diff_t_impl(g.n1, g.n2, g.n3, g.d1, g.d2, g.d3, axis, v, out, scale);
}

void axis_diff(const Grid2& g, int axis, const double* u, double* out, double scale)
{
    axis_diff_impl<false>(g.n1, g.n2, 1, g.d1, g.d2, 1.0, axis, u, out, scale);
}

void axis_diff_t_acc(const Grid2& g, int axis, const double* v, double* out, double scale)
{
    axis_diff_t_impl(g.n1, g.n2, 1, g.d1, g.d2, 1.0, axis, v, out, scale);
}

void diff_1d(const Grid1& g, const double* u, double* out, double scale)
{
    kernels::ops().central_diff(u, out, std::size_t(g.n), scale / (2.0 * g.d));
}

void diff_1d_t_acc(const Grid1& g, const double* v, double* out, double scale)
{
    diff_line_t(v, out, g.n, 1, scale / (2.0 * g.d));
}

void grad_scaled(const Grid3& g, const double* u, double* g1, double* g2, double* g3)
{
    axis_diff(g, 0, u, g1, g.s1);
    axis_diff(g, 1, u, g2, g.s2);
    axis_diff(g, 2, u, g3, g.s3);
}

void div_scaled(const Grid3& g, const double* p1, const double* p2, const double* p3,
                double* out)
{
    axis_diff_impl<false>(g.n1, g.n2, g.n3, g.d1, g.d2, g.d3, 0, p1, out, g.s1);
    axis_diff_impl<true>(g.n1, g.n2, g.n3, g.d1, g.d2, g.d3, 1, p2, out, g.s2);
    axis_diff_impl<true>(g.n1, g.n2, g.n3, g.d1, g.d2, g.d3, 2, p3, out, g.s3);
}

void rot_scaled(const Grid3& g, const double* p1, const double* p2, const double* p3,
                double* r1, double* r2, double* r3)
{
    // rot_i = s_j d_j p_k - s_k d_k p_j, (i,j,k) cyclic
    axis_diff_impl<false>(g.n1, g.n2, g.n3, g.d1, g.d2, g.d3, 1, p3, r1, g.s2);
    axis_diff_impl<true>(g.n1, g.n2, g.n3, g.d1, g.d2, g.d3, 2, p2, r1, -g.s3);
    axis_diff_impl<false>(g.n1, g.n2, g.n3, g.d1, g.d2, g.d3, 2, p1, r2, g.s3);
    axis_diff_impl<true>(g.n1, g.n2, g.n3, g.d1, g.d2, g.d3, 0, p3, r2, -g.s1);
    axis_diff_impl<false>(g.n1, g.n2, g.n3, g.d1, g.d2, g.d3, 0, p2, r3, g.s1);
    axis_diff_impl<true>(g.n1, g.n2, g.n3, g.d1, g.d2, g.d3, 1, p1, r3, -g.s2);
}

VectorField3 grad_scaled(const Grid3& g, const std::vector<double>& u)
{
    VectorField3 out = VectorField3::zeros(g);
    grad_scaled(g, u.data(), out.comp[0].data(), out.comp[1].data(), out.comp[2].data());
    return out;
}

std::vector<double> div_scaled(const Grid3& g, const VectorField3& p)
{
    std::vector<double> out(g.num_nodes());
    div_scaled(g, p.comp[0].data(), p.comp[1].data(), p.comp[2].data(), out.data());
    return out;
}

VectorField3 rot_scaled(const Grid3& g, const VectorField3& p)
{
    VectorField3 out = VectorField3::zeros(g);
    rot_scaled(g, p.comp[0].data(), p.comp[1].data(), p.comp[2].data(),
               out.comp[0].data(), out.comp[1].data(), out.comp[2].data());
    return out;
}

void apply_mask(const BoundaryMask& m, const Grid3& g, VectorField3& p)
{
    for (int c = 0; c < 3; ++c) {
        if (m.fixed[c].size() != g.num_nodes() || p.comp[c].size() != g.num_nodes())
            throw std::invalid_argument("mask/grid/field size mismatch");
        const auto& f = m.fixed[c];
        auto& pc = p.comp[c];
        for (std::size_t i = 0; i < pc.size(); ++i)
            if (f[i]) pc[i] = 0.0;
    }
}

VectorField3 project_tangential(const Grid3& g, const BoundaryMask& m, const VectorField3& p)
{
    if (m.variant != BcVariant::tangential_nu_zero)
        throw std::invalid_argument("mask variant is not tangential");
    VectorField3 out = p;
    apply_mask(m, g, out);
    return out;
}

VectorField3 project_parallel_e3(const Grid3& g, const BoundaryMask& m, const VectorField3& p)
{
    if (m.variant != BcVariant::parallel_e3)
        throw std::invalid_argument("mask variant is not parallel-e3");
    VectorField3 out = p;
    apply_mask(m, g, out);
    return out;
}

double integrate(std::span<const double> w, std::span<const double> f)
{
    if (w.size() != f.size()) throw std::invalid_argument("integrate: size mismatch");
    return kernels::ops().dot(w.data(), f.data(), w.size());
}

double integrate_product(std::span<const double> w, std::span<const double> f,
                         std::span<const double> h)
{
    if (w.size() != f.size() || w.size() != h.size())
        throw std::invalid_argument("integrate_product: size mismatch");
    return kernels::ops().wdot(w.data(), f.data(), h.data(), w.size());
}

double norm_l4(std::span<const double> w, const VectorField3& p)
{
    const double* p1 = p.comp[0].data();
    const double* p2 = p.comp[1].data();
    const double* p3 = p.comp[2].data();
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double q = (p1[i] * p1[i] + p2[i] * p2[i]) + p3[i] * p3[i];
        s += w[i] * q * q;
    }
    return std::pow(s, 0.25);
}

double norm_grad_l2(const Grid3& g, std::span<const double> w, const VectorField3& p)
{
    std::vector<double> tmp(g.num_nodes());
    const double scales[3] = {g.s1, g.s2, g.s3};
    double s = 0.0;
    for (int c = 0; c < 3; ++c)
        for (int ax = 0; ax < 3; ++ax) {
            axis_diff(g, ax, p.comp[c].data(), tmp.data(), scales[ax]);
            s += kernels::ops().wsumsq(w.data(), tmp.data(), tmp.size());
        }
    return std::sqrt(s);
}

}  // namespace wf
