#pragma once

#include <span>

#include "wirefilm/fields.hpp"
#include "wirefilm/grid.hpp"

namespace wf {

// Anisotropically scaled finite differences on the rescaled domains.
// All stencils are second order: central in the interior, one-sided at
// boundary nodes.  axis is 0,1,2 for x1,x2,x3.

// out = scale * (d/dx_axis) u
void axis_diff(const Grid3& g, int axis, const double* u, double* out, double scale);
// out += scale * (d/dx_axis)^T v   (Euclidean transpose of the stencil matrix)
void axis_diff_t_acc(const Grid3& g, int axis, const double* v, double* out, double scale);

void axis_diff(const Grid2& g, int axis, const double* u, double* out, double scale);
void axis_diff_t_acc(const Grid2& g, int axis, const double* v, double* out, double scale);

void diff_1d(const Grid1& g, const double* u, double* out, double scale);
void diff_1d_t_acc(const Grid1& g, const double* v, double* out, double scale);

// scaled vector calculus; component i of the gradient carries scale s_i
void grad_scaled(const Grid3& g, const double* u, double* g1, double* g2, double* g3);
void div_scaled(const Grid3& g, const double* p1, const double* p2, const double* p3,
                double* out);
void rot_scaled(const Grid3& g, const double* p1, const double* p2, const double* p3,
                double* r1, double* r2, double* r3);

VectorField3 grad_scaled(const Grid3& g, const std::vector<double>& u);
std::vector<double> div_scaled(const Grid3& g, const VectorField3& p);
VectorField3 rot_scaled(const Grid3& g, const VectorField3& p);

// zero the masked components; other values pass through; idempotent
void apply_mask(const BoundaryMask& m, const Grid3& g, VectorField3& p);
VectorField3 project_tangential(const Grid3& g, const BoundaryMask& m, const VectorField3& p);
VectorField3 project_parallel_e3(const Grid3& g, const BoundaryMask& m, const VectorField3& p);

// trapezoidal quadrature; w = quad_weights(g)
double integrate(std::span<const double> w, std::span<const double> f);
double integrate_product(std::span<const double> w, std::span<const double> f,
                         std::span<const double> h);

// ||p||_{L^4} with |p(x)| the pointwise Euclidean norm
double norm_l4(std::span<const double> w, const VectorField3& p);
// ||scaled gradient of p||_{L^2} over all nine entries
double norm_grad_l2(const Grid3& g, std::span<const double> w, const VectorField3& p);

}  // namespace wf
