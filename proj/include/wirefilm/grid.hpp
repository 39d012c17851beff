#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace wf {

// The reference cross-section is the open unit square (-1/2,1/2)^2; the
// wire domain is the square times (0,1), the film the square times (-1,0).
// Both are discretized on uniform node-collocated tensor grids.

enum class Domain { wire_a, film_b };

enum class BcVariant { tangential_nu_zero, parallel_e3 };

struct Grid3 {
    Domain domain;
    int n1 = 0, n2 = 0, n3 = 0;
    double d1 = 0, d2 = 0, d3 = 0;  // node spacing
    double s1 = 1, s2 = 1, s3 = 1;  // anisotropic derivative scales
    double h = 0;                   // thickness parameter (h_a or h_b)

    std::size_t num_nodes() const { return std::size_t(n1) * n2 * n3; }
    std::size_t idx(int i, int j, int k) const
    {
        return (std::size_t(k) * n2 + j) * n1 + i;
    }
    double x1(int i) const { return -0.5 + i * d1; }
    double x2(int j) const { return -0.5 + j * d2; }
    double x3(int k) const { return (domain == Domain::wire_a) ? k * d3 : -1.0 + k * d3; }
    // plane index of the junction face x3 = 0
    int junction_k() const { return (domain == Domain::wire_a) ? 0 : n3 - 1; }
};

struct Grid1 {
    int n = 0;
    double d = 0;
    double x(int k) const { return k * d; }  // [0,1]
};

struct Grid2 {
    int n1 = 0, n2 = 0;
    double d1 = 0, d2 = 0;
    int pin_i = 0, pin_j = 0;  // node nearest the origin; q and psi ties act here
    std::size_t num_nodes() const { return std::size_t(n1) * n2; }
    std::size_t idx(int i, int j) const { return std::size_t(j) * n1 + i; }
    double x1(int i) const { return -0.5 + i * d1; }
    double x2(int j) const { return -0.5 + j * d2; }
};

// Per-component constrained-DOF flags for one 3D grid.  The junction face
// x3 = 0 is never flagged here; it is handled by the junction map.
struct BoundaryMask {
    BcVariant variant;
    std::array<std::vector<std::uint8_t>, 3> fixed;  // 1 = component pinned to 0

    bool is_fixed(int c, std::size_t node) const { return fixed[c][node] != 0; }
};

// Couples the wire's bottom face to the film's top plane: every wire node
// (x', 0) takes its value from a bilinear stencil at (h_a x', 0) on the
// film grid.  Film top-plane nodes outside the closed square of side h_a
// around the origin carry the footprint constraint (third component zero
// for the tangential variant, in-plane components zero for parallel-e3).
struct JunctionMap {
    double h_a = 0;
    struct Stencil {
        std::array<std::size_t, 4> node;  // film-grid node indices
        std::array<double, 4> w;          // nonnegative, sum to 1
    };
    std::vector<Stencil> stencil;         // one per wire bottom-face node, j*n1a+i
    std::vector<std::uint8_t> outside;    // one per film top-plane node, j*n1b+i
};

Grid3 build_grid_a(int n1, int n2, int n3, double h_a);
Grid3 build_grid_b(int n1, int n2, int n3, double h_b);
Grid1 build_grid_1d(int n);
Grid2 build_grid_2d(int n1, int n2);

BoundaryMask build_boundary_mask(const Grid3& g, BcVariant variant);
JunctionMap build_junction_map(const Grid3& ga, const Grid3& gb, double h_a);

// Trapezoidal tensor-product quadrature weights, one per node.
std::vector<double> quad_weights(const Grid3& g);
std::vector<double> quad_weights(const Grid2& g);
std::vector<double> quad_weights(const Grid1& g);

}  // namespace wf
