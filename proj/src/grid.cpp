#include "wirefilm/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace wf {

namespace {

void check_dims(int n1, int n2, int n3)
{
    if (n1 < 3 || n2 < 3 || n3 < 3)
        throw std::invalid_argument("grid dims must be >= 3 per axis (stencils need interior nodes)");
}

void check_h(double h)
{
    if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("thickness must lie in (0,1)");
}

std::vector<double> axis_weights(int n, double d)
{
    std::vector<double> w(n, d);
    w.front() = 0.5 * d;
    w.back() = 0.5 * d;
    return w;
}

}  // namespace

Grid3 build_grid_a(int n1, int n2, int n3, double h_a)
{
    check_dims(n1, n2, n3);
    check_h(h_a);
    Grid3 g;
    g.domain = Domain::wire_a;
    g.n1 = n1; g.n2 = n2; g.n3 = n3;
    g.d1 = 1.0 / (n1 - 1); g.d2 = 1.0 / (n2 - 1); g.d3 = 1.0 / (n3 - 1);
    g.s1 = 1.0 / h_a; g.s2 = 1.0 / h_a; g.s3 = 1.0;
    g.h = h_a;
    return g;
}

Grid3 build_grid_b(int n1, int n2, int n3, double h_b)
{
    check_dims(n1, n2, n3);
    check_h(h_b);
    Grid3 g;
    g.domain = Domain::film_b;
    g.n1 = n1; g.n2 = n2; g.n3 = n3;
    g.d1 = 1.0 / (n1 - 1); g.d2 = 1.0 / (n2 - 1); g.d3 = 1.0 / (n3 - 1);
    g.s1 = 1.0; g.s2 = 1.0; g.s3 = 1.0 / h_b;
    g.h = h_b;
    return g;
}

Grid1 build_grid_1d(int n)
{
    if (n < 3) throw std::invalid_argument("1d grid needs n >= 3");
    return Grid1{n, 1.0 / (n - 1)};
}

Grid2 build_grid_2d(int n1, int n2)
{
    if (n1 < 3 || n2 < 3) throw std::invalid_argument("2d grid dims must be >= 3");
    Grid2 g;
    g.n1 = n1; g.n2 = n2;
    g.d1 = 1.0 / (n1 - 1); g.d2 = 1.0 / (n2 - 1);
    // node nearest the origin; ties break toward the lower index
    auto nearest = [](int n, double d) {
        int best = 0;
        double bestdist = std::abs(-0.5);
        for (int i = 1; i < n; ++i) {
            const double dist = std::abs(-0.5 + i * d);
            if (dist < bestdist - 1e-15) {
                best = i;
                bestdist = dist;
            }
        }
        return best;
    };
    g.pin_i = nearest(n1, g.d1);
    g.pin_j = nearest(n2, g.d2);
    return g;
}

BoundaryMask build_boundary_mask(const Grid3& g, BcVariant variant)
{
    BoundaryMask m;
    m.variant = variant;
    for (auto& f : m.fixed) f.assign(g.num_nodes(), 0);

    const int jk = g.junction_k();
    for (int k = 0; k < g.n3; ++k) {
        for (int j = 0; j < g.n2; ++j) {
            for (int i = 0; i < g.n1; ++i) {
                const std::size_t id = g.idx(i, j, k);
                const bool face1 = (i == 0 || i == g.n1 - 1);
                const bool face2 = (j == 0 || j == g.n2 - 1);
                const bool face3 = (k == 0 || k == g.n3 - 1) && k != jk;
                if (variant == BcVariant::tangential_nu_zero) {
                    if (face1) m.fixed[0][id] = 1;
                    if (face2) m.fixed[1][id] = 1;
                    if (face3) m.fixed[2][id] = 1;
                } else {
                    if (face1 || face2 || face3) {
                        m.fixed[0][id] = 1;
                        m.fixed[1][id] = 1;
                    }
                }
            }
        }
    }
    // the junction face itself is interpolation-driven; lift its flags
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t id = g.idx(i, j, jk);
            if (g.domain == Domain::wire_a) {
                m.fixed[0][id] = 0;
                m.fixed[1][id] = 0;
                m.fixed[2][id] = 0;
            }
        }
    return m;
}

JunctionMap build_junction_map(const Grid3& ga, const Grid3& gb, double h_a)
{
    if (ga.domain != Domain::wire_a || gb.domain != Domain::film_b)
        throw std::invalid_argument("junction map expects (wire, film) grids");
    if (std::abs(ga.h - h_a) > 1e-14)
        throw std::invalid_argument("h_a does not match the wire grid scale");

    JunctionMap jm;
    jm.h_a = h_a;
    jm.stencil.resize(std::size_t(ga.n1) * ga.n2);

    const int kb = gb.junction_k();
    for (int j = 0; j < ga.n2; ++j) {
        for (int i = 0; i < ga.n1; ++i) {
            const double t1 = h_a * ga.x1(i);
            const double t2 = h_a * ga.x2(j);
            double r1 = (t1 + 0.5) / gb.d1;
            double r2 = (t2 + 0.5) / gb.d2;
            int i0 = std::min(std::max(int(std::floor(r1)), 0), gb.n1 - 2);
            int j0 = std::min(std::max(int(std::floor(r2)), 0), gb.n2 - 2);
            double u = std::min(std::max(r1 - i0, 0.0), 1.0);
            double v = std::min(std::max(r2 - j0, 0.0), 1.0);
            JunctionMap::Stencil st;
            st.node = {gb.idx(i0, j0, kb), gb.idx(i0 + 1, j0, kb),
                       gb.idx(i0, j0 + 1, kb), gb.idx(i0 + 1, j0 + 1, kb)};
            st.w = {(1 - u) * (1 - v), u * (1 - v), (1 - u) * v, u * v};
            jm.stencil[std::size_t(j) * ga.n1 + i] = st;
        }
    }

    jm.outside.assign(std::size_t(gb.n1) * gb.n2, 0);
    const double half = 0.5 * h_a + 1e-12;
    for (int j = 0; j < gb.n2; ++j)
        for (int i = 0; i < gb.n1; ++i)
            if (std::abs(gb.x1(i)) > half || std::abs(gb.x2(j)) > half)
                jm.outside[std::size_t(j) * gb.n1 + i] = 1;
    return jm;
}

std::vector<double> quad_weights(const Grid3& g)
{
    const auto w1 = axis_weights(g.n1, g.d1);
    const auto w2 = axis_weights(g.n2, g.d2);
    const auto w3 = axis_weights(g.n3, g.d3);
    std::vector<double> w(g.num_nodes());
    for (int k = 0; k < g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) w[g.idx(i, j, k)] = w1[i] * w2[j] * w3[k];
    return w;
}

std::vector<double> quad_weights(const Grid2& g)
{
    const auto w1 = axis_weights(g.n1, g.d1);
    const auto w2 = axis_weights(g.n2, g.d2);
    std::vector<double> w(g.num_nodes());
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) w[g.idx(i, j)] = w1[i] * w2[j];
    return w;
}

std::vector<double> quad_weights(const Grid1& g)
{
    return axis_weights(g.n, g.d);
}

}  // namespace wf
