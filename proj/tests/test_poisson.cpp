#include <doctest.h>

#include <cmath>
#include <vector>

#include "wirefilm/fields.hpp"
#include "wirefilm/kernels.hpp"
#include "wirefilm/operators.hpp"
#include "wirefilm/poisson.hpp"

using namespace wf;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// smooth potential on the physical junction body; both rescaled fields are
// its pullbacks, so -D phi + p vanishes identically and the weak problem's
// solution is the pullback of W itself (up to the mean shift)
double W(double y1, double y2, double y3)
{
    return std::cos(2 * M_PI * y1) * std::cos(2 * M_PI * y2) * std::cos(M_PI * y3);
}
std::array<double, 3> dW(double y1, double y2, double y3)
{
    return {-2 * M_PI * std::sin(2 * M_PI * y1) * std::cos(2 * M_PI * y2) * std::cos(M_PI * y3),
            -2 * M_PI * std::cos(2 * M_PI * y1) * std::sin(2 * M_PI * y2) * std::cos(M_PI * y3),
            -M_PI * std::cos(2 * M_PI * y1) * std::cos(2 * M_PI * y2) * std::sin(M_PI * y3)};
}

struct Manufactured3d {
    Grid3 ga, gb;
    JunctionMap jm;
    VectorField3 pa, pb;
    std::vector<double> wa_exact, wb_exact;  // pullback of W on each grid
};

Manufactured3d make_manufactured(int n, double h_a, double h_b)
{
    Manufactured3d m;
    m.ga = build_grid_a(n, n, n, h_a);
    m.gb = build_grid_b(n, n, n, h_b);
    m.jm = build_junction_map(m.ga, m.gb, h_a);
    m.pa = VectorField3::zeros(m.ga);
    m.pb = VectorField3::zeros(m.gb);
    m.wa_exact.resize(m.ga.num_nodes());
    m.wb_exact.resize(m.gb.num_nodes());
    for (int k = 0; k < m.ga.n3; ++k)
        for (int j = 0; j < m.ga.n2; ++j)
            for (int i = 0; i < m.ga.n1; ++i) {
                const double y1 = h_a * m.ga.x1(i), y2 = h_a * m.ga.x2(j), y3 = m.ga.x3(k);
                const std::size_t id = m.ga.idx(i, j, k);
                m.wa_exact[id] = W(y1, y2, y3);
                const auto g = dW(y1, y2, y3);
                m.pa.comp[0][id] = g[0];
                m.pa.comp[1][id] = g[1];
                m.pa.comp[2][id] = g[2];
            }
    for (int k = 0; k < m.gb.n3; ++k)
        for (int j = 0; j < m.gb.n2; ++j)
            for (int i = 0; i < m.gb.n1; ++i) {
                const double y1 = m.gb.x1(i), y2 = m.gb.x2(j), y3 = h_b * m.gb.x3(k);
                const std::size_t id = m.gb.idx(i, j, k);
                m.wb_exact[id] = W(y1, y2, y3);
                const auto g = dW(y1, y2, y3);
                m.pb.comp[0][id] = g[0];
                m.pb.comp[1][id] = g[1];
                m.pb.comp[2][id] = g[2];
            }
    return m;
}

double manufactured_error(int n, Regime regime)
{
    auto m = make_manufactured(n, 0.25, 0.0625);
    CgInfo info;
    auto phi = solve_coupled_potential(m.pa, m.pb, m.ga, m.gb, m.jm, regime, &info);
    CHECK(info.rel_residual <= 1e-8);

    // compare after matching the normalization (shift exact W the same way)
    CoupledPoisson op(m.ga, m.gb, m.jm, regime);
    std::vector<double> wx(op.ndof());
    std::copy(m.wa_exact.begin(), m.wa_exact.end(), wx.begin());
    std::copy(m.wb_exact.begin(), m.wb_exact.end(), wx.begin() + m.ga.num_nodes());
    const double mean = op.norm_mean(wx.data());
    double err = 0.0;
    for (std::size_t i = 0; i < m.ga.num_nodes(); ++i)
        err = std::max(err, std::abs(phi.phi_a[i] - (m.wa_exact[i] - mean)));
    for (std::size_t i = 0; i < m.gb.num_nodes(); ++i)
        err = std::max(err, std::abs(phi.phi_b[i] - (m.wb_exact[i] - mean)));
    return err;
}

}  // namespace

TEST_CASE("psi_1d examples")
{
    const Grid1 g = build_grid_1d(101);
    std::vector<double> q(std::size_t(g.n), 0.0);
    auto psi = solve_psi_1d(g, q);
    for (double v : psi) CHECK(v == 0.0);

    std::fill(q.begin(), q.end(), 1.0);
    psi = solve_psi_1d(g, q);
    for (int k = 0; k < g.n; ++k)
        CHECK(psi[std::size_t(k)] == doctest::Approx(g.x(k) - 0.5).epsilon(1e-12));
}

TEST_CASE("psi_1d analytic antiderivative at N=1025")
{
    const Grid1 g = build_grid_1d(1025);
    std::vector<double> q(std::size_t(g.n));
    for (int k = 0; k < g.n; ++k) q[std::size_t(k)] = std::sin(M_PI * g.x(k));
    auto psi = solve_psi_1d(g, q);
    std::vector<double> exact(std::size_t(g.n));
    for (int k = 0; k < g.n; ++k) exact[std::size_t(k)] = -std::cos(M_PI * g.x(k)) / M_PI;
    CHECK(sup_diff(psi, exact) < 1e-5);

    // derivative recovers q at interior nodes to O(d^2)
    std::vector<double> dpsi(psi.size());
    diff_1d(g, psi.data(), dpsi.data(), 1.0);
    double err = 0.0;
    for (int k = 1; k + 1 < g.n; ++k)
        err = std::max(err, std::abs(dpsi[std::size_t(k)] - q[std::size_t(k)]));
    CHECK(err < 1e-5);
}

TEST_CASE("psi_2d zero drive")
{
    const Grid2 g = build_grid_2d(33, 33);
    const std::size_t n = g.num_nodes();
    std::vector<double> q1(n, 0.0), q2(n, 0.0);
    auto psi = solve_psi_2d(g, q1, q2);
    for (double v : psi) CHECK(v == 0.0);
}

TEST_CASE("psi_2d manufactured convergence order >= 1.9")
{
    auto solve_err = [](int n) {
        const Grid2 g = build_grid_2d(n, n);
        const std::size_t m = g.num_nodes();
        std::vector<double> q1(m), q2(m), exact(m);
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                const double x = g.x1(i), y = g.x2(j);
                const std::size_t id = g.idx(i, j);
                exact[id] = std::cos(2 * M_PI * x) * std::cos(2 * M_PI * y);
                q1[id] = -2 * M_PI * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
                q2[id] = -2 * M_PI * std::cos(2 * M_PI * x) * std::sin(2 * M_PI * y);
            }
        CgInfo info;
        auto psi = solve_psi_2d(g, q1, q2, &info);
        CHECK(info.rel_residual <= 1e-8);
        // exact field already has zero mean on the square
        return sup_diff(psi, exact);
    };
    const double e1 = solve_err(33);
    const double e2 = solve_err(65);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 1.9);
}

TEST_CASE("psi_2d mean-zero and bitwise re-solve")
{
    const Grid2 g = build_grid_2d(49, 49);
    const std::size_t n = g.num_nodes();
    Rng rng(4242);
    std::vector<double> q1(n), q2(n);
    for (auto& v : q1) v = rng.sym();
    for (auto& v : q2) v = rng.sym();

    auto psi = solve_psi_2d(g, q1, q2);
    const auto w = quad_weights(g);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += w[i] * psi[i];
    CHECK(std::abs(mean) <= 1e-10);

    auto psi2 = solve_psi_2d(g, q1, q2);
    CHECK(sup_diff(psi, psi2) == 0.0);
}

TEST_CASE("psi_coupled examples")
{
    const Grid1 g1 = build_grid_1d(129);
    const Grid2 g2 = build_grid_2d(33, 33);
    const std::size_t n1 = std::size_t(g1.n), n2 = g2.num_nodes();

    std::vector<double> qa(n1, 0.0), qb1(n2, 0.0), qb2(n2, 0.0);
    auto zero = solve_psi_coupled(g1, g2, qa, qb1, qb2, 1.0);
    for (double v : zero.psi_a) CHECK(v == 0.0);
    for (double v : zero.psi_b) CHECK(v == 0.0);

    // wire drive only: psi_a is the 1D antiderivative and psi_b settles at
    // the shared junction value -1/pi
    for (int k = 0; k < g1.n; ++k) qa[std::size_t(k)] = std::sin(M_PI * g1.x(k));
    auto sol = solve_psi_coupled(g1, g2, qa, qb1, qb2, 1.0);
    double err_a = 0.0;
    for (int k = 0; k < g1.n; ++k)
        err_a = std::max(err_a, std::abs(sol.psi_a[std::size_t(k)] +
                                         std::cos(M_PI * g1.x(k)) / M_PI));
    CHECK(err_a < 2e-3);
    for (double v : sol.psi_b) CHECK(v == doctest::Approx(-1.0 / M_PI).epsilon(2e-2));

    // the junction tie is eliminated, not penalized
    CHECK(sol.psi_a[0] == sol.psi_b[g2.idx(g2.pin_i, g2.pin_j)]);

    const auto w1 = quad_weights(g1);
    double mean = 0.0;
    for (std::size_t k = 0; k < n1; ++k) mean += w1[k] * sol.psi_a[k];
    CHECK(std::abs(mean) <= 1e-10);
}

TEST_CASE("coupled 3d potential: zero drive")
{
    auto m = make_manufactured(9, 0.25, 0.0625);
    VectorField3 z1 = VectorField3::zeros(m.ga), z2 = VectorField3::zeros(m.gb);
    auto phi = solve_coupled_potential(z1, z2, m.ga, m.gb, m.jm, Regime::finite);
    for (double v : phi.phi_a) CHECK(v == 0.0);
    for (double v : phi.phi_b) CHECK(v == 0.0);
}

TEST_CASE("coupled 3d potential: manufactured convergence order >= 1.9")
{
    const double e1 = manufactured_error(9, Regime::finite);
    const double e2 = manufactured_error(17, Regime::finite);
    const double e3 = manufactured_error(33, Regime::finite);
    CHECK(std::log2(e1 / e2) >= 1.9);
    CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("coupled 3d potential: infinity-regime weights and normalization")
{
    const double e1 = manufactured_error(9, Regime::infinity);
    const double e2 = manufactured_error(17, Regime::infinity);
    CHECK(std::log2(e1 / e2) >= 1.9);

    auto m = make_manufactured(17, 0.25, 0.0625);
    auto phi = solve_coupled_potential(m.pa, m.pb, m.ga, m.gb, m.jm, Regime::infinity);
    const auto wb = quad_weights(m.gb);
    double mean = 0.0;
    for (std::size_t i = 0; i < phi.phi_b.size(); ++i) mean += wb[i] * phi.phi_b[i];
    CHECK(std::abs(mean) <= 1e-10);
}

TEST_CASE("coupled 3d potential: junction consistency and mean-zero")
{
    auto m = make_manufactured(17, 0.3, 0.09);
    Rng rng(7);
    for (int c = 0; c < 3; ++c) {
        for (auto& v : m.pa.comp[c]) v = rng.sym();
        for (auto& v : m.pb.comp[c]) v = rng.sym();
    }
    auto phi = solve_coupled_potential(m.pa, m.pb, m.ga, m.gb, m.jm, Regime::finite);

    const int kj = m.ga.junction_k();
    for (int j = 0; j < m.ga.n2; ++j)
        for (int i = 0; i < m.ga.n1; ++i) {
            const auto& st = m.jm.stencil[std::size_t(j) * m.ga.n1 + i];
            const double v = st.w[0] * phi.phi_b[st.node[0]] + st.w[1] * phi.phi_b[st.node[1]] +
                             st.w[2] * phi.phi_b[st.node[2]] + st.w[3] * phi.phi_b[st.node[3]];
            CHECK(phi.phi_a[m.ga.idx(i, j, kj)] == v);
        }

    const auto wa = quad_weights(m.ga);
    double mean = 0.0;
    for (std::size_t i = 0; i < phi.phi_a.size(); ++i) mean += wa[i] * phi.phi_a[i];
    CHECK(std::abs(mean) <= 1e-10);
}

TEST_CASE("weak-form energy identity and shifted-guess uniqueness")
{
    auto m = make_manufactured(17, 0.25, 0.0625);
    Rng rng(23);
    for (int c = 0; c < 3; ++c) {
        for (auto& v : m.pa.comp[c]) v = rng.sym();
        for (auto& v : m.pb.comp[c]) v = rng.sym();
    }
    CoupledPoisson op(m.ga, m.gb, m.jm, Regime::finite);
    std::vector<double> b(op.ndof()), x(op.ndof(), 0.0);
    op.rhs(m.pa, m.pb, b.data());
    cg_solve(op.ndof(), [&](const double* in, double* o) { op.apply(in, o); },
             op.jacobi_diag(), op.nullvec(), b.data(), x.data(), CgOptions{});

    // <A phi, phi> = <b, phi>: the weighted Dirichlet energy of the
    // potential equals the weighted <p, D phi> pairing at solver tolerance
    std::vector<double> ax(op.ndof());
    op.apply(x.data(), ax.data());
    const auto& K = kernels::ops();
    const double lhs = K.dot(ax.data(), x.data(), op.ndof());
    const double rhs = K.dot(b.data(), x.data(), op.ndof());
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) <= 1e-7);

    // re-solve from a shifted initial guess
    std::vector<double> x2(op.ndof(), 0.0);
    {
        auto nv = op.nullvec();
        for (std::size_t i = 0; i < x2.size(); ++i) x2[i] = 0.37 * nv[i] + 1e-3 * nv[i];
    }
    cg_solve(op.ndof(), [&](const double* in, double* o) { op.apply(in, o); },
             op.jacobi_diag(), op.nullvec(), b.data(), x2.data(), CgOptions{});
    op.shift_mean_zero(x.data());
    op.shift_mean_zero(x2.data());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num = std::max(num, std::abs(x[i] - x2[i]));
        den = std::max(den, std::abs(x[i]));
    }
    CHECK(num / den <= 1e-9);
}

TEST_CASE("cg reports nonconvergence with the final residual")
{
    const Grid2 g = build_grid_2d(65, 65);
    const std::size_t n = g.num_nodes();
    Rng rng(5);
    std::vector<double> q1(n), q2(n);
    for (auto& v : q1) v = rng.sym();
    for (auto& v : q2) v = rng.sym();
    CgOptions opts;
    opts.max_iters = 3;
    CHECK_THROWS_AS((void)solve_psi_2d(g, q1, q2, nullptr, opts), SolverError);
}
