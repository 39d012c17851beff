#include <doctest.h>

#include <cmath>
#include <vector>

#include "wirefilm/energy.hpp"
#include "wirefilm/fields.hpp"
#include "wirefilm/limits.hpp"
#include "wirefilm/operators.hpp"

using namespace wf;

namespace {

std::vector<double> sine_profile(const Grid1& g)
{
    std::vector<double> q(std::size_t(g.n));
    for (int k = 0; k < g.n; ++k) q[std::size_t(k)] = std::sin(M_PI * g.x(k));
    return q;
}

}  // namespace

TEST_CASE("wire model: zero state and the analytic sine value")
{
    const Grid1 g0 = build_grid_1d(65);
    auto bd0 = eval_E0(g0, std::vector<double>(65, 0.0), {}, 2.5, 1.0);
    CHECK(bd0.total == doctest::Approx(2.5).epsilon(1e-13));

    // alpha=1, |Theta|=1: pi^2/2 + 3/8 + 1/2 within 1e-3 relative at N=513
    const Grid1 g = build_grid_1d(513);
    auto bd = eval_E0(g, sine_profile(g), {}, 1.0, 1.0);
    const double expect = M_PI * M_PI / 2 + 0.875;
    CHECK(std::abs(bd.total - expect) / expect < 1e-3);
    CHECK(bd.fullgrad_term == doctest::Approx(M_PI * M_PI / 2).epsilon(1e-3));
    CHECK(bd.doublewell_term == doctest::Approx(0.375).epsilon(1e-3));
    CHECK(bd.nonlocal_term == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("wire model: nonlocal term equals the profile's L2 norm")
{
    // the antiderivative structure makes  |psi'|^2 integrate to |q|^2;
    // compare the two code paths on a generic admissible profile
    const Grid1 g = build_grid_1d(257);
    std::vector<double> q(std::size_t(g.n));
    for (int k = 0; k < g.n; ++k) {
        const double t = g.x(k);
        q[std::size_t(k)] = std::sin(M_PI * t) * (1.0 + 0.5 * std::sin(2 * M_PI * t + 0.3));
    }
    auto bd = eval_E0(g, q, {}, 1.0, 1.0);
    const auto w = quad_weights(g);
    double l2 = 0.0;
    for (int k = 0; k < g.n; ++k) l2 += w[std::size_t(k)] * q[std::size_t(k)] * q[std::size_t(k)];
    CHECK(bd.nonlocal_term == doctest::Approx(l2).epsilon(1e-3));
}

TEST_CASE("wire model: admissibility is enforced")
{
    const Grid1 g = build_grid_1d(65);
    std::vector<double> q(65, 1.0);  // q(0) = q(1) = 1 violates the pins
    CHECK_THROWS_AS((void)eval_E0(g, q, {}, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("film model: zero state and analytic component values at 129x129")
{
    const Grid2 g0 = build_grid_2d(33, 33);
    const std::size_t m0 = g0.num_nodes();
    auto bd0 = eval_Einf(g0, std::vector<double>(m0, 0.0), std::vector<double>(m0, 0.0), {},
                         3.0, 1.0);
    CHECK(bd0.total == doctest::Approx(3.0).epsilon(1e-13));

    const Grid2 g = build_grid_2d(129, 129);
    const std::size_t m = g.num_nodes();
    std::vector<double> q1(m), q2(m, 0.0);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i)
            q1[g.idx(i, j)] = std::cos(M_PI * g.x1(i)) * std::sin(2 * M_PI * g.x2(j));
    auto bd = eval_Einf(g, q1, q2, {}, 1.0, 1.0);
    CHECK(std::abs(bd.rot_term - M_PI * M_PI) / (M_PI * M_PI) < 1e-3);
    CHECK(std::abs(bd.div_term - M_PI * M_PI / 4) / (M_PI * M_PI / 4) < 1e-3);
    CHECK(std::abs(bd.doublewell_term - 41.0 / 64.0) / (41.0 / 64.0) < 1e-3);
    // frozen from a grid-refined run of this solver; the Richardson limit
    // over 129/257 sits at 0.09671018
    CHECK(bd.nonlocal_term == doctest::Approx(0.0966970497369417).epsilon(1e-10));
}

TEST_CASE("film model: rigid rotation violates the tangential constraint")
{
    const Grid2 g = build_grid_2d(33, 33);
    const std::size_t m = g.num_nodes();
    std::vector<double> q1(m), q2(m);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            q1[g.idx(i, j)] = -g.x2(j);
            q2[g.idx(i, j)] = g.x1(i);
        }
    CHECK_THROWS_AS((void)eval_Einf(g, q1, q2, {}, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("coupled model: zero state, frozen sine value, f-additivity")
{
    const Grid1 g1 = build_grid_1d(257);
    const Grid2 g2 = build_grid_2d(65, 65);
    LimitModelSpec spec;  // alpha = beta = ell = 1

    LimitState zero;
    zero.kind = LimitState::Kind::coupled;
    zero.qa.assign(std::size_t(g1.n), 0.0);
    zero.qb1.assign(g2.num_nodes(), 0.0);
    zero.qb2.assign(g2.num_nodes(), 0.0);
    auto bd0 = eval_E_coupled(g1, g2, zero, {}, {}, spec);
    CHECK(bd0.total == doctest::Approx(2.0).epsilon(1e-13));  // alpha(1 + ell)

    LimitState st = zero;
    st.qa = sine_profile(g1);
    auto bd = eval_E_coupled(g1, g2, st, {}, {}, spec);
    // frozen from this solver; continuum value pi^2/2 + 3/8 + 1/2 + 1
    CHECK(bd.total == doctest::Approx(6.80956028727859).epsilon(1e-10));
    CHECK(bd.nonlocal_term == doctest::Approx(0.5).epsilon(1e-9));

    // external term is affine in f: E(q;f1+f2) - E(q;f1) - E(q;f2) + E(q;0) = 0
    std::vector<double> fa(std::size_t(g1.n)), fb1(g2.num_nodes()), fb2(g2.num_nodes());
    Rng rng(9);
    for (auto& v : fa) v = rng.sym();
    for (auto& v : fb1) v = rng.sym();
    for (auto& v : fb2) v = rng.sym();
    std::vector<double> fa2(fa.size());
    for (std::size_t i = 0; i < fa.size(); ++i) fa2[i] = 0.3 * fa[i] + 0.1;
    auto with = [&](const std::vector<double>& f3, const std::vector<double>& g1f,
                    const std::vector<double>& g2f) {
        return eval_E_coupled(g1, g2, st, f3, {g1f, g2f}, spec).total;
    };
    std::vector<double> fsum(fa.size());
    for (std::size_t i = 0; i < fa.size(); ++i) fsum[i] = fa[i] + fa2[i];
    const double lhs = with(fsum, fb1, fb2) - with(fa, fb1, fb2) - with(fa2, {}, {}) +
                       with({}, {}, {});
    // the film drive enters each evaluation identically, so it cancels; the
    // identity probes additivity in the wire drive here
    CHECK(std::abs(lhs) < 1e-10);
}

TEST_CASE("limit gradients pass gradcheck at 1e-6")
{
    LimitModelSpec spec;
    spec.alpha = 2.0;
    spec.beta = 1.5;
    spec.ell = 0.7;

    const Grid1 g1 = build_grid_1d(65);
    std::vector<double> f3(std::size_t(g1.n));
    Rng rng(15);
    for (auto& v : f3) v = rng.sym();
    Wire1dProblem wire(g1, spec, f3);
    auto xw = make_random_start(wire, 21);
    CHECK(gradcheck(wire, xw, 20, 1e-5, 5) <= 1e-6);

    const Grid2 g2 = build_grid_2d(33, 33);
    std::array<std::vector<double>, 2> f12;
    for (auto& f : f12) {
        f.resize(g2.num_nodes());
        for (auto& v : f) v = rng.sym();
    }
    Film2dProblem film(g2, spec, f12);
    auto xf = make_random_start(film, 22);
    CHECK(gradcheck(film, xf, 20, 1e-5, 6) <= 1e-6);

    CoupledLimitProblem coupled(g1, g2, spec, f3, f12);
    auto xc = make_random_start(coupled, 23);
    CHECK(gradcheck(coupled, xc, 20, 1e-5, 7) <= 1e-6);

    // exploratory junction tie instead of zero pins
    LimitModelSpec tied = spec;
    tied.junction_zero = false;
    CoupledLimitProblem coupled2(g1, g2, tied, f3, f12);
    auto xc2 = make_random_start(coupled2, 24);
    CHECK(gradcheck(coupled2, xc2, 20, 1e-5, 8) <= 1e-6);
}

TEST_CASE("coupled projection: pins or ties at the junction")
{
    const Grid1 g1 = build_grid_1d(33);
    const Grid2 g2 = build_grid_2d(9, 9);
    const std::size_t n = 33, m = g2.num_nodes(), pin = g2.idx(g2.pin_i, g2.pin_j);

    LimitModelSpec spec;
    CoupledLimitProblem pinned(g1, g2, spec, {}, {});
    std::vector<double> x(pinned.size(), 0.5);
    pinned.project(x);
    CHECK(x[0] == 0.0);
    CHECK(x[n - 1] == 0.0);
    CHECK(x[n + pin] == 0.0);
    CHECK(x[n + m + pin] == 0.0);

    spec.junction_zero = false;
    CoupledLimitProblem tied(g1, g2, spec, {}, {});
    std::vector<double> y(tied.size(), 0.0);
    y[0] = 0.9;
    y[n + pin] = 0.3;
    y[n + m + pin] = 0.3;
    tied.project(y);
    CHECK(y[0] == doctest::Approx(0.5));
    CHECK(y[n + pin] == doctest::Approx(0.5));
    CHECK(y[n + m + pin] == doctest::Approx(0.5));
}

TEST_CASE("minimize_limit style runs: trivial bounds and frozen values")
{
    OptimizerOptions opts;
    opts.max_iters = 40000;
    opts.grad_tol = 1e-7;
    opts.restarts = 4;

    // small alpha: minimizer is near zero, E <= alpha |Theta|
    {
        const Grid1 g = build_grid_1d(129);
        LimitModelSpec spec;
        spec.alpha = 0.01;
        Wire1dProblem prob(g, spec, {});
        OptimizerOptions fast = opts;
        fast.max_iters = 2000;
        auto rep = minimize_with_default_starts(prob, fast, 4);
        CHECK(rep.energy <= 0.01 + 1e-12);
    }

    // constant downward drive: nontrivial minimizer, frozen fine-grid value
    {
        const Grid1 g = build_grid_1d(129);
        LimitModelSpec spec;
        Wire1dProblem prob(g, spec, std::vector<double>(129, -4.0));
        auto rep = minimize_with_default_starts(prob, opts, 99);
        CHECK(rep.converged);
        CHECK(rep.energy == doctest::Approx(0.628581599190326).epsilon(1e-9));
        CHECK(rep.energy < 1.0);  // beats every constant-admissible profile
    }

    // stiff double well: plateau profile with boundary layers
    {
        const Grid1 g = build_grid_1d(129);
        LimitModelSpec spec;
        spec.alpha = 25.0;
        Wire1dProblem prob(g, spec, {});
        auto rep = minimize_with_default_starts(prob, opts, 5);
        CHECK(rep.energy > 0.0);
        CHECK(rep.energy < 25.0);
        CHECK(rep.energy == doctest::Approx(13.7).epsilon(0.05));  // long-run value 13.64
        double qmax = 0.0;
        for (double v : rep.state) qmax = std::max(qmax, std::abs(v));
        CHECK(qmax > 0.9);
        CHECK(qmax < 1.05);
    }

    // film model with f = 0: zero start already achieves alpha |Theta|
    {
        const Grid2 g = build_grid_2d(17, 17);
        LimitModelSpec spec;
        Film2dProblem prob(g, spec, {});
        OptimizerOptions fast = opts;
        fast.max_iters = 300;
        auto rep = minimize_with_default_starts(prob, fast, 6);
        CHECK(rep.energy <= 1.0 + 1e-12);
    }
}

TEST_CASE("lift: zero states and exact admissibility")
{
    RegimeParams p;
    p.regime = Regime::finite;
    p.ell = 1.0;
    p.h_a = 0.25;
    p.h_b = 0.0625;
    Coupled3dSetup s = make_setup(p, {9, 9, 9}, {9, 9, 9});
    const Grid1 g1 = build_grid_1d(33);
    const Grid2 g2 = build_grid_2d(9, 9);

    LimitState zero;
    zero.kind = LimitState::Kind::wire_1d;
    zero.qa.assign(std::size_t(g1.n), 0.0);
    auto x = lift_limit_to_3d(zero, &g1, &g2, s);
    for (double v : x) CHECK(v == 0.0);

    // a coupled state lifts to an exactly admissible 3D state
    LimitState st;
    st.kind = LimitState::Kind::coupled;
    st.qa = sine_profile(g1);
    st.qb1.resize(g2.num_nodes());
    st.qb2.resize(g2.num_nodes());
    for (int j = 0; j < g2.n2; ++j)
        for (int i = 0; i < g2.n1; ++i) {
            st.qb1[g2.idx(i, j)] = std::cos(M_PI * g2.x1(i)) * std::sin(2 * M_PI * g2.x2(j));
            st.qb2[g2.idx(i, j)] = 0.0;
        }
    auto y = lift_limit_to_3d(st, &g1, &g2, s);
    auto y2 = y;
    project_admissible(s, y2);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == y2[i]);

    // junction residual is zero by construction when the pins hold
    const int kj = s.ga.junction_k();
    auto a3 = comp_a(s, std::span<const double>(y), 2);
    for (int j = 0; j < s.ga.n2; ++j)
        for (int i = 0; i < s.ga.n1; ++i)
            CHECK(std::abs(a3[s.ga.idx(i, j, kj)]) < 1e-12);
}

TEST_CASE("lift: scaled 3D energy approaches the coupled limit energy")
{
    const Grid1 g1 = build_grid_1d(129);
    const Grid2 g2 = build_grid_2d(33, 33);
    LimitState st;
    st.kind = LimitState::Kind::coupled;
    st.qa = sine_profile(g1);
    st.qb1.assign(g2.num_nodes(), 0.0);
    st.qb2.assign(g2.num_nodes(), 0.0);
    for (int j = 1; j + 1 < g2.n2; ++j)
        for (int i = 1; i + 1 < g2.n1; ++i)
            st.qb1[g2.idx(i, j)] =
                std::cos(M_PI * g2.x1(i)) * std::sin(2 * M_PI * g2.x2(j));
    // enforce the pins exactly
    st.qb1[g2.idx(g2.pin_i, g2.pin_j)] = 0.0;

    LimitModelSpec spec;
    auto limit = eval_E_coupled(g1, g2, st, {}, {}, spec);

    double prev = -1.0;
    for (double ha : {0.4, 0.2, 0.1}) {
        RegimeParams p;
        p.regime = Regime::finite;
        p.ell = 1.0;
        p.h_a = ha;
        p.h_b = ha * ha;
        Coupled3dSetup s = make_setup(p, {17, 17, 17}, {17, 17, 17});
        auto x = lift_limit_to_3d(st, &g1, &g2, s);
        const auto bd = eval_E_n(s, x);
        const double gap = std::abs(bd.total / (ha * ha) - limit.total);
        if (prev >= 0.0) CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev / limit.total < 0.2);
}
