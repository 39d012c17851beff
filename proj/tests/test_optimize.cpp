#include <doctest.h>

#include <cmath>
#include <vector>

#include "wirefilm/fields.hpp"
#include "wirefilm/limits.hpp"
#include "wirefilm/optimize.hpp"

using namespace wf;

namespace {

// convex quadratic surrogate with a pinned first DOF:
// E(x) = 1/2 sum c_i (x_i - t_i)^2, c_i > 0
class QuadraticProblem : public EnergyProblem {
public:
    explicit QuadraticProblem(std::size_t n) : c_(n), t_(n)
    {
        Rng rng(17);
        for (std::size_t i = 0; i < n; ++i) {
            c_[i] = 0.5 + rng.unit();
            t_[i] = rng.sym();
        }
        t_[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i) free_.push_back(std::uint32_t(i));
    }
    std::size_t size() const override { return c_.size(); }
    void project(std::span<double> x) const override { x[0] = 0.0; }
    double energy(std::span<const double> x) const override
    {
        double e = 0.0;
        for (std::size_t i = 0; i < c_.size(); ++i)
            e += 0.5 * c_[i] * (x[i] - t_[i]) * (x[i] - t_[i]);
        return e;
    }
    double energy_and_grad(std::span<const double> x, std::span<double> g) const override
    {
        for (std::size_t i = 0; i < c_.size(); ++i) g[i] = c_[i] * (x[i] - t_[i]);
        g[0] = 0.0;
        return energy(x);
    }
    const std::vector<std::uint32_t>& independent_dofs() const override { return free_; }

    std::vector<double> c_, t_;
    std::vector<std::uint32_t> free_;
};

}  // namespace

TEST_CASE("convex quadratic reaches its unique minimizer from any start")
{
    QuadraticProblem prob(40);
    OptimizerOptions opts;
    opts.grad_tol = 1e-10;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto x = make_random_start(prob, seed);
        auto run = minimize_single(prob, x, opts);
        CHECK(run.converged);
        for (std::size_t i = 1; i < prob.size(); ++i)
            CHECK(x[i] == doctest::Approx(prob.t_[i]).epsilon(1e-7));
        CHECK(x[0] == 0.0);
    }
}

TEST_CASE("gradcheck on a quadratic is exact to roundoff")
{
    // central differences are exact on quadratics for any step; a step of
    // 1e-2 keeps the floating-point cancellation below 1e-10 relative
    QuadraticProblem prob(25);
    auto x = make_random_start(prob, 7);
    CHECK(gradcheck(prob, x, 20, 1e-2, 3) <= 1e-10);
}

TEST_CASE("gradcheck flags corrupted gradients")
{
    // an analytic-vs-FD checker must stay sensitive above its roundoff floor
    class Broken : public EnergyProblem {
    public:
        explicit Broken(std::size_t n) : n_(n)
        {
            for (std::size_t i = 0; i < n; ++i) free_.push_back(std::uint32_t(i));
        }
        std::size_t size() const override { return n_; }
        void project(std::span<double>) const override {}
        double energy(std::span<const double> x) const override
        {
            double e = 0;
            for (double v : x) e += 0.5 * v * v;
            return e;
        }
        double energy_and_grad(std::span<const double> x, std::span<double> g) const override
        {
            for (std::size_t i = 0; i < n_; ++i) g[i] = x[i];
            g[3] *= 1.001;  // 0.1% corruption on one entry
            return energy(x);
        }
        const std::vector<std::uint32_t>& independent_dofs() const override { return free_; }
        std::size_t n_;
        std::vector<std::uint32_t> free_;
    };
    Broken prob(8);
    auto x = make_random_start(prob, 3);
    CHECK(gradcheck(prob, x, 200, 1e-5, 7) > 1e-4);
}

TEST_CASE("descent property and monotone restarts on a nonconvex model")
{
    const Grid1 g = build_grid_1d(65);
    LimitModelSpec spec;
    spec.alpha = 4.0;
    Wire1dProblem prob(g, spec, {});
    OptimizerOptions opts;
    opts.max_iters = 200;

    auto x0 = make_random_start(prob, 42);
    const double e0 = prob.energy(x0);
    auto x = x0;
    auto run = minimize_single(prob, x, opts);
    CHECK(run.energy <= e0 + 1e-10);

    // zero start is a critical point, so it terminates immediately
    auto xz = make_zero_start(prob);
    auto rz = minimize_single(prob, xz, opts);
    CHECK(rz.iterations == 0);
    CHECK(rz.converged);
    CHECK(rz.energy == doctest::Approx(spec.alpha).epsilon(1e-12));
}

TEST_CASE("minimize picks the lowest restart with deterministic tie-break")
{
    QuadraticProblem prob(10);
    OptimizerOptions opts;
    opts.grad_tol = 1e-12;
    std::vector<std::vector<double>> starts;
    starts.push_back(make_zero_start(prob));
    starts.push_back(make_random_start(prob, 1));
    starts.push_back(make_random_start(prob, 2));
    auto rep = minimize(prob, starts, opts);
    CHECK(rep.restarts_used == 3);
    CHECK(rep.restart_energies.size() == 3);
    for (double e : rep.restart_energies) CHECK(rep.energy <= e);
    CHECK(rep.converged);

    // exact ties break toward the lower start index
    std::vector<std::vector<double>> twin;
    twin.push_back(make_random_start(prob, 9));
    twin.push_back(twin.front());
    auto tied = minimize(prob, twin, opts);
    CHECK(tied.best_restart == 0);
    CHECK(tied.restart_energies[0] == tied.restart_energies[1]);
}

TEST_CASE("identical seeds give bitwise-identical runs")
{
    const Grid1 g = build_grid_1d(65);
    LimitModelSpec spec;
    spec.alpha = 2.0;
    Wire1dProblem prob(g, spec, {});
    OptimizerOptions opts;
    opts.max_iters = 150;
    opts.restarts = 3;

    auto r1 = minimize_with_default_starts(prob, opts, 2024);
    auto r2 = minimize_with_default_starts(prob, opts, 2024);
    CHECK(r1.energy == r2.energy);
    CHECK(r1.iterations == r2.iterations);
    CHECK(r1.best_restart == r2.best_restart);
    REQUIRE(r1.state.size() == r2.state.size());
    for (std::size_t i = 0; i < r1.state.size(); ++i) CHECK(r1.state[i] == r2.state[i]);

    // different seeds draw different random starts
    auto s1 = make_random_start(prob, 2024);
    auto s2 = make_random_start(prob, 2025);
    bool all_same = true;
    for (std::size_t i = 0; i < s1.size(); ++i)
        if (s1[i] != s2[i]) all_same = false;
    CHECK_FALSE(all_same);
}

TEST_CASE("every iterate satisfies the constraints exactly")
{
    const Grid1 g = build_grid_1d(33);
    LimitModelSpec spec;
    spec.alpha = 9.0;
    Wire1dProblem prob(g, spec, std::vector<double>(33, -1.0));
    OptimizerOptions opts;
    opts.max_iters = 50;
    auto x = make_random_start(prob, 8);
    minimize_single(prob, x, opts);
    CHECK(x[0] == 0.0);
    CHECK(x[32] == 0.0);
}
