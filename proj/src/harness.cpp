#include "wirefilm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "wirefilm/operators.hpp"

namespace wf {

namespace {

LimitModelSpec spec_from(const RunConfig& cfg)
{
    LimitModelSpec s;
    s.alpha = cfg.alpha;
    s.beta = cfg.beta;
    s.ell = cfg.ell;
    s.theta_measure = 1.0;
    s.junction_zero = cfg.junction_zero;
    return s;
}

RegimeParams params_for(const RunConfig& cfg, double h_a, double h_b, BcVariant bc)
{
    RegimeParams p;
    p.regime = cfg.regime;
    p.ell = cfg.ell;
    p.alpha = cfg.alpha;
    p.beta = cfg.beta;
    p.h_a = h_a;
    p.h_b = h_b;
    p.bc = bc;
    return p;
}

Coupled3dSetup build_setup(const RunConfig& cfg, double h_a, double h_b, BcVariant bc)
{
    Coupled3dSetup s = make_setup(params_for(cfg, h_a, h_b, bc), cfg.grid_a, cfg.grid_b);
    s.fa = materialize_field(cfg.field_preset_a, s.ga);
    s.fb = materialize_field(cfg.field_preset_b, s.gb);
    return s;
}

// regime-dependent primary energy scale: (h_a)^2 for finite/zero, h_b for infinity
double primary_scale(const RunConfig& cfg, double h_a, double h_b)
{
    return cfg.regime == Regime::infinity ? h_b : h_a * h_a;
}

struct Starts {
    std::vector<std::vector<double>> list;
};

Starts make_starts(const Energy3dProblem& prob, const RunConfig& cfg,
                   const LimitSolution& limit, const Grid1& g1, const Grid2& g2,
                   std::uint64_t row_seed)
{
    Starts st;
    st.list.push_back(make_zero_start(prob));
    const int n_random = std::max(0, cfg.optimizer.restarts - 2);
    for (int r = 0; r < n_random; ++r)
        st.list.push_back(make_random_start(prob, derive_seed(row_seed, std::uint64_t(r))));
    auto lifted = lift_limit_to_3d(limit.state, &g1, &g2, prob.setup());
    st.list.push_back(std::move(lifted));
    if (prob.setup().params.bc == BcVariant::parallel_e3 && cfg.alpha > 0.5) {
        // uniformly poled states at the well amplitude of the constant
        // ansatz, alpha(c^2-1)^2 + c^2; the zero state is a saddle of this
        // variant and plain descent from noise is slow to break its symmetry
        const double c = std::sqrt(1.0 - 0.5 / cfg.alpha);
        for (double sgn : {c, -c}) {
            std::vector<double> poled(prob.size(), 0.0);
            auto a3 = comp_a(prob.setup(), std::span<double>(poled), 2);
            auto b3 = comp_b(prob.setup(), std::span<double>(poled), 2);
            std::fill(a3.begin(), a3.end(), sgn);
            std::fill(b3.begin(), b3.end(), sgn);
            prob.project(poled);
            st.list.push_back(std::move(poled));
        }
    }
    return st;
}

SweepRow make_row(const RunConfig& cfg, const LimitSolution& limit, const Grid1& g1,
                  const Grid2& g2, double h_a, double h_b, std::uint64_t row_seed)
{
    SweepRow row;
    row.h_a = h_a;
    row.h_b = h_b;
    row.ratio = h_b / (h_a * h_a);
    row.regime = regime_name(cfg.regime);
    row.restarts = cfg.optimizer.restarts;
    row.e_limit = limit.value;

    const double scale = primary_scale(cfg, h_a, h_b);
    const double theta = 1.0;
    row.omega_measure = (h_a * h_a + h_b) * theta;

    // rot/div energy over the tangential admissible set
    Coupled3dSetup setup_t = build_setup(cfg, h_a, h_b, BcVariant::tangential_nu_zero);
    {
        Energy3dProblem prob(setup_t, EnergyForm::rot_div);
        auto starts = make_starts(prob, cfg, limit, g1, g2, derive_seed(row_seed, 11));
        MinimizeReport rep = minimize(prob, std::move(starts.list), cfg.optimizer);
        row.e_breakdown = prob.eval(rep.state);
        row.e3d_scaled = row.e_breakdown.total / scale;
        row.e3d_over_omega = row.e_breakdown.total / row.omega_measure;
        row.iters = rep.iterations;
        row.e_converged = rep.converged;
        row.e_restart_energies = rep.restart_energies;

        VectorField3 pa, pb;
        for (int c = 0; c < 3; ++c) {
            auto sa = comp_a(setup_t, std::span<const double>(rep.state), c);
            auto sb = comp_b(setup_t, std::span<const double>(rep.state), c);
            pa.comp[c].assign(sa.begin(), sa.end());
            pb.comp[c].assign(sb.begin(), sb.end());
        }
        row.norm_p_a_l4 = norm_l4(setup_t.qwa, pa);
        const double b4 = norm_l4(setup_t.qwb, pb);
        const double da = norm_grad_l2(setup_t.ga, setup_t.qwa, pa);
        const double db = norm_grad_l2(setup_t.gb, setup_t.qwb, pb);
        switch (cfg.regime) {
            case Regime::finite:
                row.norm_p_b_l4_scaled = b4;
                row.diag_a4 = row.norm_p_a_l4;
                row.diag_b4 = b4;
                row.diag_da = da;
                row.diag_db = db;
                break;
            case Regime::zero:
                row.norm_p_b_l4_scaled = std::pow(h_b, 0.25) / std::sqrt(h_a) * b4;
                row.diag_a4 = row.norm_p_a_l4;
                row.diag_b4 = row.norm_p_b_l4_scaled;
                row.diag_da = da;
                row.diag_db = std::sqrt(h_b) / h_a * db;
                break;
            case Regime::infinity:
                row.norm_p_b_l4_scaled = b4;
                row.diag_a4 = h_a / std::sqrt(h_b) * row.norm_p_a_l4;
                row.diag_b4 = b4;
                row.diag_da = h_a / std::sqrt(h_b) * da;
                row.diag_db = db;
                break;
        }

        // recovery-sequence upper bound at this thickness
        auto lifted = lift_limit_to_3d(limit.state, &g1, &g2, setup_t);
        row.lift_scaled = prob.eval(lifted).total / scale;
        row.lift_gap = row.lift_scaled - limit.value;
    }
    row.gap = row.e3d_scaled - row.e_limit;

    // full-gradient energy over the same admissible set (its minima share
    // the rescaled limits of the rot/div form)
    {
        Energy3dProblem prob(setup_t, EnergyForm::full_gradient);
        auto starts = make_starts(prob, cfg, limit, g1, g2, derive_seed(row_seed, 13));
        MinimizeReport rep = minimize(prob, std::move(starts.list), cfg.optimizer);
        row.s_breakdown = prob.eval(rep.state);
        row.s3d_scaled = row.s_breakdown.total / scale;
        row.s3d_over_omega = row.s_breakdown.total / row.omega_measure;
        row.s_converged = rep.converged;
    }

    // full-gradient energy under the parallel-e3 constraint set
    {
        Coupled3dSetup setup_p = build_setup(cfg, h_a, h_b, BcVariant::parallel_e3);
        Energy3dProblem prob(setup_p, EnergyForm::full_gradient);
        auto starts = make_starts(prob, cfg, limit, g1, g2, derive_seed(row_seed, 17));
        MinimizeReport rep = minimize(prob, std::move(starts.list), cfg.optimizer);
        row.s3d_scaled_par_e3 = prob.eval(rep.state).total / scale;
    }

    // the introduction's |Omega_n|-normalized split prediction
    switch (cfg.regime) {
        case Regime::finite:
            row.intro_split_limit = 0.5 * limit.e0_min + 0.5 * cfg.ell * limit.einf_min;
            break;
        case Regime::zero: row.intro_split_limit = 0.5 * limit.e0_min; break;
        case Regime::infinity: row.intro_split_limit = 0.5 * limit.einf_min; break;
    }
    row.gap_intro_split = row.e3d_over_omega - row.intro_split_limit;
    return row;
}

}  // namespace

LimitSolution solve_limit_models(const RunConfig& cfg)
{
    const Grid1 g1 = build_grid_1d(cfg.grid_1d);
    const Grid2 g2 = build_grid_2d(cfg.grid_2d[0], cfg.grid_2d[1]);
    const LimitModelSpec spec = spec_from(cfg);
    const auto f3 = f3_profile_1d(cfg.field_preset_a, g1);
    const auto f12 = f12_profile_2d(cfg.field_preset_b, g2);

    LimitSolution out;
    const std::uint64_t seed = derive_seed(cfg.seed, 1001);

    Wire1dProblem wire(g1, spec, f3);
    MinimizeReport rep0 = minimize_with_default_starts(wire, cfg.optimizer, derive_seed(seed, 1));
    out.e0_min = rep0.energy;

    Film2dProblem film(g2, spec, f12);
    MinimizeReport repI = minimize_with_default_starts(film, cfg.optimizer, derive_seed(seed, 2));
    out.einf_min = repI.energy;

    switch (cfg.regime) {
        case Regime::finite: {
            CoupledLimitProblem coupled(g1, g2, spec, f3, f12);
            MinimizeReport rep =
                minimize_with_default_starts(coupled, cfg.optimizer, derive_seed(seed, 3));
            out.state = unpack_limit_state(LimitState::Kind::coupled, &g1, &g2, rep.state);
            out.value = rep.energy;
            out.converged = rep.converged;
            break;
        }
        case Regime::zero:
            out.state = unpack_limit_state(LimitState::Kind::wire_1d, &g1, &g2, rep0.state);
            out.value = rep0.energy;
            out.converged = rep0.converged;
            break;
        case Regime::infinity:
            out.state = unpack_limit_state(LimitState::Kind::film_2d, &g1, &g2, repI.state);
            out.value = repI.energy;
            out.converged = repI.converged;
            break;
    }
    return out;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, int threads)
{
    const Grid1 g1 = build_grid_1d(cfg.grid_1d);
    const Grid2 g2 = build_grid_2d(cfg.grid_2d[0], cfg.grid_2d[1]);
    const LimitSolution limit = solve_limit_models(cfg);

    const std::size_t n = cfg.thickness_schedule.size();
    std::vector<SweepRow> rows(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mu;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            const auto [h_a, h_b] = cfg.thickness_schedule[i];
            try {
                rows[i] = make_row(cfg, limit, g1, g2, h_a, h_b,
                                   derive_seed(cfg.seed, 7000 + i));
            } catch (const std::exception& e) {
                // record, keep sweeping; the row shows up unconverged
                rows[i].h_a = h_a;
                rows[i].h_b = h_b;
                rows[i].ratio = h_b / (h_a * h_a);
                rows[i].regime = regime_name(cfg.regime);
                rows[i].e_converged = false;
                rows[i].s_converged = false;
                std::lock_guard<std::mutex> lk(err_mu);
                if (first_error.empty()) first_error = e.what();
                failed.store(true);
            }
        }
    };

    const int nthreads = std::max(1, std::min<int>(threads, int(n)));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

DiagnosticsReport diagnostics(const std::vector<SweepRow>& rows)
{
    DiagnosticsReport rep;
    auto check = [&](const char* name, auto getter) {
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(getter(r));
        if (v.empty()) return;
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[(sorted.size() - 1) / 2];
        const double mx = sorted.back();
        if (mx > 10.0 * median + 1e-30) {
            rep.pass = false;
            std::ostringstream os;
            os << name << ": max " << mx << " exceeds 10 x median " << median;
            rep.flags.push_back(os.str());
        }
    };
    check("norm_a_L4", [](const SweepRow& r) { return r.diag_a4; });
    check("norm_b_L4_scaled", [](const SweepRow& r) { return r.diag_b4; });
    check("norm_Da_L2", [](const SweepRow& r) { return r.diag_da; });
    check("norm_Db_L2_scaled", [](const SweepRow& r) { return r.diag_db; });
    return rep;
}

GradcheckReport run_gradcheck(const RunConfig& cfg)
{
    GradcheckReport out;
    const int n_probes = 20;
    const double fd_step = 1e-5;
    const std::array<int, 3> dims{8, 8, 8};

    auto run3d = [&](EnergyForm form, BcVariant bc, const char* name) {
        RunConfig c = cfg;
        const double h_a = 0.25, h_b = cfg.regime == Regime::infinity ? 0.4 : 0.0625;
        Coupled3dSetup setup = make_setup(params_for(c, h_a, h_b, bc), dims, dims);
        setup.fa = materialize_field(cfg.field_preset_a, setup.ga);
        setup.fb = materialize_field(cfg.field_preset_b, setup.gb);
        Energy3dProblem prob(setup, form);
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 3; ++s) {
            auto x = make_random_start(prob, derive_seed(cfg.seed, 100 + s));
            worst = std::max(worst,
                             gradcheck(prob, x, n_probes, fd_step, derive_seed(cfg.seed, 200 + s)));
        }
        out.per_target.emplace_back(name, worst);
    };
    run3d(EnergyForm::rot_div, BcVariant::tangential_nu_zero, "E_n tangential");
    run3d(EnergyForm::rot_div, BcVariant::parallel_e3, "E_n parallel-e3");
    run3d(EnergyForm::full_gradient, BcVariant::tangential_nu_zero, "S_n tangential");
    run3d(EnergyForm::full_gradient, BcVariant::parallel_e3, "S_n parallel-e3");

    const Grid1 g1 = build_grid_1d(65);
    const Grid2 g2 = build_grid_2d(33, 33);
    const LimitModelSpec spec = spec_from(cfg);
    const auto f3 = f3_profile_1d(cfg.field_preset_a, g1);
    const auto f12 = f12_profile_2d(cfg.field_preset_b, g2);
    auto run_limit_target = [&](const EnergyProblem& prob, const char* name,
                                std::uint64_t salt) {
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 3; ++s) {
            auto x = make_random_start(prob, derive_seed(cfg.seed, salt + s));
            worst = std::max(
                worst, gradcheck(prob, x, n_probes, fd_step, derive_seed(cfg.seed, salt + 50 + s)));
        }
        out.per_target.emplace_back(name, worst);
    };
    Wire1dProblem wire(g1, spec, f3);
    run_limit_target(wire, "E_0 wire", 300);
    Film2dProblem film(g2, spec, f12);
    run_limit_target(film, "E_inf film", 400);
    CoupledLimitProblem coupled(g1, g2, spec, f3, f12);
    run_limit_target(coupled, "E coupled", 500);

    for (const auto& [name, v] : out.per_target) out.worst = std::max(out.worst, v);
    return out;
}

MinimizeReport run_limit(const RunConfig& cfg)
{
    const Grid1 g1 = build_grid_1d(cfg.grid_1d);
    const Grid2 g2 = build_grid_2d(cfg.grid_2d[0], cfg.grid_2d[1]);
    const LimitModelSpec spec = spec_from(cfg);
    const auto f3 = f3_profile_1d(cfg.field_preset_a, g1);
    const auto f12 = f12_profile_2d(cfg.field_preset_b, g2);
    const std::uint64_t seed = derive_seed(cfg.seed, 1001);
    switch (cfg.regime) {
        case Regime::zero: {
            Wire1dProblem prob(g1, spec, f3);
            return minimize_with_default_starts(prob, cfg.optimizer, derive_seed(seed, 1));
        }
        case Regime::infinity: {
            Film2dProblem prob(g2, spec, f12);
            return minimize_with_default_starts(prob, cfg.optimizer, derive_seed(seed, 2));
        }
        case Regime::finite:
        default: {
            CoupledLimitProblem prob(g1, g2, spec, f3, f12);
            return minimize_with_default_starts(prob, cfg.optimizer, derive_seed(seed, 3));
        }
    }
}

Solve3dResult run_solve3d(const RunConfig& cfg, double h_a, double h_b, EnergyForm form,
                          BcVariant bc, int /*threads*/)
{
    Coupled3dSetup setup = build_setup(cfg, h_a, h_b, bc);
    Energy3dProblem prob(setup, form);

    const Grid1 g1 = build_grid_1d(cfg.grid_1d);
    const Grid2 g2 = build_grid_2d(cfg.grid_2d[0], cfg.grid_2d[1]);
    const LimitSolution limit = solve_limit_models(cfg);
    auto starts = make_starts(prob, cfg, limit, g1, g2, derive_seed(cfg.seed, 31));

    Solve3dResult out;
    out.report = minimize(prob, std::move(starts.list), cfg.optimizer);
    out.breakdown = prob.eval(out.report.state);
    return out;
}

}  // namespace wf
