#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "wirefilm/harness.hpp"
#include "wirefilm/kernels.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNoConvergence = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_override;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--config", args.config_path, "run configuration (JSON)")->required();
    cmd->add_option("--out", args.out_override, "override the config's output path");
    cmd->add_option("--seed", args.seed, "override the config's seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--threads", args.threads, "worker threads for sweep rows")
        ->check(CLI::PositiveNumber);
}

wf::RunConfig load(const CommonArgs& args)
{
    wf::RunConfig cfg = wf::load_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.out_override.empty()) cfg.output_path = args.out_override;
    return cfg;
}

void print_report(const wf::MinimizeReport& rep)
{
    std::printf("energy       %.12g\n", rep.energy);
    std::printf("iterations   %d\n", rep.iterations);
    std::printf("restarts     %d (best %d)\n", rep.restarts_used, rep.best_restart);
    std::printf("converged    %s\n", rep.converged ? "yes" : "no");
    std::printf("restart energies:");
    for (double e : rep.restart_energies) std::printf(" %.12g", e);
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ferroelectric wire-on-film junction solver"};
    app.require_subcommand(1);

    CommonArgs args;
    auto* sweep = app.add_subcommand("sweep", "run a thickness sweep and write CSV/JSON");
    add_common(sweep, args);
    auto* solve3d = app.add_subcommand("solve3d", "minimize the 3D energy at one thickness pair");
    add_common(solve3d, args);
    double opt_ha = -1.0, opt_hb = -1.0;
    std::string opt_energy = "en", opt_bc = "tangential";
    solve3d->add_option("--h-a", opt_ha, "wire thickness (default: first schedule entry)");
    solve3d->add_option("--h-b", opt_hb, "film thickness (default: first schedule entry)");
    solve3d->add_option("--energy", opt_energy, "energy form: en (rot/div) or sn (full gradient)")
        ->check(CLI::IsMember({"en", "sn"}));
    solve3d->add_option("--bc", opt_bc, "boundary conditions: tangential or parallel-e3")
        ->check(CLI::IsMember({"tangential", "parallel-e3"}));
    auto* limit1d = app.add_subcommand("limit1d", "minimize the 1D wire limit model");
    add_common(limit1d, args);
    auto* limit2d = app.add_subcommand("limit2d", "minimize the 2D film limit model");
    add_common(limit2d, args);
    auto* limitc = app.add_subcommand("limit-coupled", "minimize the coupled limit model");
    add_common(limitc, args);
    auto* gradchk = app.add_subcommand("gradcheck", "finite-difference gradient verification");
    add_common(gradchk, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        wf::RunConfig cfg = load(args);

        if (sweep->parsed()) {
            auto rows = wf::run_sweep(cfg, args.threads);
            wf::write_results(rows, cfg.output_path);
            const auto diag = wf::diagnostics(rows);
            std::printf("wrote %zu rows to %s (kernels: %s)\n", rows.size(),
                        cfg.output_path.c_str(),
                        wf::kernels::isa_name(wf::kernels::active_isa()).c_str());
            for (const auto& r : rows)
                std::printf("h_a=%-8g E/scale=%-12.8g S/scale=%-12.8g limit=%-12.8g gap=%+.3e\n",
                            r.h_a, r.e3d_scaled, r.s3d_scaled, r.e_limit, r.gap);
            if (!diag.pass) {
                std::printf("diagnostics flags:\n");
                for (const auto& f : diag.flags) std::printf("  %s\n", f.c_str());
            } else {
                std::printf("diagnostics: scaled norms bounded\n");
            }
            return kExitOk;
        }

        if (solve3d->parsed()) {
            double h_a = opt_ha, h_b = opt_hb;
            if (h_a <= 0.0 || h_b <= 0.0) {
                h_a = cfg.thickness_schedule.front().first;
                h_b = cfg.thickness_schedule.front().second;
            }
            const auto form = opt_energy == "sn" ? wf::EnergyForm::full_gradient
                                                 : wf::EnergyForm::rot_div;
            const auto bc = opt_bc == "parallel-e3" ? wf::BcVariant::parallel_e3
                                                    : wf::BcVariant::tangential_nu_zero;
            auto res = wf::run_solve3d(cfg, h_a, h_b, form, bc, args.threads);
            print_report(res.report);
            std::printf("breakdown: rot %.6g div %.6g fullgrad %.6g dwell %.6g nonlocal %.6g "
                        "external %.6g total %.12g\n",
                        res.breakdown.rot_term, res.breakdown.div_term,
                        res.breakdown.fullgrad_term, res.breakdown.doublewell_term,
                        res.breakdown.nonlocal_term, res.breakdown.external_term,
                        res.breakdown.total);
            return res.report.converged ? kExitOk : kExitNoConvergence;
        }

        if (limit1d->parsed() || limit2d->parsed() || limitc->parsed()) {
            wf::RunConfig c = cfg;
            c.regime = limit1d->parsed() ? wf::Regime::zero
                       : limit2d->parsed() ? wf::Regime::infinity
                                           : wf::Regime::finite;
            auto rep = wf::run_limit(c);
            print_report(rep);
            return rep.converged ? kExitOk : kExitNoConvergence;
        }

        if (gradchk->parsed()) {
            auto rep = wf::run_gradcheck(cfg);
            for (const auto& [name, v] : rep.per_target)
                std::printf("%-16s max rel err %.3e\n", name.c_str(), v);
            std::printf("worst %.3e\n", rep.worst);
            return rep.worst <= 1e-5 ? kExitOk : kExitNoConvergence;
        }
    } catch (const wf::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitValidation;
    } catch (const wf::SolverError& e) {
        std::fprintf(stderr, "solver error: %s (residual %.3e after %d iters)\n", e.what(),
                     e.residual, e.iterations);
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitOk;
}
