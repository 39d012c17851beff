#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wirefilm/config.hpp"
#include "wirefilm/limits.hpp"

namespace wf {

// Limit minimum for the configured regime plus the pieces the diagnostics
// and split-limit report need; h-independent, computed once per sweep.
struct LimitSolution {
    LimitState state;
    double value = 0.0;       // regime-appropriate limit minimum
    double e0_min = 0.0;      // wire-model minimum
    double einf_min = 0.0;    // film-model minimum
    bool converged = false;
};

LimitSolution solve_limit_models(const RunConfig& cfg);

std::vector<SweepRow> run_sweep(const RunConfig& cfg, int threads = 1);

struct DiagnosticsReport {
    bool pass = true;
    std::vector<std::string> flags;  // one message per violated norm column
};

// Prop-style boundedness check on the regime-scaled norm columns:
// max <= 10 x median along the schedule.
DiagnosticsReport diagnostics(const std::vector<SweepRow>& rows);

struct GradcheckReport {
    double worst = 0.0;
    std::vector<std::pair<std::string, double>> per_target;
};

// finite-difference battery over both 3D energies (both boundary-condition
// variants) and the three limit models
GradcheckReport run_gradcheck(const RunConfig& cfg);

MinimizeReport run_limit(const RunConfig& cfg);

struct Solve3dResult {
    MinimizeReport report;
    EnergyBreakdown breakdown;
};
Solve3dResult run_solve3d(const RunConfig& cfg, double h_a, double h_b, EnergyForm form,
                          BcVariant bc, int threads = 1);

}  // namespace wf
