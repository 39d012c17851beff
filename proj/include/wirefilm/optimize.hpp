#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wirefilm/fields.hpp"

namespace wf {

enum class InitKind { zero, random_unitish, lifted };

struct OptimizerOptions {
    int max_iters = 5000;
    double grad_tol = 1e-6;      // projected gradient max-norm
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
    double init_step = 1.0;
    int restarts = 4;
    InitKind init_kind = InitKind::zero;
};

// Constrained energy over a flat DOF vector.  project() maps any vector onto
// the constraint set (an affine map: pinned entries zeroed, dependent entries
// recomputed); gradients come back reduced, i.e. zero on pinned/dependent
// slots with dependent contributions accumulated onto their sources.
class EnergyProblem {
public:
    virtual ~EnergyProblem() = default;
    virtual std::size_t size() const = 0;
    virtual void project(std::span<double> x) const = 0;
    virtual double energy(std::span<const double> x) const = 0;
    virtual double energy_and_grad(std::span<const double> x, std::span<double> g) const = 0;
    // DOFs the optimizer and gradcheck may treat as free
    virtual const std::vector<std::uint32_t>& independent_dofs() const = 0;
};

struct MinimizeReport {
    std::vector<double> state;
    double energy = 0.0;
    int iterations = 0;   // of the best restart
    int restarts_used = 0;
    bool converged = false;
    int best_restart = 0;
    std::vector<double> restart_energies;  // per-restart finals, for spread logging
};

// One descent run from x0 (projected in place).
struct SingleRun {
    double energy = 0.0;
    int iterations = 0;
    bool converged = false;
};
SingleRun minimize_single(const EnergyProblem& prob, std::vector<double>& x,
                          const OptimizerOptions& opts);

// Best-of-starts projected gradient descent; ties break toward the lower
// start index.  Deterministic given the starts.
MinimizeReport minimize(const EnergyProblem& prob, std::vector<std::vector<double>> starts,
                        const OptimizerOptions& opts);

std::vector<double> make_zero_start(const EnergyProblem& prob);
// components uniform in [-1,1], then projected
std::vector<double> make_random_start(const EnergyProblem& prob, std::uint64_t seed);

// Central finite differences on n_probes random independent DOFs; returns the
// worst relative discrepancy against the analytic projected gradient.
double gradcheck(const EnergyProblem& prob, std::span<const double> x, int n_probes,
                 double fd_step, std::uint64_t seed);

}  // namespace wf
