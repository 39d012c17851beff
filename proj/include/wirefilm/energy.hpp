#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "wirefilm/fields.hpp"
#include "wirefilm/grid.hpp"
#include "wirefilm/optimize.hpp"
#include "wirefilm/poisson.hpp"

namespace wf {

struct RegimeParams {
    Regime regime = Regime::finite;
    double ell = 1.0;  // meaningful for the finite regime
    double alpha = 1.0;
    double beta = 1.0;
    double h_a = 0.1;
    double h_b = 0.01;
    BcVariant bc = BcVariant::tangential_nu_zero;
};

struct EnergyBreakdown {
    double rot_term = 0.0;
    double div_term = 0.0;
    double fullgrad_term = 0.0;
    double doublewell_term = 0.0;
    double nonlocal_term = 0.0;
    double external_term = 0.0;
    double total = 0.0;
    double scale_a = 0.0, scale_b = 0.0;
    bool full_gradient_form = false;

    double sum() const
    {
        return rot_term + div_term + fullgrad_term + doublewell_term + nonlocal_term +
               external_term;
    }
};

enum class EnergyForm { rot_div, full_gradient };

// Grids, masks, junction map, quadrature and external fields for one
// (h_a, h_b) point.  Immutable once built; shareable across threads.
struct Coupled3dSetup {
    Grid3 ga, gb;
    BoundaryMask mask_a, mask_b;
    JunctionMap jm;
    RegimeParams params;
    std::vector<double> qwa, qwb;
    VectorField3 fa, fb;

    std::size_t na() const { return ga.num_nodes(); }
    std::size_t nb() const { return gb.num_nodes(); }
    // DOF layout: [a1][a2][a3][b1][b2][b3]
    std::size_t ndof() const { return 3 * (na() + nb()); }
};

Coupled3dSetup make_setup(const RegimeParams& params, std::array<int, 3> dims_a,
                          std::array<int, 3> dims_b);

// boundary masks, footprint pins, junction interpolation; affine and idempotent
void project_admissible(const Coupled3dSetup& s, std::span<double> x);

// Rescaled coupled energy over the flat DOF vector.  Instances hold mutable
// solver workspace, so share setups, not problems, across threads.
class Energy3dProblem : public EnergyProblem {
public:
    Energy3dProblem(const Coupled3dSetup& setup, EnergyForm form);

    std::size_t size() const override { return setup_.ndof(); }
    void project(std::span<double> x) const override;
    double energy(std::span<const double> x) const override;
    double energy_and_grad(std::span<const double> x, std::span<double> g) const override;
    const std::vector<std::uint32_t>& independent_dofs() const override { return free_dofs_; }

    // cold-start evaluation with per-term breakdown; deterministic, the
    // canonical value reported for any state
    EnergyBreakdown eval(std::span<const double> x) const;

    const Coupled3dSetup& setup() const { return setup_; }
    EnergyForm form() const { return form_; }
    CgInfo last_cg() const { return last_cg_; }

private:
    double eval_impl(std::span<const double> x, std::span<double> g, EnergyBreakdown* bd,
                     bool use_warm) const;

    const Coupled3dSetup& setup_;
    EnergyForm form_;
    std::vector<std::uint32_t> free_dofs_;
    CoupledPoisson op_;
    LinearMap precond_;
    std::vector<double> nullvec_;
    mutable std::vector<double> warm_x_;       // last potential solution, reduced dofs
    mutable CgInfo last_cg_;
    mutable std::vector<double> wk_t_, wk_u_, wk_r_[3];
    mutable std::vector<double> wk_x_, wk_b_, wk_phi_a_, wk_phi_b_, wk_lam_;
};

EnergyBreakdown eval_E_n(const Coupled3dSetup& setup, std::span<const double> x);
EnergyBreakdown eval_S_n(const Coupled3dSetup& setup, std::span<const double> x);
void grad_E_n(const Coupled3dSetup& setup, std::span<const double> x, std::span<double> g);
void grad_S_n(const Coupled3dSetup& setup, std::span<const double> x, std::span<double> g);

// views into the flat DOF vector
inline std::span<double> comp_a(const Coupled3dSetup& s, std::span<double> x, int c)
{
    return x.subspan(std::size_t(c) * s.na(), s.na());
}
inline std::span<double> comp_b(const Coupled3dSetup& s, std::span<double> x, int c)
{
    return x.subspan(3 * s.na() + std::size_t(c) * s.nb(), s.nb());
}
inline std::span<const double> comp_a(const Coupled3dSetup& s, std::span<const double> x, int c)
{
    return x.subspan(std::size_t(c) * s.na(), s.na());
}
inline std::span<const double> comp_b(const Coupled3dSetup& s, std::span<const double> x, int c)
{
    return x.subspan(3 * s.na() + std::size_t(c) * s.nb(), s.nb());
}

}  // namespace wf
