#pragma once

#include <array>
#include <optional>
#include <vector>

#include "wirefilm/energy.hpp"
#include "wirefilm/optimize.hpp"

namespace wf {

// Limit-model unknowns: a wire profile on [0,1], an in-plane film field on
// the cross-section, or both, coupled at the junction.
struct LimitState {
    enum class Kind { coupled, wire_1d, film_2d };
    Kind kind = Kind::coupled;
    std::vector<double> qa;
    std::vector<double> qb1, qb2;
};

struct LimitModelSpec {
    double alpha = 1.0;
    double beta = 1.0;
    double ell = 1.0;            // coupled model only
    double theta_measure = 1.0;  // |Theta|
    bool junction_zero = true;   // pin the junction values to 0 (coupled model)
};

// 1D wire model: |Theta| (|q'|^2 + alpha(q^2-1)^2 + |psi'|^2) + f-term,
// q(0) = q(1) = 0, psi from the antiderivative structure.
class Wire1dProblem : public EnergyProblem {
public:
    Wire1dProblem(const Grid1& g, const LimitModelSpec& spec, std::vector<double> f3_profile);

    std::size_t size() const override { return std::size_t(g_.n); }
    void project(std::span<double> x) const override;
    double energy(std::span<const double> x) const override;
    double energy_and_grad(std::span<const double> x, std::span<double> g) const override;
    const std::vector<std::uint32_t>& independent_dofs() const override { return free_; }
    EnergyBreakdown eval(std::span<const double> x) const;
    const Grid1& grid() const { return g_; }

private:
    double eval_impl(std::span<const double> x, std::span<double> g, EnergyBreakdown* bd) const;
    Grid1 g_;
    LimitModelSpec spec_;
    std::vector<double> f3_;
    std::vector<double> qw_;
    std::vector<std::uint32_t> free_;
};

// 2D film model: beta|rot q|^2 + |div q|^2 + alpha(|q|^2-1)^2 + |D psi|^2
// + f-term, q.nu = 0 on the boundary, q = 0 at the pin node.
class Film2dProblem : public EnergyProblem {
public:
    Film2dProblem(const Grid2& g, const LimitModelSpec& spec,
                  std::array<std::vector<double>, 2> f12_profile);

    std::size_t size() const override { return 2 * g_.num_nodes(); }
    void project(std::span<double> x) const override;
    double energy(std::span<const double> x) const override;
    double energy_and_grad(std::span<const double> x, std::span<double> g) const override;
    const std::vector<std::uint32_t>& independent_dofs() const override { return free_; }
    EnergyBreakdown eval(std::span<const double> x) const;
    const Grid2& grid() const { return g_; }

private:
    double eval_impl(std::span<const double> x, std::span<double> g, EnergyBreakdown* bd) const;
    Grid2 g_;
    LimitModelSpec spec_;
    std::array<std::vector<double>, 2> f12_;
    std::vector<double> qw_;
    std::vector<std::uint32_t> free_;
};

// Coupled wire-film model; 1D terms weighted |Theta|, 2D terms weighted ell,
// potentials tied at the junction.  junction_zero=true pins q_a(0), q_b(0')
// to zero; false ties them to a common value instead.
class CoupledLimitProblem : public EnergyProblem {
public:
    CoupledLimitProblem(const Grid1& g1, const Grid2& g2, const LimitModelSpec& spec,
                        std::vector<double> f3_profile,
                        std::array<std::vector<double>, 2> f12_profile);

    std::size_t size() const override { return std::size_t(g1_.n) + 2 * g2_.num_nodes(); }
    void project(std::span<double> x) const override;
    double energy(std::span<const double> x) const override;
    double energy_and_grad(std::span<const double> x, std::span<double> g) const override;
    const std::vector<std::uint32_t>& independent_dofs() const override { return free_; }
    EnergyBreakdown eval(std::span<const double> x) const;
    const Grid1& grid1() const { return g1_; }
    const Grid2& grid2() const { return g2_; }

private:
    double eval_impl(std::span<const double> x, std::span<double> g, EnergyBreakdown* bd) const;
    Grid1 g1_;
    Grid2 g2_;
    LimitModelSpec spec_;
    std::vector<double> f3_;
    std::array<std::vector<double>, 2> f12_;
    std::vector<double> qw1_, qw2_;
    std::vector<std::uint32_t> free_;
};

EnergyBreakdown eval_E0(const Grid1& g, const std::vector<double>& qa,
                        const std::vector<double>& f3_profile, double alpha,
                        double theta_measure);
EnergyBreakdown eval_Einf(const Grid2& g, const std::vector<double>& qb1,
                          const std::vector<double>& qb2,
                          const std::array<std::vector<double>, 2>& f12_profile, double alpha,
                          double beta);
EnergyBreakdown eval_E_coupled(const Grid1& g1, const Grid2& g2, const LimitState& state,
                               const std::vector<double>& f3_profile,
                               const std::array<std::vector<double>, 2>& f12_profile,
                               const LimitModelSpec& spec);

LimitState unpack_limit_state(LimitState::Kind kind, const Grid1* g1, const Grid2* g2,
                              std::span<const double> x);

// zero start plus (restarts-1) random starts, best-of-restarts
MinimizeReport minimize_with_default_starts(const EnergyProblem& prob,
                                            const OptimizerOptions& opts, std::uint64_t seed);

// The recovery construction: the wire carries (0,0,q_a) away from the
// junction layer and blends the film's in-plane values inside x3 < h_a; the
// film carries (q_b1, q_b2, 0).  Result is projected, so it satisfies the
// discrete admissibility constraints exactly.
std::vector<double> lift_limit_to_3d(const LimitState& state, const Grid1* g1, const Grid2* g2,
                                     const Coupled3dSetup& setup);

}  // namespace wf
