#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "wirefilm/fields.hpp"
#include "wirefilm/grid.hpp"

namespace wf {

struct SolverError : std::runtime_error {
    double residual;
    int iterations;
    SolverError(const std::string& what, double res, int it)
        : std::runtime_error(what), residual(res), iterations(it) {}
};

struct CgInfo {
    int iterations = 0;
    double rel_residual = 0.0;
};

struct CgOptions {
    double tol = 1e-12;   // relative residual
    int max_iters = 0;    // 0: max(500, 20*sqrt(n))
};

// Preconditioned CG for a symmetric positive semidefinite operator whose
// nullspace is spanned by `nullvec` (may be empty).  The preconditioned
// residual is re-projected against the nullspace every iteration.  x is the
// initial guess and the solution.  Throws SolverError past max_iters.
using LinearMap = std::function<void(const double*, double*)>;
CgInfo cg_solve(std::size_t n, const LinearMap& apply, const LinearMap& precond,
                const std::vector<double>& nullvec, const double* b, double* x,
                const CgOptions& opts);
CgInfo cg_solve(std::size_t n, const LinearMap& apply, const std::vector<double>& jacobi_diag,
                const std::vector<double>& nullvec, const double* b, double* x,
                const CgOptions& opts);

// Cyclic Jacobi eigensolver for a dense symmetric matrix (row-major).
// Returns eigenvalues ascending-ish (unsorted) with matching eigenvector
// columns in V (row-major, column k = eigenvector k).
void jacobi_eigen_sym(int n, std::vector<double>& a, std::vector<double>& evals,
                      std::vector<double>& evecs);

enum class Regime { finite, zero, infinity };

// Potential pair for the rescaled 3D problem; phi_a's junction plane is
// interpolation-consistent with phi_b's by construction.
struct PotentialPair {
    std::vector<double> phi_a, phi_b;
};

struct LimitPotential {
    std::vector<double> psi_a;  // on [0,1]
    std::vector<double> psi_b;  // on the cross-section
};

// Weak-form weights: (h_a^2, h_b) with the wire-mean normalization for the
// finite and zero regimes, (h_a^2, h_b^2) with the film-mean normalization
// for the infinity regime.
struct CoupledPoisson {
    CoupledPoisson(const Grid3& ga, const Grid3& gb, const JunctionMap& jm, Regime regime);

    const Grid3& ga;
    const Grid3& gb;
    const JunctionMap& jm;
    Regime regime;
    double weight_a, weight_b;
    std::vector<double> qwa, qwb;

    std::size_t na() const { return ga.num_nodes(); }
    std::size_t nb() const { return gb.num_nodes(); }
    std::size_t ndof() const { return na() + nb(); }

    // copy film top-plane values onto the wire junction plane via the stencils
    void expand(double* phi_a, const double* phi_b) const;
    // scatter wire junction-plane entries back into the film and zero them
    void reduce(double* ya, double* yb) const;

    void apply(const double* x, double* y) const;          // weak-form operator
    void apply_weights(const double* x, double* y, double wa, double wb) const;
    void rhs(const VectorField3& pa, const VectorField3& pb, double* b) const;
    void rhs(const double* const pa[3], const double* const pb[3], double* b) const;
    std::vector<double> jacobi_diag() const;
    std::vector<double> nullvec() const;
    // weighted mean over the normalization domain, on expanded dofs
    double norm_mean(const double* x) const;
    void shift_mean_zero(double* x) const;

    // Exact per-domain solve in the tensor eigenbasis of the separable part
    // of the operator; only the junction coupling is left to CG.
    LinearMap spectral_precond() const;

private:
    // per-domain, per-axis eigenbasis of G^T diag(w) G v = lambda diag(w) v
    struct AxisBasis {
        std::vector<double> V;      // n x n, column k = mode k
        std::vector<double> lam;    // eigenvalues, >= 0
    };
    struct DomainBasis {
        AxisBasis axis[3];
        std::vector<double> dinv;   // pseudo-inverted modal diagonal
    };
    DomainBasis build_basis(const Grid3& g, double weight) const;
    mutable bool basis_built_ = false;
    mutable DomainBasis basis_a_, basis_b_;
};

// Solves the coupled rescaled potential problem.  warm, when nonnull and
// correctly sized, provides the CG initial guess.
PotentialPair solve_coupled_potential(const VectorField3& pa, const VectorField3& pb,
                                      const Grid3& ga, const Grid3& gb, const JunctionMap& jm,
                                      Regime regime, CgInfo* info = nullptr,
                                      const PotentialPair* warm = nullptr,
                                      const CgOptions& opts = {});

// d psi / dx3 = q with zero mean: cumulative trapezoid plus a mean shift.
std::vector<double> solve_psi_1d(const Grid1& g, const std::vector<double>& q);

// Neumann problem on the cross-section driven by an in-plane field, zero mean.
std::vector<double> solve_psi_2d(const Grid2& g, const std::vector<double>& q1,
                                 const std::vector<double>& q2, CgInfo* info = nullptr,
                                 const CgOptions& opts = {});

// Coupled 1D-2D limit potential: psi_a(0) aliases psi_b at the pin node,
// the 1D mean is zero; weights are |Theta| and ell.
LimitPotential solve_psi_coupled(const Grid1& g1, const Grid2& g2,
                                 const std::vector<double>& qa, const std::vector<double>& qb1,
                                 const std::vector<double>& qb2, double ell,
                                 double theta_measure = 1.0, CgInfo* info = nullptr,
                                 const CgOptions& opts = {});

}  // namespace wf
