#include "wirefilm/energy.hpp"

#include <cmath>
#include <cstring>

#include "wirefilm/kernels.hpp"
#include "wirefilm/operators.hpp"

namespace wf {

Coupled3dSetup make_setup(const RegimeParams& params, std::array<int, 3> dims_a,
                          std::array<int, 3> dims_b)
{
    Coupled3dSetup s;
    s.params = params;
    s.ga = build_grid_a(dims_a[0], dims_a[1], dims_a[2], params.h_a);
    s.gb = build_grid_b(dims_b[0], dims_b[1], dims_b[2], params.h_b);
    s.mask_a = build_boundary_mask(s.ga, params.bc);
    s.mask_b = build_boundary_mask(s.gb, params.bc);
    s.jm = build_junction_map(s.ga, s.gb, params.h_a);
    s.qwa = quad_weights(s.ga);
    s.qwb = quad_weights(s.gb);
    s.fa = VectorField3::zeros(s.ga);
    s.fb = VectorField3::zeros(s.gb);
    return s;
}

namespace {

// film top-plane footprint constraint components per variant
inline bool outside_fixed(BcVariant bc, int c)
{
    return bc == BcVariant::tangential_nu_zero ? (c == 2) : (c == 0 || c == 1);
}

}  // namespace

Energy3dProblem::Energy3dProblem(const Coupled3dSetup& setup, EnergyForm form)
    : setup_(setup), form_(form), op_(setup.ga, setup.gb, setup.jm, setup.params.regime)
{
    const auto& s = setup_;
    const std::size_t na = s.na(), nb = s.nb();
    const std::size_t plane_a = std::size_t(s.ga.n1) * s.ga.n2;
    const std::size_t plane_b = std::size_t(s.gb.n1) * s.gb.n2;
    const int kj_a = s.ga.junction_k();
    const int kj_b = s.gb.junction_k();
    free_dofs_.reserve(s.ndof());
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < na; ++i) {
            if (int(i / plane_a) == kj_a) continue;  // junction-dependent
            if (s.mask_a.fixed[c][i]) continue;      // boundary-pinned
            free_dofs_.push_back(std::uint32_t(std::size_t(c) * na + i));
        }
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < nb; ++i) {
            if (s.mask_b.fixed[c][i]) continue;
            if (int(i / plane_b) == kj_b && outside_fixed(s.params.bc, c) &&
                s.jm.outside[i - std::size_t(kj_b) * plane_b])
                continue;  // footprint-pinned
            free_dofs_.push_back(std::uint32_t(3 * na + std::size_t(c) * nb + i));
        }
    precond_ = op_.spectral_precond();
    nullvec_ = op_.nullvec();
}

void Energy3dProblem::project(std::span<double> x) const
{
    project_admissible(setup_, x);
}

void project_admissible(const Coupled3dSetup& s, std::span<double> x)
{
    const std::size_t na = s.na(), nb = s.nb();

    for (int c = 0; c < 3; ++c) {
        auto b = comp_b(s, x, c);
        const auto& fixed = s.mask_b.fixed[c];
        for (std::size_t i = 0; i < nb; ++i)
            if (fixed[i]) b[i] = 0.0;
    }
    const std::size_t top0 = std::size_t(s.gb.junction_k()) * s.gb.n1 * s.gb.n2;
    for (int c = 0; c < 3; ++c) {
        if (!outside_fixed(s.params.bc, c)) continue;
        auto b = comp_b(s, x, c);
        for (std::size_t p = 0; p < s.jm.outside.size(); ++p)
            if (s.jm.outside[p]) b[top0 + p] = 0.0;
    }
    for (int c = 0; c < 3; ++c) {
        auto a = comp_a(s, x, c);
        const auto& fixed = s.mask_a.fixed[c];
        for (std::size_t i = 0; i < na; ++i)
            if (fixed[i]) a[i] = 0.0;
    }
    // wire bottom face follows the film through the junction stencils
    const int kj_a = s.ga.junction_k();
    for (int c = 0; c < 3; ++c) {
        auto a = comp_a(s, x, c);
        auto b = comp_b(s, x, c);
        for (int j = 0; j < s.ga.n2; ++j)
            for (int i = 0; i < s.ga.n1; ++i) {
                const auto& st = s.jm.stencil[std::size_t(j) * s.ga.n1 + i];
                a[s.ga.idx(i, j, kj_a)] = st.w[0] * b[st.node[0]] + st.w[1] * b[st.node[1]] +
                                          st.w[2] * b[st.node[2]] + st.w[3] * b[st.node[3]];
            }
    }
}

double Energy3dProblem::eval_impl(std::span<const double> x, std::span<double> g,
                                  EnergyBreakdown* bd, bool use_warm) const
{
    const auto& K = kernels::ops();
    const auto& s = setup_;
    const std::size_t na = s.na(), nb = s.nb();
    const double alpha = s.params.alpha, beta = s.params.beta;
    const double wEa = s.params.h_a * s.params.h_a;
    const double wEb = s.params.h_b;

    const bool want_grad = !g.empty();
    if (want_grad) std::fill(g.begin(), g.end(), 0.0);

    const std::size_t nmax = std::max(na, nb);
    wk_t_.resize(nmax);
    wk_u_.resize(nmax);
    for (auto& r : wk_r_) r.resize(nmax);
    double* t = wk_t_.data();
    double* u = wk_u_.data();

    EnergyBreakdown out;
    out.full_gradient_form = (form_ == EnergyForm::full_gradient);
    out.scale_a = wEa;
    out.scale_b = wEb;

    // potential solve; the nonlocal term and its gradient both reuse it
    const std::size_t nphi = op_.ndof();
    wk_x_.assign(nphi, 0.0);
    wk_b_.resize(nphi);
    if (use_warm && warm_x_.size() == nphi) wk_x_ = warm_x_;
    {
        const double* pa[3] = {comp_a(s, x, 0).data(), comp_a(s, x, 1).data(),
                               comp_a(s, x, 2).data()};
        const double* pb[3] = {comp_b(s, x, 0).data(), comp_b(s, x, 1).data(),
                               comp_b(s, x, 2).data()};
        op_.rhs(pa, pb, wk_b_.data());
    }
    last_cg_ = cg_solve(
        nphi, [this](const double* in, double* o) { op_.apply(in, o); }, precond_, nullvec_,
        wk_b_.data(), wk_x_.data(), CgOptions{});
    op_.shift_mean_zero(wk_x_.data());
    wk_phi_a_.assign(wk_x_.begin(), wk_x_.begin() + na);
    wk_phi_b_.assign(wk_x_.begin() + na, wk_x_.end());
    op_.expand(wk_phi_a_.data(), wk_phi_b_.data());

    for (int dom = 0; dom < 2; ++dom) {
        const Grid3& grd = dom == 0 ? s.ga : s.gb;
        const auto& qw = dom == 0 ? s.qwa : s.qwb;
        const double wE = dom == 0 ? wEa : wEb;
        const std::size_t n = dom == 0 ? na : nb;
        const double* p[3];
        const double* f[3];
        double* gc[3] = {nullptr, nullptr, nullptr};
        for (int c = 0; c < 3; ++c) {
            p[c] = dom == 0 ? comp_a(s, x, c).data() : comp_b(s, x, c).data();
            f[c] = dom == 0 ? s.fa.comp[c].data() : s.fb.comp[c].data();
            if (want_grad) gc[c] = dom == 0 ? comp_a(s, g, c).data() : comp_b(s, g, c).data();
        }
        const double scl[3] = {grd.s1, grd.s2, grd.s3};

        if (form_ == EnergyForm::rot_div) {
            double* r1 = wk_r_[0].data();
            double* r2 = wk_r_[1].data();
            double* r3 = wk_r_[2].data();
            rot_scaled(grd, p[0], p[1], p[2], r1, r2, r3);
            out.rot_term += wE * beta *
                            (K.wsumsq(qw.data(), r1, n) + K.wsumsq(qw.data(), r2, n) +
                             K.wsumsq(qw.data(), r3, n));
            if (want_grad) {
                double* rr[3] = {r1, r2, r3};
                for (int i = 0; i < 3; ++i) {
                    const int j = (i + 1) % 3, k = (i + 2) % 3;
                    for (std::size_t m = 0; m < n; ++m) u[m] = qw[m] * rr[i][m];
                    axis_diff_t_acc(grd, j, u, gc[k], 2.0 * wE * beta * scl[j]);
                    axis_diff_t_acc(grd, k, u, gc[j], -2.0 * wE * beta * scl[k]);
                }
            }
            div_scaled(grd, p[0], p[1], p[2], t);
            out.div_term += wE * K.wsumsq(qw.data(), t, n);
            if (want_grad) {
                for (std::size_t m = 0; m < n; ++m) u[m] = qw[m] * t[m];
                for (int c = 0; c < 3; ++c) axis_diff_t_acc(grd, c, u, gc[c], 2.0 * wE * scl[c]);
            }
        } else {
            for (int c = 0; c < 3; ++c)
                for (int ax = 0; ax < 3; ++ax) {
                    axis_diff(grd, ax, p[c], t, scl[ax]);
                    out.fullgrad_term += wE * K.wsumsq(qw.data(), t, n);
                    if (want_grad) {
                        for (std::size_t m = 0; m < n; ++m) u[m] = qw[m] * t[m];
                        axis_diff_t_acc(grd, ax, u, gc[c], 2.0 * wE * scl[ax]);
                    }
                }
        }

        out.doublewell_term += wE * alpha * K.dwell_sum(qw.data(), p[0], p[1], p[2], n);
        if (want_grad)
            K.dwell_grad(4.0 * alpha * wE, qw.data(), p[0], p[1], p[2], gc[0], gc[1], gc[2], n);

        for (int c = 0; c < 3; ++c) {
            out.external_term += wE * K.wdot(qw.data(), f[c], p[c], n);
            if (want_grad)
                for (std::size_t m = 0; m < n; ++m) gc[c][m] += wE * qw[m] * f[c][m];
        }

        const double* ph = dom == 0 ? wk_phi_a_.data() : wk_phi_b_.data();
        for (int ax = 0; ax < 3; ++ax) {
            axis_diff(grd, ax, ph, t, scl[ax]);
            out.nonlocal_term += wE * K.wsumsq(qw.data(), t, n);
        }
    }

    if (want_grad) {
        // nonlocal gradient through the weak form's self-adjointness: with
        // matching weights it is 2 W (D phi); otherwise (infinity regime) the
        // correction solve A lambda = B phi supplies the right adjoint state.
        const double wPa = op_.weight_a, wPb = op_.weight_b;
        const bool weights_match = (wPa == wEa && wPb == wEb);
        const double* lam_a = wk_phi_a_.data();
        const double* lam_b = wk_phi_b_.data();
        if (!weights_match) {
            std::vector<double> bvec(nphi);
            op_.apply_weights(wk_x_.data(), bvec.data(), wEa, wEb);
            wk_lam_.assign(nphi, 0.0);
            cg_solve(
                nphi, [this](const double* in, double* o) { op_.apply(in, o); }, precond_,
                nullvec_, bvec.data(), wk_lam_.data(), CgOptions{});
            op_.expand(wk_lam_.data(), wk_lam_.data() + na);
            lam_a = wk_lam_.data();
            lam_b = wk_lam_.data() + na;
        }
        for (int dom = 0; dom < 2; ++dom) {
            const Grid3& grd = dom == 0 ? s.ga : s.gb;
            const auto& qw = dom == 0 ? s.qwa : s.qwb;
            const double wP = dom == 0 ? wPa : wPb;
            const std::size_t n = dom == 0 ? na : nb;
            const double* lm = dom == 0 ? lam_a : lam_b;
            const double scl[3] = {grd.s1, grd.s2, grd.s3};
            for (int c = 0; c < 3; ++c) {
                double* gcp = dom == 0 ? comp_a(s, g, c).data() : comp_b(s, g, c).data();
                axis_diff(grd, c, lm, t, scl[c]);
                for (std::size_t m = 0; m < n; ++m) gcp[m] += 2.0 * wP * qw[m] * t[m];
            }
        }

        // reduce: junction-dependent rows scatter onto their film sources,
        // then pinned slots drop out
        const int kj = s.ga.junction_k();
        for (int c = 0; c < 3; ++c) {
            auto ga_c = comp_a(s, g, c);
            auto gb_c = comp_b(s, g, c);
            for (int j = 0; j < s.ga.n2; ++j)
                for (int i = 0; i < s.ga.n1; ++i) {
                    const std::size_t id = s.ga.idx(i, j, kj);
                    const auto& st = s.jm.stencil[std::size_t(j) * s.ga.n1 + i];
                    const double v = ga_c[id];
                    gb_c[st.node[0]] += st.w[0] * v;
                    gb_c[st.node[1]] += st.w[1] * v;
                    gb_c[st.node[2]] += st.w[2] * v;
                    gb_c[st.node[3]] += st.w[3] * v;
                    ga_c[id] = 0.0;
                }
        }
        for (int c = 0; c < 3; ++c) {
            auto ga_c = comp_a(s, g, c);
            for (std::size_t i = 0; i < na; ++i)
                if (s.mask_a.fixed[c][i]) ga_c[i] = 0.0;
            auto gb_c = comp_b(s, g, c);
            for (std::size_t i = 0; i < nb; ++i)
                if (s.mask_b.fixed[c][i]) gb_c[i] = 0.0;
            if (outside_fixed(s.params.bc, c)) {
                const std::size_t top0 = std::size_t(s.gb.junction_k()) * s.gb.n1 * s.gb.n2;
                for (std::size_t p2 = 0; p2 < s.jm.outside.size(); ++p2)
                    if (s.jm.outside[p2]) gb_c[top0 + p2] = 0.0;
            }
        }
    }

    out.total = out.sum();
    if (bd) *bd = out;
    return out.total;
}

// Plain evaluations warm-start the potential from the last gradient point
// but never overwrite it: successive trial energies around one accepted
// state then share one CG starting point, so the solver noise correlates
// and cancels in energy differences (line searches, finite differences).
double Energy3dProblem::energy(std::span<const double> x) const
{
    return eval_impl(x, {}, nullptr, true);
}

double Energy3dProblem::energy_and_grad(std::span<const double> x, std::span<double> g) const
{
    const double e = eval_impl(x, g, nullptr, true);
    warm_x_ = wk_x_;
    return e;
}

EnergyBreakdown Energy3dProblem::eval(std::span<const double> x) const
{
    EnergyBreakdown bd;
    eval_impl(x, {}, &bd, false);
    return bd;
}

EnergyBreakdown eval_E_n(const Coupled3dSetup& setup, std::span<const double> x)
{
    return Energy3dProblem(setup, EnergyForm::rot_div).eval(x);
}

EnergyBreakdown eval_S_n(const Coupled3dSetup& setup, std::span<const double> x)
{
    return Energy3dProblem(setup, EnergyForm::full_gradient).eval(x);
}

void grad_E_n(const Coupled3dSetup& setup, std::span<const double> x, std::span<double> g)
{
    Energy3dProblem(setup, EnergyForm::rot_div).energy_and_grad(x, g);
}

void grad_S_n(const Coupled3dSetup& setup, std::span<const double> x, std::span<double> g)
{
    Energy3dProblem(setup, EnergyForm::full_gradient).energy_and_grad(x, g);
}

}  // namespace wf
