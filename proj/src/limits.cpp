#include "wirefilm/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "wirefilm/kernels.hpp"
#include "wirefilm/operators.hpp"
#include "wirefilm/poisson.hpp"

namespace wf {

namespace {

// adjoint of the cumulative-trapezoid antiderivative
void cumtrapz_transpose(const Grid1& g, const double* y, double* out)
{
    const int n = g.n;
    double suffix = 0.0;
    for (int m = n - 1; m >= 0; --m) {
        if (m >= 1)
            out[m] = 0.5 * g.d * y[m] + g.d * suffix;
        else
            out[m] = 0.5 * g.d * suffix;
        suffix += y[m];
    }
}

}  // namespace

Wire1dProblem::Wire1dProblem(const Grid1& g, const LimitModelSpec& spec,
                             std::vector<double> f3_profile)
    : g_(g), spec_(spec), f3_(std::move(f3_profile)), qw_(quad_weights(g))
{
    if (f3_.empty()) f3_.assign(std::size_t(g_.n), 0.0);
    for (int k = 1; k + 1 < g_.n; ++k) free_.push_back(std::uint32_t(k));
}

void Wire1dProblem::project(std::span<double> x) const
{
    x[0] = 0.0;
    x[std::size_t(g_.n) - 1] = 0.0;
}

double Wire1dProblem::eval_impl(std::span<const double> x, std::span<double> g,
                                EnergyBreakdown* bd) const
{
    const auto& K = kernels::ops();
    const std::size_t n = std::size_t(g_.n);
    const bool want_grad = !g.empty();
    if (want_grad) std::fill(g.begin(), g.end(), 0.0);

    std::vector<double> t(n), u(n), zeros(n, 0.0), scratch(n, 0.0);

    EnergyBreakdown out;
    out.scale_a = spec_.theta_measure;

    diff_1d(g_, x.data(), t.data(), 1.0);
    out.fullgrad_term = spec_.theta_measure * K.wsumsq(qw_.data(), t.data(), n);
    if (want_grad) {
        for (std::size_t i = 0; i < n; ++i) u[i] = qw_[i] * t[i];
        diff_1d_t_acc(g_, u.data(), g.data(), 2.0 * spec_.theta_measure);
    }

    out.doublewell_term =
        spec_.theta_measure * spec_.alpha *
        K.dwell_sum(qw_.data(), zeros.data(), zeros.data(), x.data(), n);
    if (want_grad)
        K.dwell_grad(4.0 * spec_.alpha * spec_.theta_measure, qw_.data(), zeros.data(),
                     zeros.data(), x.data(), scratch.data(), scratch.data(), g.data(), n);

    const auto psi = solve_psi_1d(g_, std::vector<double>(x.begin(), x.end()));
    diff_1d(g_, psi.data(), t.data(), 1.0);
    out.nonlocal_term = spec_.theta_measure * K.wsumsq(qw_.data(), t.data(), n);
    if (want_grad) {
        // chain rule through psi = meanzero(cumtrapz(q))
        for (std::size_t i = 0; i < n; ++i) u[i] = qw_[i] * t[i];
        std::vector<double> a1(n, 0.0), a3(n);
        diff_1d_t_acc(g_, u.data(), a1.data(), 1.0);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a1[i];
        for (std::size_t i = 0; i < n; ++i) a1[i] -= qw_[i] * s;
        cumtrapz_transpose(g_, a1.data(), a3.data());
        K.axpy(2.0 * spec_.theta_measure, a3.data(), g.data(), n);
    }

    out.external_term = K.wdot(qw_.data(), f3_.data(), x.data(), n);
    if (want_grad)
        for (std::size_t i = 0; i < n; ++i) g[i] += qw_[i] * f3_[i];

    if (want_grad) {
        g[0] = 0.0;
        g[n - 1] = 0.0;
    }
    out.total = out.sum();
    if (bd) *bd = out;
    return out.total;
}

double Wire1dProblem::energy(std::span<const double> x) const
{
    return eval_impl(x, {}, nullptr);
}

double Wire1dProblem::energy_and_grad(std::span<const double> x, std::span<double> g) const
{
    return eval_impl(x, g, nullptr);
}

EnergyBreakdown Wire1dProblem::eval(std::span<const double> x) const
{
    EnergyBreakdown bd;
    eval_impl(x, {}, &bd);
    return bd;
}

Film2dProblem::Film2dProblem(const Grid2& g, const LimitModelSpec& spec,
                             std::array<std::vector<double>, 2> f12_profile)
    : g_(g), spec_(spec), f12_(std::move(f12_profile)), qw_(quad_weights(g))
{
    const std::size_t m = g_.num_nodes();
    for (auto& f : f12_)
        if (f.empty()) f.assign(m, 0.0);
    const std::size_t pin = g_.idx(g_.pin_i, g_.pin_j);
    for (int c = 0; c < 2; ++c)
        for (int j = 0; j < g_.n2; ++j)
            for (int i = 0; i < g_.n1; ++i) {
                const std::size_t id = g_.idx(i, j);
                if (id == pin) continue;
                if (c == 0 && (i == 0 || i == g_.n1 - 1)) continue;
                if (c == 1 && (j == 0 || j == g_.n2 - 1)) continue;
                free_.push_back(std::uint32_t(std::size_t(c) * m + id));
            }
}

void Film2dProblem::project(std::span<double> x) const
{
    const std::size_t m = g_.num_nodes();
    for (int j = 0; j < g_.n2; ++j) {
        x[g_.idx(0, j)] = 0.0;
        x[g_.idx(g_.n1 - 1, j)] = 0.0;
    }
    for (int i = 0; i < g_.n1; ++i) {
        x[m + g_.idx(i, 0)] = 0.0;
        x[m + g_.idx(i, g_.n2 - 1)] = 0.0;
    }
    const std::size_t pin = g_.idx(g_.pin_i, g_.pin_j);
    x[pin] = 0.0;
    x[m + pin] = 0.0;
}

double Film2dProblem::eval_impl(std::span<const double> x, std::span<double> g,
                                EnergyBreakdown* bd) const
{
    const auto& K = kernels::ops();
    const std::size_t m = g_.num_nodes();
    const bool want_grad = !g.empty();
    if (want_grad) std::fill(g.begin(), g.end(), 0.0);

    const double* q1 = x.data();
    const double* q2 = x.data() + m;
    double* g1 = want_grad ? g.data() : nullptr;
    double* g2 = want_grad ? g.data() + m : nullptr;

    std::vector<double> t(m), u(m), zeros(m, 0.0), scratch(m, 0.0);

    EnergyBreakdown out;

    // rot = d1 q2 - d2 q1
    axis_diff(g_, 0, q2, t.data(), 1.0);
    {
        std::vector<double> t2(m);
        axis_diff(g_, 1, q1, t2.data(), 1.0);
        for (std::size_t i = 0; i < m; ++i) t[i] -= t2[i];
    }
    out.rot_term = spec_.beta * K.wsumsq(qw_.data(), t.data(), m);
    if (want_grad) {
        for (std::size_t i = 0; i < m; ++i) u[i] = qw_[i] * t[i];
        axis_diff_t_acc(g_, 0, u.data(), g2, 2.0 * spec_.beta);
        axis_diff_t_acc(g_, 1, u.data(), g1, -2.0 * spec_.beta);
    }

    // div = d1 q1 + d2 q2
    axis_diff(g_, 0, q1, t.data(), 1.0);
    {
        std::vector<double> t2(m);
        axis_diff(g_, 1, q2, t2.data(), 1.0);
        for (std::size_t i = 0; i < m; ++i) t[i] += t2[i];
    }
    out.div_term = K.wsumsq(qw_.data(), t.data(), m);
    if (want_grad) {
        for (std::size_t i = 0; i < m; ++i) u[i] = qw_[i] * t[i];
        axis_diff_t_acc(g_, 0, u.data(), g1, 2.0);
        axis_diff_t_acc(g_, 1, u.data(), g2, 2.0);
    }

    out.doublewell_term = spec_.alpha * K.dwell_sum(qw_.data(), q1, q2, zeros.data(), m);
    if (want_grad)
        K.dwell_grad(4.0 * spec_.alpha, qw_.data(), q1, q2, zeros.data(), g1, g2,
                     scratch.data(), m);

    const auto psi = solve_psi_2d(g_, std::vector<double>(q1, q1 + m),
                                  std::vector<double>(q2, q2 + m));
    for (int ax = 0; ax < 2; ++ax) {
        axis_diff(g_, ax, psi.data(), t.data(), 1.0);
        out.nonlocal_term += K.wsumsq(qw_.data(), t.data(), m);
        if (want_grad) {
            double* gc = ax == 0 ? g1 : g2;
            for (std::size_t i = 0; i < m; ++i) gc[i] += 2.0 * qw_[i] * t[i];
        }
    }

    out.external_term = K.wdot(qw_.data(), f12_[0].data(), q1, m) +
                        K.wdot(qw_.data(), f12_[1].data(), q2, m);
    if (want_grad)
        for (int c = 0; c < 2; ++c) {
            double* gc = c == 0 ? g1 : g2;
            for (std::size_t i = 0; i < m; ++i) gc[i] += qw_[i] * f12_[c][i];
        }

    if (want_grad) {
        for (int j = 0; j < g_.n2; ++j) {
            g1[g_.idx(0, j)] = 0.0;
            g1[g_.idx(g_.n1 - 1, j)] = 0.0;
        }
        for (int i = 0; i < g_.n1; ++i) {
            g2[g_.idx(i, 0)] = 0.0;
            g2[g_.idx(i, g_.n2 - 1)] = 0.0;
        }
        const std::size_t pin = g_.idx(g_.pin_i, g_.pin_j);
        g1[pin] = 0.0;
        g2[pin] = 0.0;
    }

    out.total = out.sum();
    if (bd) *bd = out;
    return out.total;
}

double Film2dProblem::energy(std::span<const double> x) const
{
    return eval_impl(x, {}, nullptr);
}

double Film2dProblem::energy_and_grad(std::span<const double> x, std::span<double> g) const
{
    return eval_impl(x, g, nullptr);
}

EnergyBreakdown Film2dProblem::eval(std::span<const double> x) const
{
    EnergyBreakdown bd;
    eval_impl(x, {}, &bd);
    return bd;
}

CoupledLimitProblem::CoupledLimitProblem(const Grid1& g1, const Grid2& g2,
                                         const LimitModelSpec& spec,
                                         std::vector<double> f3_profile,
                                         std::array<std::vector<double>, 2> f12_profile)
    : g1_(g1), g2_(g2), spec_(spec), f3_(std::move(f3_profile)), f12_(std::move(f12_profile)),
      qw1_(quad_weights(g1)), qw2_(quad_weights(g2))
{
    const std::size_t n = std::size_t(g1_.n), m = g2_.num_nodes();
    if (f3_.empty()) f3_.assign(n, 0.0);
    for (auto& f : f12_)
        if (f.empty()) f.assign(m, 0.0);
    const std::size_t pin = g2_.idx(g2_.pin_i, g2_.pin_j);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == n - 1) continue;
        if (k == 0 && spec_.junction_zero) continue;
        free_.push_back(std::uint32_t(k));
    }
    for (int c = 0; c < 2; ++c)
        for (int j = 0; j < g2_.n2; ++j)
            for (int i = 0; i < g2_.n1; ++i) {
                const std::size_t id = g2_.idx(i, j);
                if (id == pin && spec_.junction_zero) continue;
                if (c == 0 && (i == 0 || i == g2_.n1 - 1)) continue;
                if (c == 1 && (j == 0 || j == g2_.n2 - 1)) continue;
                free_.push_back(std::uint32_t(n + std::size_t(c) * m + id));
            }
}

void CoupledLimitProblem::project(std::span<double> x) const
{
    const std::size_t n = std::size_t(g1_.n), m = g2_.num_nodes();
    const std::size_t pin = g2_.idx(g2_.pin_i, g2_.pin_j);
    x[n - 1] = 0.0;
    for (int j = 0; j < g2_.n2; ++j) {
        x[n + g2_.idx(0, j)] = 0.0;
        x[n + g2_.idx(g2_.n1 - 1, j)] = 0.0;
    }
    for (int i = 0; i < g2_.n1; ++i) {
        x[n + m + g2_.idx(i, 0)] = 0.0;
        x[n + m + g2_.idx(i, g2_.n2 - 1)] = 0.0;
    }
    if (spec_.junction_zero) {
        x[0] = 0.0;
        x[n + pin] = 0.0;
        x[n + m + pin] = 0.0;
    } else {
        const double v = (x[0] + x[n + pin] + x[n + m + pin]) / 3.0;
        x[0] = v;
        x[n + pin] = v;
        x[n + m + pin] = v;
    }
}

double CoupledLimitProblem::eval_impl(std::span<const double> x, std::span<double> g,
                                      EnergyBreakdown* bd) const
{
    const auto& K = kernels::ops();
    const std::size_t n = std::size_t(g1_.n), m = g2_.num_nodes();
    const bool want_grad = !g.empty();
    if (want_grad) std::fill(g.begin(), g.end(), 0.0);

    const double* qa = x.data();
    const double* q1 = x.data() + n;
    const double* q2 = x.data() + n + m;
    double* ga = want_grad ? g.data() : nullptr;
    double* g1 = want_grad ? g.data() + n : nullptr;
    double* g2 = want_grad ? g.data() + n + m : nullptr;

    EnergyBreakdown out;
    out.scale_a = spec_.theta_measure;
    out.scale_b = spec_.ell;

    std::vector<double> t1(n), u1(n), t2(m), u2(m), zeros1(n, 0.0), zeros2(m, 0.0),
        scratch1(n, 0.0), scratch2(m, 0.0);

    // 1D terms
    diff_1d(g1_, qa, t1.data(), 1.0);
    out.fullgrad_term = spec_.theta_measure * K.wsumsq(qw1_.data(), t1.data(), n);
    if (want_grad) {
        for (std::size_t i = 0; i < n; ++i) u1[i] = qw1_[i] * t1[i];
        diff_1d_t_acc(g1_, u1.data(), ga, 2.0 * spec_.theta_measure);
    }
    out.doublewell_term = spec_.theta_measure * spec_.alpha *
                          K.dwell_sum(qw1_.data(), zeros1.data(), zeros1.data(), qa, n);
    if (want_grad)
        K.dwell_grad(4.0 * spec_.alpha * spec_.theta_measure, qw1_.data(), zeros1.data(),
                     zeros1.data(), qa, scratch1.data(), scratch1.data(), ga, n);
    out.external_term = K.wdot(qw1_.data(), f3_.data(), qa, n);
    if (want_grad)
        for (std::size_t i = 0; i < n; ++i) ga[i] += qw1_[i] * f3_[i];

    // 2D terms (ell-weighted)
    {
        std::vector<double> rot(m), tmp(m);
        axis_diff(g2_, 0, q2, rot.data(), 1.0);
        axis_diff(g2_, 1, q1, tmp.data(), 1.0);
        for (std::size_t i = 0; i < m; ++i) rot[i] -= tmp[i];
        out.rot_term = spec_.ell * spec_.beta * K.wsumsq(qw2_.data(), rot.data(), m);
        if (want_grad) {
            for (std::size_t i = 0; i < m; ++i) u2[i] = qw2_[i] * rot[i];
            axis_diff_t_acc(g2_, 0, u2.data(), g2, 2.0 * spec_.ell * spec_.beta);
            axis_diff_t_acc(g2_, 1, u2.data(), g1, -2.0 * spec_.ell * spec_.beta);
        }
        std::vector<double> dv(m);
        axis_diff(g2_, 0, q1, dv.data(), 1.0);
        axis_diff(g2_, 1, q2, tmp.data(), 1.0);
        for (std::size_t i = 0; i < m; ++i) dv[i] += tmp[i];
        out.div_term = spec_.ell * K.wsumsq(qw2_.data(), dv.data(), m);
        if (want_grad) {
            for (std::size_t i = 0; i < m; ++i) u2[i] = qw2_[i] * dv[i];
            axis_diff_t_acc(g2_, 0, u2.data(), g1, 2.0 * spec_.ell);
            axis_diff_t_acc(g2_, 1, u2.data(), g2, 2.0 * spec_.ell);
        }
    }
    out.doublewell_term +=
        spec_.ell * spec_.alpha * K.dwell_sum(qw2_.data(), q1, q2, zeros2.data(), m);
    if (want_grad)
        K.dwell_grad(4.0 * spec_.alpha * spec_.ell, qw2_.data(), q1, q2, zeros2.data(), g1, g2,
                     scratch2.data(), m);
    out.external_term += spec_.ell * (K.wdot(qw2_.data(), f12_[0].data(), q1, m) +
                                      K.wdot(qw2_.data(), f12_[1].data(), q2, m));
    if (want_grad)
        for (int c = 0; c < 2; ++c) {
            double* gc = c == 0 ? g1 : g2;
            for (std::size_t i = 0; i < m; ++i) gc[i] += spec_.ell * qw2_[i] * f12_[c][i];
        }

    // coupled nonlocal pair
    const auto psi = solve_psi_coupled(g1_, g2_, std::vector<double>(qa, qa + n),
                                       std::vector<double>(q1, q1 + m),
                                       std::vector<double>(q2, q2 + m), spec_.ell,
                                       spec_.theta_measure);
    diff_1d(g1_, psi.psi_a.data(), t1.data(), 1.0);
    out.nonlocal_term = spec_.theta_measure * K.wsumsq(qw1_.data(), t1.data(), n);
    if (want_grad)
        for (std::size_t i = 0; i < n; ++i)
            ga[i] += 2.0 * spec_.theta_measure * qw1_[i] * t1[i];
    for (int ax = 0; ax < 2; ++ax) {
        axis_diff(g2_, ax, psi.psi_b.data(), t2.data(), 1.0);
        out.nonlocal_term += spec_.ell * K.wsumsq(qw2_.data(), t2.data(), m);
        if (want_grad) {
            double* gc = ax == 0 ? g1 : g2;
            for (std::size_t i = 0; i < m; ++i) gc[i] += 2.0 * spec_.ell * qw2_[i] * t2[i];
        }
    }

    if (want_grad) {
        const std::size_t pin = g2_.idx(g2_.pin_i, g2_.pin_j);
        ga[n - 1] = 0.0;
        for (int j = 0; j < g2_.n2; ++j) {
            g1[g2_.idx(0, j)] = 0.0;
            g1[g2_.idx(g2_.n1 - 1, j)] = 0.0;
        }
        for (int i = 0; i < g2_.n1; ++i) {
            g2[g2_.idx(i, 0)] = 0.0;
            g2[g2_.idx(i, g2_.n2 - 1)] = 0.0;
        }
        if (spec_.junction_zero) {
            ga[0] = 0.0;
            g1[pin] = 0.0;
            g2[pin] = 0.0;
        } else {
            const double v = (ga[0] + g1[pin] + g2[pin]) / 3.0;
            ga[0] = v;
            g1[pin] = v;
            g2[pin] = v;
        }
    }

    out.total = out.sum();
    if (bd) *bd = out;
    return out.total;
}

double CoupledLimitProblem::energy(std::span<const double> x) const
{
    return eval_impl(x, {}, nullptr);
}

double CoupledLimitProblem::energy_and_grad(std::span<const double> x,
                                            std::span<double> g) const
{
    return eval_impl(x, g, nullptr);
}

EnergyBreakdown CoupledLimitProblem::eval(std::span<const double> x) const
{
    EnergyBreakdown bd;
    eval_impl(x, {}, &bd);
    return bd;
}

namespace {

void require_admissible(bool ok, const char* what)
{
    if (!ok) throw std::invalid_argument(std::string("limit state violates ") + what);
}

constexpr double kAdmissTol = 1e-12;

}  // namespace

EnergyBreakdown eval_E0(const Grid1& g, const std::vector<double>& qa,
                        const std::vector<double>& f3_profile, double alpha,
                        double theta_measure)
{
    require_admissible(std::abs(qa.front()) <= kAdmissTol && std::abs(qa.back()) <= kAdmissTol,
                       "q(0) = q(1) = 0");
    LimitModelSpec spec;
    spec.alpha = alpha;
    spec.theta_measure = theta_measure;
    return Wire1dProblem(g, spec, f3_profile).eval(qa);
}

EnergyBreakdown eval_Einf(const Grid2& g, const std::vector<double>& qb1,
                          const std::vector<double>& qb2,
                          const std::array<std::vector<double>, 2>& f12_profile, double alpha,
                          double beta)
{
    for (int j = 0; j < g.n2; ++j)
        require_admissible(std::abs(qb1[g.idx(0, j)]) <= kAdmissTol &&
                               std::abs(qb1[g.idx(g.n1 - 1, j)]) <= kAdmissTol,
                           "q . nu = 0 on the x1 walls");
    for (int i = 0; i < g.n1; ++i)
        require_admissible(std::abs(qb2[g.idx(i, 0)]) <= kAdmissTol &&
                               std::abs(qb2[g.idx(i, g.n2 - 1)]) <= kAdmissTol,
                           "q . nu = 0 on the x2 walls");
    const std::size_t pin = g.idx(g.pin_i, g.pin_j);
    require_admissible(std::abs(qb1[pin]) <= kAdmissTol && std::abs(qb2[pin]) <= kAdmissTol,
                       "q(0') = 0");
    LimitModelSpec spec;
    spec.alpha = alpha;
    spec.beta = beta;
    std::vector<double> x(2 * g.num_nodes());
    std::copy(qb1.begin(), qb1.end(), x.begin());
    std::copy(qb2.begin(), qb2.end(), x.begin() + g.num_nodes());
    return Film2dProblem(g, spec, f12_profile).eval(x);
}

EnergyBreakdown eval_E_coupled(const Grid1& g1, const Grid2& g2, const LimitState& state,
                               const std::vector<double>& f3_profile,
                               const std::array<std::vector<double>, 2>& f12_profile,
                               const LimitModelSpec& spec)
{
    std::vector<double> x(std::size_t(g1.n) + 2 * g2.num_nodes(), 0.0);
    if (!state.qa.empty()) std::copy(state.qa.begin(), state.qa.end(), x.begin());
    if (!state.qb1.empty())
        std::copy(state.qb1.begin(), state.qb1.end(), x.begin() + g1.n);
    if (!state.qb2.empty())
        std::copy(state.qb2.begin(), state.qb2.end(), x.begin() + g1.n + g2.num_nodes());
    return CoupledLimitProblem(g1, g2, spec, f3_profile, f12_profile).eval(x);
}

LimitState unpack_limit_state(LimitState::Kind kind, const Grid1* g1, const Grid2* g2,
                              std::span<const double> x)
{
    LimitState st;
    st.kind = kind;
    if (kind == LimitState::Kind::wire_1d) {
        st.qa.assign(x.begin(), x.begin() + g1->n);
    } else if (kind == LimitState::Kind::film_2d) {
        const std::size_t m = g2->num_nodes();
        st.qb1.assign(x.begin(), x.begin() + m);
        st.qb2.assign(x.begin() + m, x.begin() + 2 * m);
    } else {
        const std::size_t n = std::size_t(g1->n), m = g2->num_nodes();
        st.qa.assign(x.begin(), x.begin() + n);
        st.qb1.assign(x.begin() + n, x.begin() + n + m);
        st.qb2.assign(x.begin() + n + m, x.begin() + n + 2 * m);
    }
    return st;
}

MinimizeReport minimize_with_default_starts(const EnergyProblem& prob,
                                            const OptimizerOptions& opts, std::uint64_t seed)
{
    std::vector<std::vector<double>> starts;
    starts.push_back(make_zero_start(prob));
    for (int r = 1; r < std::max(1, opts.restarts); ++r)
        starts.push_back(make_random_start(prob, derive_seed(seed, std::uint64_t(r))));
    return minimize(prob, std::move(starts), opts);
}

namespace {

double sample_linear(const Grid1& g, const std::vector<double>& v, double x)
{
    const double r = x / g.d;
    const int i0 = std::min(std::max(int(std::floor(r)), 0), g.n - 2);
    const double u = std::min(std::max(r - i0, 0.0), 1.0);
    return (1.0 - u) * v[std::size_t(i0)] + u * v[std::size_t(i0) + 1];
}

double sample_bilinear(const Grid2& g, const std::vector<double>& v, double x1, double x2)
{
    const double r1 = (x1 + 0.5) / g.d1;
    const double r2 = (x2 + 0.5) / g.d2;
    const int i0 = std::min(std::max(int(std::floor(r1)), 0), g.n1 - 2);
    const int j0 = std::min(std::max(int(std::floor(r2)), 0), g.n2 - 2);
    const double u = std::min(std::max(r1 - i0, 0.0), 1.0);
    const double w = std::min(std::max(r2 - j0, 0.0), 1.0);
    return (1 - u) * (1 - w) * v[g.idx(i0, j0)] + u * (1 - w) * v[g.idx(i0 + 1, j0)] +
           (1 - u) * w * v[g.idx(i0, j0 + 1)] + u * w * v[g.idx(i0 + 1, j0 + 1)];
}

}  // namespace

std::vector<double> lift_limit_to_3d(const LimitState& state, const Grid1* g1, const Grid2* g2,
                                     const Coupled3dSetup& setup)
{
    std::vector<double> x(setup.ndof(), 0.0);
    const auto& ga = setup.ga;
    const auto& gb = setup.gb;
    const double h_a = setup.params.h_a;
    const bool has_qa = !state.qa.empty() && g1;
    const bool has_qb = !state.qb1.empty() && g2;

    auto a1 = comp_a(setup, std::span<double>(x), 0);
    auto a2 = comp_a(setup, std::span<double>(x), 1);
    auto a3 = comp_a(setup, std::span<double>(x), 2);
    for (int k = 0; k < ga.n3; ++k) {
        const double x3 = ga.x3(k);
        const double blend = (x3 < h_a) ? (h_a - x3) / h_a : 0.0;
        for (int j = 0; j < ga.n2; ++j)
            for (int i = 0; i < ga.n1; ++i) {
                const std::size_t id = ga.idx(i, j, k);
                if (has_qa) a3[id] = sample_linear(*g1, state.qa, x3);
                if (has_qb && blend > 0.0) {
                    const double y1 = h_a * ga.x1(i);
                    const double y2 = h_a * ga.x2(j);
                    a1[id] = blend * sample_bilinear(*g2, state.qb1, y1, y2);
                    a2[id] = blend * sample_bilinear(*g2, state.qb2, y1, y2);
                }
            }
    }
    if (has_qb) {
        auto b1 = comp_b(setup, std::span<double>(x), 0);
        auto b2 = comp_b(setup, std::span<double>(x), 1);
        for (int k = 0; k < gb.n3; ++k)
            for (int j = 0; j < gb.n2; ++j)
                for (int i = 0; i < gb.n1; ++i) {
                    const std::size_t id = gb.idx(i, j, k);
                    b1[id] = sample_bilinear(*g2, state.qb1, gb.x1(i), gb.x2(j));
                    b2[id] = sample_bilinear(*g2, state.qb2, gb.x1(i), gb.x2(j));
                }
    }
    project_admissible(setup, x);
    return x;
}

}  // namespace wf
