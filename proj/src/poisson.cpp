#include "wirefilm/poisson.hpp"

#include <cmath>
#include <cstring>

#include "wirefilm/kernels.hpp"
#include "wirefilm/operators.hpp"

namespace wf {

namespace {

void project_out(const std::vector<double>& nullvec, double nn, double* v, std::size_t n)
{
    if (nullvec.empty()) return;
    const double t = kernels::ops().dot(nullvec.data(), v, n) / nn;
    kernels::ops().axpy(-t, nullvec.data(), v, n);
}

// 1D column sums of w[m]*D[m,c]^2 for the Jacobi diagonal of D^T diag(w) D
std::vector<double> colsq(int n, double d, const std::vector<double>& w)
{
    std::vector<double> out(n, 0.0);
    const double c = 1.0 / (2.0 * d);
    auto add = [&](int col, int row, double coef) { out[col] += w[row] * coef * coef; };
    add(0, 0, -3 * c); add(1, 0, 4 * c); add(2, 0, -c);
    for (int m = 1; m + 1 < n; ++m) {
        add(m - 1, m, -c);
        add(m + 1, m, c);
    }
    add(n - 3, n - 1, c); add(n - 2, n - 1, -4 * c); add(n - 1, n - 1, 3 * c);
    return out;
}

std::vector<double> axis_w(int n, double d)
{
    std::vector<double> w(n, d);
    w.front() = 0.5 * d;
    w.back() = 0.5 * d;
    return w;
}

// diag of sum_ax s_ax^2 D_ax^T diag(qw) D_ax on a tensor grid, by separability
std::vector<double> laplacian_diag3(const Grid3& g)
{
    const auto w1 = axis_w(g.n1, g.d1), w2 = axis_w(g.n2, g.d2), w3 = axis_w(g.n3, g.d3);
    const auto c1 = colsq(g.n1, g.d1, w1), c2 = colsq(g.n2, g.d2, w2), c3 = colsq(g.n3, g.d3, w3);
    std::vector<double> diag(g.num_nodes());
    for (int k = 0; k < g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i)
                diag[g.idx(i, j, k)] = g.s1 * g.s1 * c1[i] * w2[j] * w3[k] +
                                       g.s2 * g.s2 * w1[i] * c2[j] * w3[k] +
                                       g.s3 * g.s3 * w1[i] * w2[j] * c3[k];
    return diag;
}

std::vector<double> laplacian_diag2(const Grid2& g)
{
    const auto w1 = axis_w(g.n1, g.d1), w2 = axis_w(g.n2, g.d2);
    const auto c1 = colsq(g.n1, g.d1, w1), c2 = colsq(g.n2, g.d2, w2);
    std::vector<double> diag(g.num_nodes());
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i)
            diag[g.idx(i, j)] = c1[i] * w2[j] + w1[i] * c2[j];
    return diag;
}

}  // namespace

void jacobi_eigen_sym(int n, std::vector<double>& a, std::vector<double>& evals,
                      std::vector<double>& evecs)
{
    evecs.assign(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) evecs[std::size_t(i) * n + i] = 1.0;
    auto A = [&](int i, int j) -> double& { return a[std::size_t(i) * n + j]; };
    auto V = [&](int i, int j) -> double& { return evecs[std::size_t(i) * n + j]; };

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
        if (off < 1e-26 * double(n) * n) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
    }
    evals.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) evals[std::size_t(i)] = a[std::size_t(i) * n + i];
}

CgInfo cg_solve(std::size_t n, const LinearMap& apply, const LinearMap& precond_in,
                const std::vector<double>& nullvec, const double* b, double* x,
                const CgOptions& opts)
{
    const auto& K = kernels::ops();
    const int max_iters =
        opts.max_iters > 0 ? opts.max_iters
                           : std::max(500, int(20.0 * std::sqrt(double(n))));

    const double bnorm = std::sqrt(K.dot(b, b, n));
    CgInfo info;
    if (bnorm == 0.0) {
        std::memset(x, 0, n * sizeof(double));
        return info;
    }

    const double nn = nullvec.empty() ? 1.0 : K.dot(nullvec.data(), nullvec.data(), n);

    std::vector<double> r(n), z(n), p(n), q(n);
    apply(x, q.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    project_out(nullvec, nn, r.data(), n);

    auto precond = [&](const double* rr, double* zz) {
        if (precond_in)
            precond_in(rr, zz);
        else
            std::memcpy(zz, rr, n * sizeof(double));
        project_out(nullvec, nn, zz, n);
    };

    precond(r.data(), z.data());
    std::memcpy(p.data(), z.data(), n * sizeof(double));
    double rz = K.dot(r.data(), z.data(), n);
    double rnorm = std::sqrt(K.dot(r.data(), r.data(), n));

    for (int it = 0; it < max_iters; ++it) {
        if (rnorm <= opts.tol * bnorm) {
            info.iterations = it;
            info.rel_residual = rnorm / bnorm;
            return info;
        }
        apply(p.data(), q.data());
        const double pq = K.dot(p.data(), q.data(), n);
        if (pq <= 0.0)
            throw SolverError("cg: operator lost positivity", rnorm / bnorm, it);
        const double alpha = rz / pq;
        K.axpy(alpha, p.data(), x, n);
        K.axpy(-alpha, q.data(), r.data(), n);
        project_out(nullvec, nn, r.data(), n);
        precond(r.data(), z.data());
        const double rz_next = K.dot(r.data(), z.data(), n);
        K.xpay(z.data(), rz_next / rz, p.data(), n);
        rz = rz_next;
        rnorm = std::sqrt(K.dot(r.data(), r.data(), n));
    }
    if (rnorm <= opts.tol * bnorm) {
        info.iterations = max_iters;
        info.rel_residual = rnorm / bnorm;
        return info;
    }
    throw SolverError("cg: no convergence within iteration budget", rnorm / bnorm, max_iters);
}

CgInfo cg_solve(std::size_t n, const LinearMap& apply, const std::vector<double>& jacobi_diag,
                const std::vector<double>& nullvec, const double* b, double* x,
                const CgOptions& opts)
{
    LinearMap pc;
    if (!jacobi_diag.empty())
        pc = [&jacobi_diag, n](const double* rr, double* zz) {
            for (std::size_t i = 0; i < n; ++i) zz[i] = rr[i] / jacobi_diag[i];
        };
    return cg_solve(n, apply, pc, nullvec, b, x, opts);
}

CoupledPoisson::CoupledPoisson(const Grid3& ga_, const Grid3& gb_, const JunctionMap& jm_,
                               Regime regime_)
    : ga(ga_), gb(gb_), jm(jm_), regime(regime_)
{
    const double ha2 = jm.h_a * jm.h_a;
    weight_a = ha2;
    weight_b = (regime == Regime::infinity) ? gb.h * gb.h : gb.h;
    qwa = quad_weights(ga);
    qwb = quad_weights(gb);
}

void CoupledPoisson::expand(double* phi_a, const double* phi_b) const
{
    const int kj = ga.junction_k();
    for (int j = 0; j < ga.n2; ++j)
        for (int i = 0; i < ga.n1; ++i) {
            const auto& st = jm.stencil[std::size_t(j) * ga.n1 + i];
            phi_a[ga.idx(i, j, kj)] =
                st.w[0] * phi_b[st.node[0]] + st.w[1] * phi_b[st.node[1]] +
                st.w[2] * phi_b[st.node[2]] + st.w[3] * phi_b[st.node[3]];
        }
}

void CoupledPoisson::reduce(double* ya, double* yb) const
{
    const int kj = ga.junction_k();
    for (int j = 0; j < ga.n2; ++j)
        for (int i = 0; i < ga.n1; ++i) {
            const std::size_t id = ga.idx(i, j, kj);
            const auto& st = jm.stencil[std::size_t(j) * ga.n1 + i];
            const double v = ya[id];
            yb[st.node[0]] += st.w[0] * v;
            yb[st.node[1]] += st.w[1] * v;
            yb[st.node[2]] += st.w[2] * v;
            yb[st.node[3]] += st.w[3] * v;
            ya[id] = 0.0;
        }
}

void CoupledPoisson::apply_weights(const double* x, double* y, double wa, double wb) const
{
    thread_local std::vector<double> xa, t, u;
    const std::size_t Na = na(), Nb = nb();
    xa.assign(x, x + Na);
    expand(xa.data(), x + Na);
    t.resize(std::max(Na, Nb));
    u.resize(std::max(Na, Nb));
    std::memset(y, 0, (Na + Nb) * sizeof(double));

    const double sa[3] = {ga.s1, ga.s2, ga.s3};
    for (int ax = 0; ax < 3; ++ax) {
        axis_diff(ga, ax, xa.data(), t.data(), sa[ax]);
        for (std::size_t i = 0; i < Na; ++i) u[i] = wa * qwa[i] * t[i];
        axis_diff_t_acc(ga, ax, u.data(), y, sa[ax]);
    }
    const double sb[3] = {gb.s1, gb.s2, gb.s3};
    for (int ax = 0; ax < 3; ++ax) {
        axis_diff(gb, ax, x + Na, t.data(), sb[ax]);
        for (std::size_t i = 0; i < Nb; ++i) u[i] = wb * qwb[i] * t[i];
        axis_diff_t_acc(gb, ax, u.data(), y + Na, sb[ax]);
    }
    reduce(y, y + Na);
}

void CoupledPoisson::apply(const double* x, double* y) const
{
    apply_weights(x, y, weight_a, weight_b);
}

void CoupledPoisson::rhs(const VectorField3& pa, const VectorField3& pb, double* b) const
{
    const double* pap[3] = {pa.comp[0].data(), pa.comp[1].data(), pa.comp[2].data()};
    const double* pbp[3] = {pb.comp[0].data(), pb.comp[1].data(), pb.comp[2].data()};
    rhs(pap, pbp, b);
}

void CoupledPoisson::rhs(const double* const pa[3], const double* const pb[3], double* b) const
{
    thread_local std::vector<double> u;
    const std::size_t Na = na(), Nb = nb();
    u.resize(std::max(Na, Nb));
    std::memset(b, 0, (Na + Nb) * sizeof(double));
    const double sa[3] = {ga.s1, ga.s2, ga.s3};
    for (int ax = 0; ax < 3; ++ax) {
        for (std::size_t i = 0; i < Na; ++i) u[i] = weight_a * qwa[i] * pa[ax][i];
        axis_diff_t_acc(ga, ax, u.data(), b, sa[ax]);
    }
    const double sb[3] = {gb.s1, gb.s2, gb.s3};
    for (int ax = 0; ax < 3; ++ax) {
        for (std::size_t i = 0; i < Nb; ++i) u[i] = weight_b * qwb[i] * pb[ax][i];
        axis_diff_t_acc(gb, ax, u.data(), b + Na, sb[ax]);
    }
    reduce(b, b + Na);
}

namespace {

// dense T = G^T diag(w) G for one axis (n x n, row-major)
std::vector<double> axis_stiffness(int n, double d, const std::vector<double>& w)
{
    std::vector<double> G(std::size_t(n) * n, 0.0);
    const double c = 1.0 / (2.0 * d);
    G[0 * n + 0] = -3 * c;
    G[0 * n + 1] = 4 * c;
    G[0 * n + 2] = -c;
    for (int m = 1; m + 1 < n; ++m) {
        G[std::size_t(m) * n + m - 1] = -c;
        G[std::size_t(m) * n + m + 1] = c;
    }
    G[std::size_t(n - 1) * n + n - 3] = c;
    G[std::size_t(n - 1) * n + n - 2] = -4 * c;
    G[std::size_t(n - 1) * n + n - 1] = 3 * c;

    std::vector<double> T(std::size_t(n) * n, 0.0);
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i) {
            const double gmi = G[std::size_t(m) * n + i];
            if (gmi == 0.0) continue;
            for (int j = 0; j < n; ++j)
                T[std::size_t(i) * n + j] += w[std::size_t(m)] * gmi * G[std::size_t(m) * n + j];
        }
    return T;
}

// out = M^T x (transpose=true) or M x along one axis of a (n1,n2,n3) block
void contract_axis(int n1, int n2, int n3, int axis, const std::vector<double>& M,
                   bool transpose, double* x)
{
    const std::size_t plane = std::size_t(n1) * n2;
    const int L = axis == 0 ? n1 : axis == 1 ? n2 : n3;
    const std::ptrdiff_t stride = axis == 0 ? 1 : axis == 1 ? n1 : std::ptrdiff_t(plane);
    thread_local std::vector<double> line, out;
    line.resize(std::size_t(L));
    out.resize(std::size_t(L));

    auto do_line = [&](double* base) {
        for (int m = 0; m < L; ++m) line[std::size_t(m)] = base[m * stride];
        for (int k = 0; k < L; ++k) {
            double s = 0.0;
            if (transpose)
                for (int m = 0; m < L; ++m) s += M[std::size_t(m) * L + k] * line[std::size_t(m)];
            else
                for (int m = 0; m < L; ++m) s += M[std::size_t(k) * L + m] * line[std::size_t(m)];
            out[std::size_t(k)] = s;
        }
        for (int m = 0; m < L; ++m) base[m * stride] = out[std::size_t(m)];
    };

    if (axis == 0) {
        for (int k = 0; k < n3; ++k)
            for (int j = 0; j < n2; ++j) do_line(x + std::size_t(k) * plane + std::size_t(j) * n1);
    } else if (axis == 1) {
        for (int k = 0; k < n3; ++k)
            for (int i = 0; i < n1; ++i) do_line(x + std::size_t(k) * plane + i);
    } else {
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i) do_line(x + std::size_t(j) * n1 + i);
    }
}

}  // namespace

CoupledPoisson::DomainBasis CoupledPoisson::build_basis(const Grid3& g, double weight) const
{
    DomainBasis bs;
    const int dims[3] = {g.n1, g.n2, g.n3};
    const double spac[3] = {g.d1, g.d2, g.d3};
    for (int ax = 0; ax < 3; ++ax) {
        const int n = dims[ax];
        const auto w = axis_w(n, spac[ax]);
        auto T = axis_stiffness(n, spac[ax], w);
        // symmetrize the scaled pencil: W^{-1/2} T W^{-1/2}
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                T[std::size_t(i) * n + j] /= std::sqrt(w[std::size_t(i)] * w[std::size_t(j)]);
        std::vector<double> lam, Q;
        jacobi_eigen_sym(n, T, lam, Q);
        AxisBasis& ab = bs.axis[ax];
        ab.lam.resize(std::size_t(n));
        ab.V.resize(std::size_t(n) * n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                ab.V[std::size_t(i) * n + k] = Q[std::size_t(i) * n + k] / std::sqrt(w[std::size_t(i)]);
        for (int k = 0; k < n; ++k) ab.lam[std::size_t(k)] = std::max(lam[std::size_t(k)], 0.0);
    }
    // modal diagonal of weight * sum_ax s_ax^2 lambda_ax, pseudo-inverted
    const double s2[3] = {g.s1 * g.s1, g.s2 * g.s2, g.s3 * g.s3};
    bs.dinv.resize(g.num_nodes());
    double dmax = 0.0;
    for (int k = 0; k < g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                const double d = weight * (s2[0] * bs.axis[0].lam[std::size_t(i)] +
                                           s2[1] * bs.axis[1].lam[std::size_t(j)] +
                                           s2[2] * bs.axis[2].lam[std::size_t(k)]);
                bs.dinv[g.idx(i, j, k)] = d;
                dmax = std::max(dmax, d);
            }
    for (auto& d : bs.dinv) d = (d > 1e-13 * dmax) ? 1.0 / d : 0.0;
    return bs;
}

LinearMap CoupledPoisson::spectral_precond() const
{
    if (!basis_built_) {
        basis_a_ = build_basis(ga, weight_a);
        basis_b_ = build_basis(gb, weight_b);
        basis_built_ = true;
    }
    const std::size_t Na = na();
    return [this, Na](const double* r, double* z) {
        std::memcpy(z, r, ndof() * sizeof(double));
        const Grid3* grids[2] = {&ga, &gb};
        const DomainBasis* bases[2] = {&basis_a_, &basis_b_};
        for (int dom = 0; dom < 2; ++dom) {
            const Grid3& g = *grids[dom];
            const DomainBasis& bs = *bases[dom];
            double* zd = z + (dom == 0 ? 0 : Na);
            for (int ax = 0; ax < 3; ++ax)
                contract_axis(g.n1, g.n2, g.n3, ax, bs.axis[ax].V, true, zd);
            for (std::size_t i = 0; i < g.num_nodes(); ++i) zd[i] *= bs.dinv[i];
            for (int ax = 0; ax < 3; ++ax)
                contract_axis(g.n1, g.n2, g.n3, ax, bs.axis[ax].V, false, zd);
        }
        // junction-dependent slots stay out of the reduced space
        const int kj = ga.junction_k();
        for (int j = 0; j < ga.n2; ++j)
            for (int i = 0; i < ga.n1; ++i) z[ga.idx(i, j, kj)] = 0.0;
    };
}

std::vector<double> CoupledPoisson::jacobi_diag() const
{
    // per-domain separable diagonal; junction cross terms are dropped, which
    // only weakens the preconditioner, never the operator
    std::vector<double> diag(ndof());
    const auto da = laplacian_diag3(ga);
    const auto db = laplacian_diag3(gb);
    const std::size_t Na = na();
    for (std::size_t i = 0; i < Na; ++i) diag[i] = weight_a * da[i];
    for (std::size_t i = 0; i < nb(); ++i) diag[Na + i] = weight_b * db[i];
    // wire junction-plane slots are dependent; keep the diagonal harmless there
    const int kj = ga.junction_k();
    for (int j = 0; j < ga.n2; ++j)
        for (int i = 0; i < ga.n1; ++i) diag[ga.idx(i, j, kj)] = 1.0;
    return diag;
}

std::vector<double> CoupledPoisson::nullvec() const
{
    std::vector<double> nv(ndof(), 1.0);
    const int kj = ga.junction_k();
    for (int j = 0; j < ga.n2; ++j)
        for (int i = 0; i < ga.n1; ++i) nv[ga.idx(i, j, kj)] = 0.0;
    return nv;
}

double CoupledPoisson::norm_mean(const double* x) const
{
    thread_local std::vector<double> xa;
    if (regime == Regime::infinity) {
        double m = 0.0, v = 0.0;
        const double* xb = x + na();
        for (std::size_t i = 0; i < nb(); ++i) {
            m += qwb[i] * xb[i];
            v += qwb[i];
        }
        return m / v;
    }
    xa.assign(x, x + na());
    expand(xa.data(), x + na());
    double m = 0.0, v = 0.0;
    for (std::size_t i = 0; i < na(); ++i) {
        m += qwa[i] * xa[i];
        v += qwa[i];
    }
    return m / v;
}

void CoupledPoisson::shift_mean_zero(double* x) const
{
    const double m = norm_mean(x);
    const auto nv = nullvec();
    for (std::size_t i = 0; i < ndof(); ++i) x[i] -= m * nv[i];
}

PotentialPair solve_coupled_potential(const VectorField3& pa, const VectorField3& pb,
                                      const Grid3& ga, const Grid3& gb, const JunctionMap& jm,
                                      Regime regime, CgInfo* info, const PotentialPair* warm,
                                      const CgOptions& opts)
{
    CoupledPoisson op(ga, gb, jm, regime);
    const std::size_t n = op.ndof();
    std::vector<double> b(n), x(n, 0.0);
    op.rhs(pa, pb, b.data());

    if (warm && warm->phi_a.size() == op.na() && warm->phi_b.size() == op.nb()) {
        std::memcpy(x.data(), warm->phi_a.data(), op.na() * sizeof(double));
        std::memcpy(x.data() + op.na(), warm->phi_b.data(), op.nb() * sizeof(double));
        const int kj = ga.junction_k();
        for (int j = 0; j < ga.n2; ++j)
            for (int i = 0; i < ga.n1; ++i) x[ga.idx(i, j, kj)] = 0.0;
    }

    const auto nv = op.nullvec();
    CgInfo ci = cg_solve(
        n, [&](const double* in, double* out) { op.apply(in, out); }, op.spectral_precond(),
        nv, b.data(), x.data(), opts);
    if (info) *info = ci;

    op.shift_mean_zero(x.data());
    PotentialPair out;
    out.phi_a.assign(x.begin(), x.begin() + op.na());
    out.phi_b.assign(x.begin() + op.na(), x.end());
    op.expand(out.phi_a.data(), out.phi_b.data());
    return out;
}

std::vector<double> solve_psi_1d(const Grid1& g, const std::vector<double>& q)
{
    std::vector<double> psi(g.n, 0.0);
    for (int k = 1; k < g.n; ++k) psi[k] = psi[k - 1] + 0.5 * g.d * (q[k - 1] + q[k]);
    const auto w = quad_weights(g);
    double mean = 0.0;
    for (int k = 0; k < g.n; ++k) mean += w[k] * psi[k];
    for (auto& v : psi) v -= mean;
    return psi;
}

std::vector<double> solve_psi_2d(const Grid2& g, const std::vector<double>& q1,
                                 const std::vector<double>& q2, CgInfo* info,
                                 const CgOptions& opts)
{
    const std::size_t n = g.num_nodes();
    const auto qw = quad_weights(g);
    std::vector<double> t(n), u(n), b(n, 0.0), x(n, 0.0);

    auto apply = [&](const double* in, double* out) {
        std::memset(out, 0, n * sizeof(double));
        for (int ax = 0; ax < 2; ++ax) {
            axis_diff(g, ax, in, t.data(), 1.0);
            for (std::size_t i = 0; i < n; ++i) u[i] = qw[i] * t[i];
            axis_diff_t_acc(g, ax, u.data(), out, 1.0);
        }
    };
    for (std::size_t i = 0; i < n; ++i) u[i] = qw[i] * q1[i];
    axis_diff_t_acc(g, 0, u.data(), b.data(), 1.0);
    for (std::size_t i = 0; i < n; ++i) u[i] = qw[i] * q2[i];
    axis_diff_t_acc(g, 1, u.data(), b.data(), 1.0);

    const std::vector<double> nv(n, 1.0);
    CgInfo ci = cg_solve(n, apply, laplacian_diag2(g), nv, b.data(), x.data(), opts);
    if (info) *info = ci;

    double mean = 0.0, vol = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean += qw[i] * x[i];
        vol += qw[i];
    }
    for (auto& v : x) v -= mean / vol;
    return x;
}

LimitPotential solve_psi_coupled(const Grid1& g1, const Grid2& g2,
                                 const std::vector<double>& qa, const std::vector<double>& qb1,
                                 const std::vector<double>& qb2, double ell,
                                 double theta_measure, CgInfo* info, const CgOptions& opts)
{
    const std::size_t n1 = std::size_t(g1.n), n2 = g2.num_nodes(), n = n1 + n2;
    const std::size_t pin = g2.idx(g2.pin_i, g2.pin_j);
    const auto w1 = quad_weights(g1);
    const auto w2 = quad_weights(g2);

    auto expand = [&](double* xa, const double* xb) { xa[0] = xb[pin]; };
    auto reduce = [&](double* ya, double* yb) {
        yb[pin] += ya[0];
        ya[0] = 0.0;
    };

    std::vector<double> xa(n1), t1(n1), u1(n1), t2(n2), u2(n2);
    auto apply = [&](const double* in, double* out) {
        std::memcpy(xa.data(), in, n1 * sizeof(double));
        expand(xa.data(), in + n1);
        std::memset(out, 0, n * sizeof(double));
        diff_1d(g1, xa.data(), t1.data(), 1.0);
        for (std::size_t i = 0; i < n1; ++i) u1[i] = theta_measure * w1[i] * t1[i];
        diff_1d_t_acc(g1, u1.data(), out, 1.0);
        for (int ax = 0; ax < 2; ++ax) {
            axis_diff(g2, ax, in + n1, t2.data(), 1.0);
            for (std::size_t i = 0; i < n2; ++i) u2[i] = ell * w2[i] * t2[i];
            axis_diff_t_acc(g2, ax, u2.data(), out + n1, 1.0);
        }
        reduce(out, out + n1);
    };

    std::vector<double> b(n, 0.0), x(n, 0.0);
    for (std::size_t i = 0; i < n1; ++i) u1[i] = theta_measure * w1[i] * qa[i];
    diff_1d_t_acc(g1, u1.data(), b.data(), 1.0);
    for (std::size_t i = 0; i < n2; ++i) u2[i] = ell * w2[i] * qb1[i];
    axis_diff_t_acc(g2, 0, u2.data(), b.data() + n1, 1.0);
    for (std::size_t i = 0; i < n2; ++i) u2[i] = ell * w2[i] * qb2[i];
    axis_diff_t_acc(g2, 1, u2.data(), b.data() + n1, 1.0);
    reduce(b.data(), b.data() + n1);

    std::vector<double> diag(n);
    {
        const auto c1 = colsq(g1.n, g1.d, w1);
        for (std::size_t i = 0; i < n1; ++i) diag[i] = theta_measure * c1[i];
        const auto d2 = laplacian_diag2(g2);
        for (std::size_t i = 0; i < n2; ++i) diag[n1 + i] = ell * d2[i];
        diag[0] = 1.0;  // dependent slot
    }
    std::vector<double> nv(n, 1.0);
    nv[0] = 0.0;

    CgInfo ci = cg_solve(n, apply, diag, nv, b.data(), x.data(), opts);
    if (info) *info = ci;

    // zero 1D mean over the expanded profile
    std::memcpy(xa.data(), x.data(), n1 * sizeof(double));
    expand(xa.data(), x.data() + n1);
    double mean = 0.0;
    for (std::size_t i = 0; i < n1; ++i) mean += w1[i] * xa[i];
    for (std::size_t i = 0; i < n; ++i) x[i] -= mean * (i == 0 ? 0.0 : 1.0);

    LimitPotential out;
    out.psi_a.assign(x.begin(), x.begin() + n1);
    out.psi_b.assign(x.begin() + n1, x.end());
    out.psi_a[0] = out.psi_b[pin];
    return out;
}

}  // namespace wf
