#include "fspt/solver.hpp"

#include <cmath>

#include "fspt/numerics.hpp"
#include "fspt/specfun.hpp"

namespace fspt {

ComplexField sample_incident(const IncidentField& f, double kappa, const GridSpec& g) {
    ComplexField out(g);
    if (const auto* pw = std::get_if<PlaneWave>(&f)) {
        if (std::abs(std::hypot(pw->d1, pw->d2) - 1.0) > 1e-14)
            throw DomainError("plane wave direction must be a unit vector");
        parallel_for(0, g.n, [&](long lo, long hi) {
            for (long j1 = lo; j1 < hi; ++j1)
                for (int j2 = 0; j2 < g.n; ++j2) {
                    const Point x = g.node(static_cast<int>(j1), j2);
                    out.at(static_cast<int>(j1), j2) =
                        std::polar(1.0, kappa * (pw->d1 * x.x1 + pw->d2 * x.x2));
                }
        });
    } else {
        parallel_for(0, g.n, [&](long lo, long hi) {
            for (long j1 = lo; j1 < hi; ++j1)
                for (int j2 = 0; j2 < g.n; ++j2) {
                    const Point x = g.node(static_cast<int>(j1), j2);
                    out.at(static_cast<int>(j1), j2) = bessel_j0(kappa * std::hypot(x.x1, x.x2));
                }
        });
    }
    return out;
}

OperatorState build_operator_state(const ProblemSetup& setup, double beta,
                                   const SolveOptions& opts) {
    const GridSpec& g = setup.grid;
    validate_inside_domain(setup.contrast.shape, g.a);

    OperatorState st;
    st.kt = build_kernel_table(setup.kappa, g, beta);
    st.m_e = sample_contrast(setup.contrast, setup.window, g);

    if (const auto* fo = std::get_if<Fourier>(&setup.smoothing)) {
        if (fo->F < 1 || fo->F > g.n / 2)
            throw DomainError("Fourier smoothing requires 1 <= F <= n/2");
        const IndicatorCoeffs ic = indicator_coeffs_cached(setup.contrast.shape, fo->F, g.a,
                                                           opts.coeff_tol, opts.cache_dir);
        st.chi = eval_smoothed_indicator(ic, g);
    } else {
        st.chi = ComplexField(g);
        parallel_for(0, g.n, [&](long lo, long hi) {
            for (long j1 = lo; j1 < hi; ++j1)
                for (int j2 = 0; j2 < g.n; ++j2)
                    st.chi.at(static_cast<int>(j1), j2) =
                        contains(setup.contrast.shape, g.node(static_cast<int>(j1), j2)) ? 1.0
                                                                                         : 0.0;
        });
    }
    st.density_factor = ComplexField(g);
    for (long i = 0; i < g.size(); ++i)
        st.density_factor.values[i] = st.m_e.values[i] * st.chi.values[i];
    st.conv = std::make_unique<ToeplitzConvolver>(st.kt);
    return st;
}

ComplexField apply_operator(const ProblemSetup& setup, OperatorState& state,
                            const ComplexField& u) {
    if (!(u.grid == setup.grid)) throw GridMismatch("apply_operator: field grid mismatch");
    ComplexField density(u.grid);
    for (size_t i = 0; i < u.values.size(); ++i)
        density.values[i] = state.density_factor.values[i] * u.values[i];
    ComplexField out = state.conv->apply(density);
    const double k2 = setup.kappa * setup.kappa;
    for (size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = u.values[i] + k2 * out.values[i];
    return out;
}

namespace {

void axpy(ComplexField& y, const cplx& alpha, const ComplexField& x) {
    for (size_t i = 0; i < y.values.size(); ++i) y.values[i] += alpha * x.values[i];
}

struct Givens {
    double c;
    cplx s;
};

Givens make_givens(cplx a, cplx b) {
    if (b == cplx(0.0, 0.0)) return {1.0, cplx(0.0, 0.0)};
    if (a == cplx(0.0, 0.0)) return {0.0, cplx(1.0, 0.0)};
    const double t = std::sqrt(std::norm(a) + std::norm(b));
    const cplx ua = a / std::abs(a);
    return {std::abs(a) / t, ua * std::conj(b) / t};
}

}  // namespace

GmresResult gmres_solve(const std::function<ComplexField(const ComplexField&)>& apply,
                        const ComplexField& rhs, const GmresOptions& opts) {
    if (!(opts.tol > 0.0) || opts.restart < 1) throw DomainError("gmres: bad options");
    const double bnorm = norm2(rhs);
    GmresResult res;
    res.x = ComplexField(rhs.grid);
    if (bnorm == 0.0) return res;

    const int m = opts.restart;
    int total = 0;
    bool x_is_zero = true;

    for (;;) {
        ComplexField r = rhs;
        if (!x_is_zero) {
            ComplexField ax = apply(res.x);
            for (size_t i = 0; i < r.values.size(); ++i) r.values[i] -= ax.values[i];
        }
        double rnorm = norm2(r);
        if (rnorm <= opts.tol * bnorm) {
            res.relative_residual = rnorm / bnorm;
            res.iterations = total;
            return res;
        }

        std::vector<ComplexField> V;
        V.reserve(m + 1);
        for (cplx& v : r.values) v /= rnorm;
        V.push_back(std::move(r));

        std::vector<std::vector<cplx>> H;  // H[j] holds column j, rows 0..j+1
        std::vector<Givens> rot;
        std::vector<cplx> gvec{cplx(rnorm, 0.0)};

        int j = 0;
        bool breakdown = false;
        for (; j < m; ++j) {
            ComplexField w = apply(V[j]);
            ++total;
            std::vector<cplx> col(j + 2);
            for (int i = 0; i <= j; ++i) {
                col[i] = dot(V[i], w);
                axpy(w, -col[i], V[i]);
            }
            const double hnext = norm2(w);
            col[j + 1] = hnext;

            for (int i = 0; i < j; ++i) {
                const cplx t0 = rot[i].c * col[i] + rot[i].s * col[i + 1];
                col[i + 1] = -std::conj(rot[i].s) * col[i] + rot[i].c * col[i + 1];
                col[i] = t0;
            }
            const Givens gv = make_givens(col[j], col[j + 1]);
            rot.push_back(gv);
            col[j] = gv.c * col[j] + gv.s * col[j + 1];
            col[j + 1] = 0.0;
            gvec.push_back(-std::conj(gv.s) * gvec[j]);
            gvec[j] = gv.c * gvec[j];
            H.push_back(std::move(col));

            const double resid = std::abs(gvec[j + 1]);
            if (hnext <= 1e-300) {
                breakdown = true;  // happy breakdown: exact solution in the subspace
            } else if (resid > opts.tol * bnorm && total < opts.maxiter) {
                for (cplx& v : w.values) v /= hnext;
                V.push_back(std::move(w));
                continue;
            }
            ++j;
            break;
        }

        // back substitution on the rotated Hessenberg column set
        std::vector<cplx> y(j);
        for (int r_ = j - 1; r_ >= 0; --r_) {
            cplx s = gvec[r_];
            for (int c_ = r_ + 1; c_ < j; ++c_) s -= H[c_][r_] * y[c_];
            y[r_] = s / H[r_][r_];
        }
        for (int i = 0; i < j; ++i) axpy(res.x, y[i], V[i]);
        x_is_zero = false;

        const double inner_resid = std::abs(gvec[j]);
        if (breakdown || inner_resid <= opts.tol * bnorm) {
            res.iterations = total;
            res.relative_residual = inner_resid / bnorm;
            return res;
        }
        if (total >= opts.maxiter) {
            ComplexField ax = apply(res.x);
            double rn = 0.0;
            for (size_t i = 0; i < ax.values.size(); ++i)
                rn += std::norm(rhs.values[i] - ax.values[i]);
            res.iterations = total;
            res.relative_residual = std::sqrt(rn) / bnorm;
            throw GmresError("gmres: maximum iterations exceeded", std::move(res));
        }
    }
}

SolveResult solve_scattering(const ProblemSetup& setup, const SolveOptions& opts) {
    const ComplexField ui = sample_incident(setup.incident, setup.kappa, setup.grid);
    const double beta = compute_beta(opts.beta_tol);
    OperatorState state = build_operator_state(setup, beta, opts);
    ProblemSetup local = setup;
    GmresResult g = gmres_solve(
        [&](const ComplexField& v) { return apply_operator(local, state, v); }, ui, opts.gmres);

    SolveResult out;
    out.u = std::move(g.x);
    out.us = ComplexField(setup.grid);
    for (size_t i = 0; i < out.u.values.size(); ++i)
        out.us.values[i] = out.u.values[i] - ui.values[i];
    out.iterations = g.iterations;
    out.final_relative_residual = g.relative_residual;
    return out;
}

}  // namespace fspt
