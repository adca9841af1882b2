#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "fspt/harness.hpp"
#include "fspt/solver.hpp"

using namespace fspt;

namespace {

ProblemSetup example1_setup(int n, bool fspt_mode, double m_const = -0.5, double kappa = 10.0) {
    ProblemSetup s;
    s.grid = GridSpec{1.1, n};
    s.kappa = kappa;
    s.contrast = ContrastSpec{[m_const](Point) { return m_const; }, Disc{{0.0, 0.0}, 1.0}};
    s.window = WindowParams{1.01, 1.08};
    if (fspt_mode)
        s.smoothing = Fourier{n / 2};
    else
        s.smoothing = Sharp{};
    s.incident = RadialBessel{};
    return s;
}

ComplexField random_field(const GridSpec& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexField f(g);
    for (cplx& v : f.values) v = cplx(u(rng), u(rng));
    return f;
}

}  // namespace

TEST_CASE("sample_incident") {
    const GridSpec g{1.0, 4};  // nodes at -1, -0.5, 0, 0.5
    SUBCASE("plane wave phase zero along the wavefront") {
        const ComplexField f = sample_incident(PlaneWave{1.0, 0.0}, 7.3, g);
        for (int j2 = 0; j2 < 4; ++j2) {
            CHECK(f.at(2, j2).real() == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(std::abs(f.at(2, j2).imag()) <= 1e-15);
        }
    }
    SUBCASE("plane wave quarter period") {
        const ComplexField f = sample_incident(PlaneWave{1.0, 0.0}, M_PI, g);
        CHECK(std::abs(f.at(3, 0) - cplx(0.0, 1.0)) <= 1e-15);
    }
    SUBCASE("radial bessel at the origin") {
        const ComplexField f = sample_incident(RadialBessel{}, 10.0, g);
        CHECK(f.at(2, 2) == cplx(1.0, 0.0));
    }
    SUBCASE("direction must be unit") {
        CHECK_THROWS_AS(sample_incident(PlaneWave{1.0, 1.0}, 1.0, g), DomainError);
        const double s = 1.0 / std::sqrt(2.0);
        CHECK_NOTHROW(sample_incident(PlaneWave{s, s}, 1.0, g));
    }
}

TEST_CASE("apply_operator: zero contrast is the identity") {
    ProblemSetup s = example1_setup(16, true, 0.0);
    OperatorState st = build_operator_state(s, 0.156);
    const ComplexField u = random_field(s.grid, 3);
    const ComplexField out = apply_operator(s, st, u);
    for (size_t i = 0; i < u.values.size(); ++i) CHECK(out.values[i] == u.values[i]);
}

TEST_CASE("apply_operator matches direct evaluation of the discrete operator") {
    ProblemSetup s = example1_setup(16, true);
    const double beta = compute_beta(1e-10);
    OperatorState st = build_operator_state(s, beta);

    auto direct = [&](const ComplexField& u) {
        const int n = s.grid.n;
        ComplexField out(s.grid);
        for (int j1 = 0; j1 < n; ++j1)
            for (int j2 = 0; j2 < n; ++j2) {
                cplx acc(0.0, 0.0);
                for (int k1 = 0; k1 < n; ++k1)
                    for (int k2 = 0; k2 < n; ++k2)
                        acc += st.kt.at_offset(j1 - k1, j2 - k2) * st.m_e.at(k1, k2) *
                               st.chi.at(k1, k2) * u.at(k1, k2);
                out.at(j1, j2) = u.at(j1, j2) + s.kappa * s.kappa * acc;
            }
        return out;
    };

    SUBCASE("delta input at a node inside D") {
        ComplexField delta(s.grid);
        delta.at(8, 8) = 1.0;
        const ComplexField fast = apply_operator(s, st, delta);
        const ComplexField slow = direct(delta);
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < fast.values.size(); ++i) {
            num += std::norm(fast.values[i] - slow.values[i]);
            den += std::norm(slow.values[i]);
        }
        CHECK(std::sqrt(num / den) <= 1e-12);
    }
    SUBCASE("random input") {
        const ComplexField u = random_field(s.grid, 5);
        const ComplexField fast = apply_operator(s, st, u);
        const ComplexField slow = direct(u);
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < fast.values.size(); ++i) {
            num += std::norm(fast.values[i] - slow.values[i]);
            den += std::norm(slow.values[i]);
        }
        CHECK(std::sqrt(num / den) <= 1e-12);
    }
}

TEST_CASE("apply_operator at vanishing wavenumber tends to the identity") {
    ProblemSetup s = example1_setup(16, true, -0.5, 1e-8);
    OperatorState st = build_operator_state(s, 0.156);
    const ComplexField u = random_field(s.grid, 9);
    const ComplexField out = apply_operator(s, st, u);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < u.values.size(); ++i) {
        num += std::norm(out.values[i] - u.values[i]);
        den += std::norm(u.values[i]);
    }
    CHECK(std::sqrt(num / den) <= 1e-10);
}

TEST_CASE("gmres on the identity converges in one iteration") {
    const GridSpec g{1.0, 8};
    const ComplexField rhs = random_field(g, 17);
    const GmresResult r = gmres_solve([](const ComplexField& v) { return v; }, rhs);
    CHECK(r.iterations == 1);
    for (size_t i = 0; i < rhs.values.size(); ++i)
        CHECK(std::abs(r.x.values[i] - rhs.values[i]) <= 1e-12);
}

TEST_CASE("gmres iteration count grows monotonically with tighter tolerance") {
    ProblemSetup s = example1_setup(32, true);
    const double beta = compute_beta(1e-10);
    OperatorState st = build_operator_state(s, beta);
    const ComplexField rhs = sample_incident(s.incident, s.kappa, s.grid);
    auto apply = [&](const ComplexField& v) { return apply_operator(s, st, v); };
    int prev = 0;
    for (double tol : {1e-2, 1e-4, 1e-6, 1e-8}) {
        GmresOptions o;
        o.tol = tol;
        const GmresResult r = gmres_solve(apply, rhs, o);
        CHECK(r.relative_residual <= tol);
        CHECK(r.iterations >= prev);
        prev = r.iterations;
    }
}

TEST_CASE("gmres matches a dense direct solve on the n=16 disc problem") {
    ProblemSetup s = example1_setup(16, true);
    const double beta = compute_beta(1e-10);
    OperatorState st = build_operator_state(s, beta);
    const int N = 16 * 16;

    // assemble the dense matrix column by column from the operator
    Eigen::MatrixXcd A(N, N);
    for (int c = 0; c < N; ++c) {
        ComplexField e(s.grid);
        e.values[c] = 1.0;
        const ComplexField col = apply_operator(s, st, e);
        for (int r = 0; r < N; ++r) A(r, c) = col.values[r];
    }
    const ComplexField ui = sample_incident(s.incident, s.kappa, s.grid);
    Eigen::VectorXcd b(N);
    for (int r = 0; r < N; ++r) b(r) = ui.values[r];
    const Eigen::VectorXcd x = A.partialPivLu().solve(b);

    GmresOptions o;
    o.tol = 1e-12;
    const GmresResult g =
        gmres_solve([&](const ComplexField& v) { return apply_operator(s, st, v); }, ui, o);
    double num = 0.0, den = 0.0;
    for (int r = 0; r < N; ++r) {
        num += std::norm(g.x.values[r] - x(r));
        den += std::norm(x(r));
    }
    CHECK(std::sqrt(num / den) <= 1e-10);
}

TEST_CASE("gmres maxiter carries the best iterate") {
    ProblemSetup s = example1_setup(32, true);
    const double beta = compute_beta(1e-10);
    OperatorState st = build_operator_state(s, beta);
    const ComplexField rhs = sample_incident(s.incident, s.kappa, s.grid);
    GmresOptions o;
    o.tol = 1e-14;
    o.maxiter = 3;
    try {
        gmres_solve([&](const ComplexField& v) { return apply_operator(s, st, v); }, rhs, o);
        FAIL("expected GmresError");
    } catch (const GmresError& e) {
        CHECK(e.best().iterations == 3);
        CHECK(e.best().relative_residual > 0.0);
        CHECK(e.best().x.values.size() == rhs.values.size());
    }
}

TEST_CASE("solve_scattering with zero contrast returns the incident field") {
    ProblemSetup s = example1_setup(32, true, 0.0);
    const SolveResult r = solve_scattering(s);
    CHECK(r.iterations == 1);
    const ComplexField ui = sample_incident(s.incident, s.kappa, s.grid);
    for (size_t i = 0; i < ui.values.size(); ++i) {
        CHECK(std::abs(r.u.values[i] - ui.values[i]) <= 1e-13);
        CHECK(std::abs(r.us.values[i]) <= 1e-13);
    }
}

TEST_CASE("scattered field is exactly u - u^i") {
    ProblemSetup s = example1_setup(32, true);
    const SolveResult r = solve_scattering(s);
    const ComplexField ui = sample_incident(s.incident, s.kappa, s.grid);
    for (size_t i = 0; i < ui.values.size(); ++i)
        CHECK(r.us.values[i] == r.u.values[i] - ui.values[i]);
    CHECK(r.final_relative_residual <= 1e-10);
}

TEST_CASE("fspt and plain modes differ only through the indicator factor") {
    ProblemSetup fs = example1_setup(32, true);
    ProblemSetup ps = example1_setup(32, false);
    const double beta = compute_beta(1e-10);
    OperatorState st_f = build_operator_state(fs, beta);
    OperatorState st_p = build_operator_state(ps, beta);
    // hand the sharp path the band-limited indicator
    st_p.chi = st_f.chi;
    st_p.density_factor = st_f.density_factor;
    const ComplexField u = random_field(fs.grid, 23);
    const ComplexField a = apply_operator(fs, st_f, u);
    const ComplexField b = apply_operator(ps, st_p, u);
    for (size_t i = 0; i < a.values.size(); ++i)
        CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-13);
}

TEST_CASE("smoothing F bounds are validated") {
    ProblemSetup s = example1_setup(16, true);
    s.smoothing = Fourier{9};  // n/2 = 8
    CHECK_THROWS_AS(build_operator_state(s, 0.156), DomainError);
    s.smoothing = Fourier{0};
    CHECK_THROWS_AS(build_operator_state(s, 0.156), DomainError);
}
