#include <doctest.h>

#include <cmath>
#include <random>

#include "fspt/fastconv.hpp"
#include "fspt/quadrature.hpp"

using namespace fspt;

namespace {

ComplexField random_field(const GridSpec& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexField f(g);
    for (cplx& v : f.values) v = cplx(u(rng), u(rng));
    return f;
}

// brute-force Toeplitz application
ComplexField direct_apply(const KernelTable& kt, const ComplexField& f) {
    const int n = f.grid.n;
    ComplexField out(f.grid);
    for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) {
            cplx acc(0.0, 0.0);
            for (int k1 = 0; k1 < n; ++k1)
                for (int k2 = 0; k2 < n; ++k2)
                    acc += kt.at_offset(j1 - k1, j2 - k2) * f.at(k1, k2);
            out.at(j1, j2) = acc;
        }
    return out;
}

double rel_eps2(const ComplexField& x, const ComplexField& y) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.values.size(); ++i) {
        num += std::norm(x.values[i] - y.values[i]);
        den += std::norm(y.values[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("toeplitz_apply: delta density extracts a weight column") {
    const GridSpec g{1.0, 8};
    const KernelTable kt = build_kernel_table(3.0, g, 0.156);
    ComplexField delta(g);
    delta.at(3, 5) = 1.0;
    const ComplexField out = toeplitz_apply(kt, delta);
    for (int j1 = 0; j1 < g.n; ++j1)
        for (int j2 = 0; j2 < g.n; ++j2)
            CHECK(std::abs(out.at(j1, j2) - kt.at_offset(j1 - 3, j2 - 5)) <= 1e-15);
}

TEST_CASE("toeplitz_apply: zero density") {
    const GridSpec g{1.0, 8};
    const KernelTable kt = build_kernel_table(3.0, g, 0.156);
    const ComplexField out = toeplitz_apply(kt, ComplexField(g));
    for (const cplx& v : out.values) CHECK(v == cplx(0.0, 0.0));
}

TEST_CASE("toeplitz_apply matches direct summation on a random density") {
    const GridSpec g{1.1, 16};
    const KernelTable kt = build_kernel_table(10.0, g, 0.156);
    const ComplexField f = random_field(g, 11);
    const ComplexField fast = toeplitz_apply(kt, f);
    const ComplexField slow = direct_apply(kt, f);
    CHECK(rel_eps2(fast, slow) <= 1e-12);
}

TEST_CASE("toeplitz_apply is linear") {
    const GridSpec g{1.1, 12};
    const KernelTable kt = build_kernel_table(5.0, g, 0.156);
    ToeplitzConvolver conv(kt);
    const ComplexField f = random_field(g, 21), h = random_field(g, 22);
    const cplx alpha(0.3, -1.2), beta(-0.7, 0.4);
    ComplexField mix(g);
    for (size_t i = 0; i < mix.values.size(); ++i)
        mix.values[i] = alpha * f.values[i] + beta * h.values[i];
    const ComplexField lhs = conv.apply(mix);
    const ComplexField af = conv.apply(f), ah = conv.apply(h);
    double worst = 0.0, scale = 0.0;
    for (size_t i = 0; i < lhs.values.size(); ++i) {
        worst = std::max(worst,
                         std::abs(lhs.values[i] - (alpha * af.values[i] + beta * ah.values[i])));
        scale = std::max(scale, std::abs(lhs.values[i]));
    }
    CHECK(worst <= 1e-13 * std::max(1.0, scale));
}

TEST_CASE("toeplitz_apply is symmetric under the bilinear pairing") {
    // the weight matrix is symmetric, not Hermitian: sum f_i (Ag)_i = sum g_i (Af)_i
    const GridSpec g{1.1, 12};
    const KernelTable kt = build_kernel_table(5.0, g, 0.156);
    ToeplitzConvolver conv(kt);
    const ComplexField f = random_field(g, 31), h = random_field(g, 32);
    const ComplexField ah = conv.apply(h), af = conv.apply(f);
    cplx lhs(0.0, 0.0), rhs(0.0, 0.0);
    for (size_t i = 0; i < f.values.size(); ++i) {
        lhs += f.values[i] * ah.values[i];
        rhs += h.values[i] * af.values[i];
    }
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
}

TEST_CASE("grid mismatch raises") {
    const KernelTable kt = build_kernel_table(3.0, GridSpec{1.0, 8}, 0.156);
    CHECK_THROWS_AS(toeplitz_apply(kt, ComplexField(GridSpec{1.0, 16})), GridMismatch);
}

TEST_CASE("eval_smoothed_indicator: DC mode only") {
    const GridSpec g{1.1, 16};
    IndicatorCoeffs ic{4, 1.1, std::vector<cplx>(81, cplx(0.0, 0.0))};
    ic.at(0, 0) = cplx(0.37, 0.0);
    const ComplexField chi = eval_smoothed_indicator(ic, g);
    for (const cplx& v : chi.values) CHECK(std::abs(v - cplx(0.37, 0.0)) <= 1e-14);
}

TEST_CASE("eval_smoothed_indicator matches the direct double sum (with aliasing)") {
    const GridSpec g{1.1, 32};
    const int F = 16;  // F = n/2: modes +-F alias into shared bins
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    IndicatorCoeffs ic{F, g.a, std::vector<cplx>(static_cast<long>(2 * F + 1) * (2 * F + 1))};
    for (cplx& v : ic.c) v = cplx(u(rng), u(rng));
    const ComplexField chi = eval_smoothed_indicator(ic, g);

    std::uniform_int_distribution<int> node(0, g.n - 1);
    for (int t = 0; t < 50; ++t) {
        const int j1 = node(rng), j2 = node(rng);
        const Point x = g.node(j1, j2);
        cplx direct(0.0, 0.0);
        for (int j = -F; j <= F; ++j)
            for (int k = -F; k <= F; ++k)
                direct += ic.at(j, k) * std::polar(1.0, M_PI * (j * x.x1 + k * x.x2) / g.a);
        CHECK(std::abs(chi.at(j1, j2) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("eval_smoothed_indicator on disc coefficients, F = n/2") {
    const GridSpec g{1.1, 256};
    const int F = 128;
    const IndicatorCoeffs ic = indicator_coeffs_disc({0.0, 0.0}, 1.0, F, g.a);
    const ComplexField chi = eval_smoothed_indicator(ic, g);
    double max_imag = 0.0, min_re = 1e300, max_re = -1e300;
    for (const cplx& v : chi.values) {
        max_imag = std::max(max_imag, std::abs(v.imag()));
        min_re = std::min(min_re, v.real());
        max_re = std::max(max_re, v.real());
    }
    CHECK(max_imag <= 1e-12);
    // bounded Gibbs overshoot sanity band
    CHECK(min_re >= -0.2);
    CHECK(max_re <= 1.2);
    // away from the interface the truncated series is close to the indicator
    const double h = g.h();
    for (int j1 = 0; j1 < g.n; j1 += 3)
        for (int j2 = 0; j2 < g.n; j2 += 3) {
            const Point x = g.node(j1, j2);
            const double r = std::hypot(x.x1, x.x2);
            if (std::abs(r - 1.0) <= 10.0 * h) continue;
            const double want = r < 1.0 ? 1.0 : 0.0;
            CHECK(std::abs(chi.at(j1, j2).real() - want) <= 0.1);
        }
}

TEST_CASE("F > n/2 raises") {
    const GridSpec g{1.1, 16};
    IndicatorCoeffs ic{9, 1.1, std::vector<cplx>(19 * 19, cplx(0.0, 0.0))};
    CHECK_THROWS_AS(eval_smoothed_indicator(ic, g), DomainError);
}
