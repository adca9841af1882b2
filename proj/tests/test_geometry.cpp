#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "fspt/geometry.hpp"
#include "fspt/numerics.hpp"

using namespace fspt;

namespace {

// direct membership predicate for the cusp star, independent of the
// Composite ray-casting path
bool star_predicate(Point p) {
    if (std::abs(p.x1) > 1.0 || std::abs(p.x2) > 1.0) return false;
    for (double sx : {-1.0, 1.0})
        for (double sy : {-1.0, 1.0})
            if (std::hypot(p.x1 - sx, p.x2 - sy) < 1.0) return false;
    return true;
}

}  // namespace

TEST_CASE("contains: disc and rect") {
    const ShapeDescriptor d = Disc{{0.0, 0.0}, 1.0};
    CHECK(contains(d, {0.0, 0.0}));
    CHECK(contains(d, {1.0, 0.0}));  // boundary counts as inside
    CHECK(!contains(d, {2.0, 0.0}));
    const ShapeDescriptor r = Rect{{0.5, 0.0}, 0.5, 0.25};
    CHECK(contains(r, {0.5, 0.0}));
    CHECK(contains(r, {1.0, 0.25}));
    CHECK(!contains(r, {1.0, 0.26}));
}

TEST_CASE("contains: cusp star") {
    const ShapeDescriptor star = make_cusp_star();
    CHECK(contains(star, {0.0, 0.0}));
    CHECK(!contains(star, {0.9, 0.9}));  // |x-(1,1)| = 0.1414 < 1
    CHECK(contains(star, {0.99, 0.0}));
    CHECK(!contains(star, {1.01, 0.0}));
    CHECK(contains(star, {1.0, 0.0}));  // cusp point, boundary
}

TEST_CASE("composite membership agrees with the direct predicate") {
    const ShapeDescriptor star = make_cusp_star();
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-1.05, 1.05);
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
        const Point p{u(rng), u(rng)};
        // skip points within 1e-9 of the boundary circles where the two
        // conventions may legitimately differ
        bool near = std::abs(std::abs(p.x1) - 1.0) < 1e-9 || std::abs(std::abs(p.x2) - 1.0) < 1e-9;
        for (double sx : {-1.0, 1.0})
            for (double sy : {-1.0, 1.0})
                near = near || std::abs(std::hypot(p.x1 - sx, p.x2 - sy) - 1.0) < 1e-9;
        if (near) continue;
        ++checked;
        CHECK(contains(star, p) == star_predicate(p));
    }
    CHECK(checked > 9900);
}

TEST_CASE("composite disc membership matches the disc") {
    const ShapeDescriptor cd = make_composite_disc({0.2, -0.1}, 0.7);
    const ShapeDescriptor d = Disc{{0.2, -0.1}, 0.7};
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const Point p{u(rng), u(rng)};
        if (std::abs(std::hypot(p.x1 - 0.2, p.x2 + 0.1) - 0.7) < 1e-9) continue;
        CHECK(contains(cd, p) == contains(d, p));
    }
}

TEST_CASE("bounding box and diameter") {
    CHECK(diameter(Disc{{0.3, 0.0}, 0.5}) == 1.0);
    CHECK(diameter(Rect{{0.0, 0.0}, 1.0, 1.0}) == doctest::Approx(2.0 * std::sqrt(2.0)));
    const auto [lo, hi] = bounding_box(make_cusp_star());
    CHECK(lo.x1 == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(hi.x2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(diameter(make_cusp_star()) == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("domain validation") {
    CHECK_NOTHROW(validate_inside_domain(Disc{{0.0, 0.0}, 1.0}, 1.1));
    CHECK_THROWS_AS(validate_inside_domain(Disc{{0.0, 0.0}, 1.2}, 1.1), GeometryError);
    CHECK_THROWS_AS(indicator_coeffs_disc({0.5, 0.0}, 0.7, 4, 1.1), GeometryError);
    Composite broken;
    broken.loops.push_back(
        Loop{1, {SegmentPiece{{0, 0}, {1, 0}}, SegmentPiece{{1, 0.5}, {0, 0}}}});
    CHECK_THROWS_AS(validate_composite(broken), GeometryError);
}

TEST_CASE("signed area of the cusp star against a polygonal oracle") {
    const Composite star = make_cusp_star();
    CHECK(signed_area(star) == doctest::Approx(4.0 - M_PI).epsilon(1e-14));
    // polygonal approximation: each arc replaced by 250000 chords
    const int per_arc = 250000;
    struct A {
        double cx, cy, t0, t1;
    };
    const A arcs[4] = {{1, 1, -0.5 * M_PI, -M_PI},
                       {-1, 1, 0.0, -0.5 * M_PI},
                       {-1, -1, 0.5 * M_PI, 0.0},
                       {1, -1, M_PI, 0.5 * M_PI}};
    double poly = 0.0;
    double px = 1.0, py = 0.0;
    for (const A& a : arcs)
        for (int i = 1; i <= per_arc; ++i) {
            const double t = a.t0 + (a.t1 - a.t0) * i / per_arc;
            const double x = a.cx + std::cos(t), y = a.cy + std::sin(t);
            poly += 0.5 * (px * y - py * x);
            px = x;
            py = y;
        }
    CHECK(signed_area(star) == doctest::Approx(poly).epsilon(1e-10));
}

TEST_CASE("disc coefficients: area mode and symmetry") {
    const int F = 8;
    const double a = 1.1;
    const IndicatorCoeffs ic = indicator_coeffs_disc({0.0, 0.0}, 1.0, F, a);
    CHECK(ic.at(0, 0).real() == doctest::Approx(M_PI / 4.84).epsilon(1e-14));
    CHECK(ic.at(0, 0).imag() == 0.0);
    for (int j = -F; j <= F; ++j)
        for (int k = -F; k <= F; ++k) {
            CHECK(std::abs(ic.at(j, k) - ic.at(k, j)) <= 1e-14);
            CHECK(std::abs(ic.at(j, k) - ic.at(-j, k)) <= 1e-14);
            CHECK(std::abs(ic.at(-j, -k) - std::conj(ic.at(j, k))) <= 1e-14);
        }
}

TEST_CASE("disc coefficient c_{1,0} against adaptive polar quadrature") {
    const double a = 1.1, R = 1.0;
    const double k1 = M_PI / a;
    // (1/4a^2) int_D e^{-i k1 x1} dx in polar coordinates; the imaginary part
    // vanishes by symmetry
    auto inner = [&](double r) {
        return adaptive_integrate([&](double th) { return std::cos(k1 * r * std::cos(th)); }, 0.0,
                                  2.0 * M_PI, 1e-12) *
               r;
    };
    const double oracle = adaptive_integrate(inner, 0.0, R, 1e-11) / (4.0 * a * a);
    const IndicatorCoeffs ic = indicator_coeffs_disc({0.0, 0.0}, R, 4, a);
    CHECK(std::abs(ic.at(1, 0).real() - oracle) <= 1e-10);
    CHECK(std::abs(ic.at(1, 0).imag()) <= 1e-14);
}

TEST_CASE("rect coefficients") {
    const double a = 1.1;
    SUBCASE("centered square area mode") {
        const double s = 0.8;
        const IndicatorCoeffs ic = indicator_coeffs_rect({0.0, 0.0}, s, s, 6, a);
        CHECK(ic.at(0, 0).real() == doctest::Approx(s * s / (a * a)).epsilon(1e-14));
    }
    SUBCASE("modes vanish when j*s/a is a nonzero integer") {
        const double s = 0.55;  // s/a = 1/2, so j=2 vanishes
        const IndicatorCoeffs ic = indicator_coeffs_rect({0.0, 0.0}, s, s, 6, a);
        CHECK(std::abs(ic.at(2, 0)) <= 1e-15);
        CHECK(std::abs(ic.at(4, 3)) <= 1e-15);
    }
    SUBCASE("c_{2,3} against 40x40 Gauss-Legendre") {
        const double s = 0.5;
        const GaussRule& gl = gauss_legendre(40);
        cplx oracle(0.0, 0.0);
        for (int i = 0; i < 40; ++i)
            for (int j = 0; j < 40; ++j) {
                const double x = s * gl.x[i], y = s * gl.x[j];
                oracle += gl.w[i] * gl.w[j] *
                          std::polar(1.0, -(M_PI * 2 * x / a + M_PI * 3 * y / a));
            }
        oracle *= s * s / (4.0 * a * a);
        const IndicatorCoeffs ic = indicator_coeffs_rect({0.0, 0.0}, s, s, 6, a);
        CHECK(std::abs(ic.at(2, 3) - oracle) <= 1e-12);
    }
}

TEST_CASE("composite disc reproduces closed-form disc coefficients") {
    const double a = 1.1;
    const int F = 32;
    const IndicatorCoeffs closed = indicator_coeffs_disc({0.0, 0.0}, 1.0, F, a);
    const IndicatorCoeffs comp =
        indicator_coeffs_composite(make_composite_disc({0.0, 0.0}, 1.0), F, a, 1e-11);
    double worst = 0.0;
    for (int j = -F; j <= F; ++j)
        for (int k = -F; k <= F; ++k)
            worst = std::max(worst, std::abs(closed.at(j, k) - comp.at(j, k)));
    CHECK(worst <= 1e-10);
}

TEST_CASE("cusp star coefficients") {
    const double a = 1.1;
    const int F = 16;
    const IndicatorCoeffs ic = indicator_coeffs_composite(make_cusp_star(), F, a, 1e-10);
    SUBCASE("area mode") {
        CHECK(ic.at(0, 0).real() == doctest::Approx((4.0 - M_PI) / (4.0 * a * a)).epsilon(1e-13));
        CHECK(std::abs(ic.at(0, 0).imag()) <= 1e-15);
    }
    SUBCASE("Hermitian symmetry at random modes") {
        std::mt19937 rng(5);
        std::uniform_int_distribution<int> d(-F, F);
        for (int i = 0; i < 200; ++i) {
            const int j = d(rng), k = d(rng);
            CHECK(std::abs(ic.at(-j, -k) - std::conj(ic.at(j, k))) <= 1e-12);
        }
    }
    SUBCASE("four-fold symmetry of the star") {
        for (int j = -F; j <= F; ++j)
            for (int k = -F; k <= F; ++k) CHECK(std::abs(ic.at(j, k) - ic.at(k, j)) <= 1e-10);
    }
}

TEST_CASE("Parseval partial-sum bound for every provider") {
    const double a = 1.1;
    auto sum_sq = [](const IndicatorCoeffs& ic) {
        double s = 0.0;
        for (const cplx& v : ic.c) s += std::norm(v);
        return s;
    };
    // |chi|^2 integrates to area(D); the truncated coefficient mass cannot
    // exceed area/(4a^2)
    const IndicatorCoeffs d = indicator_coeffs_disc({0.0, 0.0}, 1.0, 24, a);
    CHECK(sum_sq(d) <= M_PI / (4 * a * a) + 1e-9);
    const IndicatorCoeffs r = indicator_coeffs_rect({0.1, -0.2}, 0.6, 0.4, 24, a);
    CHECK(sum_sq(r) <= 4 * 0.6 * 0.4 / (4 * a * a) + 1e-9);
    const IndicatorCoeffs s = indicator_coeffs_composite(make_cusp_star(), 16, a, 1e-10);
    CHECK(sum_sq(s) <= (4.0 - M_PI) / (4 * a * a) + 1e-9);
}

TEST_CASE("generic provider") {
    const double a = 1.1;
    SUBCASE("reproduces the disc closed form at F=16") {
        Generic g{[](Point p) { return std::hypot(p.x1, p.x2) <= 1.0; }, {-1.0, -1.0}, {1.0, 1.0}};
        const IndicatorCoeffs gc = indicator_coeffs_generic(g, 16, a);
        const IndicatorCoeffs dc = indicator_coeffs_disc({0.0, 0.0}, 1.0, 16, a);
        double worst = 0.0;
        for (int j = -16; j <= 16; ++j)
            for (int k = -16; k <= 16; ++k)
                worst = std::max(worst, std::abs(gc.at(j, k) - dc.at(j, k)));
        CHECK(worst <= 1e-7);
    }
    SUBCASE("empty set gives zero coefficients") {
        Generic g{[](Point) { return false; }, {-1.0, -1.0}, {1.0, 1.0}};
        const IndicatorCoeffs gc = indicator_coeffs_generic(g, 4, a);
        for (const cplx& v : gc.c) CHECK(std::abs(v) == 0.0);
    }
    SUBCASE("axis-aligned box matches the rectangle closed form") {
        Generic g{[](Point p) { return std::abs(p.x1 - 0.1) <= 0.5 && std::abs(p.x2) <= 0.7; },
                  {-0.4, -0.7},
                  {0.6, 0.7}};
        const IndicatorCoeffs gc = indicator_coeffs_generic(g, 8, a);
        const IndicatorCoeffs rc = indicator_coeffs_rect({0.1, 0.0}, 0.5, 0.7, 8, a);
        double worst = 0.0;
        for (int j = -8; j <= 8; ++j)
            for (int k = -8; k <= 8; ++k)
                worst = std::max(worst, std::abs(gc.at(j, k) - rc.at(j, k)));
        CHECK(worst <= 1e-7);
    }
    SUBCASE("cost guard") {
        Generic g{[](Point) { return true; }, {-1.0, -1.0}, {1.0, 1.0}};
        CHECK_THROWS_AS(indicator_coeffs_generic(g, 65, a), DomainError);
    }
}

TEST_CASE("provider dispatch") {
    const IndicatorCoeffs via_variant = indicator_coeffs(Disc{{0.0, 0.0}, 0.8}, 6, 1.1);
    const IndicatorCoeffs direct = indicator_coeffs_disc({0.0, 0.0}, 0.8, 6, 1.1);
    for (size_t i = 0; i < direct.c.size(); ++i) CHECK(via_variant.c[i] == direct.c[i]);
}

TEST_CASE("shape hash") {
    const auto h1 = shape_hash(Disc{{0.0, 0.0}, 1.0});
    const auto h2 = shape_hash(Disc{{0.0, 0.0}, 1.0000001});
    CHECK(h1 != h2);
    CHECK(h1 == shape_hash(Disc{{0.0, 0.0}, 1.0}));
    CHECK_NOTHROW(shape_hash(make_cusp_star()));
    Generic g{[](Point) { return false; }, {-1, -1}, {1, 1}};
    CHECK_THROWS_AS(shape_hash(ShapeDescriptor(g)), GeometryError);
}

TEST_CASE("coefficient cache roundtrip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fspt_geom_test";
    fs::create_directories(dir);
    const fs::path file = dir / "cache.bin";
    const IndicatorCoeffs ic = indicator_coeffs_disc({0.1, 0.0}, 0.5, 5, 1.1);
    const auto hash = shape_hash(Disc{{0.1, 0.0}, 0.5});
    save_coeffs_cache(file, ic, hash, 1e-10);

    auto loaded = load_coeffs_cache(file, hash, 5, 1.1, 1e-10);
    REQUIRE(loaded.has_value());
    CHECK(loaded->c == ic.c);
    CHECK(!load_coeffs_cache(file, hash, 6, 1.1, 1e-10).has_value());
    CHECK(!load_coeffs_cache(file, hash, 5, 1.2, 1e-10).has_value());
    CHECK(!load_coeffs_cache(file, shape_hash(Disc{{0.0, 0.0}, 0.5}), 5, 1.1, 1e-10).has_value());
    fs::remove_all(dir);
}

TEST_CASE("indicator_coeffs_cached reuses the file") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fspt_geom_cache";
    fs::remove_all(dir);
    const ShapeDescriptor star = make_cusp_star();
    const IndicatorCoeffs first = indicator_coeffs_cached(star, 8, 1.1, 1e-10, dir);
    bool have_file = false;
    for (auto& e : fs::directory_iterator(dir)) have_file |= e.path().extension() == ".bin";
    CHECK(have_file);
    const IndicatorCoeffs second = indicator_coeffs_cached(star, 8, 1.1, 1e-10, dir);
    CHECK(first.c == second.c);
    fs::remove_all(dir);
}
