#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "fspt/grid.hpp"

namespace fspt {

// ---------------------------------------------------------------------------
// Scatterer descriptions

struct Disc {
    Point center;
    double radius = 1.0;
};

struct Rect {
    Point center;
    double hw1 = 1.0;  // half-widths
    double hw2 = 1.0;
};

/// Circular arc on the circle (center, radius), traversed from theta0 to
/// theta1 (theta1 < theta0 means clockwise). The enclosed region lies on
/// the left of the direction of travel.
struct ArcPiece {
    Point center;
    double radius = 1.0;
    double theta0 = 0.0;
    double theta1 = 0.0;
};

struct SegmentPiece {
    Point a;
    Point b;
};

using BoundaryPiece = std::variant<ArcPiece, SegmentPiece>;

/// Closed, non-self-intersecting loop of arcs and segments with an overall
/// sign; a shape is the set where the signed winding count is positive.
struct Loop {
    int sign = 1;
    std::vector<BoundaryPiece> pieces;
};

struct Composite {
    std::vector<Loop> loops;
};

/// Arbitrary membership predicate with a user-supplied bounding box.
struct Generic {
    std::function<bool(Point)> inside;
    Point bbox_lo;
    Point bbox_hi;
};

using ShapeDescriptor = std::variant<Disc, Rect, Composite, Generic>;

/// Membership test; boundary points count as inside (closed set).
bool contains(const ShapeDescriptor& shape, Point x);

/// Axis-aligned bounding box {lo, hi}.
std::pair<Point, Point> bounding_box(const ShapeDescriptor& shape);

/// Bounding-box diagonal for Composite/Generic, exact for Disc/Rect.
double diameter(const ShapeDescriptor& shape);

/// Throws GeometryError unless the shape lies strictly inside (-a,a)^2.
void validate_inside_domain(const ShapeDescriptor& shape, double a);

/// Checks loop closure and piece chaining of a Composite.
void validate_composite(const Composite& shape);

double signed_area(const Composite& shape);

/// Four-cusped star: the unit square minus the four unit quarter-discs
/// centered at (+-1, +-1); cusps at (+-1,0) and (0,+-1).
Composite make_cusp_star();

/// A full disc expressed as four 90-degree arcs (testing aid).
Composite make_composite_disc(Point center, double radius);

// ---------------------------------------------------------------------------
// Truncated Fourier coefficients of the indicator on the period cell [-a,a]^2

/// Coefficients c_jk, -F <= j,k <= F, of chi_D with period 2a:
///   chi^F(x) = sum_jk c_jk exp(i pi j x1 / a) exp(i pi k x2 / a).
struct IndicatorCoeffs {
    int F = 0;
    double a = 0.0;
    std::vector<cplx> c;  // (2F+1)^2 row-major, j outer, both from -F to F

    cplx& at(int j, int k) { return c[static_cast<long>(j + F) * (2 * F + 1) + (k + F)]; }
    const cplx& at(int j, int k) const {
        return c[static_cast<long>(j + F) * (2 * F + 1) + (k + F)];
    }
};

IndicatorCoeffs indicator_coeffs_disc(Point center, double R, int F, double a);
IndicatorCoeffs indicator_coeffs_rect(Point center, double hw1, double hw2, int F, double a);
IndicatorCoeffs indicator_coeffs_composite(const Composite& shape, int F, double a,
                                           double tol = 1e-10);
IndicatorCoeffs indicator_coeffs_generic(const Generic& shape, int F, double a);

/// Dispatch on the shape variant.
IndicatorCoeffs indicator_coeffs(const ShapeDescriptor& shape, int F, double a,
                                 double tol = 1e-10);

// ---------------------------------------------------------------------------
// Coefficient cache (binary file, magic "LSC1")

/// 32-byte digest of a canonical shape serialization (4-lane FNV-1a-64).
/// Generic shapes are not hashable and throw GeometryError.
std::array<std::uint8_t, 32> shape_hash(const ShapeDescriptor& shape);

void save_coeffs_cache(const std::filesystem::path& file, const IndicatorCoeffs& ic,
                       const std::array<std::uint8_t, 32>& hash, double tol);
std::optional<IndicatorCoeffs> load_coeffs_cache(const std::filesystem::path& file,
                                                 const std::array<std::uint8_t, 32>& hash,
                                                 int F, double a, double tol);

/// indicator_coeffs with a file cache for Composite shapes (others are cheap
/// enough to recompute). cache_dir empty disables caching.
IndicatorCoeffs indicator_coeffs_cached(const ShapeDescriptor& shape, int F, double a,
                                        double tol, const std::filesystem::path& cache_dir);

}  // namespace fspt
