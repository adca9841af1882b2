#include "fspt/windowing.hpp"

#include <cmath>

#include "fspt/numerics.hpp"

namespace fspt {

void validate_window(const WindowParams& p, double a) {
    if (!(0.0 < p.r_in && p.r_in < p.r_out && p.r_out <= a))
        throw DomainError("window requires 0 < r_in < r_out <= a");
}

void validate_window_covers(const WindowParams& p, const ShapeDescriptor& shape) {
    auto [lo, hi] = bounding_box(shape);
    if (!(lo.x1 >= -p.r_in && lo.x2 >= -p.r_in && hi.x1 <= p.r_in && hi.x2 <= p.r_in))
        throw GeometryError("window too tight: scatterer not inside [-r_in, r_in]^2");
}

double zeta(double x, const WindowParams& p) {
    const double ax = std::abs(x);
    if (ax <= p.r_in) return 1.0;
    if (ax >= p.r_out) return 0.0;
    const double r = (ax - p.r_in) / (p.r_out - p.r_in);
    if (r < 1.0 / 745.0) return 1.0;  // e^{-1/r} underflows; continuous limit
    return std::exp(2.0 * std::exp(-1.0 / r) / (r - 1.0));
}

double eta(Point x, const WindowParams& p) { return zeta(x.x1, p) * zeta(x.x2, p); }

ComplexField sample_contrast(const ContrastSpec& c, const WindowParams& p, const GridSpec& g) {
    validate_window(p, g.a);
    validate_window_covers(p, c.shape);
    ComplexField f(g);
    parallel_for(0, g.n, [&](long lo, long hi) {
        for (long j1 = lo; j1 < hi; ++j1) {
            const double z1 = zeta(g.node(static_cast<int>(j1), 0).x1, p);
            for (int j2 = 0; j2 < g.n; ++j2) {
                const Point x = g.node(static_cast<int>(j1), j2);
                f.at(static_cast<int>(j1), j2) = c.extension(x) * z1 * zeta(x.x2, p);
            }
        }
    });
    return f;
}

}  // namespace fspt
