#include "fspt/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "fspt/numerics.hpp"
#include "fspt/specfun.hpp"

namespace fspt {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double mod_2pi(double t) {
    double r = std::fmod(t, kTwoPi);
    return r < 0.0 ? r + kTwoPi : r;
}

Point arc_point(const ArcPiece& a, double theta) {
    return {a.center.x1 + a.radius * std::cos(theta), a.center.x2 + a.radius * std::sin(theta)};
}

Point piece_start(const BoundaryPiece& p) {
    if (const auto* a = std::get_if<ArcPiece>(&p)) return arc_point(*a, a->theta0);
    return std::get<SegmentPiece>(p).a;
}

Point piece_end(const BoundaryPiece& p) {
    if (const auto* a = std::get_if<ArcPiece>(&p)) return arc_point(*a, a->theta1);
    return std::get<SegmentPiece>(p).b;
}

double dist2(Point p, Point q) {
    const double d1 = p.x1 - q.x1, d2 = p.x2 - q.x2;
    return d1 * d1 + d2 * d2;
}

double segment_distance(const SegmentPiece& s, Point p) {
    const double dx = s.b.x1 - s.a.x1, dy = s.b.x2 - s.a.x2;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x1 - s.a.x1) * dx + (p.x2 - s.a.x2) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::sqrt(dist2(p, {s.a.x1 + t * dx, s.a.x2 + t * dy}));
}

double arc_distance(const ArcPiece& a, Point p) {
    const double q1 = p.x1 - a.center.x1, q2 = p.x2 - a.center.x2;
    const double r = std::hypot(q1, q2);
    const double phi = std::atan2(q2, q1);
    const double sweep = std::abs(a.theta1 - a.theta0);
    const double s = a.theta1 >= a.theta0 ? 1.0 : -1.0;
    const double delta = mod_2pi(s * (phi - a.theta0));
    if (delta <= sweep) return std::abs(r - a.radius);
    return std::sqrt(std::min(dist2(p, arc_point(a, a.theta0)), dist2(p, arc_point(a, a.theta1))));
}

double boundary_distance(const Composite& c, Point p) {
    double d = std::numeric_limits<double>::infinity();
    for (const Loop& lp : c.loops)
        for (const BoundaryPiece& pc : lp.pieces) {
            if (const auto* a = std::get_if<ArcPiece>(&pc))
                d = std::min(d, arc_distance(*a, p));
            else
                d = std::min(d, segment_distance(std::get<SegmentPiece>(pc), p));
        }
    return d;
}

// Signed crossings of the ray {x1 > p.x1, x2 = p.x2} with one loop.
// Sets ok=false on near-degenerate geometry (tangency, endpoint hit).
int loop_winding(const Loop& lp, Point p, bool& ok) {
    int w = 0;
    const double eps = 1e-13;
    for (const BoundaryPiece& pc : lp.pieces) {
        if (const auto* sg = std::get_if<SegmentPiece>(&pc)) {
            const double dy = sg->b.x2 - sg->a.x2;
            const double scale = 1.0 + std::abs(sg->a.x2) + std::abs(sg->b.x2);
            if (std::abs(dy) < eps * scale) {
                if (std::abs(p.x2 - sg->a.x2) < eps * scale) ok = false;
                continue;
            }
            const double t = (p.x2 - sg->a.x2) / dy;
            if (std::abs(t) < eps || std::abs(t - 1.0) < eps) ok = false;
            if (t < 0.0 || t >= 1.0) continue;
            const double xi = sg->a.x1 + (sg->b.x1 - sg->a.x1) * t;
            if (std::abs(xi - p.x1) < eps * (1.0 + std::abs(p.x1))) ok = false;
            if (xi > p.x1) w += dy > 0.0 ? 1 : -1;
        } else {
            const auto& a = std::get<ArcPiece>(pc);
            const double dy = p.x2 - a.center.x2;
            const double margin = std::abs(a.radius) - std::abs(dy);
            if (margin < eps * a.radius) {
                if (std::abs(margin) < eps * a.radius) ok = false;
                continue;
            }
            const double xo = std::sqrt(a.radius * a.radius - dy * dy);
            const double sweep = std::abs(a.theta1 - a.theta0);
            const double s = a.theta1 >= a.theta0 ? 1.0 : -1.0;
            for (int side = 0; side < 2; ++side) {
                const double xc = a.center.x1 + (side == 0 ? xo : -xo);
                const double phi = std::atan2(dy, side == 0 ? xo : -xo);
                const double delta = mod_2pi(s * (phi - a.theta0));
                if (delta < eps || std::abs(delta - sweep) < eps) ok = false;
                if (delta >= sweep) continue;
                if (std::abs(xc - p.x1) < eps * (1.0 + std::abs(p.x1))) ok = false;
                if (xc <= p.x1) continue;
                const int cross = (side == 0 ? 1 : -1) * (s > 0 ? 1 : -1);
                w += cross;
            }
        }
    }
    return w;
}

bool composite_contains(const Composite& c, Point p) {
    if (boundary_distance(c, p) <= 1e-12 * (1.0 + std::abs(p.x1) + std::abs(p.x2))) return true;
    Point q = p;
    for (int attempt = 0; attempt < 12; ++attempt) {
        bool ok = true;
        int total = 0;
        for (const Loop& lp : c.loops) total += lp.sign * loop_winding(lp, q, ok);
        if (ok) return total > 0;
        q.x2 = p.x2 + (attempt + 1) * 3.7e-12 * (1.0 + std::abs(p.x2));
    }
    throw GeometryError("contains: ray casting failed to escape degenerate configuration");
}

void expand_bbox(Point& lo, Point& hi, Point p) {
    lo.x1 = std::min(lo.x1, p.x1);
    lo.x2 = std::min(lo.x2, p.x2);
    hi.x1 = std::max(hi.x1, p.x1);
    hi.x2 = std::max(hi.x2, p.x2);
}

std::pair<Point, Point> composite_bbox(const Composite& c) {
    Point lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const Loop& lp : c.loops)
        for (const BoundaryPiece& pc : lp.pieces) {
            expand_bbox(lo, hi, piece_start(pc));
            expand_bbox(lo, hi, piece_end(pc));
            if (const auto* a = std::get_if<ArcPiece>(&pc)) {
                // axis extremes of the circle that fall inside the sweep
                const double sweep = std::abs(a->theta1 - a->theta0);
                const double s = a->theta1 >= a->theta0 ? 1.0 : -1.0;
                for (int k = 0; k < 4; ++k) {
                    const double phi = 0.5 * M_PI * k;
                    if (mod_2pi(s * (phi - a->theta0)) <= sweep) expand_bbox(lo, hi, arc_point(*a, phi));
                }
            }
        }
    return {lo, hi};
}

double piece_area(const BoundaryPiece& pc) {
    // contribution to (1/2) oint (x1 dx2 - x2 dx1)
    if (const auto* sg = std::get_if<SegmentPiece>(&pc))
        return 0.5 * (sg->a.x1 * sg->b.x2 - sg->a.x2 * sg->b.x1);
    const auto& a = std::get<ArcPiece>(pc);
    const double st = std::sin(a.theta1) - std::sin(a.theta0);
    const double ct = std::cos(a.theta1) - std::cos(a.theta0);
    return 0.5 * (a.radius * a.center.x1 * st - a.radius * a.center.x2 * ct +
                  a.radius * a.radius * (a.theta1 - a.theta0));
}

}  // namespace

bool contains(const ShapeDescriptor& shape, Point x) {
    if (std::isnan(x.x1) || std::isnan(x.x2)) throw DomainError("contains: point is NaN");
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disc>) {
                return dist2(x, s.center) <= s.radius * s.radius;
            } else if constexpr (std::is_same_v<T, Rect>) {
                return std::abs(x.x1 - s.center.x1) <= s.hw1 && std::abs(x.x2 - s.center.x2) <= s.hw2;
            } else if constexpr (std::is_same_v<T, Composite>) {
                return composite_contains(s, x);
            } else {
                return s.inside(x);
            }
        },
        shape);
}

std::pair<Point, Point> bounding_box(const ShapeDescriptor& shape) {
    return std::visit(
        [&](const auto& s) -> std::pair<Point, Point> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disc>) {
                return {{s.center.x1 - s.radius, s.center.x2 - s.radius},
                        {s.center.x1 + s.radius, s.center.x2 + s.radius}};
            } else if constexpr (std::is_same_v<T, Rect>) {
                return {{s.center.x1 - s.hw1, s.center.x2 - s.hw2},
                        {s.center.x1 + s.hw1, s.center.x2 + s.hw2}};
            } else if constexpr (std::is_same_v<T, Composite>) {
                return composite_bbox(s);
            } else {
                return {s.bbox_lo, s.bbox_hi};
            }
        },
        shape);
}

double diameter(const ShapeDescriptor& shape) {
    if (const auto* d = std::get_if<Disc>(&shape)) return 2.0 * d->radius;
    if (const auto* r = std::get_if<Rect>(&shape)) return 2.0 * std::hypot(r->hw1, r->hw2);
    auto [lo, hi] = bounding_box(shape);
    return std::hypot(hi.x1 - lo.x1, hi.x2 - lo.x2);
}

void validate_inside_domain(const ShapeDescriptor& shape, double a) {
    auto [lo, hi] = bounding_box(shape);
    if (!(lo.x1 > -a && lo.x2 > -a && hi.x1 < a && hi.x2 < a))
        throw GeometryError("shape is not strictly inside (-a,a)^2");
}

void validate_composite(const Composite& shape) {
    if (shape.loops.empty()) throw GeometryError("composite has no loops");
    for (const Loop& lp : shape.loops) {
        if (lp.sign != 1 && lp.sign != -1) throw GeometryError("loop sign must be +1 or -1");
        if (lp.pieces.empty()) throw GeometryError("empty loop");
        for (size_t i = 0; i < lp.pieces.size(); ++i) {
            if (const auto* a = std::get_if<ArcPiece>(&lp.pieces[i])) {
                if (!(a->radius > 0.0)) throw GeometryError("arc radius must be positive");
                if (std::abs(a->theta1 - a->theta0) > kTwoPi + 1e-12)
                    throw GeometryError("arc sweep exceeds full turn");
            }
            const Point e = piece_end(lp.pieces[i]);
            const Point s = piece_start(lp.pieces[(i + 1) % lp.pieces.size()]);
            if (dist2(e, s) > 1e-18 * (1.0 + dist2(e, {0, 0})))
                throw GeometryError("loop pieces do not chain into a closed curve");
        }
    }
}

double signed_area(const Composite& shape) {
    double area = 0.0;
    for (const Loop& lp : shape.loops) {
        double la = 0.0;
        for (const BoundaryPiece& pc : lp.pieces) la += piece_area(pc);
        area += lp.sign * la;
    }
    return area;
}

Composite make_cusp_star() {
    Composite c;
    Loop lp;
    lp.sign = 1;
    lp.pieces = {
        ArcPiece{{1.0, 1.0}, 1.0, -0.5 * M_PI, -M_PI},    // (1,0) -> (0,1)
        ArcPiece{{-1.0, 1.0}, 1.0, 0.0, -0.5 * M_PI},     // (0,1) -> (-1,0)
        ArcPiece{{-1.0, -1.0}, 1.0, 0.5 * M_PI, 0.0},     // (-1,0) -> (0,-1)
        ArcPiece{{1.0, -1.0}, 1.0, M_PI, 0.5 * M_PI},     // (0,-1) -> (1,0)
    };
    c.loops.push_back(std::move(lp));
    return c;
}

Composite make_composite_disc(Point center, double radius) {
    Composite c;
    Loop lp;
    lp.sign = 1;
    for (int k = 0; k < 4; ++k)
        lp.pieces.push_back(ArcPiece{center, radius, 0.5 * M_PI * k, 0.5 * M_PI * (k + 1)});
    c.loops.push_back(std::move(lp));
    return c;
}

// ---------------------------------------------------------------------------
// Coefficient providers

IndicatorCoeffs indicator_coeffs_disc(Point center, double R, int F, double a) {
    if (F < 1) throw DomainError("indicator_coeffs_disc: F must be >= 1");
    validate_inside_domain(Disc{center, R}, a);
    IndicatorCoeffs ic{F, a, std::vector<cplx>(static_cast<long>(2 * F + 1) * (2 * F + 1))};
    const int m = 2 * F + 1;
    const double inv4a2 = 1.0 / (4.0 * a * a);

    // radial factor on one quadrant; separable center phase
    std::vector<double> radial(static_cast<long>(F + 1) * (F + 1));
    parallel_for(0, F + 1, [&](long lo, long hi) {
        for (long j = lo; j < hi; ++j)
            for (long k = 0; k <= F; ++k) {
                const double kn = M_PI * std::hypot(static_cast<double>(j), static_cast<double>(k)) / a;
                radial[j * (F + 1) + k] =
                    (j == 0 && k == 0) ? M_PI * R * R * inv4a2
                                       : 2.0 * M_PI * R * inv4a2 * bessel_j1(kn * R) / kn;
            }
    });
    std::vector<cplx> e1(m), e2(m);
    for (int j = -F; j <= F; ++j) {
        e1[j + F] = std::polar(1.0, -M_PI * j * center.x1 / a);
        e2[j + F] = std::polar(1.0, -M_PI * j * center.x2 / a);
    }
    parallel_for(0, m, [&](long lo, long hi) {
        for (long jj = lo; jj < hi; ++jj)
            for (long kk = 0; kk < m; ++kk) {
                const long ja = std::labs(jj - F), ka = std::labs(kk - F);
                ic.c[jj * m + kk] = radial[ja * (F + 1) + ka] * e1[jj] * e2[kk];
            }
    });
    return ic;
}

IndicatorCoeffs indicator_coeffs_rect(Point center, double hw1, double hw2, int F, double a) {
    if (F < 1) throw DomainError("indicator_coeffs_rect: F must be >= 1");
    validate_inside_domain(Rect{center, hw1, hw2}, a);
    IndicatorCoeffs ic{F, a, std::vector<cplx>(static_cast<long>(2 * F + 1) * (2 * F + 1))};
    const int m = 2 * F + 1;
    auto factor_1d = [&](int j, double c, double s) -> cplx {
        if (j == 0) return s / a;
        return std::polar(1.0, -M_PI * j * c / a) * (std::sin(M_PI * j * s / a) / (M_PI * j));
    };
    std::vector<cplx> f1(m), f2(m);
    for (int j = -F; j <= F; ++j) {
        f1[j + F] = factor_1d(j, center.x1, hw1);
        f2[j + F] = factor_1d(j, center.x2, hw2);
    }
    for (long jj = 0; jj < m; ++jj)
        for (long kk = 0; kk < m; ++kk) ic.c[jj * m + kk] = f1[jj] * f2[kk];
    return ic;
}

namespace {

struct ArcNode {
    double x1, x2;   // position
    double v1, v2;   // (cos theta, sin theta)
    double w;        // GL weight * signed dtheta/2 * radius * loop sign
};

// Quadrature nodes for every arc piece; density is >= 6 nodes per
// oscillation wavelength of the largest mode plus 8 base nodes, times mult.
std::vector<ArcNode> build_arc_nodes(const Composite& shape, double kmax, int mult) {
    const GaussRule& gl = gauss_legendre(16);
    std::vector<ArcNode> nodes;
    for (const Loop& lp : shape.loops)
        for (const BoundaryPiece& pc : lp.pieces) {
            const auto* a = std::get_if<ArcPiece>(&pc);
            if (!a) continue;
            const double len = a->radius * std::abs(a->theta1 - a->theta0);
            const double want = 6.0 * (kmax * len / kTwoPi) + 8.0;
            const int panels = std::max(1, static_cast<int>(std::ceil(mult * want / 16.0)));
            const double dth = (a->theta1 - a->theta0) / panels;
            for (int p = 0; p < panels; ++p) {
                const double t0 = a->theta0 + p * dth;
                const double mid = t0 + 0.5 * dth, half = 0.5 * dth;
                for (int q = 0; q < 16; ++q) {
                    const double th = mid + half * gl.x[q];
                    ArcNode nd;
                    nd.v1 = std::cos(th);
                    nd.v2 = std::sin(th);
                    nd.x1 = a->center.x1 + a->radius * nd.v1;
                    nd.x2 = a->center.x2 + a->radius * nd.v2;
                    nd.w = gl.w[q] * half * a->radius * lp.sign;
                    nodes.push_back(nd);
                }
            }
        }
    return nodes;
}

struct SegmentData {
    double a1, a2;  // start
    double t1, t2;  // unit tangent
    double n1, n2;  // outward normal (right of travel)
    double len;
    int sign;
};

std::vector<SegmentData> collect_segments(const Composite& shape) {
    std::vector<SegmentData> segs;
    for (const Loop& lp : shape.loops)
        for (const BoundaryPiece& pc : lp.pieces) {
            const auto* s = std::get_if<SegmentPiece>(&pc);
            if (!s) continue;
            SegmentData d;
            d.a1 = s->a.x1;
            d.a2 = s->a.x2;
            const double dx = s->b.x1 - s->a.x1, dy = s->b.x2 - s->a.x2;
            d.len = std::hypot(dx, dy);
            if (d.len <= 0.0) throw GeometryError("zero-length segment");
            d.t1 = dx / d.len;
            d.t2 = dy / d.len;
            d.n1 = d.t2;
            d.n2 = -d.t1;
            d.sign = lp.sign;
            segs.push_back(d);
        }
    return segs;
}

cplx expm1_over(const cplx& z) {
    // (e^z - 1)/z, stable near 0
    if (std::abs(z) < 1e-6) return 1.0 + z * (0.5 + z / 6.0);
    return (std::exp(z) - 1.0) / z;
}

// integral over D of exp(-i k.x) for one mode via the boundary formula,
// arcs from the node table, segments in closed form.
cplx boundary_mode_integral(double kv1, double kv2, const std::vector<ArcNode>& nodes,
                            const std::vector<SegmentData>& segs) {
    const double k2 = kv1 * kv1 + kv2 * kv2;
    cplx acc(0.0, 0.0);
    for (const ArcNode& nd : nodes) {
        const double kn = kv1 * nd.v1 + kv2 * nd.v2;
        acc += nd.w * kn * std::polar(1.0, -(kv1 * nd.x1 + kv2 * nd.x2));
    }
    for (const SegmentData& s : segs) {
        const double kn = kv1 * s.n1 + kv2 * s.n2;
        const double kt = kv1 * s.t1 + kv2 * s.t2;
        const cplx ph = std::polar(1.0, -(kv1 * s.a1 + kv2 * s.a2));
        acc += static_cast<double>(s.sign) * kn * ph * s.len * expm1_over(cplx(0.0, -kt * s.len));
    }
    return cplx(0.0, 1.0) / k2 * acc;
}

// Full coefficient table with incremental phase powers over mode rows.
void fill_composite_coeffs(IndicatorCoeffs& ic, const std::vector<ArcNode>& nodes,
                           const std::vector<SegmentData>& segs, double area) {
    const int F = ic.F;
    const double a = ic.a;
    const int m = 2 * F + 1;
    const double inv4a2 = 1.0 / (4.0 * a * a);
    const size_t Q = nodes.size();

    std::vector<cplx> p1(Q), p2(Q);
    for (size_t q = 0; q < Q; ++q) {
        p1[q] = std::polar(1.0, -M_PI * nodes[q].x1 / a);
        p2[q] = std::polar(1.0, -M_PI * nodes[q].x2 / a);
    }
    auto ipow = [](cplx z, long e) {
        if (e < 0) {
            z = std::conj(z);
            e = -e;
        }
        cplx r(1.0, 0.0);
        while (e) {
            if (e & 1) r *= z;
            z *= z;
            e >>= 1;
        }
        return r;
    };

    parallel_for(0, m, [&](long lo, long hi) {
        std::vector<cplx> w1(Q), w2(Q), col(Q);
        for (long jj = lo; jj < hi; ++jj) {
            const long j = jj - F;
            const double kv1 = M_PI * j / a;
            for (size_t q = 0; q < Q; ++q) {
                const cplx rowp = ipow(p1[q], j);
                w1[q] = nodes[q].w * nodes[q].v1 * rowp;
                w2[q] = nodes[q].w * nodes[q].v2 * rowp;
                col[q] = ipow(p2[q], -static_cast<long>(F));
            }
            for (long kk = 0; kk < m; ++kk) {
                const long k = kk - F;
                if (j == 0 && k == 0) {
                    ic.c[jj * m + kk] = area * inv4a2;
                    for (size_t q = 0; q < Q; ++q) col[q] *= p2[q];
                    continue;
                }
                const double kv2 = M_PI * k / a;
                const double k2 = kv1 * kv1 + kv2 * kv2;
                cplx s1(0.0, 0.0), s2(0.0, 0.0);
                for (size_t q = 0; q < Q; ++q) {
                    s1 += w1[q] * col[q];
                    s2 += w2[q] * col[q];
                    col[q] *= p2[q];
                }
                cplx acc = kv1 * s1 + kv2 * s2;
                for (const SegmentData& sg : segs) {
                    const double kn = kv1 * sg.n1 + kv2 * sg.n2;
                    const double kt = kv1 * sg.t1 + kv2 * sg.t2;
                    const cplx ph = std::polar(1.0, -(kv1 * sg.a1 + kv2 * sg.a2));
                    acc += static_cast<double>(sg.sign) * kn * ph * sg.len *
                           expm1_over(cplx(0.0, -kt * sg.len));
                }
                ic.c[jj * m + kk] = cplx(0.0, 1.0) / k2 * acc * inv4a2;
            }
        }
    });
}

// Deterministic verification subset of modes.
std::vector<std::pair<int, int>> verification_modes(int F) {
    std::vector<int> axis = {-F, -F / 2, -3, -1, 0, 1, 2, F / 2, F};
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    std::vector<std::pair<int, int>> modes;
    for (int j : axis)
        for (int k : axis)
            if (j != 0 || k != 0) modes.emplace_back(j, k);
    std::uint64_t state = 0x243F6A8885A308D3ull;  // fixed-seed LCG
    for (int i = 0; i < 64; ++i) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        const int j = static_cast<int>(state % (2 * F + 1)) - F;
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        const int k = static_cast<int>(state % (2 * F + 1)) - F;
        if (j != 0 || k != 0) modes.emplace_back(j, k);
    }
    return modes;
}

}  // namespace

IndicatorCoeffs indicator_coeffs_composite(const Composite& shape, int F, double a, double tol) {
    if (F < 1) throw DomainError("indicator_coeffs_composite: F must be >= 1");
    validate_composite(shape);
    validate_inside_domain(shape, a);
    const double kmax = M_PI * F * std::numbers::sqrt2 / a;
    const double inv4a2 = 1.0 / (4.0 * a * a);
    const auto segs = collect_segments(shape);
    const auto modes = verification_modes(F);

    auto subset_values = [&](const std::vector<ArcNode>& nodes) {
        std::vector<cplx> vals(modes.size());
        parallel_for(0, static_cast<long>(modes.size()), [&](long lo, long hi) {
            for (long i = lo; i < hi; ++i)
                vals[i] = boundary_mode_integral(M_PI * modes[i].first / a,
                                                 M_PI * modes[i].second / a, nodes, segs) *
                          inv4a2;
        });
        return vals;
    };

    int mult = 1;
    std::vector<ArcNode> nodes = build_arc_nodes(shape, kmax, mult);
    std::vector<cplx> coarse = subset_values(nodes);
    for (;;) {
        const int mult2 = 2 * mult;
        std::vector<ArcNode> nodes2 = build_arc_nodes(shape, kmax, mult2);
        std::vector<cplx> fine = subset_values(nodes2);
        double diff = 0.0;
        for (size_t i = 0; i < fine.size(); ++i) diff = std::max(diff, std::abs(fine[i] - coarse[i]));
        if (diff <= tol) {
            IndicatorCoeffs ic{F, a, std::vector<cplx>(static_cast<long>(2 * F + 1) * (2 * F + 1))};
            fill_composite_coeffs(ic, nodes2, segs, signed_area(shape));
            return ic;
        }
        if (mult2 >= 16)
            throw ConvergenceError("indicator_coeffs_composite: panel refinement cap reached");
        mult = mult2;
        nodes = std::move(nodes2);
        coarse = std::move(fine);
    }
}

namespace {

// One scanline of a Generic shape: the inside intervals along x2 at fixed x1.
std::vector<std::pair<double, double>> scan_intervals(const Generic& g, double x1, double lo2,
                                                      double hi2) {
    const int ns = 600;
    const double dh = (hi2 - lo2) / ns;
    std::vector<std::pair<double, double>> iv;
    bool prev = g.inside({x1, lo2});
    double open = prev ? lo2 : 0.0;
    auto bisect = [&](double ya, double yb, bool va) {
        // boundary between ya (state va) and yb
        for (int it = 0; it < 60; ++it) {
            const double ym = 0.5 * (ya + yb);
            if (g.inside({x1, ym}) == va)
                ya = ym;
            else
                yb = ym;
        }
        return 0.5 * (ya + yb);
    };
    for (int i = 1; i <= ns; ++i) {
        const double y = lo2 + i * dh;
        const bool cur = g.inside({x1, y});
        if (cur != prev) {
            const double yc = bisect(y - dh, y, prev);
            if (cur)
                open = yc;
            else
                iv.emplace_back(open, yc);
            prev = cur;
        }
    }
    if (prev) iv.emplace_back(open, hi2);
    return iv;
}

struct Scanline {
    double x1, w;
    std::vector<std::pair<double, double>> iv;
};

}  // namespace

IndicatorCoeffs indicator_coeffs_generic(const Generic& shape, int F, double a) {
    if (F < 1) throw DomainError("indicator_coeffs_generic: F must be >= 1");
    if (F > 64) throw DomainError("indicator_coeffs_generic: F > 64 exceeds the cost guard");
    const double lo1 = std::max(shape.bbox_lo.x1, -a), hi1 = std::min(shape.bbox_hi.x1, a);
    const double lo2 = std::max(shape.bbox_lo.x2, -a), hi2 = std::min(shape.bbox_hi.x2, a);
    IndicatorCoeffs ic{F, a, std::vector<cplx>(static_cast<long>(2 * F + 1) * (2 * F + 1))};
    if (!(hi1 > lo1 && hi2 > lo2)) return ic;  // empty box -> zero coefficients

    const GaussRule& gl = gauss_legendre(16);
    const double k1max = M_PI * F / a;
    const double wmax = std::min((hi1 - lo1) / 8.0, 4.0 * M_PI / k1max);

    auto interval_len = [&](double x1) {
        double s = 0.0;
        for (auto& p : scan_intervals(shape, x1, lo2, hi2)) s += p.second - p.first;
        return s;
    };
    auto interval_count = [&](double x1) {
        return scan_intervals(shape, x1, lo2, hi2).size();
    };
    auto panel_mass = [&](double pa, double pb) {
        double s = 0.0;
        const double c = 0.5 * (pa + pb), hf = 0.5 * (pb - pa);
        for (int q = 0; q < 16; ++q) s += gl.w[q] * interval_len(c + hf * gl.x[q]);
        return s * hf;
    };

    // adaptive panel set over x1: refine on area-functional agreement and on
    // interval-structure changes within the panel
    struct Pan {
        double a, b;
        int depth;
    };
    std::vector<Pan> work, final_panels;
    const int base = std::max(4, static_cast<int>(std::ceil((hi1 - lo1) / wmax)));
    for (int i = 0; i < base; ++i)
        work.push_back({lo1 + (hi1 - lo1) * i / base, lo1 + (hi1 - lo1) * (i + 1) / base, 0});
    const double area_tol = 1e-9 * (hi1 - lo1) * (hi2 - lo2);
    while (!work.empty()) {
        Pan p = work.back();
        work.pop_back();
        const double mid = 0.5 * (p.a + p.b);
        const bool structure_change = interval_count(p.a + 1e-13) != interval_count(p.b - 1e-13) ||
                                      interval_count(mid) != interval_count(p.a + 1e-13);
        const double whole = panel_mass(p.a, p.b);
        const double split = panel_mass(p.a, mid) + panel_mass(mid, p.b);
        const double ptol = area_tol * (p.b - p.a) / (hi1 - lo1);
        if (p.depth >= 16 || (std::abs(whole - split) <= ptol && !(structure_change && p.depth < 10))) {
            final_panels.push_back(p);
        } else {
            work.push_back({p.a, mid, p.depth + 1});
            work.push_back({mid, p.b, p.depth + 1});
        }
    }

    std::vector<Scanline> lines;
    for (const Pan& p : final_panels) {
        const double c = 0.5 * (p.a + p.b), hf = 0.5 * (p.b - p.a);
        for (int q = 0; q < 16; ++q) {
            Scanline sl;
            sl.x1 = c + hf * gl.x[q];
            sl.w = gl.w[q] * hf;
            sl.iv = scan_intervals(shape, sl.x1, lo2, hi2);
            lines.push_back(std::move(sl));
        }
    }

    const int m = 2 * F + 1;
    const double inv4a2 = 1.0 / (4.0 * a * a);
    // inner integrals per scanline and mode k, then outer assembly
    const long L = static_cast<long>(lines.size());
    std::vector<cplx> inner(L * m);
    parallel_for(0, L, [&](long qlo, long qhi) {
        for (long q = qlo; q < qhi; ++q)
            for (int k = -F; k <= F; ++k) {
                cplx s(0.0, 0.0);
                if (k == 0) {
                    for (auto& p : lines[q].iv) s += p.second - p.first;
                } else {
                    const double W = M_PI * k / a;
                    for (auto& p : lines[q].iv)
                        s += (std::polar(1.0, -W * p.second) - std::polar(1.0, -W * p.first)) /
                             cplx(0.0, -W);
                }
                inner[q * m + (k + F)] = s;
            }
    });
    parallel_for(0, m, [&](long jlo, long jhi) {
        for (long jj = jlo; jj < jhi; ++jj) {
            const long j = jj - F;
            for (long q = 0; q < L; ++q) {
                const cplx ph = lines[q].w * std::polar(1.0, -M_PI * j * lines[q].x1 / a);
                for (long kk = 0; kk < m; ++kk) ic.c[jj * m + kk] += ph * inner[q * m + kk];
            }
            for (long kk = 0; kk < m; ++kk) ic.c[jj * m + kk] *= inv4a2;
        }
    });
    return ic;
}

IndicatorCoeffs indicator_coeffs(const ShapeDescriptor& shape, int F, double a, double tol) {
    return std::visit(
        [&](const auto& s) -> IndicatorCoeffs {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disc>) {
                return indicator_coeffs_disc(s.center, s.radius, F, a);
            } else if constexpr (std::is_same_v<T, Rect>) {
                return indicator_coeffs_rect(s.center, s.hw1, s.hw2, F, a);
            } else if constexpr (std::is_same_v<T, Composite>) {
                return indicator_coeffs_composite(s, F, a, tol);
            } else {
                return indicator_coeffs_generic(s, F, a);
            }
        },
        shape);
}

// ---------------------------------------------------------------------------
// Shape hashing and the coefficient cache file

namespace {

void hash_append(std::string& s, const char* tag, std::initializer_list<double> vals) {
    s += tag;
    char buf[40];
    for (double v : vals) {
        std::snprintf(buf, sizeof buf, "|%.17g", v);
        s += buf;
    }
    s += ';';
}

}  // namespace

std::array<std::uint8_t, 32> shape_hash(const ShapeDescriptor& shape) {
    std::string ser;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disc>) {
                hash_append(ser, "disc", {s.center.x1, s.center.x2, s.radius});
            } else if constexpr (std::is_same_v<T, Rect>) {
                hash_append(ser, "rect", {s.center.x1, s.center.x2, s.hw1, s.hw2});
            } else if constexpr (std::is_same_v<T, Composite>) {
                for (const Loop& lp : s.loops) {
                    hash_append(ser, "loop", {static_cast<double>(lp.sign)});
                    for (const BoundaryPiece& pc : lp.pieces) {
                        if (const auto* a = std::get_if<ArcPiece>(&pc))
                            hash_append(ser, "arc",
                                        {a->center.x1, a->center.x2, a->radius, a->theta0, a->theta1});
                        else {
                            const auto& sg = std::get<SegmentPiece>(pc);
                            hash_append(ser, "seg", {sg.a.x1, sg.a.x2, sg.b.x1, sg.b.x2});
                        }
                    }
                }
            } else {
                throw GeometryError("shape_hash: generic shapes are not hashable");
            }
        },
        shape);

    constexpr std::uint64_t kPrime = 1099511628211ull;
    constexpr std::uint64_t kSalts[4] = {0ull, 0x9E3779B97F4A7C15ull, 0xC2B2AE3D27D4EB4Full,
                                         0x165667B19E3779F9ull};
    std::array<std::uint8_t, 32> out{};
    for (int lane = 0; lane < 4; ++lane) {
        std::uint64_t h = 14695981039346656037ull ^ kSalts[lane];
        for (unsigned char ch : ser) {
            h ^= ch;
            h *= kPrime;
        }
        std::memcpy(out.data() + 8 * lane, &h, 8);
    }
    return out;
}

static_assert(std::endian::native == std::endian::little,
              "cache/dump file formats assume a little-endian host");

void save_coeffs_cache(const std::filesystem::path& file, const IndicatorCoeffs& ic,
                       const std::array<std::uint8_t, 32>& hash, double tol) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw IoError("cannot open coefficient cache for writing: " + file.string());
    os.write("LSC1", 4);
    const std::int64_t F = ic.F;
    os.write(reinterpret_cast<const char*>(&F), 8);
    os.write(reinterpret_cast<const char*>(&ic.a), 8);
    os.write(reinterpret_cast<const char*>(&tol), 8);
    os.write(reinterpret_cast<const char*>(hash.data()), 32);
    os.write(reinterpret_cast<const char*>(ic.c.data()),
             static_cast<std::streamsize>(ic.c.size() * sizeof(cplx)));
    if (!os) throw IoError("short write to coefficient cache: " + file.string());
}

std::optional<IndicatorCoeffs> load_coeffs_cache(const std::filesystem::path& file,
                                                 const std::array<std::uint8_t, 32>& hash,
                                                 int F, double a, double tol) {
    std::ifstream is(file, std::ios::binary);
    if (!is) return std::nullopt;
    char magic[4];
    std::int64_t fF = 0;
    double fa = 0.0, ftol = 0.0;
    std::array<std::uint8_t, 32> fhash{};
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(&fF), 8);
    is.read(reinterpret_cast<char*>(&fa), 8);
    is.read(reinterpret_cast<char*>(&ftol), 8);
    is.read(reinterpret_cast<char*>(fhash.data()), 32);
    if (!is || std::memcmp(magic, "LSC1", 4) != 0 || fF != F || fa != a || ftol != tol ||
        fhash != hash)
        return std::nullopt;
    IndicatorCoeffs ic{F, a, std::vector<cplx>(static_cast<long>(2 * F + 1) * (2 * F + 1))};
    is.read(reinterpret_cast<char*>(ic.c.data()),
            static_cast<std::streamsize>(ic.c.size() * sizeof(cplx)));
    if (!is) return std::nullopt;
    return ic;
}

IndicatorCoeffs indicator_coeffs_cached(const ShapeDescriptor& shape, int F, double a, double tol,
                                        const std::filesystem::path& cache_dir) {
    if (!std::holds_alternative<Composite>(shape) || cache_dir.empty())
        return indicator_coeffs(shape, F, a, tol);
    const auto hash = shape_hash(shape);
    char hex[17];
    for (int i = 0; i < 8; ++i) std::snprintf(hex + 2 * i, 3, "%02x", hash[i]);
    const auto file = cache_dir / ("lsc_" + std::string(hex) + "_F" + std::to_string(F) + ".bin");
    if (auto ic = load_coeffs_cache(file, hash, F, a, tol)) return std::move(*ic);
    IndicatorCoeffs ic = indicator_coeffs(shape, F, a, tol);
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    save_coeffs_cache(file, ic, hash, tol);
    return ic;
}

}  // namespace fspt
