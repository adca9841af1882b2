#include "fspt/oracle.hpp"

#include <cmath>

#include "fspt/specfun.hpp"

namespace fspt {

double DiscScatteringParams::kappa_interior() const {
    if (!(1.0 - m_const > 0.0)) throw DomainError("disc oracle requires 1 - m > 0");
    return kappa * std::sqrt(1.0 - m_const);
}

namespace {

struct TwoByTwo {
    cplx a11, a12, a21, a22;
};

// solve [a11 a12; a21 a22] (x1;x2) = (b1;b2)
std::pair<cplx, cplx> solve2(const TwoByTwo& m, cplx b1, cplx b2) {
    const cplx det = m.a11 * m.a22 - m.a12 * m.a21;
    if (std::abs(det) < 1e-14) throw ConvergenceError("disc oracle: singular continuity system");
    return {(b1 * m.a22 - b2 * m.a12) / det, (m.a11 * b2 - m.a21 * b1) / det};
}

cplx hankel1_at(double x) { return {bessel_j1(x), bessel_y1(x)}; }

}  // namespace

cplx radial_disc_solution(const DiscScatteringParams& p, Point x) {
    const double ki = p.kappa_interior();
    const double k = p.kappa, R = p.R;
    // alpha J0(ki R) - bc H0(k R)       = J0(k R)
    // alpha ki J1(ki R) - bc k H1(k R)  = k J1(k R)
    const TwoByTwo m{bessel_j0(ki * R), -hankel0(k * R), ki * bessel_j1(ki * R),
                     -k * hankel1_at(k * R)};
    const auto [alpha, bc] = solve2(m, bessel_j0(k * R), k * bessel_j1(k * R));
    const double r = std::hypot(x.x1, x.x2);
    if (r <= R) return alpha * bessel_j0(ki * r);
    return bessel_j0(k * r) + bc * hankel0(k * r);
}

std::vector<double> bessel_jn_sequence(int nmax, double x) {
    if (nmax < 0) throw DomainError("bessel_jn_sequence: nmax must be >= 0");
    std::vector<double> j(nmax + 1, 0.0);
    if (x == 0.0) {
        j[0] = 1.0;
        return j;
    }
    const int start = nmax + 20 + static_cast<int>(std::ceil(1.2 * std::abs(x)));
    double fp = 0.0, f = 1e-300;
    double norm = 0.0;  // J0 + 2 sum_{k>=1} J_{2k}
    for (int mth = start; mth >= 1; --mth) {
        const double fm = (2.0 * mth / x) * f - fp;
        fp = f;
        f = fm;
        if (mth - 1 <= nmax) j[mth - 1] = f;
        if (((mth - 1) & 1) == 0) norm += (mth - 1 == 0) ? f : 2.0 * f;
        if (std::abs(f) > 1e250) {  // rescale to avoid overflow
            const double s = 1e-250;
            fp *= s;
            f *= s;
            norm *= s;
            for (double& v : j) v *= s;
        }
    }
    for (double& v : j) v /= norm;
    return j;
}

std::vector<double> bessel_yn_sequence(int nmax, double x) {
    if (nmax < 0) throw DomainError("bessel_yn_sequence: nmax must be >= 0");
    std::vector<double> y(nmax + 1);
    y[0] = bessel_y0(x);
    if (nmax >= 1) y[1] = bessel_y1(x);
    for (int mth = 1; mth < nmax; ++mth) y[mth + 1] = (2.0 * mth / x) * y[mth] - y[mth - 1];
    return y;
}

cplx mie_disc_solution(const DiscScatteringParams& p, Point x, int nmax) {
    const double ki = p.kappa_interior();
    const double k = p.kappa, R = p.R;
    if (nmax < k * R + 20) throw DomainError("mie_disc_solution: nmax below kappa R + 20");

    const auto jkR = bessel_jn_sequence(nmax + 1, k * R);
    const auto jiR = bessel_jn_sequence(nmax + 1, ki * R);
    const auto ykR = bessel_yn_sequence(nmax + 1, k * R);

    const double r = std::hypot(x.x1, x.x2);
    const double theta = std::atan2(x.x2, x.x1);
    const bool interior = r <= R;
    const auto jr = bessel_jn_sequence(nmax + 1, (interior ? ki : k) * r);
    std::vector<double> yr;
    if (!interior) yr = bessel_yn_sequence(nmax + 1, k * r);

    auto dJ = [](const std::vector<double>& f, int mth, double z) {
        return mth == 0 ? -f[1] : f[mth - 1] - (mth / z) * f[mth];
    };

    cplx u = interior ? cplx(0.0, 0.0) : std::polar(1.0, k * x.x1);
    double last = 0.0, second_last = 0.0;
    for (int mth = 0; mth <= nmax; ++mth) {
        const cplx Hm(jkR[mth], ykR[mth]);
        const cplx dHm(dJ(jkR, mth, k * R), dJ(ykR, mth, k * R));
        const TwoByTwo sys{jiR[mth], -Hm, ki * dJ(jiR, mth, ki * R), -k * dHm};
        const cplx im = std::polar(1.0, 0.5 * M_PI * mth);  // i^m
        const auto [am, bm] = solve2(sys, im * jkR[mth], im * k * dJ(jkR, mth, k * R));

        const double eps_m = (mth == 0) ? 1.0 : 2.0;
        cplx term;
        if (interior)
            term = eps_m * am * jr[mth] * std::cos(mth * theta);
        else
            term = eps_m * bm * cplx(jr[mth], yr[mth]) * std::cos(mth * theta);
        u += term;
        second_last = last;
        last = std::abs(term);
    }
    const double scale = std::max(std::abs(u), 1.0);
    if (last > 1e-12 * scale || second_last > 1e-12 * scale)
        throw ConvergenceError("mie_disc_solution: series not converged at nmax");
    return u;
}

}  // namespace fspt
