#include "fspt/quadrature.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "fspt/numerics.hpp"
#include "fspt/specfun.hpp"

namespace fspt {

double euler_gamma() { return std::numbers::egamma_v<double>; }

namespace {

double bump(double r, double sigma) { return std::exp(-r * r / (2.0 * sigma * sigma)); }

// Y0 minus its logarithmic part; entire. Evaluated by subtraction: the
// cancellation near 0 only costs absolute accuracy ~1e-16, which the radial
// integrals tolerate.
double y0_regular(double z) {
    return bessel_y0(z) - (2.0 / M_PI) * (std::log(z / 2.0) + euler_gamma()) * bessel_j0(z);
}

struct RefIntegral {
    double re, im;
};

// 2*pi * int_0^{9 sigma} G(r) f(r) r dr with the log term split out so every
// integrand handed to the adaptive rule is smooth (or log times smooth).
RefIntegral reference_integral(double kappa, double sigma) {
    const double rc = 9.0 * sigma;
    const double tol = 1e-14;
    auto j0fr = [&](double r) { return bessel_j0(kappa * r) * bump(r, sigma) * r; };
    const double smooth = adaptive_integrate(j0fr, 0.0, rc, tol);
    const double logpart =
        adaptive_integrate([&](double r) { return r == 0.0 ? 0.0 : std::log(r) * j0fr(r); }, 0.0,
                           rc, tol);
    const double regpart = adaptive_integrate(
        [&](double r) { return r == 0.0 ? 0.0 : y0_regular(kappa * r) * bump(r, sigma) * r; }, 0.0,
        rc, tol);
    RefIntegral I;
    I.re = -logpart - (std::log(kappa / 2.0) + euler_gamma()) * smooth - (M_PI / 2.0) * regpart;
    I.im = (M_PI / 2.0) * smooth;
    return I;
}

const RefIntegral& reference_integral_cached(double kappa, double sigma) {
    static std::map<std::pair<double, double>, RefIntegral> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(kappa, sigma);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, reference_integral(kappa, sigma)).first;
    return it->second;
}

struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

// Punctured lattice sum sum_{k != 0, |hk| <= 9 sigma} h^2 G(|hk|) f(|hk|).
cplx punctured_sum(double kappa, double sigma, double h) {
    const double rc = 9.0 * sigma;
    const long m = static_cast<long>(std::ceil(rc / h)) + 1;
    const long rows = 2 * m + 1;
    std::vector<double> row_re(rows, 0.0), row_im(rows, 0.0);
    parallel_for(0, rows, [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            const long p = i - m;
            Kahan re, im;
            for (long q = -m; q <= m; ++q) {
                if (p == 0 && q == 0) continue;
                const double r = h * std::hypot(static_cast<double>(p), static_cast<double>(q));
                if (r > rc) continue;
                const cplx g = 0.25 * cplx(0.0, 1.0) * hankel0(kappa * r);
                const double f = bump(r, sigma);
                re.add(g.real() * f);
                im.add(g.imag() * f);
            }
            row_re[i] = re.sum;
            row_im[i] = im.sum;
        }
    });
    Kahan re, im;
    for (long i = 0; i < rows; ++i) {
        re.add(row_re[i]);
        im.add(row_im[i]);
    }
    return h * h * cplx(re.sum, im.sum);
}

double beta_hat(double kappa, double sigma, double h) {
    const RefIntegral& I = reference_integral_cached(kappa, sigma);
    const double s_re = punctured_sum(kappa, sigma, h).real();
    // w0 real part must make the rule exact: (h^2/2pi)(-ln(kappa h/2)+gamma+beta)
    return (I.re - s_re) * 2.0 * M_PI / (h * h) + std::log(kappa * h / 2.0) - euler_gamma();
}

// Generalized Richardson: fit beta_hat(h) = beta + a h^2 + b h^2 ln h
// + c h^4 + d h^4 ln h on a window of levels and return the constant term.
double extrapolate(const std::vector<double>& hs, const std::vector<double>& bs) {
    const int n = static_cast<int>(hs.size());
    const int nb = std::min(n, 5);
    std::vector<std::array<double, 6>> rows(n);
    for (int i = 0; i < n; ++i) {
        const double h2 = hs[i] * hs[i], lh = std::log(hs[i]);
        const std::array<double, 5> basis = {1.0, h2, h2 * lh, h2 * h2, h2 * h2 * lh};
        for (int j = 0; j < nb; ++j) rows[i][j] = basis[j];
        rows[i][nb] = bs[i];
    }
    // normal equations (tiny system), Gaussian elimination with pivoting
    std::array<std::array<double, 6>, 5> A{};
    for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < nb; ++j) {
            double s = 0.0;
            for (int r = 0; r < n; ++r) s += rows[r][i] * rows[r][j];
            A[i][j] = s;
        }
        double s = 0.0;
        for (int r = 0; r < n; ++r) s += rows[r][i] * rows[r][nb];
        A[i][nb] = s;
    }
    for (int col = 0; col < nb; ++col) {
        int piv = col;
        for (int r = col + 1; r < nb; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        if (A[col][col] == 0.0) throw ConvergenceError("beta extrapolation: singular fit");
        for (int r = col + 1; r < nb; ++r) {
            const double f = A[r][col] / A[col][col];
            for (int j = col; j <= nb; ++j) A[r][j] -= f * A[col][j];
        }
    }
    std::array<double, 5> x{};
    for (int r = nb - 1; r >= 0; --r) {
        double s = A[r][nb];
        for (int j = r + 1; j < nb; ++j) s -= A[r][j] * x[j];
        x[r] = s / A[r][r];
    }
    return x[0];
}

}  // namespace

double calibrate_beta(double tol, double kappa, double sigma) {
    if (!(tol >= 1e-12)) throw DomainError("calibrate_beta: tol must be >= 1e-12");
    std::vector<double> hs, bs;
    double prev = 0.0;
    bool have_prev = false;
    for (int level = 0; level <= 7; ++level) {
        const double h = sigma / (2.0 * (1 << level));
        hs.push_back(h);
        bs.push_back(beta_hat(kappa, sigma, h));
        if (level >= 4) {
            const int w = std::min<int>(5, static_cast<int>(hs.size()));
            std::vector<double> hw(hs.end() - w, hs.end()), bw(bs.end() - w, bs.end());
            const double beta = extrapolate(hw, bw);
            if (have_prev && std::abs(beta - prev) < tol) return beta;
            prev = beta;
            have_prev = true;
        }
    }
    throw ConvergenceError("calibrate_beta: extrapolants did not settle to tolerance");
}

double corrected_rule_error(double kappa, double sigma, double h, double beta,
                            bool use_correction) {
    const RefIntegral& I = reference_integral_cached(kappa, sigma);
    cplx rule = punctured_sum(kappa, sigma, h);
    if (use_correction) {
        rule += h * h *
                cplx((euler_gamma() + beta - std::log(kappa * h / 2.0)) / (2.0 * M_PI), 0.25);
    }
    return std::abs(rule - cplx(I.re, I.im));
}

double compute_beta(double tol) {
    static std::mutex mtx;
    static std::map<double, double> memo;  // tol -> beta
    std::lock_guard<std::mutex> lock(mtx);
    for (const auto& [t, b] : memo)
        if (t <= tol) return b;

    const char* cache_file = "beta.cache";
    {
        std::ifstream is(cache_file);
        double b = 0.0, t = 0.0;
        if (is && (is >> b >> t) && t <= tol) {
            memo[t] = b;
            return b;
        }
    }
    const double beta = calibrate_beta(tol, 2.0, 0.35);
    memo[tol] = beta;
    std::ofstream os(cache_file);
    if (os) {
        os.precision(17);
        os << beta << " " << tol << "\n";
    }
    return beta;
}

KernelTable build_kernel_table(double kappa, const GridSpec& g, double beta) {
    if (!(kappa > 0.0)) throw DomainError("build_kernel_table: kappa must be positive");
    const int n = g.n;
    const int two_n = 2 * n;
    const double h = g.h();
    KernelTable kt;
    kt.kappa = kappa;
    kt.grid = g;
    kt.beta = beta;
    kt.gen.assign(static_cast<long>(two_n) * two_n, cplx(0.0, 0.0));

    auto put = [&](int p, int q, cplx v) {
        kt.gen[static_cast<long>((p + two_n) % two_n) * two_n + (q + two_n) % two_n] = v;
    };
    // one octant of H0 evaluations, mirrored onto all sign/swap images;
    // offsets with |p| = n or |q| = n stay zero (padding cross)
    parallel_for(0, n, [&](long lo, long hi) {
        for (long p = lo; p < hi; ++p)
            for (long q = 0; q <= p; ++q) {
                if (p == 0 && q == 0) continue;
                const double r = h * std::hypot(static_cast<double>(p), static_cast<double>(q));
                const cplx v = h * h * 0.25 * cplx(0.0, 1.0) * hankel0(kappa * r);
                const int pi_ = static_cast<int>(p), qi = static_cast<int>(q);
                put(pi_, qi, v);
                put(-pi_, qi, v);
                put(pi_, -qi, v);
                put(-pi_, -qi, v);
                put(qi, pi_, v);
                put(-qi, pi_, v);
                put(qi, -pi_, v);
                put(-qi, -pi_, v);
            }
    });
    // w0 = (h^2/2pi)[i pi/2 - (ln(kappa h/2) - gamma - beta)]; the i pi/2 term
    // reduces to an exact h^2/4 imaginary part
    put(0, 0, h * h *
                  cplx((euler_gamma() + beta - std::log(kappa * h / 2.0)) / (2.0 * M_PI), 0.25));
    return kt;
}

}  // namespace fspt
