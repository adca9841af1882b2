#include "fspt/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "fspt/grid.hpp"

namespace fspt {

namespace {

GaussRule make_gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return r;
}

double gl_sum(const GaussRule& g, const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), s = 0.5 * (b - a);
    double acc = 0.0;
    for (size_t i = 0; i < g.x.size(); ++i) acc += g.w[i] * f(c + s * g.x[i]);
    return acc * s;
}

struct Panel {
    double a, b, coarse;
    int depth;
};

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    if (!(abs_tol > 0.0)) throw DomainError("adaptive_integrate: tol must be positive");
    if (a == b) return 0.0;
    const GaussRule& coarse_rule = gauss_legendre(12);
    const GaussRule& fine_rule = gauss_legendre(25);

    double total = 0.0;
    std::vector<Panel> stack{{a, b, gl_sum(coarse_rule, f, a, b), 0}};
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        double fine = gl_sum(fine_rule, f, p.a, p.b);
        double err = std::abs(fine - p.coarse);
        double local_tol = abs_tol * std::abs(p.b - p.a) / std::abs(b - a);
        if (err <= std::max(local_tol, 1e-300) || err <= 1e-17 * std::abs(fine)) {
            total += fine;
            continue;
        }
        if (p.depth >= max_depth) throw ConvergenceError("adaptive_integrate: max depth exceeded");
        double m = 0.5 * (p.a + p.b);
        stack.push_back({p.a, m, gl_sum(coarse_rule, f, p.a, m), p.depth + 1});
        stack.push_back({m, p.b, gl_sum(coarse_rule, f, m, p.b), p.depth + 1});
    }
    return total;
}

void parallel_for(long begin, long end, const std::function<void(long, long)>& fn) {
    const long count = end - begin;
    if (count <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    long nthreads = std::min<long>(hw == 0 ? 1 : hw, count);
    if (nthreads <= 1 || count < 8) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const long chunk = (count + nthreads - 1) / nthreads;
    for (long t = 0; t < nthreads; ++t) {
        long lo = begin + t * chunk;
        long hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace fspt
