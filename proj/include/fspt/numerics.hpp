#pragma once

#include <functional>
#include <vector>

namespace fspt {

/// Gauss-Legendre nodes and weights on [-1,1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Rule of order n, computed once by Newton iteration on P_n and cached.
const GaussRule& gauss_legendre(int n);

/// Adaptive bisection quadrature with a GL12/GL25 error estimate.
/// Absolute tolerance; handles endpoint log-type singularities by
/// geometric subdivision. Throws ConvergenceError past max_depth.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 58);

/// Chunked parallel loop over [begin, end); fn receives a half-open
/// index range. Falls back to serial for small ranges. Deterministic
/// as long as chunks write disjoint outputs.
void parallel_for(long begin, long end, const std::function<void(long, long)>& fn);

}  // namespace fspt
