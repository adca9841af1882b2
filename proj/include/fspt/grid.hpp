#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace fspt {

using cplx = std::complex<double>;

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;
};

class Error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad numeric argument (NaN, out of range)
class DomainError : public Error {
    using Error::Error;
};

// fields/tables built on incompatible grids
class GridMismatch : public Error {
    using Error::Error;
};

// invalid or out-of-domain scatterer description
class GeometryError : public Error {
    using Error::Error;
};

// iterative procedure failed to reach its tolerance
class ConvergenceError : public Error {
    using Error::Error;
};

class IoError : public Error {
    using Error::Error;
};

class ConfigError : public Error {
    using Error::Error;
};

/// Uniform n x n grid on [-a,a]^2 with spacing h = 2a/n and nodes
/// x_j = (-a,-a) + h*(j1,j2), 0 <= j1,j2 < n.
struct GridSpec {
    double a = 1.0;
    int n = 0;

    double h() const { return 2.0 * a / n; }
    long size() const { return static_cast<long>(n) * n; }
    Point node(int j1, int j2) const {
        const double hh = h();
        return {-a + hh * j1, -a + hh * j2};
    }
    bool operator==(const GridSpec&) const = default;
};

/// n x n complex samples on a GridSpec, row-major (j1 outer, j2 inner).
struct ComplexField {
    GridSpec grid;
    std::vector<cplx> values;

    ComplexField() = default;
    explicit ComplexField(const GridSpec& g) : grid(g), values(g.size(), cplx(0.0, 0.0)) {}

    cplx& at(int j1, int j2) { return values[static_cast<long>(j1) * grid.n + j2]; }
    const cplx& at(int j1, int j2) const { return values[static_cast<long>(j1) * grid.n + j2]; }
};

inline void require_same_grid(const ComplexField& f, const ComplexField& g) {
    if (!(f.grid == g.grid)) throw GridMismatch("fields live on different grids");
}

double norm2(const ComplexField& f);
double norm_inf(const ComplexField& f);
// standard Hermitian inner product sum conj(f_i) g_i
cplx dot(const ComplexField& f, const ComplexField& g);

}  // namespace fspt
