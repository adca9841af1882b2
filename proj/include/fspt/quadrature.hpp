#pragma once

#include <filesystem>

#include "fspt/grid.hpp"

namespace fspt {

/// Euler-Mascheroni constant to full double precision.
double euler_gamma();

/// Pre-corrected trapezoidal weights for the kernel G = (i/4) H0(kappa|x|):
/// off-diagonal entries h^2 G(x_j - x_k) and a corrected diagonal weight
///   w0 = (h^2 / 2pi) [ i pi/2 - (ln(kappa h / 2) - gamma - beta) ],
/// stored as the 2n x 2n circulant embedding of the Toeplitz generator.
struct KernelTable {
    double kappa = 0.0;
    GridSpec grid;
    double beta = 0.0;
    std::vector<cplx> gen;  // (2n)^2 row-major; entry for offset (p,q) at
                            // ((p+2n)%2n, (q+2n)%2n); padding cross zeroed

    cplx at_offset(int p, int q) const {
        const int two_n = 2 * grid.n;
        return gen[static_cast<long>((p + two_n) % two_n) * two_n + (q + two_n) % two_n];
    }
};

KernelTable build_kernel_table(double kappa, const GridSpec& g, double beta);

/// The lattice correction constant beta, obtained by self-calibration
/// against a radially symmetric Gaussian bump whose convolution with G is
/// computed by high-order 1D radial quadrature, then extrapolated to h->0.
/// Result is cached in "beta.cache" (plain text: beta, tol).
double compute_beta(double tol = 1e-10);

/// Uncached calibration with explicit wavenumber and bump width; exposed so
/// kappa- and bump-independence can be verified.
double calibrate_beta(double tol, double kappa, double sigma);

/// |corrected rule - reference integral| for the calibration bump at grid
/// spacing h and a given beta; with use_correction = false the diagonal
/// weight is dropped (punctured rule). Diagnostic for convergence-order
/// checks.
double corrected_rule_error(double kappa, double sigma, double h, double beta,
                            bool use_correction = true);

}  // namespace fspt
