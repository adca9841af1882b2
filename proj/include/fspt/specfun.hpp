#pragma once

#include <complex>

namespace fspt {

// Double-precision Bessel functions of the first and second kind,
// orders 0 and 1, for real nonnegative arguments. Two-branch scheme:
// extended-precision power/log series for x <= 8, amplitude-phase form
// with Chebyshev-fitted modulus corrections for x > 8.

double bessel_j0(double x);
double bessel_j1(double x);
double bessel_y0(double x);  // requires x > 0
double bessel_y1(double x);  // requires x > 0

/// H0(x) = J0(x) + i Y0(x), x > 0.
std::complex<double> hankel0(double x);

namespace specfun_detail {
// Branch internals exposed so tests can probe the series/asymptotic seam.
double j0_series(double x);
double j1_series(double x);
double y0_series(double x);
double y1_series(double x);
double j0_asymptotic(double x);
double j1_asymptotic(double x);
double y0_asymptotic(double x);
double y1_asymptotic(double x);
}  // namespace specfun_detail

}  // namespace fspt
