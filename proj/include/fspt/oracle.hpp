#pragma once

#include <vector>

#include "fspt/grid.hpp"

namespace fspt {

/// Constant-contrast disc scatterer; interior wavenumber kappa*sqrt(1-m).
struct DiscScatteringParams {
    double kappa = 1.0;
    double R = 1.0;
    double m_const = 0.0;

    double kappa_interior() const;
};

/// Total field of the transmission problem for incidence u^i = J0(kappa|x|):
/// alpha J0(kappa_i r) inside, J0(kappa r) + beta_c H0(kappa r) outside, the
/// two coefficients fixed by continuity of value and radial derivative.
cplx radial_disc_solution(const DiscScatteringParams& p, Point x);

/// Full modal series for plane-wave incidence u^i = e^{i kappa x1}.
/// nmax >= kappa R + 20 recommended; series tail must fall below 1e-12 or a
/// ConvergenceError is thrown.
cplx mie_disc_solution(const DiscScatteringParams& p, Point x, int nmax);

/// J_0..J_nmax by downward (Miller) recurrence, normalized with
/// J0 + 2 sum J_{2k} = 1; Y_0..Y_nmax by upward recurrence.
std::vector<double> bessel_jn_sequence(int nmax, double x);
std::vector<double> bessel_yn_sequence(int nmax, double x);

}  // namespace fspt
