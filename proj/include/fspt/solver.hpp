#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <variant>

#include "fspt/fastconv.hpp"
#include "fspt/geometry.hpp"
#include "fspt/grid.hpp"
#include "fspt/quadrature.hpp"
#include "fspt/windowing.hpp"

namespace fspt {

struct PlaneWave {
    double d1 = 1.0;  // unit propagation direction
    double d2 = 0.0;
};

/// u^i(x) = J0(kappa |x|).
struct RadialBessel {};

using IncidentField = std::variant<PlaneWave, RadialBessel>;

/// Indicator smoothing mode: sharp nodal samples of chi_D, or the truncated
/// Fourier series with 2F+1 modes per direction.
struct Sharp {};
struct Fourier {
    int F = 0;
};
using Smoothing = std::variant<Sharp, Fourier>;

struct ProblemSetup {
    GridSpec grid;
    double kappa = 1.0;
    ContrastSpec contrast;
    WindowParams window;
    Smoothing smoothing;
    IncidentField incident;
};

struct SolveResult {
    ComplexField u;        // total field
    ComplexField us;       // scattered field, u - u^i nodewise
    int iterations = 0;    // total inner GMRES iterations
    double final_relative_residual = 0.0;
};

struct GmresOptions {
    double tol = 1e-10;
    int restart = 50;
    int maxiter = 2000;
};

struct GmresResult {
    ComplexField x;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Thrown when maxiter is exhausted; carries the best iterate.
class GmresError : public Error {
  public:
    GmresError(std::string msg, GmresResult best) : Error(std::move(msg)), best_(std::move(best)) {}
    const GmresResult& best() const { return best_; }

  private:
    GmresResult best_;
};

ComplexField sample_incident(const IncidentField& f, double kappa, const GridSpec& g);

/// Iteration-invariant state of one scattering solve: the kernel table, the
/// windowed contrast extension m_e, the indicator field chi (sharp samples
/// or chi^F) and their nodewise product.
struct OperatorState {
    KernelTable kt;
    ComplexField m_e;
    ComplexField chi;
    ComplexField density_factor;  // m_e .* chi
    std::unique_ptr<ToeplitzConvolver> conv;
};

struct SolveOptions {
    GmresOptions gmres;
    double coeff_tol = 1e-10;                 // composite coefficient accuracy
    std::filesystem::path cache_dir = ".";    // indicator coefficient cache; "" disables
    double beta_tol = 1e-10;
};

OperatorState build_operator_state(const ProblemSetup& setup, double beta,
                                   const SolveOptions& opts = {});

/// A(u) = u + kappa^2 sum_k w_{|j-k|} m_e(x_k) chi(x_k) u(x_k).
ComplexField apply_operator(const ProblemSetup& setup, OperatorState& state,
                            const ComplexField& u);

/// Restarted GMRES (modified Gram-Schmidt, Givens least squares) on a
/// matrix-free operator. Throws GmresError past maxiter.
GmresResult gmres_solve(const std::function<ComplexField(const ComplexField&)>& apply,
                        const ComplexField& rhs, const GmresOptions& opts = {});

SolveResult solve_scattering(const ProblemSetup& setup, const SolveOptions& opts = {});

}  // namespace fspt
