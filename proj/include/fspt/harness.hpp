#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fspt/oracle.hpp"
#include "fspt/solver.hpp"

namespace fspt {

// ---------------------------------------------------------------------------
// Error measures

/// Relative discrete 2-norm over all grid nodes:
/// sqrt( sum |exact - approx|^2 / sum |exact|^2 ).
double eps2(const ComplexField& approx, const ComplexField& exact);

/// max |exact - approx| / max |exact|.
double eps_inf(const ComplexField& approx, const ComplexField& exact);

/// Numerical order of convergence under grid doubling: log2(e_coarse/e_fine).
double noc(double e_coarse, double e_fine);

// ---------------------------------------------------------------------------
// Case configuration

struct CaseConfig {
    std::string label = "case";
    double a = 1.1;
    double kappa = 10.0;
    ShapeDescriptor shape = Disc{{0.0, 0.0}, 1.0};
    std::string contrast_kind = "constant";  // constant | radial_quadratic_gaussian
    double contrast_value = 0.0;
    WindowParams window{1.01, 1.08};
    IncidentField incident = RadialBessel{};
    bool fspt_mode = true;
    std::optional<int> F_override;  // default F = n/2
    int n = 256;                    // solve/timing grid
    std::vector<int> grids;         // convergence/timing study grids
    bool reference_analytic = true;
    int n_ref = 0;  // nested reference grid when not analytic
    GmresOptions gmres;
    double coeff_tol = 1e-10;
    std::vector<std::string> outputs{"convergence_csv"};
    std::filesystem::path cache_dir = ".";
};

/// Parse a JSON config file; dotted key=value overrides are applied on top.
CaseConfig parse_config(const std::filesystem::path& file,
                        const std::vector<std::string>& overrides = {});
CaseConfig parse_config_text(const std::string& json_text,
                             const std::vector<std::string>& overrides = {});

ContrastSpec make_contrast(const CaseConfig& cfg);
ProblemSetup make_setup(const CaseConfig& cfg, int n);

struct ConvergenceRow {
    int n = 0;
    int F = 0;
    double eps2 = 0.0;
    double epsInf = 0.0;
    std::optional<double> noc2;
    std::optional<double> nocInf;
    int iterations = 0;
    double seconds = 0.0;
};

/// Runs the study over cfg.grids against the analytic oracle or the nested
/// finer FSPT solution; writes <label>_convergence.csv under out_dir row by
/// row (partial file survives a failed row).
std::vector<ConvergenceRow> run_convergence(const CaseConfig& cfg,
                                            const std::filesystem::path& out_dir);

/// Single solve at cfg.n; writes field dumps <label>_u.lsf and
/// <label>_us.lsf, plus <label>_u.csv when "field_csv" is in outputs.
SolveResult run_case(const CaseConfig& cfg, const std::filesystem::path& out_dir);

struct TimingRow {
    int n = 0;
    long N = 0;
    double t_apply = 0.0;
    double t_solve = 0.0;
    int iterations = 0;
};

std::vector<TimingRow> run_timing(const CaseConfig& cfg, const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// File formats

/// Binary field dump, magic "LSF1": a (f64), n (i64), kappa (f64), then n^2
/// little-endian complex128 values row-major.
void write_field_dump(const std::filesystem::path& file, const ComplexField& f, double kappa);
ComplexField read_field_dump(const std::filesystem::path& file, double* kappa_out = nullptr);

void write_field_csv(const std::filesystem::path& file, const ComplexField& f);

std::string format_convergence_csv(const std::vector<ConvergenceRow>& rows);
std::vector<ConvergenceRow> parse_convergence_csv(const std::string& text);

}  // namespace fspt
