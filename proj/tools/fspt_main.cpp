// Command-line front end: single scattering solves, convergence studies and
// timing studies driven by a JSON config file.
//
// Exit codes: 0 success, 2 config error, 3 solver non-convergence, 4 I/O error.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fspt/harness.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string out = ".";
    std::string mode;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "JSON case configuration")->required();
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--mode", args.mode, "fspt or plain")
        ->check(CLI::IsMember({"fspt", "plain"}));
    cmd->add_option("--override", args.overrides,
                    "dotted key=value applied to the config, repeatable");
}

fspt::CaseConfig load(const CommonArgs& args) {
    std::vector<std::string> ov = args.overrides;
    if (!args.mode.empty()) ov.push_back("mode=" + args.mode);
    return fspt::parse_config(args.config, ov);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier-smoothed pre-corrected trapezoidal solver for 2D acoustic scattering"};
    app.require_subcommand(1);

    CommonArgs solve_args, conv_args, timing_args;
    CLI::App* solve = app.add_subcommand("solve", "solve one case and dump the fields");
    add_common(solve, solve_args);
    CLI::App* conv = app.add_subcommand("converge", "run a grid-refinement study");
    add_common(conv, conv_args);
    CLI::App* timing = app.add_subcommand("timing", "measure operator and solve times");
    add_common(timing, timing_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) {
            const fspt::CaseConfig cfg = load(solve_args);
            const fspt::SolveResult r = fspt::run_case(cfg, solve_args.out);
            std::printf("n=%d iterations=%d relative_residual=%.3e\n", cfg.n, r.iterations,
                        r.final_relative_residual);
        } else if (conv->parsed()) {
            const fspt::CaseConfig cfg = load(conv_args);
            const auto rows = fspt::run_convergence(cfg, conv_args.out);
            std::printf("%s", fspt::format_convergence_csv(rows).c_str());
        } else if (timing->parsed()) {
            const fspt::CaseConfig cfg = load(timing_args);
            for (const auto& r : fspt::run_timing(cfg, timing_args.out))
                std::printf("n=%d t_apply=%.3e t_solve=%.3e iters=%d\n", r.n, r.t_apply,
                            r.t_solve, r.iterations);
        }
    } catch (const fspt::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const fspt::GmresError& e) {
        std::fprintf(stderr, "solver did not converge: %s\n", e.what());
        return 3;
    } catch (const fspt::ConvergenceError& e) {
        std::fprintf(stderr, "solver did not converge: %s\n", e.what());
        return 3;
    } catch (const fspt::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
