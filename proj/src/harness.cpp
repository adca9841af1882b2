#include "fspt/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fspt/numerics.hpp"

namespace fspt {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Error measures

double eps2(const ComplexField& approx, const ComplexField& exact) {
    require_same_grid(approx, exact);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < exact.values.size(); ++i) {
        num += std::norm(exact.values[i] - approx.values[i]);
        den += std::norm(exact.values[i]);
    }
    if (den == 0.0) throw DomainError("eps2: exact field is identically zero");
    return std::sqrt(num / den);
}

double eps_inf(const ComplexField& approx, const ComplexField& exact) {
    require_same_grid(approx, exact);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < exact.values.size(); ++i) {
        num = std::max(num, std::abs(exact.values[i] - approx.values[i]));
        den = std::max(den, std::abs(exact.values[i]));
    }
    if (den == 0.0) throw DomainError("eps_inf: exact field is identically zero");
    return num / den;
}

double noc(double e_coarse, double e_fine) {
    if (!(e_coarse > 0.0) || !(e_fine > 0.0)) throw DomainError("noc: errors must be positive");
    return std::log2(e_coarse / e_fine);
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

ShapeDescriptor shape_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "disc") {
        const auto c = j.at("center").get<std::vector<double>>();
        return Disc{{c.at(0), c.at(1)}, j.at("radius").get<double>()};
    }
    if (type == "rect") {
        const auto c = j.at("center").get<std::vector<double>>();
        const auto hw = j.at("half_widths").get<std::vector<double>>();
        return Rect{{c.at(0), c.at(1)}, hw.at(0), hw.at(1)};
    }
    if (type == "cusp_star") return make_cusp_star();
    throw ConfigError("unknown shape type: " + type);
}

IncidentField incident_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "radial_bessel") return RadialBessel{};
    if (type == "plane_wave") {
        const auto d = j.at("direction").get<std::vector<double>>();
        const double nn = std::hypot(d.at(0), d.at(1));
        if (nn == 0.0) throw ConfigError("plane_wave direction must be nonzero");
        return PlaneWave{d[0] / nn, d[1] / nn};
    }
    throw ConfigError("unknown incident type: " + type);
}

void apply_override(json& root, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    json* node = &root;
    size_t pos = 0;
    for (;;) {
        const size_t dot = key.find('.', pos);
        const std::string part = key.substr(pos, dot - pos);
        if (dot == std::string::npos) {
            json parsed = json::parse(val, nullptr, false);
            (*node)[part] = parsed.is_discarded() ? json(val) : parsed;
            return;
        }
        node = &(*node)[part];
        pos = dot + 1;
    }
}

CaseConfig config_from_json(json j, const std::vector<std::string>& overrides) {
    for (const std::string& kv : overrides) apply_override(j, kv);
    CaseConfig cfg;
    try {
        cfg.label = j.value("label", std::string("case"));
        cfg.a = j.at("a").get<double>();
        cfg.kappa = j.at("kappa").get<double>();
        cfg.shape = shape_from_json(j.at("shape"));
        const json& c = j.at("contrast");
        cfg.contrast_kind = c.at("type").get<std::string>();
        cfg.contrast_value = c.value("value", 0.0);
        cfg.window.r_in = j.at("window").at("r_in").get<double>();
        cfg.window.r_out = j.at("window").at("r_out").get<double>();
        cfg.incident = incident_from_json(j.at("incident"));
        const std::string mode = j.value("mode", std::string("fspt"));
        if (mode != "fspt" && mode != "plain") throw ConfigError("mode must be fspt or plain");
        cfg.fspt_mode = mode == "fspt";
        if (j.contains("F")) cfg.F_override = j.at("F").get<int>();
        cfg.n = j.value("n", 0);
        if (j.contains("grids")) cfg.grids = j.at("grids").get<std::vector<int>>();
        if (j.contains("reference")) {
            const std::string rt = j.at("reference").at("type").get<std::string>();
            if (rt == "analytic") {
                cfg.reference_analytic = true;
            } else if (rt == "nested") {
                cfg.reference_analytic = false;
                cfg.n_ref = j.at("reference").at("n_ref").get<int>();
            } else {
                throw ConfigError("reference type must be analytic or nested");
            }
        }
        if (j.contains("solver")) {
            const json& s = j.at("solver");
            cfg.gmres.tol = s.value("tol", cfg.gmres.tol);
            cfg.gmres.restart = s.value("restart", cfg.gmres.restart);
            cfg.gmres.maxiter = s.value("maxiter", cfg.gmres.maxiter);
        }
        cfg.coeff_tol = j.value("coeff_tol", cfg.coeff_tol);
        if (j.contains("outputs")) cfg.outputs = j.at("outputs").get<std::vector<std::string>>();
        if (j.contains("cache_dir")) cfg.cache_dir = j.at("cache_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }

    if (!cfg.grids.empty()) {
        for (size_t i = 1; i < cfg.grids.size(); ++i)
            if (cfg.grids[i] <= cfg.grids[i - 1] || cfg.grids[i] % cfg.grids[i - 1] != 0)
                throw ConfigError("grid list must be strictly increasing and nested");
        if (!cfg.reference_analytic) {
            if (cfg.n_ref <= cfg.grids.back() || cfg.n_ref % cfg.grids.back() != 0)
                throw ConfigError("n_ref must be a larger multiple of every study grid");
        }
    }
    return cfg;
}

}  // namespace

CaseConfig parse_config_text(const std::string& json_text,
                             const std::vector<std::string>& overrides) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON");
    return config_from_json(std::move(j), overrides);
}

CaseConfig parse_config(const std::filesystem::path& file,
                        const std::vector<std::string>& overrides) {
    std::ifstream is(file);
    if (!is) throw IoError("cannot open config: " + file.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

ContrastSpec make_contrast(const CaseConfig& cfg) {
    ContrastSpec c;
    c.shape = cfg.shape;
    if (cfg.contrast_kind == "constant") {
        const double v = cfg.contrast_value;
        c.extension = [v](Point) { return v; };
    } else if (cfg.contrast_kind == "radial_quadratic_gaussian") {
        c.extension = [](Point x) {
            const double r2 = x.x1 * x.x1 + x.x2 * x.x2;
            return r2 * std::exp(-r2);
        };
    } else {
        throw ConfigError("unknown contrast type: " + cfg.contrast_kind);
    }
    return c;
}

ProblemSetup make_setup(const CaseConfig& cfg, int n) {
    ProblemSetup s;
    s.grid = GridSpec{cfg.a, n};
    s.kappa = cfg.kappa;
    s.contrast = make_contrast(cfg);
    s.window = cfg.window;
    if (cfg.fspt_mode)
        s.smoothing = Fourier{cfg.F_override.value_or(n / 2)};
    else
        s.smoothing = Sharp{};
    s.incident = cfg.incident;
    return s;
}

// ---------------------------------------------------------------------------
// Study drivers

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ComplexField analytic_reference(const CaseConfig& cfg, const GridSpec& g) {
    const auto* disc = std::get_if<Disc>(&cfg.shape);
    if (!disc || cfg.contrast_kind != "constant" ||
        !std::holds_alternative<RadialBessel>(cfg.incident) ||
        std::abs(disc->center.x1) + std::abs(disc->center.x2) != 0.0)
        throw ConfigError(
            "analytic reference requires a centered disc, constant contrast and J0 incidence");
    const DiscScatteringParams p{cfg.kappa, disc->radius, cfg.contrast_value};
    ComplexField out(g);
    parallel_for(0, g.n, [&](long lo, long hi) {
        for (long j1 = lo; j1 < hi; ++j1)
            for (int j2 = 0; j2 < g.n; ++j2)
                out.at(static_cast<int>(j1), j2) =
                    radial_disc_solution(p, g.node(static_cast<int>(j1), j2));
    });
    return out;
}

ComplexField restrict_to(const ComplexField& fine, const GridSpec& coarse) {
    const int stride = fine.grid.n / coarse.n;
    if (stride * coarse.n != fine.grid.n || fine.grid.a != coarse.a)
        throw GridMismatch("restriction requires nested grids");
    ComplexField out(coarse);
    for (int j1 = 0; j1 < coarse.n; ++j1)
        for (int j2 = 0; j2 < coarse.n; ++j2) out.at(j1, j2) = fine.at(j1 * stride, j2 * stride);
    return out;
}

SolveOptions solve_options(const CaseConfig& cfg) {
    SolveOptions o;
    o.gmres = cfg.gmres;
    o.coeff_tol = cfg.coeff_tol;
    o.cache_dir = cfg.cache_dir;
    return o;
}

std::string format_row(const ConvergenceRow& r) {
    char buf[256];
    auto opt = [](const std::optional<double>& v) {
        if (!v) return std::string();
        char b[32];
        std::snprintf(b, sizeof b, "%.5e", *v);
        return std::string(b);
    };
    std::snprintf(buf, sizeof buf, "%d,%d,%.5e,%s,%.5e,%s,%d,%.5e", r.n, r.F, r.eps2,
                  opt(r.noc2).c_str(), r.epsInf, opt(r.nocInf).c_str(), r.iterations, r.seconds);
    return buf;
}

}  // namespace

std::string format_convergence_csv(const std::vector<ConvergenceRow>& rows) {
    std::string out = "n,F,eps2,nocsq,epsinf,nocinf,iters,seconds\n";
    for (const auto& r : rows) out += format_row(r) + "\n";
    return out;
}

std::vector<ConvergenceRow> parse_convergence_csv(const std::string& text) {
    std::vector<ConvergenceRow> rows;
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        ConvergenceRow r;
        std::vector<std::string> parts;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        parts.push_back(cur);
        if (parts.size() != 8) throw IoError("bad convergence CSV row: " + line);
        r.n = std::stoi(parts[0]);
        r.F = std::stoi(parts[1]);
        r.eps2 = std::stod(parts[2]);
        if (!parts[3].empty()) r.noc2 = std::stod(parts[3]);
        r.epsInf = std::stod(parts[4]);
        if (!parts[5].empty()) r.nocInf = std::stod(parts[5]);
        r.iterations = std::stoi(parts[6]);
        r.seconds = std::stod(parts[7]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<ConvergenceRow> run_convergence(const CaseConfig& cfg,
                                            const std::filesystem::path& out_dir) {
    if (cfg.grids.empty()) throw ConfigError("run_convergence: empty grid list");
    std::filesystem::create_directories(out_dir);
    const auto csv_path = out_dir / (cfg.label + "_convergence.csv");
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot open " + csv_path.string());
    csv << "n,F,eps2,nocsq,epsinf,nocinf,iters,seconds\n" << std::flush;

    ComplexField nested_ref;
    if (!cfg.reference_analytic) {
        CaseConfig rc = cfg;
        rc.fspt_mode = true;  // reference is always the FSPT solution
        rc.F_override.reset();
        nested_ref = solve_scattering(make_setup(rc, cfg.n_ref), solve_options(rc)).u;
    }

    std::vector<ConvergenceRow> rows;
    for (int n : cfg.grids) {
        const ProblemSetup setup = make_setup(cfg, n);
        const auto t0 = std::chrono::steady_clock::now();
        const SolveResult sol = solve_scattering(setup, solve_options(cfg));
        ConvergenceRow row;
        row.seconds = seconds_since(t0);
        row.n = n;
        row.F = cfg.fspt_mode ? std::get<Fourier>(setup.smoothing).F : 0;
        row.iterations = sol.iterations;
        const ComplexField exact = cfg.reference_analytic
                                       ? analytic_reference(cfg, setup.grid)
                                       : restrict_to(nested_ref, setup.grid);
        row.eps2 = eps2(sol.u, exact);
        row.epsInf = eps_inf(sol.u, exact);
        if (!rows.empty()) {
            // noc is undefined when an error vanishes (e.g. zero contrast)
            if (rows.back().eps2 > 0.0 && row.eps2 > 0.0) row.noc2 = noc(rows.back().eps2, row.eps2);
            if (rows.back().epsInf > 0.0 && row.epsInf > 0.0)
                row.nocInf = noc(rows.back().epsInf, row.epsInf);
        }
        rows.push_back(row);
        csv << format_row(row) << "\n" << std::flush;
    }
    return rows;
}

SolveResult run_case(const CaseConfig& cfg, const std::filesystem::path& out_dir) {
    if (cfg.n <= 0) throw ConfigError("run_case: config must set n");
    std::filesystem::create_directories(out_dir);
    const SolveResult sol = solve_scattering(make_setup(cfg, cfg.n), solve_options(cfg));
    write_field_dump(out_dir / (cfg.label + "_u.lsf"), sol.u, cfg.kappa);
    write_field_dump(out_dir / (cfg.label + "_us.lsf"), sol.us, cfg.kappa);
    for (const std::string& o : cfg.outputs)
        if (o == "field_csv") write_field_csv(out_dir / (cfg.label + "_u.csv"), sol.u);
    return sol;
}

std::vector<TimingRow> run_timing(const CaseConfig& cfg, const std::filesystem::path& out_dir) {
    if (cfg.grids.size() < 3) throw ConfigError("run_timing: need at least 3 grid sizes");
    std::filesystem::create_directories(out_dir);
    const double beta = compute_beta();
    std::vector<TimingRow> rows;
    for (int n : cfg.grids) {
        const ProblemSetup setup = make_setup(cfg, n);
        OperatorState state = build_operator_state(setup, beta, solve_options(cfg));
        ComplexField probe = sample_incident(cfg.incident, cfg.kappa, setup.grid);
        apply_operator(setup, state, probe);  // warm-up
        double best = 1e300;
        for (int rep = 0; rep < 5; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            ComplexField r = apply_operator(setup, state, probe);
            best = std::min(best, seconds_since(t0));
        }
        TimingRow row;
        row.n = n;
        row.N = static_cast<long>(n) * n;
        row.t_apply = best;
        const auto t0 = std::chrono::steady_clock::now();
        const SolveResult sol = solve_scattering(setup, solve_options(cfg));
        row.t_solve = seconds_since(t0);
        row.iterations = sol.iterations;
        rows.push_back(row);
    }
    const auto csv_path = out_dir / (cfg.label + "_timing.csv");
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot open " + csv_path.string());
    csv << "n,N,t_apply,t_solve,iterations\n";
    for (const auto& r : rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d,%ld,%.5e,%.5e,%d\n", r.n, r.N, r.t_apply, r.t_solve,
                      r.iterations);
        csv << buf;
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Field dumps

void write_field_dump(const std::filesystem::path& file, const ComplexField& f, double kappa) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw IoError("cannot open field dump for writing: " + file.string());
    os.write("LSF1", 4);
    os.write(reinterpret_cast<const char*>(&f.grid.a), 8);
    const std::int64_t n = f.grid.n;
    os.write(reinterpret_cast<const char*>(&n), 8);
    os.write(reinterpret_cast<const char*>(&kappa), 8);
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
    if (!os) throw IoError("short write to field dump: " + file.string());
}

ComplexField read_field_dump(const std::filesystem::path& file, double* kappa_out) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw IoError("cannot open field dump: " + file.string());
    char magic[4];
    double a = 0.0, kappa = 0.0;
    std::int64_t n = 0;
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(&a), 8);
    is.read(reinterpret_cast<char*>(&n), 8);
    is.read(reinterpret_cast<char*>(&kappa), 8);
    if (!is || std::memcmp(magic, "LSF1", 4) != 0 || n <= 0)
        throw IoError("not a field dump: " + file.string());
    ComplexField f(GridSpec{a, static_cast<int>(n)});
    is.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
    if (!is) throw IoError("truncated field dump: " + file.string());
    if (kappa_out) *kappa_out = kappa;
    return f;
}

void write_field_csv(const std::filesystem::path& file, const ComplexField& f) {
    std::ofstream os(file);
    if (!os) throw IoError("cannot open field csv for writing: " + file.string());
    os << "x1,x2,re_u,im_u\n";
    for (int j1 = 0; j1 < f.grid.n; ++j1)
        for (int j2 = 0; j2 < f.grid.n; ++j2) {
            const Point x = f.grid.node(j1, j2);
            char buf[140];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x.x1, x.x2,
                          f.at(j1, j2).real(), f.at(j1, j2).imag());
            os << buf;
        }
}

}  // namespace fspt
