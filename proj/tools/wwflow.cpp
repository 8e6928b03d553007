// wwflow command-line driver: trajectory, field, purity, quantize, validate.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wwflow/wwflow.hpp"

namespace {

using namespace wwflow;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Options shared by every subcommand that needs a Hamiltonian.
struct HamiltonianArgs {
    std::string label = "lv";
    double g = 1.0;

    void add(CLI::App* app) {
        app->add_option("--hamiltonian", label, "lv, mlv or harmonic")->capture_default_str();
        app->add_option("--g", g, "anisotropy parameter (> 0)")->capture_default_str();
    }
    SeparableHamiltonian build() const { return make_hamiltonian(label, g); }
};

struct EnsembleArgs {
    std::string kind = "gaussian";
    double alpha = 1.0;
    double beta = 1.0;
    double a = 2.0;
    double b = 2.0;

    void add(CLI::App* app) {
        app->add_option("--ensemble", kind, "gaussian, gamma or laplacian")->capture_default_str();
        app->add_option("--alpha", alpha, "Gaussian inverse width, or gamma rate in x")->capture_default_str();
        app->add_option("--beta", beta, "gamma/laplacian rate in k")->capture_default_str();
        app->add_option("--a", a, "gamma/laplacian integer shape in x")->capture_default_str();
        app->add_option("--b", b, "gamma/laplacian integer shape in k")->capture_default_str();
    }
    Ensemble build() const {
        if (kind == "gaussian") return make_gaussian(alpha);
        if (kind == "gamma") return make_gamma(a, b, alpha, beta);
        if (kind == "laplacian") return make_laplacian(a, b, alpha, beta);
        throw DomainError("unknown ensemble '" + kind + "' (expected gaussian, gamma or laplacian)");
    }
};

// "xmin:xmax:kmin:kmax:n" or "xmin:xmax:kmin:kmax:nx:nk".
FieldGrid parse_grid(const std::string& text) {
    std::vector<double> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw DomainError("--grid: bad number '" + item + "'");
        parts.push_back(v);
    }
    if (parts.size() != 5 && parts.size() != 6) {
        throw DomainError("--grid expects xmin:xmax:kmin:kmax:n or xmin:xmax:kmin:kmax:nx:nk");
    }
    auto count = [](double v) {
        if (v < 2.0 || v != std::floor(v) || v > 1e5) throw DomainError("--grid: node counts must be integers >= 2");
        return static_cast<std::size_t>(v);
    };
    const std::size_t nx = count(parts[4]);
    const std::size_t nk = parts.size() == 6 ? count(parts[5]) : nx;
    return {parts[0], parts[1], parts[2], parts[3], nx, nk};
}

FieldGrid default_field_grid(const Ensemble& e) {
    if (std::holds_alternative<GammaEnsemble>(e)) return FieldGrid::square(0.05, 8.0, 241);
    // An even node count keeps the Laplacian kinks off the grid.
    if (std::holds_alternative<LaplacianEnsemble>(e)) return FieldGrid::square(-4.0, 4.0, 240);
    return FieldGrid::square(-4.0, 4.0, 241);
}

FieldGrid default_purity_grid(const Ensemble& e) {
    if (const auto* g = std::get_if<GaussianEnsemble>(&e)) return FieldGrid::square(-8.0 / g->alpha, 8.0 / g->alpha, 801);
    auto reach = [](const GammaEnsemble& g) { return 16.0 * std::max(g.a / g.alpha, g.b / g.beta); };
    if (const auto* g = std::get_if<GammaEnsemble>(&e)) return FieldGrid::square(0.0, reach(*g), 1601);
    const auto& l = std::get<LaplacianEnsemble>(e);
    const double r = reach(l.folded());
    return FieldGrid::square(-r, r, 1601);
}

std::string g17(double v) { return wwflow::detail::format_g17(v); }

std::filesystem::path prepare_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

// --- trajectory -------------------------------------------------------------

struct TrajectoryArgs {
    HamiltonianArgs h;
    std::vector<double> epsilons;
    std::vector<double> start;
    double dt = 1e-3;
    double tau_max = 1e4;
    std::string out_dir = ".";
    std::string prefix = "orbit";
};

int run_trajectory(const TrajectoryArgs& args) {
    const auto h = args.h.build();
    OrbitOptions opt;
    opt.dt = args.dt;
    opt.tau_max = args.tau_max;
    const auto dir = prepare_dir(args.out_dir);

    std::vector<Orbit> orbits;
    if (!args.start.empty()) {
        if (args.start.size() % 2 != 0) throw DomainError("--start expects x,k pairs");
        for (std::size_t i = 0; i < args.start.size(); i += 2) orbits.push_back(integrate_orbit(h, args.start[i], args.start[i + 1], opt));
    } else {
        const auto& eps = args.epsilons.empty() ? default_overlay_epsilons() : args.epsilons;
        for (double e : eps) orbits.push_back(orbit_for_energy(h, e, opt));
    }

    std::ostringstream table;
    table << "index,epsilon,period,area_xk,area_yz,area_virial,ell,energy_drift,closure,parametric_sum,parametric_constraint\n";
    std::printf("%5s %10s %12s %12s %12s %12s %10s %10s %10s\n", "index", "epsilon", "period", "area_xk", "area_yz",
                "ell", "drift", "par_sum", "par_dyn");
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        const auto& o = orbits[i];
        export_orbit_csv(o, (dir / (args.prefix + "_" + std::to_string(i) + ".csv")).string());
        const auto a = enclosed_areas(o);
        const double ell = bohr_sommerfeld(o);
        std::optional<ParametricResiduals> par;
        try {
            par = parametric_check(o);
        } catch (const UnsupportedConfigurationError&) {
        }
        const std::string period = o.period ? g17(*o.period) : "nan";
        table << i << ',' << g17(o.epsilon) << ',' << period << ',' << g17(a.area_xk) << ',' << g17(a.area_yz) << ','
              << g17(a.area_virial) << ',' << g17(ell) << ',' << g17(o.energy_drift) << ',' << g17(o.closure) << ','
              << (par ? g17(par->max_residual_sum) : "nan") << ',' << (par ? g17(par->max_residual_constraint) : "nan")
              << '\n';
        std::printf("%5zu %10.4f %12.6f %12.6f %12.6f %12.6f %10.2e", i, o.epsilon, o.period.value_or(NAN), a.area_xk,
                    a.area_yz, ell, o.energy_drift);
        if (par) {
            std::printf(" %10.2e %10.2e\n", par->max_residual_sum, par->max_residual_constraint);
        } else {
            std::printf(" %10s %10s\n", "-", "-");
        }
    }
    const auto summary = (dir / (args.prefix + "_summary.csv")).string();
    std::ofstream f(summary);
    if (!f) throw IoError("cannot open '" + summary + "' for writing");
    f << table.str();
    return kExitOk;
}

// --- field ------------------------------------------------------------------

struct FieldArgs {
    HamiltonianArgs h;
    EnsembleArgs e;
    std::string method = "closed";
    int eta_max = 40;
    double tol = 1e-14;
    std::string quantifier = "stationarity_total";
    std::string grid;
    std::string normalization = "linear";
    double w_floor = 1e-12;
    std::vector<double> overlay;
    bool no_overlay = false;
    unsigned workers = 0;
    std::string out_dir = ".";
    std::string name = "field";
};

int run_field(const FieldArgs& args) {
    RenderSpec spec(args.h.build(), args.e.build());
    const auto method = parse_method(args.method);
    if (!method) throw DomainError("unknown method '" + args.method + "' (expected series, closed or classical)");
    const auto quantifier = parse_quantifier(args.quantifier);
    if (!quantifier) throw DomainError("unknown quantifier '" + args.quantifier + "'");
    const auto norm = parse_normalization(args.normalization);
    if (!norm) throw DomainError("unknown normalization '" + args.normalization + "' (expected linear or log)");
    spec.method = *method;
    spec.series = {args.eta_max, args.tol};
    spec.quantifier = *quantifier;
    spec.normalization = *norm;
    spec.w_floor = args.w_floor;
    spec.workers = args.workers;
    if (!args.no_overlay) spec.overlay_epsilons = args.overlay.empty() ? default_overlay_epsilons() : args.overlay;

    const FieldGrid grid = args.grid.empty() ? default_field_grid(spec.ensemble) : parse_grid(args.grid);
    const auto result = render_field(spec, grid);
    const auto dir = prepare_dir(args.out_dir);
    const auto base = dir / args.name;

    export_csv(result.field, base.string() + ".csv");
    const auto scale = export_pgm(result.field, base.string() + ".pgm", spec.normalization);

    const auto overlays = overlay_trajectories(spec);
    if (!overlays.empty()) export_overlay_csv(overlays, base.string() + "_orbits.csv");
    std::string overlay_errors;
    for (const auto& ov : overlays) {
        if (!ov.error.empty()) {
            std::fprintf(stderr, "overlay eps=%g: %s\n", ov.epsilon, ov.error.c_str());
            overlay_errors += (overlay_errors.empty() ? "" : "; ") + g17(ov.epsilon) + ": " + ov.error;
        }
    }

    const auto stats = summarize(result.field);
    std::vector<std::pair<std::string, std::string>> meta{
        {"hamiltonian", spec.hamiltonian.label()},
        {"g", g17(spec.hamiltonian.g())},
        {"ensemble", describe(spec.ensemble)},
        {"method", to_string(spec.method)},
        {"eta_max", std::to_string(spec.series.eta_max)},
        {"series_tol", g17(spec.series.tol)},
        {"quantifier", to_string(spec.quantifier)},
        {"value", "absolute value of the quantifier"},
        {"w_floor", g17(spec.w_floor)},
        {"grid", g17(grid.x_min()) + ":" + g17(grid.x_max()) + ":" + g17(grid.k_min()) + ":" + g17(grid.k_max()) + ":" +
                     std::to_string(grid.nx()) + ":" + std::to_string(grid.nk())},
        {"normalization", to_string(spec.normalization)},
        {"pgm_rows", "top row is k_max; 16-bit big-endian; masked cells are 0"},
    };
    if (spec.normalization == Normalization::linear) {
        meta.emplace_back("pgm_black", g17(scale.lo));
        meta.emplace_back("pgm_white", g17(scale.hi));
    } else {
        meta.emplace_back("pgm_formula", "(log10(|v|/v_max + 1e-16) + 16) / 16 * 65535");
        meta.emplace_back("pgm_v_max", g17(scale.hi));
    }
    meta.emplace_back("field_max", g17(stats.max));
    meta.emplace_back("field_mean", g17(stats.mean));
    meta.emplace_back("masked_floor", std::to_string(result.masked_floor));
    meta.emplace_back("masked_error", std::to_string(result.masked_error));
    if (!result.first_error.empty()) meta.emplace_back("first_error", result.first_error);
    std::string eps_list;
    for (double e : spec.overlay_epsilons) eps_list += (eps_list.empty() ? "" : ",") + g17(e);
    meta.emplace_back("overlay_epsilons", eps_list);
    if (!overlay_errors.empty()) meta.emplace_back("overlay_errors", overlay_errors);
    write_metadata(base.string() + ".meta.txt", meta);

    std::printf("%s: max %.6e mean %.6e masked_floor %zu masked_error %zu\n", base.string().c_str(), stats.max,
                stats.mean, result.masked_floor, result.masked_error);
    if (result.masked_error) std::fprintf(stderr, "first cell error: %s\n", result.first_error.c_str());
    return kExitOk;
}

// --- purity / quantize / validate --------------------------------------------

struct PurityArgs {
    EnsembleArgs e;
    std::string grid;
};

int run_purity(const PurityArgs& args) {
    const Ensemble e = args.e.build();
    const FieldGrid grid = args.grid.empty() ? default_purity_grid(e) : parse_grid(args.grid);
    const auto r = purity(e, grid);
    std::printf("ensemble %s\npurity %.12f\ntail_mass %.3e\n", describe(e).c_str(), r.value, r.tail_mass);
    if (r.exceeds_pure_bound) std::printf("note: purity exceeds the pure-state bound 1\n");
    return kExitOk;
}

struct QuantizeArgs {
    HamiltonianArgs h;
    std::vector<double> epsilons;
    double dt = 1e-3;
};

int run_quantize(const QuantizeArgs& args) {
    if (args.epsilons.empty()) throw DomainError("quantize: --epsilon is required");
    const auto h = args.h.build();
    OrbitOptions opt;
    opt.dt = args.dt;
    for (double eps : args.epsilons) {
        const auto o = orbit_for_energy(h, eps, opt);
        const auto a = enclosed_areas(o);
        const double ell = bohr_sommerfeld(o);
        std::printf("epsilon %.6g  area %.10f  l = %.8f  (nearest integer %.0f)\n", eps, a.area_xk, ell, std::round(ell));
    }
    return kExitOk;
}

int run_validate() {
    const auto results = validation::run_all();
    bool ok = true;
    for (const auto& r : results) {
        ok = ok && r.passed;
        std::printf("%-4s  %-36s  %.3e  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.measured, r.detail.c_str());
    }
    std::printf("%s\n", ok ? "all checks passed" : "some checks failed");
    return ok ? kExitOk : kExitFailure;
}

// --- config files -------------------------------------------------------------

// Values from `--config FILE` (key = value lines, optionally under a
// [subcommand] section) are prepended to the subcommand's arguments, so
// flags given on the command line take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file name");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            out.push_back(args[i]);
        }
    }
    if (!path || out.empty()) return out;
    const std::string sub = out.front();
    std::set<std::string> given;
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].rfind("--", 0) == 0) given.insert(out[i].substr(2, out[i].find('=') - 2));
    }
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_file(*path);
    } catch (const CLI::FileError& e) {
        throw CLI::FileError(std::string("cannot read config: ") + e.what());
    }
    std::vector<std::string> injected;
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents.front() == sub)) continue;
        if (given.count(item.name)) continue;
        if (item.inputs.size() == 1 && (item.inputs.front() == "true" || item.inputs.front() == "false")) {
            if (item.inputs.front() == "true") injected.push_back("--" + item.name);
            continue;
        }
        injected.push_back("--" + item.name);
        for (const auto& v : item.inputs) injected.push_back(v);
    }
    out.insert(out.begin() + 1, injected.begin(), injected.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wigner-flow quantifiers and Lotka-Volterra phase-space analysis"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    const char* config_help = "read key = value options from FILE (command-line flags win)";
    // Consumed by expand_config before parsing; registered for --help only.
    std::string config_file;

    TrajectoryArgs traj;
    auto* t = app.add_subcommand("trajectory", "integrate classical orbits and write per-orbit CSV plus a summary");
    traj.h.add(t);
    t->add_option("--epsilons", traj.epsilons, "energy levels (default 6,5,4,3,2.5,2.2,2.1,2.05)")->delimiter(',');
    t->add_option("--start", traj.start, "initial points x,k[,x,k...] instead of energy levels")->delimiter(',');
    t->add_option("--dt", traj.dt, "RK4 step")->capture_default_str();
    t->add_option("--tau-max", traj.tau_max, "give up on a return after this time")->capture_default_str();
    t->add_option("--out-dir", traj.out_dir, "output directory")->capture_default_str();
    t->add_option("--prefix", traj.prefix, "output file prefix")->capture_default_str();
    t->add_option("--config", config_file, config_help);

    FieldArgs field;
    auto* f = app.add_subcommand("field", "render a quantifier field with orbit overlays (CSV, PGM, metadata)");
    field.h.add(f);
    field.e.add(f);
    f->add_option("--method", field.method, "closed, series or classical")->capture_default_str();
    f->add_option("--eta-max", field.eta_max, "series truncation order")->capture_default_str();
    f->add_option("--tol", field.tol, "series relative tolerance")->capture_default_str();
    f->add_option("--quantifier", field.quantifier,
                  "stationarity_total, stationarity_classical, stationarity_quantum or liouvillianity")
        ->capture_default_str();
    f->add_option("--grid", field.grid, "xmin:xmax:kmin:kmax:n[:nk] (default depends on the ensemble)");
    f->add_option("--normalization", field.normalization, "PGM scaling: linear or log")->capture_default_str();
    f->add_option("--w-floor", field.w_floor, "Liouvillianity mask threshold on W")->capture_default_str();
    f->add_option("--overlay", field.overlay, "orbit energy levels (default 6,5,4,3,2.5,2.2,2.1,2.05)")->delimiter(',');
    f->add_flag("--no-overlay", field.no_overlay, "skip orbit overlays");
    f->add_option("--workers", field.workers, "worker threads (0 = hardware concurrency)")->capture_default_str();
    f->add_option("--out-dir", field.out_dir, "output directory")->capture_default_str();
    f->add_option("--name", field.name, "output base name")->capture_default_str();
    f->add_option("--config", config_file, config_help);

    PurityArgs pur;
    auto* p = app.add_subcommand("purity", "purity 2*pi*int W^2 of an ensemble");
    pur.e.add(p);
    p->add_option("--grid", pur.grid, "xmin:xmax:kmin:kmax:n[:nk] quadrature grid");
    p->add_option("--config", config_file, config_help);

    QuantizeArgs quant;
    auto* q = app.add_subcommand("quantize", "Bohr-Sommerfeld number l = (loop integral of k dx)/(2 pi)");
    quant.h.add(q);
    q->add_option("--epsilon", quant.epsilons, "energy level(s)")->delimiter(',');
    q->add_option("--dt", quant.dt, "RK4 step")->capture_default_str();
    q->add_option("--config", config_file, config_help);

    auto* v = app.add_subcommand("validate", "run the invariant suite and print a pass/fail table");
    v->add_option("--config", config_file, config_help);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (t->parsed()) return run_trajectory(traj);
        if (f->parsed()) return run_field(field);
        if (p->parsed()) return run_purity(pur);
        if (q->parsed()) return run_quantize(quant);
        if (v->parsed()) return run_validate();
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
