// Command-line front end: spectrum, eigen, observability, control, simulate,
// verify. Exit codes: 0 success, 1 usage/config error, 2 numerical or check
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "stokesnc/harness.hpp"
#include "stokesnc/io.hpp"
#include "stokesnc/quadrature.hpp"
#include "stokesnc/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stokesnc;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    int m_max = 8;
    int l_max = 30;
    double nu = 1.0;
    double length = 2.0 * kPi;
    double T = 1.0;
    double T0 = 0.5;
    unsigned long long seed = 12345;
    int synthesis_branches = 6;
    int time_steps = 2048;
    int n_y = 1025;
    int n_x = 64;
    int sine_max = 4;
    bool psi_off = false;
    std::string checks;
    std::string inject_fault;
    std::string initial_json;  // inline initial_data override
};

InitialData parse_initial_data(const json& j) {
    InitialData init;
    const std::string type = j.value("type", "modal");
    if (type == "modal") {
        for (const auto& c : j.value("coefficients", json::array()))
            init.modal.push_back({c.at("m").get<int>(), c.at("l").get<int>(),
                                  Complex(c.value("re", 0.0), c.value("im", 0.0))});
        for (const auto& c : j.value("sine", json::array()))
            init.sine.push_back(
                {c.at("n").get<int>(), c.at("value").get<double>()});
    } else if (type == "grid") {
        const std::string path = j.at("path").get<std::string>();
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot open grid file: " + path);
        GridField g;
        // CSV rows: x,y,u,v on a full tensor grid, x-major
        std::string line;
        std::getline(is, line);  // header
        std::vector<double> xs, ys, us, vs;
        while (std::getline(is, line)) {
            double x, y, u, v;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &x, &y, &u, &v) != 4)
                throw ConfigError("bad grid row: " + line);
            xs.push_back(x); ys.push_back(y); us.push_back(u); vs.push_back(v);
        }
        if (xs.empty()) throw ConfigError("empty grid file: " + path);
        std::size_t ny = 1;
        while (ny < ys.size() && ys[ny] > ys[ny - 1]) ++ny;
        if (ys.size() % ny != 0)
            throw ConfigError("grid file is not a full tensor grid");
        const std::size_t nx = ys.size() / ny;
        g.y.assign(ys.begin(), ys.begin() + static_cast<long>(ny));
        g.u.assign(nx, std::vector<double>(ny));
        g.v.assign(nx, std::vector<double>(ny));
        for (std::size_t i = 0; i < nx; ++i) {
            g.x.push_back(xs[i * ny]);
            for (std::size_t jj = 0; jj < ny; ++jj) {
                g.u[i][jj] = us[i * ny + jj];
                g.v[i][jj] = vs[i * ny + jj];
            }
        }
        init.grid = std::move(g);
        init.require_zero_x_mean = j.value("zero_x_mean", false);
    } else if (type == "random") {
        // handled by the caller through random_initial
    } else {
        throw ConfigError("unknown initial_data type: " + type);
    }
    return init;
}

void apply_config_file(CliOptions& o, json& initial_spec) {
    if (o.config_path.empty()) return;
    std::ifstream is(o.config_path);
    if (!is) throw ConfigError("cannot open config: " + o.config_path);
    json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    o.nu = j.value("nu", o.nu);
    o.length = j.value("L", j.value("length", o.length));
    o.T = j.value("T", o.T);
    o.T0 = j.value("T0", o.T0);
    o.m_max = j.value("M_max", j.value("m_max", o.m_max));
    o.l_max = j.value("L_max", j.value("l_max", o.l_max));
    o.synthesis_branches = j.value("synthesis_branches", o.synthesis_branches);
    o.time_steps = j.value("time_steps", o.time_steps);
    o.n_y = j.value("n_y", o.n_y);
    o.n_x = j.value("n_x", o.n_x);
    o.sine_max = j.value("sine_max", o.sine_max);
    o.seed = j.value("seed", o.seed);
    if (j.contains("initial_data")) initial_spec = j["initial_data"];
}

ChannelConfig channel_of(const CliOptions& o) {
    ChannelConfig ch;
    ch.nu = o.nu;
    ch.length = o.length;
    ch.T = o.T;
    ch.T0 = o.T0;
    ch.validate();
    return ch;
}

std::string out_path(const CliOptions& o, const char* name) {
    fs::create_directories(o.out_dir);
    return (fs::path(o.out_dir) / name).string();
}

int cmd_spectrum(const CliOptions& o) {
    const auto ch = channel_of(o);
    LocalizationParams loc;
    loc.l_max = o.l_max;
    try {
        const auto spectra =
            spectrum_sweep(ch, loc, o.m_max, ExecPolicy::OpenMP);
        write_spectrum_csv(out_path(o, "spectrum.csv"), spectra);
        std::size_t rows = 0;
        for (const auto& s : spectra) rows += s.roots.size();
        std::cout << "spectrum: " << rows << " certified roots ("
                  << spectra.size() << " modes x " << o.l_max
                  << " branches) -> " << out_path(o, "spectrum.csv") << "\n";
    } catch (const BracketingFailure& e) {
        std::cerr << "bracketing failure: " << e.what() << "\n";
        return 2;
    } catch (const NonConvergence& e) {
        std::cerr << "refinement failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int cmd_eigen(const CliOptions& o) {
    const auto ch = channel_of(o);
    LocalizationParams loc;
    loc.l_max = o.l_max;
    const auto y_grid = uniform_grid(o.n_y, 0.0, 1.0);
    std::vector<TraceReportEntry> entries;
    double inf_ratio = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= o.m_max; ++m) {
        const auto mode = ModeIndex::from_m(m, ch.length);
        const auto spec = compute_mode_spectrum(mode, loc, ch.nu);
        auto eb = build_mode_eigenbasis(spec, ch.nu, y_grid);
        for (const auto& ef : eb.eigs) {
            char name[64];
            std::snprintf(name, sizeof(name), "eigen_m%d_l%d.csv", m, ef.l);
            write_eigenfunction_csv(out_path(o, name), ef, y_grid);
        }
        for (const auto& r : spec.roots) {
            const auto tr = xi_triple_prime_at_one(mode, r, ch.nu);
            const double ratio =
                std::abs(tr) / (mode.k * mode.k * std::exp(std::abs(mode.k))
                                * std::abs(r.lambda) * r.mu_tilde);
            inf_ratio = std::min(inf_ratio, ratio);
            entries.push_back({m, r.l, tr, ratio});
        }
    }
    write_trace_report_json(out_path(o, "traces.json"), entries, inf_ratio);
    std::cout << "eigen: wrote per-(m,l) eigenfunction tables and traces.json"
              << " (empirical M = " << inf_ratio << ")\n";
    return 0;
}

int cmd_observability(const CliOptions& o) {
    const auto ch = channel_of(o);
    LocalizationParams loc;
    loc.l_max = std::max(o.synthesis_branches, 8);
    const auto y_grid = uniform_grid(o.n_y, 0.0, 1.0);
    std::vector<ModeBasis> bases;
    for (int m = 1; m <= o.m_max; ++m) {
        const auto spec = compute_mode_spectrum(
            ModeIndex::from_m(m, ch.length), loc, ch.nu);
        bases.push_back(build_mode_basis(spec, ch.nu, y_grid));
        const auto specn = compute_mode_spectrum(
            ModeIndex::from_m(-m, ch.length), loc, ch.nu);
        bases.push_back(build_mode_basis(specn, ch.nu, y_grid));
    }
    const auto reports = uniformity_scan(bases, o.synthesis_branches, ch.T,
                                         ch.T0, ExecPolicy::OpenMP);
    write_observability_csv(out_path(o, "observability.csv"), reports);
    write_observability_json(out_path(o, "observability.json"), reports);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : reports) worst = std::min(worst, r.smallest_ratio);
    std::cout << "observability: min ratio over modes = " << worst << "\n";
    return worst > 0.0 ? 0 : 2;
}

int run_pipeline(const CliOptions& o, const json& initial_spec, bool simulate) {
    ExperimentConfig ec;
    ec.channel = channel_of(o);
    ec.truncation.m_max = o.m_max;
    ec.truncation.l_max = o.l_max;
    ec.truncation.time_steps = o.time_steps;
    ec.synthesis_branches = std::min(o.synthesis_branches, o.l_max);
    ec.n_y = o.n_y;
    ec.n_x = o.n_x;
    ec.sine_max = o.sine_max;
    ec.seed = o.seed;
    ec.psi_off = o.psi_off;
    ec.crosscheck = simulate;
    ec.out_dir = o.out_dir;
    if (initial_spec.is_null() || initial_spec.value("type", "") == "random") {
        ec.random_initial = true;
        if (!initial_spec.is_null()) {
            ec.random_m_max = initial_spec.value("m_max", ec.random_m_max);
            ec.random_l_max = initial_spec.value("l_max", ec.random_l_max);
        }
        ec.random_m_max = std::min(ec.random_m_max, o.m_max);
        ec.random_l_max = std::min(ec.random_l_max, o.l_max);
    } else {
        ec.initial = parse_initial_data(initial_spec);
    }

    try {
        const auto rep = run_experiment(ec, ExecPolicy::OpenMP);
        std::printf("%4s %14s %14s %14s %12s\n", "m", "initial", "controlled",
                    "uncontrolled", "residual");
        for (const auto& mo : rep.modes)
            std::printf("%4d %14.6e %14.6e %14.6e %12.3e\n", mo.m,
                        mo.initial_norm, mo.controlled_terminal,
                        mo.uncontrolled_terminal, mo.moment_residual);
        for (const auto& so : rep.sine)
            std::printf("sine n=%d: initial %.6e -> terminal %.6e (factor %.6e)\n",
                        so.n, so.initial, so.terminal, so.expected_factor);
        std::printf("totals: initial %.6e controlled %.6e uncontrolled %.6e\n",
                    rep.initial_total, rep.controlled_total,
                    rep.uncontrolled_total);
        std::printf("control energy %.6e, projection residual %.3e\n",
                    rep.control_energy, rep.projection_residual);
        if (rep.spectrum_crosscheck_error >= 0.0)
            std::printf("spectrum cross-check max rel error %.3e\n",
                        rep.spectrum_crosscheck_error);
        std::printf("wall clock %.2f s\n", rep.wall_clock_seconds);
    } catch (const IllConditioned& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const NumericalBreakdown& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int cmd_verify(const CliOptions& o) {
    VerifyOptions vo;
    vo.channel = channel_of(o);
    vo.m_max = o.m_max;
    vo.l_max = o.l_max;
    vo.n_y = o.n_y;
    vo.seed = o.seed;
    vo.synthesis_branches = o.synthesis_branches;
    vo.inject_fault = o.inject_fault;
    if (!o.checks.empty()) {
        std::stringstream ss(o.checks);
        std::string item;
        while (std::getline(ss, item, ',')) vo.only.push_back(item);
    }
    const auto results = run_verification(vo);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["checks"] = json::array();
    int failures = 0;
    for (const auto& r : results) {
        j["checks"].push_back({{"name", r.name},
                               {"pass", r.pass},
                               {"measured", r.measured},
                               {"threshold", r.threshold},
                               {"detail", r.detail}});
        std::printf("%-26s %s  measured=%.6e\n", r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.measured);
        if (!r.pass) ++failures;
    }
    std::ofstream os(out_path(o, "verify.json"), std::ios::binary);
    os << j.dump(2) << "\n";
    if (failures > 0) {
        std::cerr << failures << " check(s) failed\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stokes channel spectral toolkit: eigenstructure, "
                 "observability and boundary null control at desk scale"};
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions o;
    json initial_spec;  // null unless provided

    app.add_option("--config", o.config_path, "JSON config file");
    app.add_option("--out", o.out_dir, "output directory");
    app.add_option("--m-max", o.m_max, "Fourier modes |m| <= m_max");
    app.add_option("--l-max", o.l_max, "branches per mode");
    app.add_option("--nu", o.nu, "viscosity");
    app.add_option("--length", o.length, "channel period L");
    app.add_option("--t", o.T, "final time T");
    app.add_option("--t0", o.T0, "control horizon T0");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--time-steps", o.time_steps, "forward integration steps");
    app.add_option("--synthesis-branches", o.synthesis_branches,
                   "branches per mode used by the moment solve");
    app.add_option("--checks", o.checks, "comma-separated check filter (verify)");
    app.add_flag("--psi-off", o.psi_off, "disable the control");
    app.add_option("--inject-fault", o.inject_fault,
                   "testing hook: corrupt an internal quantity (root)");
    app.add_option("--initial", o.initial_json,
                   "inline JSON initial_data spec (overrides config)");

    auto* sub_spectrum = app.add_subcommand("spectrum", "compute and certify the spectrum table");
    auto* sub_eigen = app.add_subcommand("eigen", "export eigenfunctions and boundary traces");
    auto* sub_obs = app.add_subcommand("observability", "per-mode observability ratios");
    auto* sub_control = app.add_subcommand("control", "synthesize the boundary control");
    auto* sub_simulate = app.add_subcommand("simulate", "full experiment with reports");
    auto* sub_verify = app.add_subcommand("verify", "run all lemma checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        apply_config_file(o, initial_spec);
        if (!o.initial_json.empty())
            initial_spec = json::parse(o.initial_json);

        if (sub_spectrum->parsed()) return cmd_spectrum(o);
        if (sub_eigen->parsed()) return cmd_eigen(o);
        if (sub_obs->parsed()) return cmd_observability(o);
        if (sub_control->parsed()) return run_pipeline(o, initial_spec, false);
        if (sub_simulate->parsed()) return run_pipeline(o, initial_spec, true);
        if (sub_verify->parsed()) return cmd_verify(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ConstraintViolation& e) {
        std::cerr << "constraint violation: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
