#include "stokesnc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "stokesnc/io.hpp"
#include "stokesnc/quadrature.hpp"

namespace stokesnc {

using nlohmann::json;

void ExperimentConfig::validate() const {
    channel.validate();
    truncation.validate();
    if (synthesis_branches < 1 || synthesis_branches > truncation.l_max)
        throw ConfigError("synthesis_branches must lie in [1, l_max]");
    if (n_y < 3 || n_y % 2 == 0) throw ConfigError("n_y must be odd and >= 3");
    if (n_x < 4) throw ConfigError("n_x must be >= 4");
    if (sine_max < 0) throw ConfigError("sine_max must be >= 0");
}

ModeEigenbasis build_mode_eigenbasis(const ModeSpectrum& spectrum, double nu,
                                     std::span<const double> y_grid) {
    ModeEigenbasis eb;
    eb.basis.mode = spectrum.mode;
    const double k = spectrum.mode.k;
    eb.eigs.reserve(spectrum.roots.size());
    for (const auto& root : spectrum.roots)
        eb.eigs.push_back(
            assemble_eigenfunction(spectrum.mode, root, nu, y_grid));
    eb.gram = normalize_and_gram(eb.eigs);
    for (const auto& ef : eb.eigs) {
        eb.basis.lambda.push_back(ef.lambda);
        eb.basis.trace.push_back(ef.xi_ppp_1);
        eb.basis.weight.push_back(-(nu / (k * k)) * ef.xi_ppp_1);
        eb.basis.input.push_back(std::conj(-(nu / (k * k)) * ef.xi_ppp_1));
    }
    return eb;
}

namespace {

// discrete DFT coefficient u_k(y_j) = (1/nx) sum_i u(x_i, y_j) e^{-i k x_i}
std::vector<Complex> dft_profile(const GridField& g, double k,
                                 const std::vector<std::vector<double>>& comp,
                                 std::size_t ny) {
    const std::size_t nx = g.x.size();
    std::vector<Complex> out(ny, Complex(0.0, 0.0));
    for (std::size_t j = 0; j < ny; ++j) {
        Complex acc = 0.0;
        for (std::size_t i = 0; i < nx; ++i)
            acc += comp[i][j] * std::exp(Complex(0.0, -k * g.x[i]));
        out[j] = acc / static_cast<double>(nx);
    }
    return out;
}

}  // namespace

ProjectedData project_initial_data(const InitialData& data,
                                   std::span<const ModeEigenbasis> bases,
                                   const ChannelConfig& cfg, int sine_max,
                                   std::span<const double> y_grid) {
    ProjectedData out;
    out.states.resize(bases.size());
    for (std::size_t b = 0; b < bases.size(); ++b) {
        out.states[b].mode = bases[b].basis.mode;
        out.states[b].alphas.assign(bases[b].eigs.size(), Complex(0.0, 0.0));
        out.states[b].t = 0.0;
    }
    out.zero_mode.sine_coeffs.assign(sine_max, 0.0);
    out.zero_mode.t = 0.0;

    if (!data.grid) {
        for (const auto& mc : data.modal) {
            if (mc.m <= 0) throw ConstraintViolation(
                "modal coefficients are given for m > 0 (the -m partner is "
                "the conjugate)");
            bool placed = false;
            for (std::size_t b = 0; b < bases.size(); ++b) {
                if (bases[b].basis.mode.m == mc.m) {
                    if (mc.l < 1
                        || mc.l > static_cast<int>(out.states[b].alphas.size()))
                        throw ConstraintViolation("modal coefficient l out of range");
                    out.states[b].alphas[mc.l - 1] += mc.alpha;
                    placed = true;
                }
            }
            if (!placed)
                throw ConstraintViolation("modal coefficient m out of range");
        }
        for (const auto& sc : data.sine) {
            if (sc.n < 1 || sc.n > sine_max)
                throw ConstraintViolation("sine coefficient n out of range");
            out.zero_mode.sine_coeffs[sc.n - 1] += sc.value;
        }
        if (data.require_zero_x_mean) {
            for (const auto& c : out.zero_mode.sine_coeffs)
                if (std::abs(c) > 1e-12)
                    throw ConstraintViolation(
                        "u0 has nonzero x-mean but zero x-mean was required");
        }
        return out;
    }

    const GridField& g = *data.grid;
    const std::size_t nx = g.x.size();
    const std::size_t ny = g.y.size();
    if (ny != y_grid.size())
        throw ConstraintViolation("gridded data must use the pipeline y-grid");
    for (std::size_t j = 0; j < ny; ++j)
        if (std::abs(g.y[j] - y_grid[j]) > 1e-12)
            throw ConstraintViolation("gridded data must use the pipeline y-grid");
    auto wy = simpson_weights(static_cast<int>(ny), 0.0, 1.0);

    // field scale for the relative checks
    double scale = 0.0;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            scale = std::max({scale, std::abs(g.u[i][j]), std::abs(g.v[i][j])});
    if (scale == 0.0) scale = 1.0;

    // no-penetration at the walls
    for (std::size_t i = 0; i < nx; ++i)
        if (std::abs(g.v[i][0]) > 1e-10 * scale
            || std::abs(g.v[i][ny - 1]) > 1e-10 * scale)
            throw ConstraintViolation("normal velocity does not vanish at the walls");

    // per-mode divergence i k u_k + v_k' with exact x-differentiation and
    // fourth-order differences in y
    const double hy = g.y[1] - g.y[0];
    double div_max = 0.0, div_scale = 0.0;
    for (std::size_t b = 0; b < bases.size(); ++b) {
        const double k = bases[b].basis.mode.k;
        const auto uk = dft_profile(g, k, g.u, ny);
        const auto vk = dft_profile(g, k, g.v, ny);
        for (std::size_t j = 2; j + 2 < ny; ++j) {
            const Complex dv = (vk[j - 2] - 8.0 * vk[j - 1] + 8.0 * vk[j + 1]
                                - vk[j + 2])
                               / (12.0 * hy);
            const Complex t = Complex(0.0, k) * uk[j];
            div_max = std::max(div_max, std::abs(t + dv));
            div_scale = std::max(div_scale, std::abs(t) + std::abs(dv));
        }
    }
    // k = 0: incompressibility with a vanishing wall trace forces the mean
    // of v to vanish identically
    for (std::size_t j = 0; j < ny; ++j) {
        double vm = 0.0;
        for (std::size_t i = 0; i < nx; ++i) vm += g.v[i][j];
        div_max = std::max(div_max, std::abs(vm / static_cast<double>(nx)));
    }
    div_scale = std::max(div_scale, scale);
    if (div_max > 1e-6 * div_scale)
        throw ConstraintViolation("gridded field violates the divergence check");

    // x-mean of u per y; this is the k = 0 content
    std::vector<double> u_mean(ny, 0.0);
    for (std::size_t j = 0; j < ny; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < nx; ++i) acc += g.u[i][j];
        u_mean[j] = acc / static_cast<double>(nx);
    }
    if (data.require_zero_x_mean) {
        double worst = 0.0;
        for (const auto v : u_mean) worst = std::max(worst, std::abs(v));
        if (worst > 1e-8 * scale)
            throw ConstraintViolation(
                "u0 has nonzero x-mean but zero x-mean was required");
    }
    for (int n = 1; n <= sine_max; ++n) {
        double c = 0.0;
        for (std::size_t j = 0; j < ny; ++j)
            c += wy[j] * u_mean[j] * std::sqrt(2.0) * std::sin(n * kPi * y_grid[j]);
        out.zero_mode.sine_coeffs[n - 1] = c;
    }

    // nonzero modes: DFT then inner products against the orthonormal family
    double captured = 0.0;
    for (std::size_t b = 0; b < bases.size(); ++b) {
        const double k = bases[b].basis.mode.k;
        const auto uk = dft_profile(g, k, g.u, ny);
        const auto vk = dft_profile(g, k, g.v, ny);
        auto& alphas = out.states[b].alphas;
        for (std::size_t l = 0; l < bases[b].eigs.size(); ++l) {
            Complex a = 0.0;
            for (std::size_t j = 0; j < ny; ++j)
                a += wy[j] * (uk[j] * std::conj(bases[b].eigs[l].phi[j])
                              + vk[j] * std::conj(bases[b].eigs[l].xi[j]));
            alphas[l] = a;
            captured += 2.0 * std::norm(a);  // +-m pair
        }
    }
    for (const auto c : out.zero_mode.sine_coeffs) captured += c * c;

    // projection residual via Parseval on the captured part
    double total = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        double xacc = 0.0;
        for (std::size_t i = 0; i < nx; ++i)
            xacc += g.u[i][j] * g.u[i][j] + g.v[i][j] * g.v[i][j];
        total += wy[j] * xacc / static_cast<double>(nx);
    }
    const double missed = std::max(0.0, total - captured);
    out.projection_residual = total > 0.0 ? std::sqrt(missed / total) : 0.0;
    return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                ExecPolicy policy) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();
    const auto& ch = cfg.channel;

    LocalizationParams loc;
    loc.l_max = cfg.truncation.l_max;

    // spectra and eigenbases for m = 1..M (the -m side mirrors by conjugacy)
    std::vector<ModeSpectrum> spectra(cfg.truncation.m_max);
    const auto y_grid = uniform_grid(cfg.n_y, 0.0, 1.0);
    for_each_index(spectra.size(), policy, [&](std::size_t i) {
        spectra[i] = compute_mode_spectrum(
            ModeIndex::from_m(static_cast<int>(i) + 1, ch.length), loc, ch.nu);
    });
    std::vector<ModeEigenbasis> bases(spectra.size());
    for_each_index(spectra.size(), policy, [&](std::size_t i) {
        bases[i] = build_mode_eigenbasis(spectra[i], ch.nu, y_grid);
    });

    // initial data
    InitialData init = cfg.initial;
    if (cfg.random_initial) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> dist(0.0, 1.0);
        init.modal.clear();
        for (int m = 1; m <= std::min(cfg.random_m_max, cfg.truncation.m_max); ++m)
            for (int l = 1; l <= std::min(cfg.random_l_max, cfg.truncation.l_max); ++l)
                init.modal.push_back({m, l, Complex(dist(rng), dist(rng))});
        init.sine.clear();
        for (int n = 1; n <= cfg.sine_max; ++n)
            init.sine.push_back({n, dist(rng)});
    }
    auto projected =
        project_initial_data(init, bases, ch, cfg.sine_max, y_grid);

    ExperimentReport rep;
    rep.seed = cfg.seed;
    rep.projection_residual = projected.projection_residual;
    rep.spectrum_crosscheck_error = -1.0;

    // per-mode control synthesis and forward simulation
    const auto t_grid = uniform_grid(cfg.truncation.time_steps + 1, 0.0, ch.T);
    std::vector<ControlSignal> signals(bases.size());
    std::vector<Trajectory> trajectories(bases.size());
    std::vector<std::vector<Complex>> uncontrolled(bases.size());

    for_each_index(bases.size(), policy, [&](std::size_t b) {
        const auto& basis = bases[b].basis;
        const auto& a0 = projected.states[b].alphas;
        const int L = std::min<int>(cfg.synthesis_branches,
                                    static_cast<int>(a0.size()));

        ControlSignal sig;
        if (cfg.psi_off) {
            sig.mode = basis.mode;
            sig.T = ch.T;
            sig.T0 = ch.T0;
        } else {
            MomentProblem mp;
            mp.exponents.assign(basis.lambda.begin(), basis.lambda.begin() + L);
            mp.weights.assign(basis.weight.begin(), basis.weight.begin() + L);
            ModalState head{basis.mode,
                            std::vector<Complex>(a0.begin(), a0.begin() + L),
                            0.0};
            mp.targets = target_moments(head, mp.exponents, ch.T);
            mp.horizon = ch.T0;
            mp.T = ch.T;
            sig = synthesize_mode_control(mp, basis.mode);
        }
        signals[b] = sig;

        const auto psi_steps = sig.step_values(t_grid);
        trajectories[b] = forward_controlled(projected.states[b], basis.lambda,
                                             basis.input, psi_steps, t_grid);
        auto& unc = uncontrolled[b];
        unc.resize(a0.size());
        for (std::size_t l = 0; l < a0.size(); ++l)
            unc[l] = a0[l] * std::exp(basis.lambda[l] * ch.T);
    });

    double init_sq = 0.0, ctrl_sq = 0.0, unc_sq = 0.0;
    for (std::size_t b = 0; b < bases.size(); ++b) {
        ModeOutcome mo;
        mo.m = bases[b].basis.mode.m;
        double i2 = 0.0, c2 = 0.0, u2 = 0.0;
        const auto& aT = trajectories[b].a.back();
        for (std::size_t l = 0; l < aT.size(); ++l) {
            i2 += std::norm(projected.states[b].alphas[l]);
            c2 += std::norm(aT[l]);
            u2 += std::norm(uncontrolled[b][l]);
        }
        mo.initial_norm = std::sqrt(i2);
        mo.controlled_terminal = std::sqrt(c2);
        mo.uncontrolled_terminal = std::sqrt(u2);
        mo.moment_residual = signals[b].moment_residual;
        mo.condition_number = signals[b].condition_number;
        mo.epsilon = signals[b].epsilon;
        rep.modes.push_back(mo);
        init_sq += 2.0 * i2;  // +-m pairs
        ctrl_sq += 2.0 * c2;
        unc_sq += 2.0 * u2;
        rep.control_energy += 2.0 * ch.length * signals[b].energy();
    }
    rep.initial_total = std::sqrt(init_sq);
    rep.controlled_total = std::sqrt(ctrl_sq);
    rep.uncontrolled_total = std::sqrt(unc_sq);

    for (int n = 1; n <= cfg.sine_max; ++n) {
        SineOutcome so;
        so.n = n;
        so.initial = projected.zero_mode.sine_coeffs[n - 1];
        so.expected_factor = sine_mode_decay(n, ch.nu, ch.T);
        so.terminal = so.initial * so.expected_factor;
        rep.sine.push_back(so);
    }

    if (cfg.crosscheck) {
        double worst = 0.0;
        const int M = std::min(cfg.crosscheck_m, cfg.truncation.m_max);
        std::vector<double> errs(M, 0.0);
        for_each_index(static_cast<std::size_t>(M), policy, [&](std::size_t i) {
            const auto& spec = spectra[i];
            const int nb = std::min<int>(cfg.crosscheck_branches,
                                         static_cast<int>(spec.roots.size()));
            const auto lam = collocation_spectrum_oracle(
                spec.mode, ch.nu, cfg.crosscheck_points, nb);
            double e = 0.0;
            for (int l = 0; l < nb; ++l)
                e = std::max(e, std::abs(lam[l] - spec.roots[l].lambda)
                                    / std::abs(spec.roots[l].lambda));
            errs[i] = e;
        });
        for (const auto e : errs) worst = std::max(worst, e);
        rep.spectrum_crosscheck_error = worst;
    }

    if (!cfg.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out_dir);
        const auto path = [&](const char* name) {
            return (fs::path(cfg.out_dir) / name).string();
        };

        // spectrum table over +-m
        std::vector<ModeSpectrum> both;
        for (auto it = spectra.rbegin(); it != spectra.rend(); ++it) {
            ModeSpectrum neg = *it;
            neg.mode = ModeIndex::from_m(-neg.mode.m, ch.length);
            for (auto& r : neg.roots) r.mode = neg.mode;
            both.push_back(neg);
        }
        for (const auto& s : spectra) both.push_back(s);
        write_spectrum_csv(path("spectrum.csv"), both);

        // control field over +-m pairs
        std::vector<ControlSignal> paired;
        for (const auto& s : signals) {
            paired.push_back(s);
            ControlSignal neg = s;
            neg.mode = ModeIndex::from_m(-s.mode.m, ch.length);
            for (auto& v : neg.span_coeffs) v = std::conj(v);
            for (auto& v : neg.c) v = std::conj(v);
            for (auto& v : neg.weights) v = std::conj(v);
            paired.push_back(neg);
        }
        const auto x_grid = uniform_grid(cfg.n_x, 0.0, ch.length);
        const auto t_coarse = uniform_grid(129, 0.0, ch.T);
        write_control_csv(path("control.csv"),
                          assemble_field(paired, x_grid, t_coarse, ch.length));
        write_control_json(path("control.json"), signals);

        std::vector<TrajectoryRow> rows;
        std::vector<ModeTrajectoryDump> dumps;
        const std::size_t stride =
            std::max<std::size_t>(1, trajectories.empty()
                                         ? 1
                                         : trajectories[0].t.size() / 128);
        for (std::size_t b = 0; b < bases.size(); ++b) {
            const auto& tr = trajectories[b];
            ModeTrajectoryDump dump;
            dump.m = bases[b].basis.mode.m;
            for (std::size_t i = 0; i < tr.t.size(); i += stride) {
                dump.t.push_back(tr.t[i]);
                std::vector<double> abs_row(tr.a[i].size());
                for (std::size_t l = 0; l < tr.a[i].size(); ++l) {
                    abs_row[l] = std::abs(tr.a[i][l]);
                    const double unc_t =
                        std::abs(projected.states[b].alphas[l])
                        * std::exp(bases[b].basis.lambda[l] * tr.t[i]);
                    rows.push_back({bases[b].basis.mode.m, static_cast<int>(l + 1),
                                    tr.t[i], std::abs(tr.a[i][l]), unc_t});
                }
                dump.abs_a.push_back(std::move(abs_row));
            }
            dumps.push_back(std::move(dump));
        }
        write_trajectories_csv(path("trajectories.csv"), rows);
        write_trajectories_json(path("trajectories.json"), dumps);

        json j;
        j["schema_version"] = kSchemaVersion;
        j["seed"] = rep.seed;
        j["config"] = {{"nu", ch.nu},
                       {"length", ch.length},
                       {"T", ch.T},
                       {"T0", ch.T0},
                       {"m_max", cfg.truncation.m_max},
                       {"l_max", cfg.truncation.l_max},
                       {"time_steps", cfg.truncation.time_steps},
                       {"synthesis_branches", cfg.synthesis_branches},
                       {"psi_off", cfg.psi_off}};
        j["initial_total"] = rep.initial_total;
        j["controlled_total"] = rep.controlled_total;
        j["uncontrolled_total"] = rep.uncontrolled_total;
        j["control_energy"] = rep.control_energy;
        j["projection_residual"] = rep.projection_residual;
        j["spectrum_crosscheck_error"] = rep.spectrum_crosscheck_error;
        j["modes"] = json::array();
        for (const auto& mo : rep.modes)
            j["modes"].push_back({{"m", mo.m},
                                  {"initial_norm", mo.initial_norm},
                                  {"controlled_terminal", mo.controlled_terminal},
                                  {"uncontrolled_terminal", mo.uncontrolled_terminal},
                                  {"moment_residual", mo.moment_residual},
                                  {"condition_number", mo.condition_number},
                                  {"epsilon", mo.epsilon}});
        j["sine_invariants"] = json::array();
        for (const auto& so : rep.sine)
            j["sine_invariants"].push_back({{"n", so.n},
                                            {"initial", so.initial},
                                            {"terminal", so.terminal},
                                            {"expected_factor", so.expected_factor}});
        std::ofstream os(path("report.json"), std::ios::binary);
        os << j.dump(2) << "\n";
    }

    rep.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return rep;
}

}  // namespace stokesnc
