// Timing harness comparing the serial reference sweeps against the OpenMP
// kernels on identical inputs. Results must match bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "stokesnc/collocation.hpp"
#include "stokesnc/harness.hpp"
#include "stokesnc/quadrature.hpp"

using namespace stokesnc;

namespace {

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best,
                        std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    int m_max = 16;
    int l_max = 60;
    int n_points = 192;
    int reps = 3;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--m-max")) m_max = std::atoi(argv[i + 1]);
        else if (!std::strcmp(argv[i], "--l-max")) l_max = std::atoi(argv[i + 1]);
        else if (!std::strcmp(argv[i], "--n-points")) n_points = std::atoi(argv[i + 1]);
        else if (!std::strcmp(argv[i], "--reps")) reps = std::atoi(argv[i + 1]);
    }

    ChannelConfig ch;
    LocalizationParams loc;
    loc.l_max = l_max;
    const auto y_grid = uniform_grid(1025, 0.0, 1.0);

    std::printf("%-28s %10s %10s %8s\n", "kernel", "serial[s]", "openmp[s]", "speedup");

    // deep sweeps run past the double-precision certification floor of the
    // scaled residual (~mu^3 * eps), so the certification tolerance is wider
    // here than in the acceptance-range sweeps
    const double tol = 1e-8;
    std::vector<ModeSpectrum> ser, par;
    const double t_ser = time_best_of(reps, [&] {
        ser = spectrum_sweep(ch, loc, m_max, ExecPolicy::Serial, tol);
    });
    const double t_par = time_best_of(reps, [&] {
        par = spectrum_sweep(ch, loc, m_max, ExecPolicy::OpenMP, tol);
    });
    bool same = ser.size() == par.size();
    for (std::size_t i = 0; same && i < ser.size(); ++i)
        for (std::size_t l = 0; same && l < ser[i].roots.size(); ++l)
            same = ser[i].roots[l].mu_tilde == par[i].roots[l].mu_tilde;
    std::printf("%-28s %10.4f %10.4f %8.2f%s\n", "spectrum_sweep", t_ser, t_par,
                t_ser / t_par, same ? "" : "  MISMATCH");

    std::vector<ModeEigenbasis> eb_ser(ser.size()), eb_par(ser.size());
    const double e_ser = time_best_of(reps, [&] {
        for_each_index(ser.size(), ExecPolicy::Serial, [&](std::size_t i) {
            eb_ser[i] = build_mode_eigenbasis(ser[i], ch.nu, y_grid);
        });
    });
    const double e_par = time_best_of(reps, [&] {
        for_each_index(ser.size(), ExecPolicy::OpenMP, [&](std::size_t i) {
            eb_par[i] = build_mode_eigenbasis(ser[i], ch.nu, y_grid);
        });
    });
    same = true;
    for (std::size_t i = 0; same && i < eb_ser.size(); ++i)
        for (std::size_t l = 0; same && l < eb_ser[i].basis.trace.size(); ++l)
            same = eb_ser[i].basis.trace[l] == eb_par[i].basis.trace[l];
    std::printf("%-28s %10.4f %10.4f %8.2f%s\n", "eigenbasis_sweep", e_ser,
                e_par, e_ser / e_par, same ? "" : "  MISMATCH");

    const int oracle_modes = std::min(m_max, 6);
    std::vector<std::vector<double>> lam_ser(oracle_modes), lam_par(oracle_modes);
    const double c_ser = time_best_of(reps, [&] {
        for_each_index(oracle_modes, ExecPolicy::Serial, [&](std::size_t i) {
            lam_ser[i] = collocation_spectrum_oracle(
                ModeIndex::from_m(static_cast<int>(i) + 1, ch.length), ch.nu,
                n_points, 10);
        });
    });
    const double c_par = time_best_of(reps, [&] {
        for_each_index(oracle_modes, ExecPolicy::OpenMP, [&](std::size_t i) {
            lam_par[i] = collocation_spectrum_oracle(
                ModeIndex::from_m(static_cast<int>(i) + 1, ch.length), ch.nu,
                n_points, 10);
        });
    });
    same = true;
    for (int i = 0; same && i < oracle_modes; ++i)
        same = lam_ser[i] == lam_par[i];
    std::printf("%-28s %10.4f %10.4f %8.2f%s\n", "collocation_sweep", c_ser,
                c_par, c_ser / c_par, same ? "" : "  MISMATCH");
    return 0;
}
