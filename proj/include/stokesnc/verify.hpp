#ifndef STOKESNC_VERIFY_HPP
#define STOKESNC_VERIFY_HPP

#include <string>
#include <vector>

#include "stokesnc/harness.hpp"

namespace stokesnc {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;   // the check's headline number
    double threshold = 0.0;
    std::string detail;
};

struct VerifyOptions {
    ChannelConfig channel;
    int m_max = 8;
    int l_max = 30;
    int eigen_l = 10;      // branches for eigenfunction-level checks
    int n_y = 1025;
    int duality_trials = 100;
    int duality_steps = 128;
    int obs_L = 6;
    int collocation_points = 256;
    int collocation_m = 4;
    int collocation_branches = 10;
    int synthesis_branches = 6;
    unsigned long long seed = 424242;
    std::vector<std::string> only;   // empty: run everything
    std::string inject_fault;        // "root" corrupts one refined root
    ExecPolicy policy = ExecPolicy::OpenMP;
};

/// Run the named checks (localization, symmetry, simplicity,
/// determinant_oracle, gap_summability, boundary_conditions, ode_residual,
/// orthogonality, trace_consistency, trace_bound, zero_mode, duality,
/// observability_positivity, oracle_agreement, null_control).
std::vector<CheckResult> run_verification(const VerifyOptions& opt);

/// Finite-difference residual of the fourth-order eigen-ODE applied to the
/// sampled xi, relative to the largest term magnitude. Grid size adapts to
/// the branch oscillation. Test oracle: independent of the analytic
/// derivative route.
double fd_ode_residual(const ModeIndex& mode, const SpectralRoot& root,
                       double nu);

/// Finite-difference residual of the pressure relation
/// (lambda + nu k^2) xi - nu xi'' - q' on the grid, relative.
double fd_pressure_residual(const ModeIndex& mode, const SpectralRoot& root,
                            double nu, int n_grid = 1025);

/// Max boundary-condition residual |xi(0)|, |xi(1)|, |xi'(0)|, |xi'(1)|
/// relative to max |xi| on [0, 1].
double bc_residual(const ModeIndex& mode, const SpectralRoot& root);

}  // namespace stokesnc

#endif
