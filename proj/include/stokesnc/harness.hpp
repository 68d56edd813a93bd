#ifndef STOKESNC_HARNESS_HPP
#define STOKESNC_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "stokesnc/collocation.hpp"
#include "stokesnc/control.hpp"
#include "stokesnc/eigenfunctions.hpp"
#include "stokesnc/modal.hpp"
#include "stokesnc/observability.hpp"

namespace stokesnc {

/// Normalized eigenfunctions of one mode plus the derived basis data.
struct ModeEigenbasis {
    ModeBasis basis;
    std::vector<ModalEigenfunction> eigs;  // unit-norm, shared y-grid
    GramReport gram;
};

ModeEigenbasis build_mode_eigenbasis(const ModeSpectrum& spectrum, double nu,
                                     std::span<const double> y_grid);

struct ModalCoefficient {
    int m = 1;        // positive; the -m partner is the conjugate
    int l = 1;
    Complex alpha{};
};

struct SineCoefficient {
    int n = 1;
    double value = 0.0;
};

/// Velocity samples u(x_i, y_j), v(x_i, y_j) on a uniform periodic x-grid
/// (x_i = i * length / nx, endpoint excluded) and a uniform y-grid of [0, 1].
struct GridField {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::vector<double>> u;  // u[i][j]
    std::vector<std::vector<double>> v;
};

/// Initial data: synthetic modal coefficients, k = 0 sine content, or a
/// gridded velocity field. Gridded fields are checked for discrete
/// divergence, wall-normal trace and (when required) zero x-mean of u.
struct InitialData {
    std::vector<ModalCoefficient> modal;
    std::vector<SineCoefficient> sine;
    std::optional<GridField> grid;
    bool require_zero_x_mean = false;
};

struct ProjectedData {
    std::vector<ModalState> states;  // one per mode basis, t = 0
    ZeroModeState zero_mode;
    double projection_residual = 0.0;  // gridded inputs only
};

/// Project initial data onto the normalized eigenbases (modes m = 1..M) and
/// the k = 0 sine family. Throws ConstraintViolation on gridded inputs that
/// violate the stated invariants.
ProjectedData project_initial_data(const InitialData& data,
                                   std::span<const ModeEigenbasis> bases,
                                   const ChannelConfig& cfg, int sine_max,
                                   std::span<const double> y_grid);

struct ExperimentConfig {
    ChannelConfig channel;
    TruncationConfig truncation;
    int synthesis_branches = 6;
    int n_y = 1025;
    int n_x = 64;
    int sine_max = 4;
    unsigned long long seed = 12345;
    bool psi_off = false;
    bool crosscheck = true;          // collocation spectrum comparison
    int crosscheck_points = 256;
    int crosscheck_m = 4;
    int crosscheck_branches = 10;
    InitialData initial;
    bool random_initial = false;
    int random_m_max = 4;
    int random_l_max = 6;
    std::string out_dir;             // empty: no artifacts written

    void validate() const;
};

struct ModeOutcome {
    int m = 0;
    double initial_norm = 0.0;
    double controlled_terminal = 0.0;
    double uncontrolled_terminal = 0.0;
    double moment_residual = 0.0;
    double condition_number = 1.0;
    double epsilon = 0.0;
};

struct SineOutcome {
    int n = 0;
    double initial = 0.0;
    double terminal = 0.0;
    double expected_factor = 0.0;
};

struct ExperimentReport {
    std::vector<ModeOutcome> modes;
    std::vector<SineOutcome> sine;
    double initial_total = 0.0;
    double controlled_total = 0.0;
    double uncontrolled_total = 0.0;
    double control_energy = 0.0;
    double projection_residual = 0.0;
    double spectrum_crosscheck_error = 0.0;  // max relative, -1 when skipped
    double wall_clock_seconds = 0.0;         // not serialized (determinism)
    unsigned long long seed = 0;
};

/// Full pipeline: spectrum -> eigenfunctions -> projection -> control ->
/// forward simulation, with reports and optional CSV/JSON artifacts.
ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                ExecPolicy policy = ExecPolicy::OpenMP);

}  // namespace stokesnc

#endif
