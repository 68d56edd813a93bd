#ifndef STOKESNC_CONTROL_HPP
#define STOKESNC_CONTROL_HPP

#include <span>
#include <vector>

#include "stokesnc/eigenfunctions.hpp"
#include "stokesnc/modal.hpp"
#include "stokesnc/types.hpp"

namespace stokesnc {

/// Per-mode moment problem over the exponential family {e^{lambda_l (T-t)}}
/// on (0, T0). weights are the boundary trace factors -(nu/k^2) xi'''_l(1);
/// targets are the required moments of psi against e^{lambda_l(T-t)} conj(w_l).
struct MomentProblem {
    std::vector<double> exponents;   // lambda_l, strictly decreasing, < 0
    std::vector<Complex> weights;    // nonzero trace factors
    std::vector<Complex> targets;
    double horizon = 0.5;            // T0
    double T = 1.0;

    void validate() const;
};

/// Moments that drive a(T) to zero through the duality identity:
/// target_l = -a_l(0) e^{lambda_l T}.
std::vector<Complex> target_moments(const ModalState& initial,
                                    std::span<const double> lambda, double T);

/// Gram of the exponential family on (0, T0):
/// G_lm = (e^{(lambda_l+lambda_m) T0} - 1) / (lambda_l + lambda_m),
/// with the T0 limit guarded.
std::vector<std::vector<double>> gram_matrix(std::span<const double> exponents,
                                             double horizon);

/// One synthesized per-mode control
///   psi_k(t) = sum_l c_l conj(weight_l) e^{lambda_l (T - t)}  on (0, T0),
///   psi_k(t) = 0                                              on [T0, T).
struct ControlSignal {
    ModeIndex mode;
    std::vector<double> lambda;
    std::vector<Complex> weights;
    std::vector<Complex> c;            // reported coefficients
    std::vector<Complex> span_coeffs;  // u_l = c_l conj(w_l) e^{lambda_l (T-T0)}
    double T = 1.0;
    double T0 = 0.5;
    double moment_residual = 0.0;      // relative to ||targets||
    double condition_number = 1.0;     // of the exponential Gram
    double epsilon = 0.0;              // applied Tikhonov parameter

    /// psi_k(t); zero for t >= T0. Evaluated in the stable form
    /// sum_l u_l e^{lambda_l (T0 - t)}.
    Complex eval(double t) const;

    /// Step values psi(t_mid) for piecewise-constant integration on t_grid.
    std::vector<Complex> step_values(std::span<const double> t_grid) const;

    /// Control energy int_0^{T0} |psi|^2 dt by Simpson quadrature.
    double energy(int n_points = 4097) const;
};

/// Solve the per-mode moment problem. With regularization == 0 the moment
/// equations are met to solver precision; IllConditioned is thrown when the
/// Gram condition number exceeds 1e14 and no regularization was requested.
ControlSignal solve_biorthogonal(const MomentProblem& problem,
                                 const ModeIndex& mode,
                                 double regularization = 0.0);

/// solve_biorthogonal with the automatic Tikhonov fallback
/// eps = 1e-12 * trace(G) / L applied when the plain solve is ill-conditioned.
ControlSignal synthesize_mode_control(const MomentProblem& problem,
                                      const ModeIndex& mode);

/// Real boundary field psi(x, t) assembled from conjugate-paired per-mode
/// signals. Throws ConjugacyViolation when signals for m and -m are not
/// conjugate within 1e-10, relative to the pair scale.
struct ControlField {
    std::vector<double> x;
    std::vector<double> t;
    std::vector<std::vector<double>> psi;  // psi[i][j] at (t_i, x_j)
    double max_x_mean = 0.0;               // largest |mean over x| over t
};
ControlField assemble_field(std::span<const ControlSignal> signals,
                            std::span<const double> x_grid,
                            std::span<const double> t_grid, double length);

}  // namespace stokesnc

#endif
