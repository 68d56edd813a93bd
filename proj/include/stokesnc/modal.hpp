#ifndef STOKESNC_MODAL_HPP
#define STOKESNC_MODAL_HPP

#include <span>
#include <vector>

#include "stokesnc/eigenfunctions.hpp"
#include "stokesnc/types.hpp"

namespace stokesnc {

/// Coefficient vector of one nonzero Fourier mode in the normalized
/// eigenbasis at time t.
struct ModalState {
    ModeIndex mode;
    std::vector<Complex> alphas;
    double t = 0.0;
};

/// Coefficients of the k = 0 sine family sqrt(2) sin(n*pi*y), n = 1..N.
/// These directions are untouched by the boundary control.
struct ZeroModeState {
    std::vector<double> sine_coeffs;
    double t = 0.0;
};

/// Adjoint solution at time t from terminal data at time T:
/// alpha_l(t) = alpha_l(T) * e^{lambda_l (T - t)}.
ModalState adjoint_evolve(const ModalState& terminal,
                          std::span<const double> lambda, double T, double t);

/// Boundary pressure trace of the adjoint,
/// q_k(1, t) = sum_l alpha_l e^{lambda_l (T-t)} * weight_l,
/// with weight_l = -(nu/k^2) xi'''_l(1) of the unit-norm eigenfunctions.
std::vector<Complex> adjoint_pressure_trace(const ModalState& terminal,
                                            const ModeBasis& basis, double T,
                                            std::span<const double> t_grid);

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<Complex>> a;  // a[i][l] at t[i]
};

/// Exact variation-of-constants stepping of
///   da_l/dt = lambda_l a_l + b_l psi(t)
/// with psi piecewise constant per step (psi_steps[i] on [t_i, t_{i+1})).
/// Throws StepTooLarge when |lambda| * h > 50 on any step.
Trajectory forward_controlled(const ModalState& initial,
                              std::span<const double> lambda,
                              std::span<const Complex> input_coeffs,
                              std::span<const Complex> psi_steps,
                              std::span<const double> t_grid);

/// Exact decay factor of the k = 0 sine invariant: e^{-nu (n*pi)^2 t}.
double sine_mode_decay(int n, double nu, double t);

/// Evolve the sine coefficient of a k = 0 profile: extracts
/// integral(u_profile * sqrt(2) sin(n*pi*y)) by Simpson quadrature on the
/// grid and applies the exact decay factor at time t.
double sine_mode_invariant(int n, std::span<const double> u_profile,
                           std::span<const double> y_grid, double nu, double t);

/// <a, b> = sum_l a_l conj(b_l).
Complex coeff_inner(std::span<const Complex> a, std::span<const Complex> b);

}  // namespace stokesnc

#endif
