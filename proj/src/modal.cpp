#include "stokesnc/modal.hpp"

#include <cmath>
#include <stdexcept>

#include "stokesnc/quadrature.hpp"

namespace stokesnc {

ModalState adjoint_evolve(const ModalState& terminal,
                          std::span<const double> lambda, double T, double t) {
    if (!(t >= 0.0 && t <= T))
        throw std::invalid_argument("adjoint_evolve: need 0 <= t <= T");
    ModalState out = terminal;
    out.t = t;
    for (std::size_t l = 0; l < out.alphas.size(); ++l)
        out.alphas[l] *= std::exp(lambda[l] * (T - t));
    return out;
}

std::vector<Complex> adjoint_pressure_trace(const ModalState& terminal,
                                            const ModeBasis& basis, double T,
                                            std::span<const double> t_grid) {
    std::vector<Complex> out(t_grid.size(), Complex(0.0, 0.0));
    const std::size_t L = terminal.alphas.size();
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        Complex q = 0.0;
        for (std::size_t l = 0; l < L; ++l)
            q += terminal.alphas[l] * std::exp(basis.lambda[l] * (T - t_grid[i]))
                 * basis.weight[l];
        out[i] = q;
    }
    return out;
}

Trajectory forward_controlled(const ModalState& initial,
                              std::span<const double> lambda,
                              std::span<const Complex> input_coeffs,
                              std::span<const Complex> psi_steps,
                              std::span<const double> t_grid) {
    if (t_grid.size() < 2 || psi_steps.size() + 1 != t_grid.size())
        throw std::invalid_argument(
            "forward_controlled: need one psi value per step");
    const std::size_t L = initial.alphas.size();
    Trajectory traj;
    traj.t.assign(t_grid.begin(), t_grid.end());
    traj.a.reserve(t_grid.size());
    traj.a.push_back(initial.alphas);
    std::vector<Complex> a = initial.alphas;
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
        const double h = t_grid[i + 1] - t_grid[i];
        for (std::size_t l = 0; l < L; ++l) {
            if (std::abs(lambda[l]) * h > 50.0)
                throw StepTooLarge("forward_controlled: |lambda|*h > 50");
            const double eh = std::exp(lambda[l] * h);
            const double em1 = std::expm1(lambda[l] * h);
            a[l] = eh * a[l] + input_coeffs[l] * psi_steps[i] * (em1 / lambda[l]);
        }
        traj.a.push_back(a);
    }
    return traj;
}

double sine_mode_decay(int n, double nu, double t) {
    if (n < 1) throw ConfigError("sine_mode_decay: n must be >= 1");
    return std::exp(-nu * kPi * kPi * static_cast<double>(n)
                    * static_cast<double>(n) * t);
}

double sine_mode_invariant(int n, std::span<const double> u_profile,
                           std::span<const double> y_grid, double nu,
                           double t) {
    auto w = simpson_weights(static_cast<int>(y_grid.size()), y_grid.front(),
                             y_grid.back());
    double c0 = 0.0;
    const double s2 = std::sqrt(2.0);
    for (std::size_t i = 0; i < y_grid.size(); ++i)
        c0 += w[i] * u_profile[i] * s2 * std::sin(n * kPi * y_grid[i]);
    return sine_mode_decay(n, nu, t) * c0;
}

Complex coeff_inner(std::span<const Complex> a, std::span<const Complex> b) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

}  // namespace stokesnc
