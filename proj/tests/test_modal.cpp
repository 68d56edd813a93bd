#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stokesnc/modal.hpp"
#include "stokesnc/quadrature.hpp"

using namespace stokesnc;

namespace {

ModeBasis basis_of(int m, int l_max, double nu = 1.0) {
    const auto mode = ModeIndex::from_m(m, 2.0 * kPi);
    LocalizationParams params;
    params.l_max = l_max;
    const auto spec = compute_mode_spectrum(mode, params, nu);
    const auto y = uniform_grid(1025, 0.0, 1.0);
    return build_mode_basis(spec, nu, y);
}

}  // namespace

TEST_CASE("adjoint_evolve: identity at t = T, single-branch decay, norms") {
    const auto basis = basis_of(1, 4);
    ModalState terminal{basis.mode, {1.0, Complex(0.0, 2.0), -0.5, 0.25}, 1.0};
    const double T = 1.0;

    const auto at_T = adjoint_evolve(terminal, basis.lambda, T, T);
    for (std::size_t l = 0; l < 4; ++l)
        CHECK(at_T.alphas[l] == terminal.alphas[l]);

    ModalState single{basis.mode, {Complex(0.7, -0.3), 0.0, 0.0, 0.0}, 1.0};
    const auto at_0 = adjoint_evolve(single, basis.lambda, T, 0.0);
    CHECK(std::abs(at_0.alphas[0]
                   - single.alphas[0] * std::exp(basis.lambda[0] * T))
          <= 1e-15);

    // norm non-increasing as t decreases from T
    double prev = std::norm(terminal.alphas[0]) + std::norm(terminal.alphas[1])
                  + std::norm(terminal.alphas[2]) + std::norm(terminal.alphas[3]);
    for (const double t : {0.75, 0.5, 0.25, 0.0}) {
        const auto st = adjoint_evolve(terminal, basis.lambda, T, t);
        double n = 0.0;
        for (const auto& a : st.alphas) n += std::norm(a);
        CHECK(n <= prev);
        prev = n;
    }
}

TEST_CASE("adjoint semigroup property is exact in the exponentials") {
    const auto basis = basis_of(2, 3);
    ModalState terminal{basis.mode, {1.0, Complex(0.2, 0.4), -2.0}, 1.0};
    const double T = 1.0;
    const auto direct = adjoint_evolve(terminal, basis.lambda, T, 0.3);
    // evolve to t1 = 0.6, reinterpret as terminal data of horizon 0.6, go to 0.3
    const auto half = adjoint_evolve(terminal, basis.lambda, T, 0.6);
    const auto two_step = adjoint_evolve(half, basis.lambda, 0.6, 0.3);
    for (std::size_t l = 0; l < 3; ++l)
        CHECK(std::abs(direct.alphas[l] - two_step.alphas[l])
              <= 1e-12 * std::abs(direct.alphas[l]));
}

TEST_CASE("adjoint_pressure_trace: single branch, zero data, two-branch sum") {
    const auto basis = basis_of(1, 3);
    const double T = 1.0;
    const auto t_grid = uniform_grid(9, 0.0, T);

    ModalState e1{basis.mode, {1.0, 0.0, 0.0}, T};
    const auto tr1 = adjoint_pressure_trace(e1, basis, T, t_grid);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double expected = std::abs(basis.weight[0])
                                * std::exp(basis.lambda[0] * (T - t_grid[i]));
        CHECK(std::abs(tr1[i]) == doctest::Approx(expected).epsilon(1e-12));
    }

    ModalState zero{basis.mode, {0.0, 0.0, 0.0}, T};
    for (const auto& v : adjoint_pressure_trace(zero, basis, T, t_grid))
        CHECK(std::abs(v) == 0.0);

    // two-branch case vs direct summation
    ModalState two{basis.mode, {Complex(0.3, 1.0), Complex(-0.8, 0.1), 0.0}, T};
    const auto tr2 = adjoint_pressure_trace(two, basis, T, t_grid);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const Complex direct =
            two.alphas[0] * std::exp(basis.lambda[0] * (T - t_grid[i]))
                * basis.weight[0]
            + two.alphas[1] * std::exp(basis.lambda[1] * (T - t_grid[i]))
                  * basis.weight[1];
        CHECK(std::abs(tr2[i] - direct) <= 1e-14 * std::abs(direct));
    }
}

TEST_CASE("forward_controlled: free decay matches the closed form") {
    const auto basis = basis_of(1, 4);
    const double T = 1.0;
    const auto t_grid = uniform_grid(65, 0.0, T);
    std::vector<Complex> psi(64, Complex(0.0, 0.0));
    ModalState init{basis.mode, {1.0, Complex(0.0, -1.0), 0.5, 2.0}, 0.0};
    const auto traj =
        forward_controlled(init, basis.lambda, basis.input, psi, t_grid);
    for (std::size_t l = 0; l < 4; ++l) {
        const Complex expect = init.alphas[l] * std::exp(basis.lambda[l] * T);
        CHECK(std::abs(traj.a.back()[l] - expect)
              <= 1e-12 * std::max(1e-300, std::abs(expect)));
    }
}

TEST_CASE("forward_controlled: constant psi closed form, one branch") {
    const auto basis = basis_of(1, 1);
    const double T = 0.25;
    const auto t_grid = uniform_grid(33, 0.0, T);
    const Complex psi_val(0.7, -0.2);
    std::vector<Complex> psi(32, psi_val);
    ModalState init{basis.mode, {Complex(1.0, 1.0)}, 0.0};
    const auto traj =
        forward_controlled(init, basis.lambda, basis.input, psi, t_grid);
    const double lam = basis.lambda[0];
    const Complex b = basis.input[0];
    const Complex expect = init.alphas[0] * std::exp(lam * T)
                           + b * psi_val * std::expm1(lam * T) / lam;
    CHECK(std::abs(traj.a.back()[0] - expect) <= 1e-10 * std::abs(expect));
}

TEST_CASE("forward_controlled rejects oversized steps") {
    const auto basis = basis_of(8, 12);  // deep branch, |lambda| large
    const auto t_grid = uniform_grid(2, 0.0, 1.0);  // one giant step
    std::vector<Complex> psi(1, Complex(0.0, 0.0));
    ModalState init{basis.mode, std::vector<Complex>(12, 1.0), 0.0};
    CHECK_THROWS_AS(
        forward_controlled(init, basis.lambda, basis.input, psi, t_grid),
        StepTooLarge);
}

TEST_CASE("duality identity ties forward dynamics to the adjoint trace") {
    // <a(T), alpha> - <a(0), alpha e^{lambda T}> = int_0^T psi conj(q(1,t)) dt
    const auto basis = basis_of(3, 5);
    const double T = 1.0;
    const int steps = 128;
    const auto t_grid = uniform_grid(steps + 1, 0.0, T);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> dist(0.0, 1.0);
    const auto gl = gauss_legendre(16);

    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Complex> alpha(5), a0(5), psi(steps);
        for (auto& v : alpha) v = Complex(dist(rng), dist(rng));
        for (auto& v : a0) v = Complex(dist(rng), dist(rng));
        for (auto& v : psi) v = Complex(dist(rng), dist(rng));

        ModalState init{basis.mode, a0, 0.0};
        const auto traj =
            forward_controlled(init, basis.lambda, basis.input, psi, t_grid);
        Complex lhs = 0.0;
        for (int l = 0; l < 5; ++l)
            lhs += traj.a.back()[l] * std::conj(alpha[l])
                   - a0[l] * std::conj(alpha[l] * std::exp(basis.lambda[l] * T));

        Complex rhs = 0.0;
        for (int i = 0; i < steps; ++i) {
            Complex seg = 0.0;
            for (std::size_t g = 0; g < gl.x.size(); ++g) {
                const double t = 0.5 * (t_grid[i] + t_grid[i + 1])
                                 + 0.5 * (t_grid[i + 1] - t_grid[i]) * gl.x[g];
                Complex q = 0.0;
                for (int l = 0; l < 5; ++l)
                    q += alpha[l] * std::exp(basis.lambda[l] * (T - t))
                         * basis.weight[l];
                seg += gl.w[g] * std::conj(q);
            }
            rhs += psi[i] * seg * 0.5 * (t_grid[i + 1] - t_grid[i]);
        }
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("sine invariants: identity at t=0, exact factor, psi-independence") {
    const auto y = uniform_grid(257, 0.0, 1.0);
    std::vector<double> profile(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        profile[i] = std::sin(kPi * y[i]);  // sqrt(2)-normalized coeff 1/sqrt2

    const double v0 = sine_mode_invariant(1, profile, y, 1.0, 0.0);
    CHECK(v0 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));

    const double v1 = sine_mode_invariant(1, profile, y, 1.0, 1.0);
    CHECK(v1 == doctest::Approx(v0 * std::exp(-kPi * kPi)).epsilon(1e-14));
    CHECK(sine_mode_decay(1, 1.0, 1.0) == std::exp(-kPi * kPi));

    // the factor never references any control input: it is a pure function
    // of (n, nu, t); the modal dynamics of k = 0 have no psi term at all
    CHECK(sine_mode_decay(2, 0.5, 1.0)
          == doctest::Approx(std::exp(-0.5 * 4.0 * kPi * kPi)));
}

TEST_CASE("coeff_inner conjugates its second argument") {
    std::vector<Complex> a{Complex(1.0, 2.0)};
    std::vector<Complex> b{Complex(0.0, 1.0)};
    CHECK(coeff_inner(a, b) == Complex(2.0, -1.0));
}
