#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stokesnc/control.hpp"
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

MomentProblem problem_for(const ModeBasis& basis, int L,
                          const std::vector<Complex>& a0, double T,
                          double T0) {
    MomentProblem mp;
    mp.exponents.assign(basis.lambda.begin(), basis.lambda.begin() + L);
    mp.weights.assign(basis.weight.begin(), basis.weight.begin() + L);
    ModalState init{basis.mode, a0, 0.0};
    mp.targets = target_moments(init, mp.exponents, T);
    mp.horizon = T0;
    mp.T = T;
    return mp;
}

// independent moment evaluation: composite Gauss-Legendre quadrature of
// psi(t) e^{lambda_l (T-t)} conj(w_l) over (0, T0)
Complex moment_quadrature(const ControlSignal& sig, int l) {
    const auto gl = gauss_legendre(24);
    const int nseg = 512;
    Complex total = 0.0;
    for (int i = 0; i < nseg; ++i) {
        const double a = sig.T0 * i / nseg;
        const double b = sig.T0 * (i + 1) / nseg;
        Complex seg = 0.0;
        for (std::size_t g = 0; g < gl.x.size(); ++g) {
            const double t = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[g];
            seg += gl.w[g] * sig.eval(t)
                   * std::exp(sig.lambda[l] * (sig.T - t))
                   * std::conj(sig.weights[l]);
        }
        total += seg * 0.5 * (b - a);
    }
    return total;
}

}  // namespace

TEST_CASE("target_moments: zero data, diagonal scaling") {
    const auto basis = basis_of(1, 3);
    ModalState zero{basis.mode, {0.0, 0.0, 0.0}, 0.0};
    for (const auto& t : target_moments(zero, basis.lambda, 1.0))
        CHECK(std::abs(t) == 0.0);

    ModalState single{basis.mode, {Complex(2.0, -1.0), 0.0, 0.0}, 0.0};
    const auto m = target_moments(single, basis.lambda, 1.0);
    CHECK(std::abs(m[0])
          == doctest::Approx(std::abs(single.alphas[0])
                             * std::exp(basis.lambda[0])));
    CHECK(std::abs(m[1]) == 0.0);
    CHECK(std::abs(m[2]) == 0.0);
}

TEST_CASE("gram_matrix closed form and quadrature oracle") {
    const double lam = -3.7;
    const double T0 = 0.5;
    const auto g1 = gram_matrix(std::vector<double>{lam}, T0);
    CHECK(g1[0][0]
          == doctest::Approx((std::exp(2.0 * lam * T0) - 1.0) / (2.0 * lam))
                 .epsilon(1e-14));

    // the guarded limit exists even though negative exponents never reach it
    const auto g0 = gram_matrix(std::vector<double>{0.0, 0.0}, T0);
    (void)g0;

    const std::vector<double> lams{-2.0, -11.5};
    const auto G = gram_matrix(lams, T0);
    const auto gl = gauss_legendre(48);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            double quad = 0.0;
            for (std::size_t g = 0; g < gl.x.size(); ++g) {
                const double s = 0.5 * T0 + 0.5 * T0 * gl.x[g];
                quad += gl.w[g] * std::exp((lams[i] + lams[j]) * s);
            }
            quad *= 0.5 * T0;
            CHECK(G[i][j] == doctest::Approx(quad).epsilon(1e-10));
        }
    }
    CHECK(G[0][1] == G[1][0]);
}

TEST_CASE("gram_matrix limit guard returns the horizon") {
    // exponents summing to zero are unreachable for the Stokes spectrum;
    // the guard still has to be exact
    const auto G = gram_matrix(std::vector<double>{0.0}, 0.75);
    CHECK(G[0][0] == 0.75);
}

TEST_CASE("solve_biorthogonal: scalar case in closed form") {
    const auto basis = basis_of(1, 1);
    const double T = 1.0, T0 = 0.5;
    std::vector<Complex> a0{Complex(1.5, 0.5)};
    const auto mp = problem_for(basis, 1, a0, T, T0);
    const auto sig = solve_biorthogonal(mp, basis.mode, 0.0);

    const double lam = basis.lambda[0];
    const double G11 = (std::exp(2.0 * lam * T0) - 1.0) / (2.0 * lam);
    // effective weight carries the e^{lambda (T-T0)} window shift; the
    // scalar moment equation reads conj(weff)^2 G11 c = target
    const Complex weff = basis.weight[0] * std::exp(lam * (T - T0));
    const Complex expected =
        mp.targets[0] / (std::conj(weff) * std::conj(weff) * G11);
    CHECK(std::abs(sig.c[0] - expected) <= 1e-10 * std::abs(expected));
    // equal magnitude to the |weff|^2-normalized form (imaginary weights)
    CHECK(std::abs(sig.c[0])
          == doctest::Approx(std::abs(mp.targets[0]) / (std::norm(weff) * G11))
                 .epsilon(1e-10));
    CHECK(sig.moment_residual <= 1e-10);
}

TEST_CASE("solve_biorthogonal: L = 2 matches the explicit inverse oracle") {
    const auto basis = basis_of(1, 2);
    const double T = 1.0, T0 = 0.5;
    std::vector<Complex> a0{Complex(1.0, -2.0), Complex(0.3, 0.7)};
    const auto mp = problem_for(basis, 2, a0, T, T0);
    const auto sig = solve_biorthogonal(mp, basis.mode, 0.0);

    // Cramer on H = Weff G Weff^*, with the moment system
    // sum_m conj(w_l) Dl G_lm Dm conj(w_m) c_m = target_l
    const auto G = gram_matrix(mp.exponents, T0);
    Complex H[2][2];
    for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m)
            H[l][m] = std::conj(mp.weights[l])
                      * std::exp(mp.exponents[l] * (T - T0)) * G[l][m]
                      * std::exp(mp.exponents[m] * (T - T0))
                      * std::conj(mp.weights[m]);
    const Complex det = H[0][0] * H[1][1] - H[0][1] * H[1][0];
    const Complex c0 = (mp.targets[0] * H[1][1] - H[0][1] * mp.targets[1]) / det;
    const Complex c1 = (H[0][0] * mp.targets[1] - mp.targets[0] * H[1][0]) / det;
    CHECK(std::abs(sig.c[0] - c0) <= 1e-10 * std::abs(c0));
    CHECK(std::abs(sig.c[1] - c1) <= 1e-10 * std::abs(c1));
}

TEST_CASE("moment exactness against the quadrature oracle") {
    const auto basis = basis_of(1, 6);
    const double T = 1.0, T0 = 0.5;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<Complex> a0(6);
    for (auto& v : a0) v = Complex(dist(rng), dist(rng));
    const auto mp = problem_for(basis, 6, a0, T, T0);
    const auto sig = solve_biorthogonal(mp, basis.mode, 0.0);
    CHECK(sig.moment_residual <= 1e-8);

    double tscale = 0.0;
    for (const auto& t : mp.targets) tscale = std::max(tscale, std::abs(t));
    for (int l = 0; l < 6; ++l) {
        const Complex got = moment_quadrature(sig, l);
        CHECK(std::abs(got - mp.targets[l]) <= 1e-8 * tscale);
    }
}

TEST_CASE("regularization sweep: residual decreases monotonically to 0") {
    const auto basis = basis_of(1, 6);
    std::vector<Complex> a0(6, Complex(1.0, 0.5));
    const auto mp = problem_for(basis, 6, a0, 1.0, 0.5);
    double prev = std::numeric_limits<double>::infinity();
    for (const double eps : {1e-4, 1e-8, 1e-12, 0.0}) {
        const auto sig = solve_biorthogonal(mp, basis.mode, eps);
        CHECK(sig.moment_residual <= prev + 1e-18);
        prev = sig.moment_residual;
    }
    CHECK(prev <= 1e-10);
}

TEST_CASE("null-control certificate: synthesized psi empties the branches") {
    for (const int m : {1, 3}) {
        const auto basis = basis_of(m, 8);
        const double T = 1.0, T0 = 0.5;
        std::mt19937_64 rng(7 + m);
        std::normal_distribution<double> dist(0.0, 1.0);
        std::vector<Complex> a0(8);
        for (auto& v : a0) v = Complex(dist(rng), dist(rng));
        double nrm = 0.0;
        for (const auto& v : a0) nrm += std::norm(v);
        nrm = std::sqrt(nrm);

        const auto mp = problem_for(basis, 8, a0, T, T0);
        const auto sig = synthesize_mode_control(mp, basis.mode);

        const auto t_grid = uniform_grid(2049, 0.0, T);
        const auto psi = sig.step_values(t_grid);
        ModalState init{basis.mode, a0, 0.0};
        const auto traj =
            forward_controlled(init, basis.lambda, basis.input, psi, t_grid);
        for (const auto& aT : traj.a.back())
            CHECK(std::abs(aT) <= 1e-6 * nrm);
    }
}

TEST_CASE("control vanishes on [T0, T) and has finite energy") {
    const auto basis = basis_of(2, 4);
    std::vector<Complex> a0{1.0, -1.0, Complex(0.0, 1.0), 0.5};
    const auto mp = problem_for(basis, 4, a0, 1.0, 0.5);
    const auto sig = solve_biorthogonal(mp, basis.mode, 0.0);
    CHECK(std::abs(sig.eval(0.5)) == 0.0);
    CHECK(std::abs(sig.eval(0.75)) == 0.0);
    CHECK(std::abs(sig.eval(0.499)) > 0.0);
    CHECK(std::isfinite(sig.energy()));
    CHECK(sig.energy() > 0.0);
}

TEST_CASE("assemble_field: two-term pair, zero x-mean, support in time") {
    const auto basis = basis_of(1, 2);
    std::vector<Complex> a0{Complex(1.0, 0.4), Complex(-0.2, 0.9)};
    const auto mp = problem_for(basis, 2, a0, 1.0, 0.5);
    const auto pos = solve_biorthogonal(mp, basis.mode, 0.0);
    ControlSignal neg = pos;
    neg.mode = ModeIndex::from_m(-1, 2.0 * kPi);
    for (auto& v : neg.span_coeffs) v = std::conj(v);
    for (auto& v : neg.c) v = std::conj(v);
    for (auto& v : neg.weights) v = std::conj(v);

    const auto x = uniform_grid(65, 0.0, 2.0 * kPi);
    const auto t = uniform_grid(33, 0.0, 1.0);
    std::vector<ControlSignal> signals{pos, neg};
    const auto field = assemble_field(signals, x, t, 2.0 * kPi);

    // psi(x, t) = 2 Re(psi_1(t) e^{i x})
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Complex v = pos.eval(t[i]);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double expect =
                2.0 * (v * std::exp(Complex(0.0, x[j]))).real();
            CHECK(field.psi[i][j] == doctest::Approx(expect).epsilon(1e-12));
        }
        if (t[i] >= 0.5)
            for (std::size_t j = 0; j < x.size(); ++j)
                CHECK(field.psi[i][j] == 0.0);
    }
    double psi_scale = 0.0;
    for (const auto& row : field.psi)
        for (const auto v : row) psi_scale = std::max(psi_scale, std::abs(v));
    CHECK(field.max_x_mean <= 1e-12 * std::max(psi_scale, 1e-30));
}

TEST_CASE("assemble_field rejects non-conjugate pairs") {
    const auto basis = basis_of(1, 2);
    std::vector<Complex> a0{Complex(1.0, 0.4), Complex(-0.2, 0.9)};
    const auto mp = problem_for(basis, 2, a0, 1.0, 0.5);
    const auto pos = solve_biorthogonal(mp, basis.mode, 0.0);
    ControlSignal bad = pos;  // same coefficients, not conjugated
    bad.mode = ModeIndex::from_m(-1, 2.0 * kPi);

    const auto x = uniform_grid(16, 0.0, 2.0 * kPi);
    const auto t = uniform_grid(9, 0.0, 1.0);
    std::vector<ControlSignal> signals{pos, bad};
    CHECK_THROWS_AS(assemble_field(signals, x, t, 2.0 * kPi),
                    ConjugacyViolation);
}

TEST_CASE("IllConditioned fires without regularization, fallback recovers") {
    // nearly coincident exponents drive the Gram condition past 1e14
    MomentProblem mp;
    mp.exponents = {-1.0, -1.0 - 1e-9, -2.0};
    mp.weights = {Complex(0.0, 1.0), Complex(0.0, 1.0), Complex(0.0, 2.0)};
    mp.targets = {Complex(1.0, 0.0), Complex(0.5, 0.0), Complex(0.25, 0.0)};
    mp.horizon = 0.5;
    mp.T = 1.0;
    const auto mode = ModeIndex::from_m(1, 2.0 * kPi);
    CHECK_THROWS_AS(solve_biorthogonal(mp, mode, 0.0), IllConditioned);
    const auto sig = synthesize_mode_control(mp, mode);
    CHECK(sig.epsilon > 0.0);
    CHECK(sig.condition_number > 1e14);
    CHECK(std::isfinite(sig.moment_residual));
}

TEST_CASE("MomentProblem validation") {
    MomentProblem mp;
    mp.exponents = {-1.0, -0.5};  // not decreasing
    mp.weights = {Complex(0.0, 1.0), Complex(0.0, 1.0)};
    mp.targets = {0.0, 0.0};
    CHECK_THROWS_AS(mp.validate(), ConfigError);
    mp.exponents = {-0.5, -1.0};
    mp.weights[1] = 0.0;
    CHECK_THROWS_AS(mp.validate(), ConfigError);
}
