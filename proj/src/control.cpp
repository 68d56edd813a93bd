#include "stokesnc/control.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "stokesnc/quadrature.hpp"

namespace stokesnc {

void MomentProblem::validate() const {
    const std::size_t L = exponents.size();
    if (weights.size() != L || targets.size() != L)
        throw ConfigError("MomentProblem: inconsistent sizes");
    if (!(horizon > 0.0)) throw ConfigError("MomentProblem: horizon must be > 0");
    for (std::size_t l = 0; l < L; ++l) {
        if (!(exponents[l] < 0.0))
            throw ConfigError("MomentProblem: exponents must be negative");
        if (l > 0 && !(exponents[l] < exponents[l - 1]))
            throw ConfigError("MomentProblem: exponents must be strictly decreasing");
        if (weights[l] == Complex(0.0, 0.0))
            throw ConfigError("MomentProblem: weights must be nonzero");
    }
}

std::vector<Complex> target_moments(const ModalState& initial,
                                    std::span<const double> lambda, double T) {
    std::vector<Complex> m(initial.alphas.size());
    for (std::size_t l = 0; l < m.size(); ++l)
        m[l] = -initial.alphas[l] * std::exp(lambda[l] * T);
    return m;
}

std::vector<std::vector<double>> gram_matrix(std::span<const double> exponents,
                                             double horizon) {
    const std::size_t L = exponents.size();
    std::vector<std::vector<double>> G(L, std::vector<double>(L, 0.0));
    for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
            const double s = exponents[i] + exponents[j];
            const double x = s * horizon;
            G[i][j] = (x == 0.0) ? horizon : std::expm1(x) / s;
        }
    }
    return G;
}

Complex ControlSignal::eval(double t) const {
    if (t >= T0) return Complex(0.0, 0.0);
    Complex v = 0.0;
    for (std::size_t l = 0; l < span_coeffs.size(); ++l)
        v += span_coeffs[l] * std::exp(lambda[l] * (T0 - t));
    return v;
}

std::vector<Complex> ControlSignal::step_values(
    std::span<const double> t_grid) const {
    std::vector<Complex> out(t_grid.size() - 1);
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
        out[i] = eval(0.5 * (t_grid[i] + t_grid[i + 1]));
    return out;
}

double ControlSignal::energy(int n_points) const {
    if (n_points % 2 == 0) ++n_points;
    auto tg = uniform_grid(n_points, 0.0, T0);
    auto w = simpson_weights(n_points, 0.0, T0);
    double e = 0.0;
    for (int i = 0; i < n_points; ++i) e += w[i] * std::norm(eval(tg[i]));
    return e;
}

namespace {

Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& G) {
    const auto L = static_cast<Eigen::Index>(G.size());
    Eigen::MatrixXd M(L, L);
    for (Eigen::Index i = 0; i < L; ++i)
        for (Eigen::Index j = 0; j < L; ++j) M(i, j) = G[i][j];
    return M;
}

}  // namespace

ControlSignal solve_biorthogonal(const MomentProblem& problem,
                                 const ModeIndex& mode, double regularization) {
    problem.validate();
    const std::size_t L = problem.exponents.size();
    const double T = problem.T;
    const double T0 = problem.horizon;

    const Eigen::MatrixXd G = to_eigen(gram_matrix(problem.exponents, T0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const double emin = es.eigenvalues().minCoeff();
    const double emax = es.eigenvalues().maxCoeff();
    const double cond = (emin > 0.0) ? emax / emin
                                     : std::numeric_limits<double>::infinity();
    if (regularization == 0.0 && cond > 1e14)
        throw IllConditioned("solve_biorthogonal: Gram condition number > 1e14");

    // The moment equations read
    //   sum_m conj(w_l) D_l G_lm D_m conj(w_m) c_m = target_l,
    // with D_l = e^{lambda_l (T - T0)}; solve in the diagonally factored form
    // so no over/underflowing matrix is ever formed.
    Eigen::VectorXcd rhs(L);
    for (std::size_t l = 0; l < L; ++l) {
        const double dinv = std::exp(-problem.exponents[l] * (T - T0));
        const Complex denom = std::conj(problem.weights[l]);
        if (problem.targets[l] == Complex(0.0, 0.0)) {
            rhs[static_cast<Eigen::Index>(l)] = Complex(0.0, 0.0);
            continue;
        }
        const Complex v = problem.targets[l] * dinv / denom;
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalBreakdown(
                "solve_biorthogonal: branch too deep for double precision");
        rhs[static_cast<Eigen::Index>(l)] = v;
    }

    Eigen::MatrixXd Greg = G;
    if (regularization > 0.0)
        Greg.diagonal().array() += regularization;
    const Eigen::VectorXcd u = Greg.ldlt().solve(rhs);

    ControlSignal sig;
    sig.mode = mode;
    sig.lambda = problem.exponents;
    sig.weights = problem.weights;
    sig.T = T;
    sig.T0 = T0;
    sig.condition_number = cond;
    sig.epsilon = regularization;
    sig.span_coeffs.resize(L);
    sig.c.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        const Complex ul = u[static_cast<Eigen::Index>(l)];
        sig.span_coeffs[l] = ul;
        if (ul == Complex(0.0, 0.0)) {
            sig.c[l] = Complex(0.0, 0.0);
        } else {
            sig.c[l] = ul * std::exp(-problem.exponents[l] * (T - T0))
                       / std::conj(problem.weights[l]);
        }
    }

    // physical moment residual, relative to ||targets||
    const Eigen::VectorXcd r = G * u - rhs;
    double num = 0.0, den = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        const double d = std::exp(problem.exponents[l] * (T - T0));
        num += std::norm(std::conj(problem.weights[l]) * d
                         * r[static_cast<Eigen::Index>(l)]);
        den += std::norm(problem.targets[l]);
    }
    sig.moment_residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    return sig;
}

ControlSignal synthesize_mode_control(const MomentProblem& problem,
                                      const ModeIndex& mode) {
    try {
        return solve_biorthogonal(problem, mode, 0.0);
    } catch (const IllConditioned&) {
        const auto G = gram_matrix(problem.exponents, problem.horizon);
        double tr = 0.0;
        for (std::size_t i = 0; i < G.size(); ++i) tr += G[i][i];
        const double eps = 1e-12 * tr / static_cast<double>(G.size());
        return solve_biorthogonal(problem, mode, eps);
    }
}

ControlField assemble_field(std::span<const ControlSignal> signals,
                            std::span<const double> x_grid,
                            std::span<const double> t_grid, double length) {
    // pair signals by |m|
    std::vector<const ControlSignal*> pos, neg;
    for (const auto& s : signals)
        (s.mode.m > 0 ? pos : neg).push_back(&s);
    auto by_abs_m = [](const ControlSignal* a, const ControlSignal* b) {
        return std::abs(a->mode.m) < std::abs(b->mode.m);
    };
    std::sort(pos.begin(), pos.end(), by_abs_m);
    std::sort(neg.begin(), neg.end(), by_abs_m);
    if (pos.size() != neg.size())
        throw ConjugacyViolation("assemble_field: unpaired mode signals");

    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (pos[i]->mode.m != -neg[i]->mode.m)
            throw ConjugacyViolation("assemble_field: unpaired mode signals");
        double scale = 0.0, diff = 0.0;
        for (const double t : t_grid) {
            const Complex a = pos[i]->eval(t);
            const Complex b = neg[i]->eval(t);
            scale = std::max({scale, std::abs(a), std::abs(b)});
            diff = std::max(diff, std::abs(b - std::conj(a)));
        }
        if (diff > 1e-10 * std::max(scale, 1e-300))
            throw ConjugacyViolation("assemble_field: signals for m and -m "
                                     "are not conjugates");
    }

    ControlField field;
    field.x.assign(x_grid.begin(), x_grid.end());
    field.t.assign(t_grid.begin(), t_grid.end());
    field.psi.assign(t_grid.size(), std::vector<double>(x_grid.size(), 0.0));
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        for (const auto* s : pos) {
            const Complex v = s->eval(t_grid[i]);
            const double k = s->mode.k;
            for (std::size_t j = 0; j < x_grid.size(); ++j)
                field.psi[i][j] +=
                    2.0 * (v * std::exp(Complex(0.0, k * x_grid[j]))).real();
        }
        // zero x-mean: no k = 0 component by construction; record the
        // trapezoidal mean over one period as a diagnostic
        double mean = 0.0;
        if (x_grid.size() > 1) {
            for (std::size_t j = 0; j + 1 < x_grid.size(); ++j)
                mean += 0.5 * (field.psi[i][j] + field.psi[i][j + 1])
                        * (x_grid[j + 1] - x_grid[j]);
            mean /= length;
        }
        field.max_x_mean = std::max(field.max_x_mean, std::abs(mean));
    }
    return field;
}

}  // namespace stokesnc
