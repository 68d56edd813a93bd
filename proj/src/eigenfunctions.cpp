#include "stokesnc/eigenfunctions.hpp"

#include <cmath>

#include "stokesnc/quadrature.hpp"

namespace stokesnc {

EigenfunctionCoefficients coefficients(const ModeIndex& mode,
                                       const SpectralRoot& root) {
    const double k = mode.k;
    const Complex mu(0.0, root.mu_tilde);
    const auto E = [](const Complex& z) { return std::exp(z); };

    EigenfunctionCoefficients c;
    c.mu = mu;
    c.C1 = mu * mu * (E(-(mu + k)) - E(mu - k))
         + mu * (2.0 * k - k * (E(-(mu + k)) + E(mu - k)));
    c.C2 = mu * mu * (E(mu + k) - E(-(mu - k)))
         + mu * (2.0 * k - k * (E(-(mu - k)) + E(mu + k)));
    c.C3 = mu * (2.0 * k - k * (E(-(mu + k)) + E(-(mu - k))))
         + k * k * (E(-(mu + k)) - E(-(mu - k)));
    c.C4 = mu * (2.0 * k - k * (E(mu + k) + E(mu - k)))
         + k * k * (E(mu + k) - E(mu - k));

    const double mt = root.mu_tilde;
    const double scale =
        (mt * mt + std::abs(k) * mt + k * k) * std::cosh(k) * 4.0;
    const double biggest = std::max(std::max(std::abs(c.C1), std::abs(c.C2)),
                                    std::max(std::abs(c.C3), std::abs(c.C4)));
    if (biggest < 1e-14 * scale)
        throw DegenerateCoefficients("coefficients: all C vanish (spurious root)");
    return c;
}

std::vector<Complex> evaluate_xi(const EigenfunctionCoefficients& coeffs,
                                 const ModeIndex& mode,
                                 std::span<const double> y_grid, int deriv) {
    const double k = mode.k;
    const Complex rates[4] = {Complex(k, 0.0), Complex(-k, 0.0), coeffs.mu,
                              -coeffs.mu};
    const Complex cs[4] = {coeffs.C1, coeffs.C2, coeffs.C3, coeffs.C4};
    std::vector<Complex> out(y_grid.size());
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        Complex v = 0.0;
        for (int j = 0; j < 4; ++j) {
            Complex factor = 1.0;
            for (int d = 0; d < deriv; ++d) factor *= rates[j];
            v += cs[j] * factor * std::exp(rates[j] * y_grid[i]);
        }
        out[i] = v;
    }
    return out;
}

std::vector<Complex> evaluate_phi(const EigenfunctionCoefficients& coeffs,
                                  const ModeIndex& mode,
                                  std::span<const double> y_grid) {
    auto xip = evaluate_xi(coeffs, mode, y_grid, 1);
    const Complex iok = Complex(0.0, 1.0) / Complex(mode.k, 0.0);
    for (auto& v : xip) v *= iok;
    return xip;
}

std::vector<Complex> evaluate_q(const EigenfunctionCoefficients& coeffs,
                                const ModeIndex& mode, const SpectralRoot& root,
                                double nu, std::span<const double> y_grid) {
    const double k = mode.k;
    auto phi = evaluate_phi(coeffs, mode, y_grid);
    auto xippp = evaluate_xi(coeffs, mode, y_grid, 3);
    // phi'' = (i/k) xi'''
    const Complex iok = Complex(0.0, 1.0) / Complex(k, 0.0);
    const Complex ik = Complex(0.0, k);
    std::vector<Complex> out(y_grid.size());
    for (std::size_t i = 0; i < y_grid.size(); ++i)
        out[i] = ((root.lambda + nu * k * k) * phi[i] - nu * iok * xippp[i]) / ik;
    return out;
}

Complex xi_triple_prime_at_one(const ModeIndex& mode, const SpectralRoot& root,
                               double nu) {
    const double k = mode.k;
    const double mt = root.mu_tilde;
    const double lam_over_nu = root.lambda / nu;
    const double bracket =
        mt * ((2.0 * k / std::sinh(k)) * (1.0 - std::cosh(k) * std::cos(mt))
              + k * std::sinh(k))
        + k * k * std::sin(mt);
    return Complex(0.0, -4.0 * k * lam_over_nu * bracket);
}

ModalEigenfunction assemble_eigenfunction(const ModeIndex& mode,
                                          const SpectralRoot& root, double nu,
                                          std::span<const double> y_grid) {
    const auto c = coefficients(mode, root);
    ModalEigenfunction ef;
    ef.mode = mode;
    ef.l = root.l;
    ef.lambda = root.lambda;
    ef.xi = evaluate_xi(c, mode, y_grid);
    ef.phi = evaluate_phi(c, mode, y_grid);
    ef.q = evaluate_q(c, mode, root, nu, y_grid);
    ef.xi_ppp_1 = evaluate_xi(c, mode, std::span<const double>(&y_grid.back(), 1), 3)[0];

    auto w = simpson_weights(static_cast<int>(y_grid.size()), y_grid.front(),
                             y_grid.back());
    double nsq = 0.0;
    for (std::size_t i = 0; i < y_grid.size(); ++i)
        nsq += w[i] * (std::norm(ef.phi[i]) + std::norm(ef.xi[i]));
    ef.norm_sq = nsq;
    ef.raw_norm = std::sqrt(nsq);
    return ef;
}

GramReport normalize_and_gram(std::vector<ModalEigenfunction>& eigs) {
    GramReport rep;
    if (eigs.empty()) return rep;
    const std::size_t n = eigs[0].xi.size();
    auto w = simpson_weights(static_cast<int>(n), 0.0, 1.0);

    for (auto& ef : eigs) {
        const double s = 1.0 / std::sqrt(ef.norm_sq);
        for (auto& v : ef.xi) v *= s;
        for (auto& v : ef.phi) v *= s;
        for (auto& v : ef.q) v *= s;
        ef.xi_ppp_1 *= s;
        ef.norm_sq = 1.0;
    }

    const std::size_t L = eigs.size();
    rep.gram.assign(L, std::vector<Complex>(L, Complex(0.0, 0.0)));
    for (std::size_t a = 0; a < L; ++a) {
        for (std::size_t b = 0; b < L; ++b) {
            Complex g = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                g += w[i] * (eigs[a].phi[i] * std::conj(eigs[b].phi[i])
                             + eigs[a].xi[i] * std::conj(eigs[b].xi[i]));
            rep.gram[a][b] = g;
            if (a == b)
                rep.max_diag_error =
                    std::max(rep.max_diag_error, std::abs(g - 1.0));
            else
                rep.max_offdiag = std::max(rep.max_offdiag, std::abs(g));
        }
    }
    return rep;
}

ModeBasis build_mode_basis(const ModeSpectrum& spectrum, double nu,
                           std::span<const double> y_grid) {
    ModeBasis basis;
    basis.mode = spectrum.mode;
    const double k = spectrum.mode.k;
    for (const auto& root : spectrum.roots) {
        auto ef = assemble_eigenfunction(spectrum.mode, root, nu, y_grid);
        const Complex tr = ef.xi_ppp_1 / ef.raw_norm;
        basis.lambda.push_back(root.lambda);
        basis.trace.push_back(tr);
        basis.weight.push_back(-(nu / (k * k)) * tr);
        basis.input.push_back(std::conj(-(nu / (k * k)) * tr));
    }
    return basis;
}

}  // namespace stokesnc
