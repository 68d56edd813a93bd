#ifndef STOKESNC_EIGENFUNCTIONS_HPP
#define STOKESNC_EIGENFUNCTIONS_HPP

#include <span>
#include <vector>

#include "stokesnc/spectral.hpp"
#include "stokesnc/types.hpp"

namespace stokesnc {

/// Coefficients of xi(y) = C1 e^{ky} + C2 e^{-ky} + C3 e^{mu y} + C4 e^{-mu y}
/// with mu = i*mu_tilde.
struct EigenfunctionCoefficients {
    Complex C1, C2, C3, C4;
    Complex mu;
};

/// Sampled eigenfunction triple (phi, xi, q) on a y-grid of [0, 1].
struct ModalEigenfunction {
    ModeIndex mode;
    int l = 0;
    double lambda = 0.0;
    std::vector<Complex> xi;
    std::vector<Complex> phi;
    std::vector<Complex> q;
    Complex xi_ppp_1{};      // xi'''(1) of the stored (scaled) xi
    double norm_sq = 0.0;    // current L2(0,1)^2 norm squared
    double raw_norm = 1.0;   // norm of the raw coefficient-scale function
};

/// Closed-form coefficients for a certified root.
/// Throws DegenerateCoefficients when all four vanish at the scale of their
/// constituent terms (spurious root).
EigenfunctionCoefficients coefficients(const ModeIndex& mode,
                                       const SpectralRoot& root);

/// xi and its derivatives (term-by-term, exact in the exponentials) on a grid.
std::vector<Complex> evaluate_xi(const EigenfunctionCoefficients& coeffs,
                                 const ModeIndex& mode,
                                 std::span<const double> y_grid, int deriv = 0);

/// phi = (i/k) xi'.
std::vector<Complex> evaluate_phi(const EigenfunctionCoefficients& coeffs,
                                  const ModeIndex& mode,
                                  std::span<const double> y_grid);

/// q = [(lambda + nu k^2) phi - nu phi''] / (i k).
std::vector<Complex> evaluate_q(const EigenfunctionCoefficients& coeffs,
                                const ModeIndex& mode, const SpectralRoot& root,
                                double nu, std::span<const double> y_grid);

/// Closed form for xi'''(1); nonzero for every certified root. Matches the
/// term-by-term third derivative of the coefficient-form xi.
Complex xi_triple_prime_at_one(const ModeIndex& mode, const SpectralRoot& root,
                               double nu);

/// Assemble (phi, xi, q) for one branch on the given y-grid; unnormalized.
ModalEigenfunction assemble_eigenfunction(const ModeIndex& mode,
                                          const SpectralRoot& root, double nu,
                                          std::span<const double> y_grid);

struct GramReport {
    std::vector<std::vector<Complex>> gram;  // inner products after scaling
    double max_offdiag = 0.0;
    double max_diag_error = 0.0;             // |G_ll - 1|
};

/// Scale each eigenfunction of one mode to unit L2(0,1)^2 norm and return
/// the Gram matrix of (phi, xi) pairs by Simpson quadrature on their grid.
GramReport normalize_and_gram(std::vector<ModalEigenfunction>& eigs);

/// Everything downstream modules need from one mode: eigenvalues, normalized
/// boundary traces, trace weights and input coefficients.
struct ModeBasis {
    ModeIndex mode;
    std::vector<double> lambda;
    std::vector<Complex> trace;     // xi'''(1) of the unit-norm eigenfunctions
    std::vector<Complex> weight;    // -(nu/k^2) * trace
    std::vector<Complex> input;     // conj(weight)
};

/// Build the normalized per-mode basis data from a computed spectrum.
ModeBasis build_mode_basis(const ModeSpectrum& spectrum, double nu,
                           std::span<const double> y_grid);

}  // namespace stokesnc

#endif
