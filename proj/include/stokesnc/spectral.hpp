#ifndef STOKESNC_SPECTRAL_HPP
#define STOKESNC_SPECTRAL_HPP

#include <span>
#include <utility>
#include <vector>

#include "stokesnc/exec.hpp"
#include "stokesnc/types.hpp"

namespace stokesnc {

/// Scan/localization parameters for root bracketing.
struct LocalizationParams {
    double k0 = 20.0;               // fallback large-|k| threshold
    double delta = 0.1;
    double epsilon0 = 0.5;          // gap slack, < pi/2
    double scan_resolution = kPi / 64.0;
    int l_max = 30;

    void validate() const;
};

/// One certified eigenvalue branch for a nonzero Fourier mode.
struct SpectralRoot {
    ModeIndex mode;
    int l = 0;                 // branch index, 1-based, increasing mu_tilde
    double mu_tilde = 0.0;
    double lambda = 0.0;       // -nu*(k^2 + mu_tilde^2)
    double char_residual = 0.0;  // characteristic equation, cosh-scaled form
    double det_residual = 0.0;   // 4x4 determinant check
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

struct ModeSpectrum {
    ModeIndex mode;
    std::vector<SpectralRoot> roots;
    int detected_lk = 0;   // first l from which the (l*pi +- pi/4) windows
                           // each hold exactly one root
};

/// Characteristic equation for mu_tilde at wavenumber k, as written:
///   sin(mu) sinh(k) mu^2 - 2 k mu (1 - cosh(k) cos(mu)) - k^2 sin(mu) sinh(k).
/// Overflows for |k| beyond ~700; use char_eq_scaled for root work.
double char_eq(double mu_tilde, double k);

/// char_eq divided by cosh(k); finite for every k, same roots.
double char_eq_scaled(double mu_tilde, double k);

/// Stable rearrangement of the characteristic equation,
///   f(mu) = 1/cosh(k) - cos(mu) - tanh(k) sin(mu) (mu^2 - k^2) / (2 k mu),
/// with f = -char_eq_scaled / (2 k mu). Roots for mu > 0 coincide.
double rearranged_f(double mu_tilde, double k);

/// d/dmu of rearranged_f.
double rearranged_f_deriv(double mu_tilde, double k);

/// Eigenvalue of the k = 0 sine family: -nu * (n*pi)^2, n >= 1.
double zero_mode_eigenvalue(int n, double nu);

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
};

/// Sign-change brackets for the first params.l_max positive roots of the
/// characteristic equation at mode k. For |k| >= params.k0 these are the
/// windows (l*pi, (l+1)*pi); for smaller |k| they come from a uniform scan.
/// Throws BracketingFailure when a window holds an even number of crossings.
std::vector<Bracket> bracket_roots(const ModeIndex& mode,
                                   const LocalizationParams& params);

/// Number of sign changes of rearranged_f on (lo, hi) at the given scan step.
int count_sign_changes(double lo, double hi, double k, double resolution);

/// Bisection + Newton refinement of a bracketed root. The returned root is
/// strictly inside the bracket, the bracket width is <= tol and the scaled
/// characteristic residual is certified against tol.
SpectralRoot refine_root(const Bracket& bracket, const ModeIndex& mode,
                         double nu, double tol);

/// Modulus of the 4x4 boundary-condition determinant at mu = i*mu_tilde,
/// normalized by its largest permutation entry-product. Vanishes exactly at
/// roots of char_eq.
double determinant_residual(const ModeIndex& mode, double mu_tilde);

/// Full spectrum of one mode: bracket, refine, certify and cross-check
/// every branch l = 1..params.l_max.
ModeSpectrum compute_mode_spectrum(const ModeIndex& mode,
                                   const LocalizationParams& params,
                                   double nu, double tol = 1e-10);

/// Spectra for m in [-m_max..-1, 1..m_max], ordered by m.
std::vector<ModeSpectrum> spectrum_sweep(const ChannelConfig& cfg,
                                         const LocalizationParams& params,
                                         int m_max, ExecPolicy policy,
                                         double tol = 1e-10);

/// Smallest |k| = 2*pi*m/length (m = 1..m_scan) for which every window
/// (l*pi, (l+1)*pi), l <= l_max, certifies exactly one sign change and
/// (0, pi) certifies none. Returns params.k0 when none qualifies.
double detect_k0(double length, int m_scan, const LocalizationParams& params);

struct GapSummabilityReport {
    double min_lambda_gap = 0.0;       // min over modes of lambda_l - lambda_{l+1}
    bool gaps_positive = false;
    double max_partial_sum = 0.0;      // max over modes of sum_{l>l0} 1/(-lambda_l)
    double comparison_bound = 0.0;     // 8/(3*nu), from mu > l*pi/4
    bool summability_ok = false;
    bool mu_growth_ok = false;         // mu_{k,j} > j*pi/4 for all j > l0
};

/// Gap, summability and growth diagnostics over computed spectra.
GapSummabilityReport gap_and_summability(std::span<const ModeSpectrum> spectra,
                                         int l0, double nu);

}  // namespace stokesnc

#endif
