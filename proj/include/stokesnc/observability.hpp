#ifndef STOKESNC_OBSERVABILITY_HPP
#define STOKESNC_OBSERVABILITY_HPP

#include <span>
#include <utility>
#include <vector>

#include "stokesnc/eigenfunctions.hpp"
#include "stokesnc/exec.hpp"
#include "stokesnc/types.hpp"

namespace stokesnc {

using HermitianMatrix = std::vector<std::vector<Complex>>;

/// Quadratic forms of the per-mode observability ratio over terminal data:
///   Q_lm = (nu^2/k^4) xi'''_l(1) conj(xi'''_m(1))
///          * int_0^{T0} e^{(lambda_l+lambda_m)(T-t)} dt   (closed form),
///   N    = diag(e^{2 lambda_l T})   for the unit-norm orthogonal family.
std::pair<HermitianMatrix, HermitianMatrix> observation_gram(
    const ModeBasis& basis, std::size_t L, double T, double T0);

/// Smallest generalized eigenvalue of (Q, N) with its eigenvector: the
/// infimum of the observability ratio within the truncation. Computed via
/// the N-scaled pencil and the relative-accuracy Jacobi eigensolver.
/// Throws NumericalBreakdown when N has an eigenvalue below 1e-300.
std::pair<double, std::vector<Complex>> smallest_observability_ratio(
    const HermitianMatrix& Q, const HermitianMatrix& N);

/// Rayleigh ratio (a* Q a) / (a* N a) at an explicit direction.
double observability_ratio_at(const HermitianMatrix& Q,
                              const HermitianMatrix& N,
                              std::span<const Complex> alpha);

/// All generalized eigenvalues of (Q, N), ascending.
std::vector<double> observability_spectrum(const HermitianMatrix& Q,
                                           const HermitianMatrix& N);

struct ObservabilityReport {
    int m = 0;
    int L_requested = 0;
    int L_effective = 0;                     // after the underflow drop rule
    double smallest_ratio = 0.0;
    double pencil_condition = 1.0;           // largest / smallest ratio
    std::vector<Complex> minimizing_direction;  // terminal-data coordinates
    std::vector<int> dropped_branches;          // 1-based l
};

/// Branches kept under the underflow rule: 2 lambda_l T >= -600. Deeper
/// branches are unobservable and unreachable at double precision alike.
std::vector<std::size_t> kept_branches(std::span<const double> lambda,
                                       std::size_t L, double T);

/// Per-mode smallest ratio for one basis at branch truncation L.
ObservabilityReport observability_report(const ModeBasis& basis, int L,
                                         double T, double T0);

/// Sweep over modes; asserts nothing, reports everything.
std::vector<ObservabilityReport> uniformity_scan(
    std::span<const ModeBasis> bases, int L, double T, double T0,
    ExecPolicy policy = ExecPolicy::Serial);

}  // namespace stokesnc

#endif
