#ifndef STOKESNC_COLLOCATION_HPP
#define STOKESNC_COLLOCATION_HPP

#include <vector>

#include "stokesnc/types.hpp"

namespace stokesnc {

/// Independent spectrum oracle: Galerkin discretization of
///   nu xi'''' - (lambda + 2 nu k^2) xi'' + k^2 (lambda + nu k^2) xi = 0,
///   xi(0) = xi(1) = xi'(0) = xi'(1) = 0,
/// in the clamped basis (1-u^2)^2 P_j(u), u = 2y-1, with exact
/// Gauss-Legendre quadrature. Returns the `count` eigenvalues of largest
/// real part (all real and below -nu k^2 by the symmetric weak form).
/// This route never touches the characteristic equation or the exponential
/// closed forms.
std::vector<double> collocation_spectrum_oracle(const ModeIndex& mode,
                                                double nu, int n_points,
                                                int count);

}  // namespace stokesnc

#endif
