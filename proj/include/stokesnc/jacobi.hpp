#ifndef STOKESNC_JACOBI_HPP
#define STOKESNC_JACOBI_HPP

#include <vector>

#include "stokesnc/types.hpp"

namespace stokesnc {

/// Eigendecomposition of a Hermitian matrix by cyclic two-sided Jacobi
/// rotations with a relative off-diagonal stopping criterion,
///   |S_pq| <= tol * sqrt(S_pp * S_qq).
/// For positive definite inputs this attains high *relative* accuracy of the
/// small eigenvalues even when the diagonal is graded over hundreds of orders
/// of magnitude, which tridiagonalization-based solvers cannot do.
struct JacobiEig {
    std::vector<double> values;                 // ascending
    std::vector<std::vector<Complex>> vectors;  // vectors[j] is column j
    int sweeps = 0;
};

JacobiEig jacobi_hermitian_eig(std::vector<std::vector<Complex>> S,
                               double tol = 1e-15, int max_sweeps = 64);

}  // namespace stokesnc

#endif
