#ifndef STOKESNC_QUADRATURE_HPP
#define STOKESNC_QUADRATURE_HPP

#include <span>
#include <vector>

namespace stokesnc {

/// Composite Simpson weights for an odd number of uniformly spaced points
/// on [a, b]. n must be odd and >= 3.
std::vector<double> simpson_weights(int n, double a, double b);

/// Uniform grid of n points on [a, b] including both endpoints.
std::vector<double> uniform_grid(int n, double a, double b);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};
GaussLegendre gauss_legendre(int n);

/// Legendre P_j(x), P_j'(x), P_j''(x) for j = 0..nmax-1 at a single x.
/// Each output span must have room for nmax values.
void legendre_all(int nmax, double x, std::span<double> p,
                  std::span<double> dp, std::span<double> d2p);

}  // namespace stokesnc

#endif
