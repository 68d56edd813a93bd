#include "stokesnc/quadrature.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "stokesnc/types.hpp"

namespace stokesnc {

std::vector<double> simpson_weights(int n, double a, double b) {
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("simpson_weights: n must be odd and >= 3");
    const double h = (b - a) / (n - 1);
    std::vector<double> w(n, 1.0);
    for (int i = 1; i < n - 1; ++i) w[i] = (i % 2 == 1) ? 4.0 : 2.0;
    for (auto& v : w) v *= h / 3.0;
    return w;
}

std::vector<double> uniform_grid(int n, double a, double b) {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = a + (b - a) * i / (n - 1);
    return y;
}

void legendre_all(int nmax, double x, std::span<double> p,
                  std::span<double> dp, std::span<double> d2p) {
    assert(static_cast<int>(p.size()) >= nmax);
    if (nmax <= 0) return;
    p[0] = 1.0; dp[0] = 0.0; d2p[0] = 0.0;
    if (nmax == 1) return;
    p[1] = x; dp[1] = 1.0; d2p[1] = 0.0;
    for (int j = 2; j < nmax; ++j) {
        const double a = (2.0 * j - 1.0) / j;
        const double b = (j - 1.0) / j;
        p[j] = a * x * p[j - 1] - b * p[j - 2];
        dp[j] = a * (p[j - 1] + x * dp[j - 1]) - b * dp[j - 2];
        d2p[j] = a * (2.0 * dp[j - 1] + x * d2p[j - 1]) - b * d2p[j - 2];
    }
}

GaussLegendre gauss_legendre(int n) {
    GaussLegendre g;
    g.x.resize(n);
    g.w.resize(n);
    // Newton iteration from the Chebyshev-like initial guess.
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pn = 0.0, pn1 = 0.0;
        for (int it = 0; it < 100; ++it) {
            pn1 = 1.0;
            pn = x;
            for (int j = 2; j <= n; ++j) {
                const double pn2 = pn1;
                pn1 = pn;
                pn = ((2.0 * j - 1.0) * x * pn1 - (j - 1.0) * pn2) / j;
            }
            const double dpn = n * (x * pn - pn1) / (x * x - 1.0);
            const double dx = pn / dpn;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        pn1 = 1.0;
        pn = x;
        for (int j = 2; j <= n; ++j) {
            const double pn2 = pn1;
            pn1 = pn;
            pn = ((2.0 * j - 1.0) * x * pn1 - (j - 1.0) * pn2) / j;
        }
        const double dpn = n * (x * pn - pn1) / (x * x - 1.0);
        g.x[n - 1 - i] = x;
        g.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
    }
    return g;
}

}  // namespace stokesnc
