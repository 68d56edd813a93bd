#include "stokesnc/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stokesnc {

JacobiEig jacobi_hermitian_eig(std::vector<std::vector<Complex>> S, double tol,
                               int max_sweeps) {
    const std::size_t n = S.size();
    std::vector<std::vector<Complex>> V(n, std::vector<Complex>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) V[i][i] = 1.0;

    int sweeps = 0;
    for (; sweeps < max_sweeps; ++sweeps) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = S[p][q];
                const double app = S[p][p].real();
                const double aqq = S[q][q].real();
                if (std::abs(apq) <= tol * std::sqrt(std::abs(app) * std::abs(aqq)))
                    continue;
                rotated = true;
                const double mod = std::abs(apq);
                const double tau = (aqq - app) / (2.0 * mod);
                double t;
                if (tau == 0.0) t = 1.0;
                else {
                    const double s = tau >= 0.0 ? 1.0 : -1.0;
                    t = s / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                }
                const double cth = 1.0 / std::sqrt(1.0 + t * t);
                const Complex ph = apq / mod;
                const Complex c = cth;
                const Complex s = (t * cth) * ph;

                // S <- J^H S J on the (p, q) plane
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex sp = S[i][p], sq = S[i][q];
                    S[i][p] = c * sp - std::conj(s) * sq;
                    S[i][q] = s * sp + c * sq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex sp = S[p][i], sq = S[q][i];
                    S[p][i] = c * sp - s * sq;
                    S[q][i] = std::conj(s) * sp + c * sq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex vp = V[i][p], vq = V[i][q];
                    V[i][p] = c * vp - std::conj(s) * vq;
                    V[i][q] = s * vp + c * vq;
                }
                S[p][q] = Complex(0.0, 0.0);
                S[q][p] = Complex(0.0, 0.0);
            }
        }
        if (!rotated) break;
    }

    JacobiEig out;
    out.sweeps = sweeps;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return S[a][a].real() < S[b][b].real();
    });
    out.values.resize(n);
    out.vectors.assign(n, std::vector<Complex>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = S[idx[j]][idx[j]].real();
        for (std::size_t i = 0; i < n; ++i) out.vectors[j][i] = V[i][idx[j]];
    }
    return out;
}

}  // namespace stokesnc
