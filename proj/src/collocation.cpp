#include "stokesnc/collocation.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "stokesnc/quadrature.hpp"

namespace stokesnc {

std::vector<double> collocation_spectrum_oracle(const ModeIndex& mode,
                                                double nu, int n_points,
                                                int count) {
    if (n_points < 64)
        throw ConfigError("collocation_spectrum_oracle: n_points must be >= 64");
    if (count < 1 || count > n_points)
        throw ConfigError("collocation_spectrum_oracle: bad count");
    const double k = mode.k;
    const int N = n_points;
    const int nq = N + 10;
    const auto gl = gauss_legendre(nq);

    // basis values g_j, g_j', g_j'' in u at the quadrature nodes
    Eigen::MatrixXd B0(N, nq), B1(N, nq), B2(N, nq);
    std::vector<double> p(N), dp(N), d2p(N);
    for (int q = 0; q < nq; ++q) {
        const double u = gl.x[q];
        legendre_all(N, u, p, dp, d2p);
        const double w0 = (1.0 - u * u) * (1.0 - u * u);
        const double w1 = -4.0 * u * (1.0 - u * u);
        const double w2 = -4.0 + 12.0 * u * u;
        for (int j = 0; j < N; ++j) {
            B0(j, q) = w0 * p[j];
            B1(j, q) = w1 * p[j] + w0 * dp[j];
            B2(j, q) = w2 * p[j] + 2.0 * w1 * dp[j] + w0 * d2p[j];
        }
    }

    // y-integrals: d/dy = 2 d/du and dy = du/2
    Eigen::VectorXd wq = Eigen::Map<const Eigen::VectorXd>(gl.w.data(), nq);
    Eigen::MatrixXd M0 = 0.5 * B0 * wq.asDiagonal() * B0.transpose();
    Eigen::MatrixXd M1 = 2.0 * B1 * wq.asDiagonal() * B1.transpose();
    Eigen::MatrixXd M2 = 8.0 * B2 * wq.asDiagonal() * B2.transpose();

    // diagonal scaling of the basis
    Eigen::VectorXd s = M0.diagonal().array().sqrt().inverse();
    auto scl = [&](Eigen::MatrixXd& M) {
        M = s.asDiagonal() * M * s.asDiagonal();
    };
    scl(M0); scl(M1); scl(M2);

    // weak forms: A = nu (M2 + 2k^2 M1 + k^4 M0), B = M1 + k^2 M0;
    // A x = theta B x with theta = -lambda
    Eigen::MatrixXd A = nu * (M2 + 2.0 * k * k * M1 + k * k * k * k * M0);
    Eigen::MatrixXd B = M1 + k * k * M0;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
    if (es.info() != Eigen::Success)
        throw NumericalBreakdown("collocation_spectrum_oracle: eigensolver failed");

    std::vector<double> lam(count);
    for (int i = 0; i < count; ++i) lam[i] = -es.eigenvalues()[i];
    return lam;
}

}  // namespace stokesnc
