#include "stokesnc/observability.hpp"

#include <algorithm>
#include <cmath>

#include "stokesnc/jacobi.hpp"

namespace stokesnc {

std::pair<HermitianMatrix, HermitianMatrix> observation_gram(
    const ModeBasis& basis, std::size_t L, double T, double T0) {
    HermitianMatrix Q(L, std::vector<Complex>(L, 0.0));
    HermitianMatrix N(L, std::vector<Complex>(L, 0.0));
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t m = 0; m < L; ++m) {
            const double s = basis.lambda[l] + basis.lambda[m];
            // int_0^{T0} e^{s (T-t)} dt = (e^{sT} - e^{s(T-T0)}) / s
            const double integral =
                s == 0.0 ? T0 : (std::exp(s * T) - std::exp(s * (T - T0))) / s;
            Q[l][m] = basis.weight[l] * std::conj(basis.weight[m]) * integral;
        }
        N[l][l] = std::exp(2.0 * basis.lambda[l] * T);
    }
    return {Q, N};
}

std::pair<double, std::vector<Complex>> smallest_observability_ratio(
    const HermitianMatrix& Q, const HermitianMatrix& N) {
    const std::size_t L = Q.size();
    // N is diagonal for the orthonormal family; scale the pencil by N^{-1/2}
    std::vector<double> d(L);
    for (std::size_t l = 0; l < L; ++l) {
        const double nl = N[l][l].real();
        if (!(nl > 1e-300))
            throw NumericalBreakdown(
                "smallest_observability_ratio: N eigenvalue below 1e-300 "
                "(drop deep branches)");
        d[l] = 1.0 / std::sqrt(nl);
    }
    HermitianMatrix S(L, std::vector<Complex>(L, 0.0));
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t m = 0; m < L; ++m) S[l][m] = d[l] * Q[l][m] * d[m];

    const auto eig = jacobi_hermitian_eig(std::move(S));
    // map the scaled eigenvector back to terminal-data coordinates
    std::vector<Complex> alpha(L);
    double nrm = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        alpha[l] = eig.vectors[0][l] * d[l];
        nrm += std::norm(alpha[l]);
    }
    nrm = std::sqrt(nrm);
    for (auto& v : alpha) v /= nrm;
    return {eig.values[0], alpha};
}

std::vector<double> observability_spectrum(const HermitianMatrix& Q,
                                           const HermitianMatrix& N) {
    const std::size_t L = Q.size();
    std::vector<double> d(L);
    for (std::size_t l = 0; l < L; ++l) {
        const double nl = N[l][l].real();
        if (!(nl > 1e-300))
            throw NumericalBreakdown(
                "observability_spectrum: N eigenvalue below 1e-300");
        d[l] = 1.0 / std::sqrt(nl);
    }
    HermitianMatrix S(L, std::vector<Complex>(L, 0.0));
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t m = 0; m < L; ++m) S[l][m] = d[l] * Q[l][m] * d[m];
    return jacobi_hermitian_eig(std::move(S)).values;
}

double observability_ratio_at(const HermitianMatrix& Q,
                              const HermitianMatrix& N,
                              std::span<const Complex> alpha) {
    const std::size_t L = Q.size();
    Complex num = 0.0, den = 0.0;
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t m = 0; m < L; ++m) {
            num += std::conj(alpha[l]) * Q[l][m] * alpha[m];
            den += std::conj(alpha[l]) * N[l][m] * alpha[m];
        }
    return num.real() / den.real();
}

std::vector<std::size_t> kept_branches(std::span<const double> lambda,
                                       std::size_t L, double T) {
    std::vector<std::size_t> keep;
    for (std::size_t l = 0; l < std::min(L, lambda.size()); ++l)
        if (2.0 * lambda[l] * T >= -600.0) keep.push_back(l);
    return keep;
}

ObservabilityReport observability_report(const ModeBasis& basis, int L,
                                         double T, double T0) {
    ObservabilityReport rep;
    rep.m = basis.mode.m;
    rep.L_requested = L;
    const auto keep =
        kept_branches(basis.lambda, static_cast<std::size_t>(L), T);
    rep.L_effective = static_cast<int>(keep.size());
    for (int l = 0; l < std::min<int>(L, static_cast<int>(basis.lambda.size()));
         ++l)
        if (std::find(keep.begin(), keep.end(), static_cast<std::size_t>(l))
            == keep.end())
            rep.dropped_branches.push_back(l + 1);

    ModeBasis sub;
    sub.mode = basis.mode;
    for (const auto l : keep) {
        sub.lambda.push_back(basis.lambda[l]);
        sub.trace.push_back(basis.trace[l]);
        sub.weight.push_back(basis.weight[l]);
        sub.input.push_back(basis.input[l]);
    }
    const auto [Q, N] = observation_gram(sub, keep.size(), T, T0);
    auto [ratio, dir] = smallest_observability_ratio(Q, N);
    rep.smallest_ratio = ratio;
    rep.minimizing_direction = std::move(dir);
    const auto spectrum = observability_spectrum(Q, N);
    rep.pencil_condition = spectrum.back() / spectrum.front();
    return rep;
}

std::vector<ObservabilityReport> uniformity_scan(
    std::span<const ModeBasis> bases, int L, double T, double T0,
    ExecPolicy policy) {
    std::vector<ObservabilityReport> out(bases.size());
    for_each_index(bases.size(), policy, [&](std::size_t i) {
        out[i] = observability_report(bases[i], L, T, T0);
    });
    return out;
}

}  // namespace stokesnc
