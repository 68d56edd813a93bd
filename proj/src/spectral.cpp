#include "stokesnc/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace stokesnc {

void ChannelConfig::validate() const {
    if (!(nu > 0.0)) throw ConfigError("nu must be positive");
    if (!(length > 0.0)) throw ConfigError("length must be positive");
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    if (!(T0 > 0.0 && T0 < T)) throw ConfigError("need 0 < T0 < T");
}

void TruncationConfig::validate() const {
    if (m_max < 1) throw ConfigError("m_max must be >= 1");
    if (l_max < 2) throw ConfigError("l_max must be >= 2");
    if (time_steps < 1) throw ConfigError("time_steps must be >= 1");
}

void LocalizationParams::validate() const {
    if (!(epsilon0 > 0.0 && epsilon0 < kPi / 2.0))
        throw ConfigError("epsilon0 must lie in (0, pi/2)");
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(scan_resolution > 0.0 && scan_resolution < kPi / 8.0))
        throw ConfigError("scan_resolution must lie in (0, pi/8)");
    if (l_max < 1) throw ConfigError("l_max must be >= 1");
}

ModeIndex ModeIndex::from_m(int m, double length) {
    if (m == 0) throw ConfigError("mode index m must be nonzero");
    if (!(length > 0.0)) throw ConfigError("length must be positive");
    return ModeIndex{m, 2.0 * kPi * m / length};
}

double char_eq(double mu_tilde, double k) {
    const double s = std::sin(mu_tilde);
    return s * std::sinh(k) * mu_tilde * mu_tilde
         - 2.0 * k * mu_tilde * (1.0 - std::cosh(k) * std::cos(mu_tilde))
         - k * k * s * std::sinh(k);
}

double char_eq_scaled(double mu_tilde, double k) {
    const double s = std::sin(mu_tilde);
    const double sech = 1.0 / std::cosh(k);
    return std::tanh(k) * s * (mu_tilde * mu_tilde - k * k)
         - 2.0 * k * mu_tilde * (sech - std::cos(mu_tilde));
}

double rearranged_f(double mu_tilde, double k) {
    if (mu_tilde == 0.0)
        throw std::domain_error("rearranged_f: mu_tilde must be nonzero");
    return 1.0 / std::cosh(k) - std::cos(mu_tilde)
         - std::tanh(k) * std::sin(mu_tilde)
               * (mu_tilde * mu_tilde - k * k) / (2.0 * k * mu_tilde);
}

double rearranged_f_deriv(double mu_tilde, double k) {
    const double s = std::sin(mu_tilde);
    const double c = std::cos(mu_tilde);
    return s - std::tanh(k)
                   * (c * (mu_tilde * mu_tilde - k * k) / (2.0 * k * mu_tilde)
                      + s * (1.0 + k * k / (mu_tilde * mu_tilde)) / (2.0 * k));
}

double zero_mode_eigenvalue(int n, double nu) {
    if (n < 1) throw ConfigError("zero_mode_eigenvalue: n must be >= 1");
    if (!(nu > 0.0)) throw ConfigError("zero_mode_eigenvalue: nu must be positive");
    return -nu * kPi * kPi * static_cast<double>(n) * static_cast<double>(n);
}

int count_sign_changes(double lo, double hi, double k, double resolution) {
    int count = 0;
    double prev = rearranged_f(lo, k);
    const int steps = std::max(2, static_cast<int>(std::ceil((hi - lo) / resolution)));
    for (int i = 1; i <= steps; ++i) {
        const double x = lo + (hi - lo) * i / steps;
        const double v = rearranged_f(x, k);
        if (prev == 0.0 || prev * v < 0.0) ++count;
        prev = v;
    }
    return count;
}

namespace {

// Sign-change brackets of rearranged_f from a uniform scan of (lo, hi).
std::vector<Bracket> scan_brackets(double lo, double hi, double k,
                                   double resolution) {
    std::vector<Bracket> out;
    const int steps = std::max(2, static_cast<int>(std::ceil((hi - lo) / resolution)));
    double xprev = lo;
    double fprev = rearranged_f(lo, k);
    for (int i = 1; i <= steps; ++i) {
        const double x = lo + (hi - lo) * i / steps;
        const double v = rearranged_f(x, k);
        if (fprev == 0.0) {
            // grid point exactly on a root: bracket around it
            out.push_back({xprev - 0.5 * resolution, x});
        } else if (fprev * v < 0.0) {
            out.push_back({xprev, x});
        }
        xprev = x;
        fprev = v;
    }
    // merge brackets closer than 1e-8: the root-gap lemma forbids this,
    // so callers treat a merge as a failure, not silent dedup
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].lo - out[i - 1].hi < 1e-8) {
            std::ostringstream os;
            os << "bracket_roots: brackets closer than 1e-8 at k=" << k
               << " near mu=" << out[i].lo;
            throw BracketingFailure(os.str());
        }
    }
    return out;
}

}  // namespace

std::vector<Bracket> bracket_roots(const ModeIndex& mode,
                                   const LocalizationParams& params) {
    params.validate();
    const double k = mode.k;
    if (mode.m == 0) throw ConfigError("bracket_roots: k must be nonzero");

    if (std::abs(k) >= params.k0) {
        // localization regime: one root per (l*pi, (l+1)*pi), none in (0, pi)
        if (count_sign_changes(params.scan_resolution, kPi, k,
                               params.scan_resolution) != 0)
            throw BracketingFailure("unexpected root in (0, pi) at large |k|");
        std::vector<Bracket> out;
        out.reserve(params.l_max);
        for (int l = 1; l <= params.l_max; ++l) {
            const Bracket b{l * kPi, (l + 1) * kPi};
            const int changes =
                count_sign_changes(b.lo, b.hi, k, params.scan_resolution);
            if (changes != 1) {
                std::ostringstream os;
                os << "window (" << l << "pi, " << (l + 1) << "pi) at k=" << k
                   << " certifies " << changes << " sign changes, expected 1";
                throw BracketingFailure(os.str());
            }
            out.push_back(b);
        }
        return out;
    }

    // small |k|: dense scan of (0, (l_max+1)*pi)
    auto all = scan_brackets(params.scan_resolution * 0.25,
                             (params.l_max + 1) * kPi, k,
                             params.scan_resolution);
    if (static_cast<int>(all.size()) < params.l_max) {
        std::ostringstream os;
        os << "scan found " << all.size() << " brackets at k=" << k
           << ", expected at least " << params.l_max
           << " (scan_resolution too coarse?)";
        throw BracketingFailure(os.str());
    }
    all.resize(params.l_max);
    return all;
}

SpectralRoot refine_root(const Bracket& bracket, const ModeIndex& mode,
                         double nu, double tol) {
    const double k = mode.k;
    double lo = bracket.lo, hi = bracket.hi;
    double flo = rearranged_f(lo, k);
    double fhi = rearranged_f(hi, k);
    if (flo == 0.0) { lo = std::nextafter(lo, hi); flo = rearranged_f(lo, k); }
    if (fhi == 0.0) { hi = std::nextafter(hi, lo); fhi = rearranged_f(hi, k); }
    if (flo * fhi >= 0.0)
        throw NonConvergence("refine_root: endpoints do not bracket a sign change");

    const int max_iter = 200;
    int it = 0;
    while (hi - lo > tol && it++ < max_iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = rearranged_f(mid, k);
        if (fm == 0.0) {
            lo = std::max(bracket.lo, mid - 0.5 * tol);
            hi = std::min(bracket.hi, mid + 0.5 * tol);
            break;
        }
        if (flo * fm < 0.0) { hi = mid; fhi = fm; }
        else { lo = mid; flo = fm; }
    }
    if (it >= max_iter)
        throw NonConvergence("refine_root: bisection did not converge");

    // Newton polish inside the bracket, keeping the iterate with the
    // smallest |f|; the attainable floor is one ulp of the root
    double x = 0.5 * (lo + hi);
    double best_x = x;
    double best_f = std::abs(rearranged_f(x, k));
    for (int n = 0; n < 30; ++n) {
        const double fx = rearranged_f(x, k);
        const double dfx = rearranged_f_deriv(x, k);
        if (dfx == 0.0) break;
        const double xn = x - fx / dfx;
        if (!(xn > bracket.lo && xn < bracket.hi) || xn == x) break;
        x = xn;
        const double fa = std::abs(rearranged_f(x, k));
        if (fa < best_f) {
            best_f = fa;
            best_x = x;
        } else if (n > 1) {
            break;
        }
    }
    x = best_x;
    // keep the strict-containment invariant if Newton's best iterate landed
    // on a bisection endpoint
    if (x <= lo)
        lo = std::nextafter(x, -std::numeric_limits<double>::infinity());
    if (x >= hi)
        hi = std::nextafter(x, std::numeric_limits<double>::infinity());

    SpectralRoot root;
    root.mode = mode;
    root.mu_tilde = x;
    root.lambda = -nu * (k * k + x * x);
    root.char_residual = char_eq_scaled(x, k);
    root.det_residual = determinant_residual(mode, x);
    root.bracket_lo = lo;
    root.bracket_hi = hi;
    if (std::abs(root.char_residual) > tol)
        throw NonConvergence("refine_root: scaled residual above tolerance");
    return root;
}

double determinant_residual(const ModeIndex& mode, double mu_tilde) {
    const double k = mode.k;
    const Complex mu(0.0, mu_tilde);
    const Complex ek = std::exp(Complex(k, 0.0));
    const Complex emk = std::exp(Complex(-k, 0.0));
    const Complex emu = std::exp(mu);
    const Complex emmu = std::exp(-mu);

    std::array<std::array<Complex, 4>, 4> a = {{
        {Complex(1, 0), Complex(1, 0), Complex(1, 0), Complex(1, 0)},
        {Complex(k, 0), Complex(-k, 0), mu, -mu},
        {ek, emk, emu, emmu},
        {k * ek, -k * emk, mu * emu, -mu * emmu},
    }};

    // largest permutation entry-product (24 permutations of a 4x4)
    double scale = 0.0;
    std::array<int, 4> perm = {0, 1, 2, 3};
    do {
        double p = 1.0;
        for (int i = 0; i < 4; ++i) p *= std::abs(a[i][perm[i]]);
        scale = std::max(scale, p);
    } while (std::next_permutation(perm.begin(), perm.end()));

    // cofactor expansion along the first row (entries are all 1)
    auto det3 = [&](int c0, int c1, int c2) {
        return a[1][c0] * (a[2][c1] * a[3][c2] - a[2][c2] * a[3][c1])
             - a[1][c1] * (a[2][c0] * a[3][c2] - a[2][c2] * a[3][c0])
             + a[1][c2] * (a[2][c0] * a[3][c1] - a[2][c1] * a[3][c0]);
    };
    const Complex det = det3(1, 2, 3) - det3(0, 2, 3) + det3(0, 1, 3) - det3(0, 1, 2);
    return scale > 0.0 ? std::abs(det) / scale : std::abs(det);
}

ModeSpectrum compute_mode_spectrum(const ModeIndex& mode,
                                   const LocalizationParams& params,
                                   double nu, double tol) {
    ModeSpectrum spec;
    spec.mode = mode;
    const auto brackets = bracket_roots(mode, params);
    spec.roots.reserve(brackets.size());
    int l = 0;
    for (const auto& b : brackets) {
        SpectralRoot r = refine_root(b, mode, nu, tol);
        r.l = ++l;
        spec.roots.push_back(r);
    }
    // detected l_k: first branch from which every root sits in its
    // (l*pi - pi/4, l*pi + pi/4) window, matched to the nearest integer
    spec.detected_lk = static_cast<int>(spec.roots.size());
    for (int i = static_cast<int>(spec.roots.size()) - 1; i >= 0; --i) {
        const double mu = spec.roots[i].mu_tilde;
        const double nearest = std::round(mu / kPi) * kPi;
        if (std::abs(mu - nearest) < kPi / 4.0)
            spec.detected_lk = i + 1;
        else
            break;
    }
    return spec;
}

std::vector<ModeSpectrum> spectrum_sweep(const ChannelConfig& cfg,
                                         const LocalizationParams& params,
                                         int m_max, ExecPolicy policy,
                                         double tol) {
    cfg.validate();
    std::vector<int> ms;
    for (int m = -m_max; m <= m_max; ++m)
        if (m != 0) ms.push_back(m);
    std::vector<ModeSpectrum> out(ms.size());
    for_each_index(ms.size(), policy, [&](std::size_t i) {
        out[i] = compute_mode_spectrum(ModeIndex::from_m(ms[i], cfg.length),
                                       params, cfg.nu, tol);
    });
    return out;
}

double detect_k0(double length, int m_scan, const LocalizationParams& params) {
    for (int m = 1; m <= m_scan; ++m) {
        const double k = 2.0 * kPi * m / length;
        bool ok = count_sign_changes(params.scan_resolution * 0.25, kPi, k,
                                     params.scan_resolution) == 0;
        for (int l = 1; ok && l <= params.l_max; ++l)
            ok = count_sign_changes(l * kPi, (l + 1) * kPi, k,
                                    params.scan_resolution) == 1;
        if (ok) return k;
    }
    return params.k0;
}

GapSummabilityReport gap_and_summability(std::span<const ModeSpectrum> spectra,
                                         int l0, double nu) {
    GapSummabilityReport rep;
    rep.min_lambda_gap = std::numeric_limits<double>::infinity();
    rep.comparison_bound = 8.0 / (3.0 * nu);
    rep.mu_growth_ok = true;
    bool any = false;
    for (const auto& spec : spectra) {
        double partial = 0.0;
        for (std::size_t i = 0; i < spec.roots.size(); ++i) {
            const auto& r = spec.roots[i];
            if (i + 1 < spec.roots.size()) {
                any = true;
                rep.min_lambda_gap = std::min(
                    rep.min_lambda_gap, r.lambda - spec.roots[i + 1].lambda);
            }
            const int j = r.l;
            if (j > l0) {
                partial += 1.0 / (-r.lambda);
                if (!(r.mu_tilde > j * kPi / 4.0)) rep.mu_growth_ok = false;
            }
        }
        rep.max_partial_sum = std::max(rep.max_partial_sum, partial);
    }
    rep.gaps_positive = any && rep.min_lambda_gap > 0.0;
    rep.summability_ok = rep.max_partial_sum < rep.comparison_bound;
    return rep;
}

}  // namespace stokesnc
