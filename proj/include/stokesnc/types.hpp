#ifndef STOKESNC_TYPES_HPP
#define STOKESNC_TYPES_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace stokesnc {

using Complex = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

/// Physical and horizon parameters of the periodic channel problem.
struct ChannelConfig {
    double nu = 1.0;        // viscosity, > 0
    double length = 2.0 * kPi;  // period in x, > 0
    double T = 1.0;         // final time
    double T0 = 0.5;        // control horizon, 0 < T0 < T

    void validate() const;
};

/// One nonzero Fourier mode: integer index m and wavenumber k = 2*pi*m/length.
struct ModeIndex {
    int m = 1;
    double k = 1.0;

    static ModeIndex from_m(int m, double length);
};

/// Truncation of the modal expansion.
struct TruncationConfig {
    int m_max = 8;       // |m| <= m_max
    int l_max = 20;      // branches per mode
    int time_steps = 2048;

    void validate() const;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BracketingFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateCoefficients : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConjugacyViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConstraintViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stokesnc

#endif
