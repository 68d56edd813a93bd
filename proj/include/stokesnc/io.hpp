#ifndef STOKESNC_IO_HPP
#define STOKESNC_IO_HPP

#include <span>
#include <string>
#include <vector>

#include "stokesnc/control.hpp"
#include "stokesnc/eigenfunctions.hpp"
#include "stokesnc/modal.hpp"
#include "stokesnc/observability.hpp"
#include "stokesnc/spectral.hpp"

namespace stokesnc {

inline constexpr int kSchemaVersion = 1;

/// Shortest round-trip decimal form of a double (deterministic output).
std::string format_double(double v);

void write_spectrum_csv(const std::string& path,
                        std::span<const ModeSpectrum> spectra);

void write_eigenfunction_csv(const std::string& path,
                             const ModalEigenfunction& ef,
                             std::span<const double> y_grid);

void write_control_csv(const std::string& path, const ControlField& field);

/// Per-mode coefficient dump: m, l, Re c, Im c, residual, condition_number.
void write_control_json(const std::string& path,
                        std::span<const ControlSignal> signals);

struct TrajectoryRow {
    int m;
    int l;
    double t;
    double abs_a_controlled;
    double abs_a_uncontrolled;
};
void write_trajectories_csv(const std::string& path,
                            std::span<const TrajectoryRow> rows);

struct ModeTrajectoryDump {
    int m;
    std::vector<double> t;
    std::vector<std::vector<double>> abs_a;  // abs_a[i][l] at t[i]
};
void write_trajectories_json(const std::string& path,
                             std::span<const ModeTrajectoryDump> modes);

void write_observability_csv(const std::string& path,
                             std::span<const ObservabilityReport> reports);
void write_observability_json(const std::string& path,
                              std::span<const ObservabilityReport> reports);

struct TraceReportEntry {
    int m;
    int l;
    Complex xi_ppp_1;       // closed form, raw coefficient scale
    double bound_ratio;     // |xi'''(1)| / (k^2 e^{|k|} |lambda| mu)
};
void write_trace_report_json(const std::string& path,
                             std::span<const TraceReportEntry> entries,
                             double empirical_M);

}  // namespace stokesnc

#endif
