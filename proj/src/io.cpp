#include "stokesnc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace stokesnc {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

void dump_json(const std::string& path, const json& j) {
    auto os = open_out(path);
    os << j.dump(2) << "\n";
}

}  // namespace

void write_spectrum_csv(const std::string& path,
                        std::span<const ModeSpectrum> spectra) {
    auto os = open_out(path);
    os << "m,k,l,mu_tilde,lambda,char_residual,det_residual,bracket_lo,bracket_hi\n";
    for (const auto& spec : spectra) {
        for (const auto& r : spec.roots) {
            os << spec.mode.m << ',' << format_double(spec.mode.k) << ','
               << r.l << ',' << format_double(r.mu_tilde) << ','
               << format_double(r.lambda) << ','
               << format_double(r.char_residual) << ','
               << format_double(r.det_residual) << ','
               << format_double(r.bracket_lo) << ','
               << format_double(r.bracket_hi) << '\n';
        }
    }
}

void write_eigenfunction_csv(const std::string& path,
                             const ModalEigenfunction& ef,
                             std::span<const double> y_grid) {
    auto os = open_out(path);
    os << "y,re_xi,im_xi,re_phi,im_phi,re_q,im_q\n";
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        os << format_double(y_grid[i]) << ','
           << format_double(ef.xi[i].real()) << ','
           << format_double(ef.xi[i].imag()) << ','
           << format_double(ef.phi[i].real()) << ','
           << format_double(ef.phi[i].imag()) << ','
           << format_double(ef.q[i].real()) << ','
           << format_double(ef.q[i].imag()) << '\n';
    }
}

void write_control_csv(const std::string& path, const ControlField& field) {
    auto os = open_out(path);
    os << "t,x,psi\n";
    for (std::size_t i = 0; i < field.t.size(); ++i)
        for (std::size_t j = 0; j < field.x.size(); ++j)
            os << format_double(field.t[i]) << ',' << format_double(field.x[j])
               << ',' << format_double(field.psi[i][j]) << '\n';
}

void write_control_json(const std::string& path,
                        std::span<const ControlSignal> signals) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["modes"] = json::array();
    for (const auto& s : signals) {
        json mode;
        mode["m"] = s.mode.m;
        mode["condition_number"] = s.condition_number;
        mode["residual"] = s.moment_residual;
        mode["epsilon"] = s.epsilon;
        mode["coefficients"] = json::array();
        for (std::size_t l = 0; l < s.c.size(); ++l)
            mode["coefficients"].push_back(
                {{"l", l + 1}, {"re_c", s.c[l].real()}, {"im_c", s.c[l].imag()}});
        j["modes"].push_back(mode);
    }
    dump_json(path, j);
}

void write_trajectories_csv(const std::string& path,
                            std::span<const TrajectoryRow> rows) {
    auto os = open_out(path);
    os << "m,l,t,abs_a_controlled,abs_a_uncontrolled\n";
    for (const auto& r : rows)
        os << r.m << ',' << r.l << ',' << format_double(r.t) << ','
           << format_double(r.abs_a_controlled) << ','
           << format_double(r.abs_a_uncontrolled) << '\n';
}

void write_trajectories_json(const std::string& path,
                             std::span<const ModeTrajectoryDump> modes) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["modes"] = json::array();
    for (const auto& m : modes) {
        json e;
        e["m"] = m.m;
        e["t"] = m.t;
        e["abs_a"] = m.abs_a;
        j["modes"].push_back(e);
    }
    dump_json(path, j);
}

void write_observability_csv(const std::string& path,
                             std::span<const ObservabilityReport> reports) {
    auto os = open_out(path);
    os << "m,L_requested,L_effective,smallest_ratio,pencil_condition\n";
    for (const auto& r : reports)
        os << r.m << ',' << r.L_requested << ',' << r.L_effective << ','
           << format_double(r.smallest_ratio) << ','
           << format_double(r.pencil_condition) << '\n';
}

void write_observability_json(const std::string& path,
                              std::span<const ObservabilityReport> reports) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["reports"] = json::array();
    for (const auto& r : reports) {
        json e;
        e["m"] = r.m;
        e["L_requested"] = r.L_requested;
        e["L_effective"] = r.L_effective;
        e["smallest_ratio"] = r.smallest_ratio;
        e["pencil_condition"] = r.pencil_condition;
        e["dropped_branches"] = r.dropped_branches;
        e["minimizing_direction"] = json::array();
        for (const auto& v : r.minimizing_direction)
            e["minimizing_direction"].push_back({{"re", v.real()}, {"im", v.imag()}});
        j["reports"].push_back(e);
    }
    dump_json(path, j);
}

void write_trace_report_json(const std::string& path,
                             std::span<const TraceReportEntry> entries,
                             double empirical_M) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["empirical_M"] = empirical_M;
    j["traces"] = json::array();
    for (const auto& e : entries)
        j["traces"].push_back({{"m", e.m},
                               {"l", e.l},
                               {"re_xi_ppp_1", e.xi_ppp_1.real()},
                               {"im_xi_ppp_1", e.xi_ppp_1.imag()},
                               {"bound_ratio", e.bound_ratio}});
    dump_json(path, j);
}

}  // namespace stokesnc
