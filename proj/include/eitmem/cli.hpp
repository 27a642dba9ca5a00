#pragma once

/// \file eitmem/cli.hpp
/// \brief Command implementations behind the `eitmem` executable and the
///        CSV/JSON emitters they share.
///
/// Numbers are written with 9 significant digits in scientific notation;
/// output files carry no timestamps so identical inputs give identical bytes.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "eitmem/config.hpp"
#include "eitmem/dynamics.hpp"
#include "eitmem/polariton.hpp"
#include "eitmem/spectra.hpp"

namespace eitmem::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalInstability = 3 };

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", x);
    return buf;
}

inline void write_spectrum_csv(std::ostream& os, const SusceptibilityResult& r) {
    os << "delta_rad_s,re_chi,im_chi,transmittance\n";
    for (std::size_t k = 0; k < r.detuning.size(); ++k)
        os << fmt(r.detuning[k]) << ',' << fmt(r.chi[k].real()) << ',' << fmt(r.chi[k].imag()) << ','
           << fmt(r.transmittance[k]) << '\n';
}

/// Time series with p_D and p_B scaled so that the peak of p_D is 1.
inline void write_timeseries_csv(std::ostream& os, const SimulationRecord& rec) {
    const double scale = rec.p_D_peak > 0.0 ? 1.0 / rec.p_D_peak : 0.0;
    os << "t_s,omega_rabi,intensity_transmittance,p_D,p_B\n";
    for (std::size_t k = 0; k < rec.t.size(); ++k)
        os << fmt(rec.t[k]) << ',' << fmt(rec.omega[k]) << ',' << fmt(rec.intensity_transmittance[k]) << ','
           << fmt(rec.p_D[k] * scale) << ',' << fmt(rec.p_B[k] * scale) << '\n';
}

inline json simulation_summary(const Experiment& ex, const SimulationRecord& rec) {
    double pd_avg_peak = 0.0;
    for (double v : rec.p_D_avg) pd_avg_peak = std::max(pd_avg_peak, v);
    return {{"E_in", rec.E_in},
            {"E_leaked", rec.E_leaked},
            {"E_retrieved", rec.E_retrieved},
            {"efficiency", rec.efficiency},
            {"p_D_peak_raw", rec.p_D_peak},
            {"p_D_z_averaged_peak_raw", pd_avg_peak},
            {"analytic_storage", rec.analytic_storage},
            {"config_echo", experiment_echo(ex)}};
}

inline void write_curve_csv(std::ostream& os, const std::vector<double>& t_over_TL, const std::vector<double>& f) {
    os << "t_over_TL,f\n";
    for (std::size_t k = 0; k < f.size(); ++k) os << fmt(t_over_TL[k]) << ',' << fmt(f[k]) << '\n';
}

/// Header row of theta values, first column t_s/T_L.
inline void write_surface_csv(std::ostream& os, const std::vector<double>& thetas, const std::vector<double>& t_over_TL,
                              const Eigen::MatrixXd& f) {
    os << "t_over_TL";
    for (double th : thetas) os << ',' << fmt(th);
    os << '\n';
    for (std::size_t r = 0; r < t_over_TL.size(); ++r) {
        os << fmt(t_over_TL[r]);
        for (Eigen::Index c = 0; c < f.cols(); ++c) os << ',' << fmt(f(static_cast<Eigen::Index>(r), c));
        os << '\n';
    }
}

/// "a,b,c" or "start:stop:count" (inclusive, count >= 1).
inline std::vector<double> parse_list_or_range(const std::string& text) {
    std::vector<double> out;
    auto to_double = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw ConfigError("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + s + "' in '" + text + "'");
        }
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw ConfigError("range must be start:stop:count, got '" + text + "'");
        const double a = to_double(parts[0]), b = to_double(parts[1]);
        const double n = to_double(parts[2]);
        if (n < 1 || n != std::floor(n)) throw ConfigError("range count must be a positive integer");
        const int count = static_cast<int>(n);
        for (int k = 0; k < count; ++k) out.push_back(count == 1 ? a : (k == count - 1 ? b : a + (b - a) * k / (count - 1)));
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double(p));
    if (out.empty()) throw ConfigError("empty list '" + text + "'");
    return out;
}

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = n == 1 ? a : (k == n - 1 ? b : a + (b - a) * k / (n - 1));
    return v;
}

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name);
    if (!os) throw ConfigError("cannot write '" + (dir / name).string() + "'");
    return os;
}

/// Feasibility report and derived constants. Returns kConfigError for an
/// infeasible scheme.
inline int cmd_check(const Experiment& ex, std::ostream& out) {
    const auto report = check_eit_feasibility(ex.scheme, ex.pol);
    out << "feasibility: " << report.describe() << '\n';
    out << "d_alpha: " << fmt(ex.d_alpha) << '\n';
    out << "optical_thickness_from_density: " << fmt(optical_thickness(ex.scheme, ex.geometry, ex.pol)) << '\n';
    const double T_L = ex.bfield.larmor_period(ex.scheme.g_g);
    out << "b_gauss: " << fmt(ex.bfield.gauss()) << '\n';
    out << "larmor_period_us: " << (std::isfinite(T_L) ? fmt(T_L / constants::us) : std::string("inf")) << '\n';
    if (!report.ok()) return kConfigError;
    const auto tables = build_coupling_tables(ex.scheme, ex.pol);
    const double coupling = calibrate_coupling(ex.d_alpha, ex.scheme, ex.geometry, ex.pol);
    out << "coupling_N_kappa2: " << fmt(coupling) << '\n';
    out << "group_velocity_m_s: " << fmt(group_velocity(ex.scheme, tables, coupling, ex.control.Omega_on)) << '\n';
    out << "collapse_rate_eta: " << fmt(collapse_rate(tables)) << '\n';
    return kOk;
}

/// One spectrum file per control Rabi frequency (in units of Gamma_e).
inline std::vector<std::filesystem::path> cmd_spectrum(const Experiment& ex, const std::vector<double>& omega_over_gamma,
                                                       double delta_max_over_gamma, int n_points,
                                                       const std::filesystem::path& out_dir) {
    const auto tables = build_coupling_tables(ex.scheme, ex.pol);
    const double G = ex.scheme.Gamma_e;
    std::vector<std::filesystem::path> written;
    for (double w : omega_over_gamma) {
        if (w < 0.0) throw ConfigError("control Rabi frequency must be non-negative");
        const auto r = transparency_scan(ex.scheme, tables, ex.geometry.length, ex.d_alpha, w * G,
                                         -delta_max_over_gamma * G, delta_max_over_gamma * G, n_points);
        char name[64];
        std::snprintf(name, sizeof name, "spectrum_omega_%g.csv", w);
        auto os = open_output(out_dir, name);
        write_spectrum_csv(os, r);
        written.push_back(out_dir / name);
    }
    return written;
}

inline SimulationRecord cmd_simulate(const Experiment& ex, const std::filesystem::path& out_dir) {
    const auto rec = run_protocol(ex);
    {
        auto os = open_output(out_dir, "timeseries.csv");
        write_timeseries_csv(os, rec);
    }
    auto os = open_output(out_dir, "summary.json");
    os << simulation_summary(ex, rec).dump(2) << '\n';
    return rec;
}

/// f over one Larmor period: a curve for a single theta, a surface otherwise.
inline std::filesystem::path cmd_revival(const Experiment& ex, const std::vector<double>& thetas, int t_points,
                                         const std::filesystem::path& out_dir) {
    if (t_points < 2) throw ConfigError("revival needs at least two storage-time points");
    const double T_L = ex.bfield.larmor_period(ex.scheme.g_g);
    if (!std::isfinite(T_L)) throw ConfigError("revival needs a non-zero magnetic field and g_g");
    const auto tables = build_coupling_tables(ex.scheme, ex.pol);
    const auto t_over = linspace(0.0, 1.0, t_points);
    std::vector<double> times(t_over.size());
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = t_over[k] * T_L;
    const auto f = revival_surface(ex.scheme, tables, ex.bfield.tesla, thetas, times);
    if (thetas.size() == 1) {
        std::vector<double> col(f.rows());
        for (Eigen::Index r = 0; r < f.rows(); ++r) col[r] = f(r, 0);
        auto os = open_output(out_dir, "revival_curve.csv");
        write_curve_csv(os, t_over, col);
        return out_dir / "revival_curve.csv";
    }
    auto os = open_output(out_dir, "revival_surface.csv");
    write_surface_csv(os, thetas, t_over, f);
    return out_dir / "revival_surface.csv";
}

}  // namespace eitmem::cli
