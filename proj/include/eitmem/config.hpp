#pragma once

/// \file eitmem/config.hpp
/// \brief JSON experiment description: schema validation, unit conversion
///        and the resolved-config echo written next to results.

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "eitmem/constants.hpp"
#include "eitmem/dynamics.hpp"
#include "eitmem/errors.hpp"
#include "eitmem/polariton.hpp"
#include "eitmem/scheme.hpp"
#include "eitmem/spectra.hpp"

namespace eitmem {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError("'" + path + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ConfigError("unknown key '" + (path.empty() ? key : path + "." + key) + "'");
    }
}

inline const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError("missing required key '" + (path.empty() ? key : path + "." + key) + "'");
    return obj.at(key);
}

inline double number(const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError("'" + name + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("'" + name + "' must be finite");
    return x;
}

inline double required_number(const json& obj, const std::string& path, const char* key) {
    return number(require(obj, path, key), path + "." + key);
}

inline double optional_number(const json& obj, const std::string& path, const char* key, double fallback) {
    return obj.contains(key) ? number(obj.at(key), path + "." + key) : fallback;
}

/// Spin given as 2, 1.5 or "3/2".
inline HalfInt parse_spin(const json& v, const std::string& name) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return HalfInt(std::stoi(s));
            if (s.substr(slash + 1) != "2") throw ConfigError("'" + name + "' must be an integer or n/2");
            return half(std::stoi(s.substr(0, slash)));
        } catch (const std::logic_error&) {
            throw ConfigError("'" + name + "' is not a valid spin");
        }
    }
    const double x = number(v, name);
    const double twice = 2.0 * x;
    if (std::abs(twice - std::round(twice)) > 1e-9 || x < 0.0)
        throw ConfigError("'" + name + "' must be a non-negative multiple of 1/2");
    return half(static_cast<int>(std::lround(twice)));
}

inline json spin_json(HalfInt h) {
    if (h.is_integer()) return h.twice / 2;
    return h.str();
}

}  // namespace detail

/// Parses and validates an experiment description. Unknown keys are
/// rejected; errors name the offending key.
inline Experiment experiment_from_json(const json& root) {
    using namespace detail;
    namespace k = constants;
    reject_unknown(root, "",
                   {"scheme", "polarization", "geometry", "d_alpha", "control", "signal", "bfield", "grid",
                    "observation_z"});
    Experiment ex;

    const auto& sc = require(root, "", "scheme");
    reject_unknown(sc, "scheme",
                   {"F_g", "F_gp", "F_e", "gamma_e_over_2pi_mhz", "wavelength_nm", "g_g", "g_gp", "g_e", "eta"});
    ex.scheme.F_g = parse_spin(require(sc, "scheme", "F_g"), "scheme.F_g");
    ex.scheme.F_gp = parse_spin(require(sc, "scheme", "F_gp"), "scheme.F_gp");
    ex.scheme.F_e = parse_spin(require(sc, "scheme", "F_e"), "scheme.F_e");
    ex.scheme.Gamma_e = k::two_pi * k::MHz * optional_number(sc, "scheme", "gamma_e_over_2pi_mhz", 5.98);
    ex.scheme.omega_e = k::two_pi * k::c / (1e-9 * optional_number(sc, "scheme", "wavelength_nm", 794.979));
    ex.scheme.g_g = optional_number(sc, "scheme", "g_g", ex.scheme.g_g);
    ex.scheme.g_gp = optional_number(sc, "scheme", "g_gp", ex.scheme.g_gp);
    ex.scheme.g_e = optional_number(sc, "scheme", "g_e", ex.scheme.g_e);
    ex.scheme.eta = optional_number(sc, "scheme", "eta", ex.scheme.eta);

    const auto& pol = require(root, "", "polarization");
    reject_unknown(pol, "polarization", {"alpha", "beta"});
    ex.pol.alpha = static_cast<int>(required_number(pol, "polarization", "alpha"));
    ex.pol.beta = static_cast<int>(required_number(pol, "polarization", "beta"));

    const auto& geo = require(root, "", "geometry");
    reject_unknown(geo, "geometry", {"length_m", "area_m2", "atom_count"});
    ex.geometry.length = required_number(geo, "geometry", "length_m");
    ex.geometry.area = optional_number(geo, "geometry", "area_m2", ex.geometry.area);
    ex.geometry.atom_count = optional_number(geo, "geometry", "atom_count", ex.geometry.atom_count);

    ex.d_alpha = number(require(root, "", "d_alpha"), "d_alpha");

    const auto& ctl = require(root, "", "control");
    reject_unknown(ctl, "control", {"omega_over_gamma_e", "t_off_ns", "ramp_ns", "t_on_ns"});
    ex.control.Omega_on = ex.scheme.Gamma_e * required_number(ctl, "control", "omega_over_gamma_e");
    ex.control.t_off = k::ns * required_number(ctl, "control", "t_off_ns");
    ex.control.t_on = k::ns * required_number(ctl, "control", "t_on_ns");
    ex.control.ramp = k::ns * optional_number(ctl, "control", "ramp_ns", 20.0);

    const auto& sig = require(root, "", "signal");
    reject_unknown(sig, "signal", {"fwhm_ns", "peak_entry_ns", "amplitude"});
    ex.signal.fwhm = k::ns * required_number(sig, "signal", "fwhm_ns");
    ex.signal.peak_time = k::ns * required_number(sig, "signal", "peak_entry_ns");
    ex.signal.amplitude = optional_number(sig, "signal", "amplitude", 1.0);

    const auto& bf = require(root, "", "bfield");
    reject_unknown(bf, "bfield", {"b_gauss", "larmor_period_us", "theta_rad", "storage_only"});
    const double theta = optional_number(bf, "bfield", "theta_rad", 0.0);
    if (bf.contains("b_gauss") == bf.contains("larmor_period_us"))
        throw ConfigError("bfield needs exactly one of 'bfield.b_gauss' or 'bfield.larmor_period_us'");
    if (bf.contains("b_gauss")) {
        const double b = number(bf.at("b_gauss"), "bfield.b_gauss");
        if (b < 0.0) throw ConfigError("'bfield.b_gauss' must be non-negative");
        ex.bfield = MagneticField::from_gauss(b, theta);
    } else {
        ex.bfield = MagneticField::from_larmor_period(k::us * number(bf.at("larmor_period_us"), "bfield.larmor_period_us"),
                                                      ex.scheme.g_g, theta);
    }
    if (bf.contains("storage_only")) {
        if (!bf.at("storage_only").is_boolean()) throw ConfigError("'bfield.storage_only' must be a boolean");
        ex.field_during_storage_only = bf.at("storage_only").get<bool>();
    }

    if (root.contains("grid")) {
        const auto& gr = root.at("grid");
        reject_unknown(gr, "grid", {"nz", "dt_ns", "t_start_ns", "retrieval_window_ns", "storage_sample_ns"});
        const double nz = optional_number(gr, "grid", "nz", ex.grid.nz);
        if (nz != std::floor(nz) || nz < 2) throw ConfigError("'grid.nz' must be an integer >= 2");
        ex.grid.nz = static_cast<int>(nz);
        ex.grid.dt = k::ns * optional_number(gr, "grid", "dt_ns", ex.grid.dt / k::ns);
        ex.grid.t_start = k::ns * optional_number(gr, "grid", "t_start_ns", ex.grid.t_start / k::ns);
        ex.grid.retrieval_window = k::ns * optional_number(gr, "grid", "retrieval_window_ns", ex.grid.retrieval_window / k::ns);
        ex.grid.storage_sample = k::ns * optional_number(gr, "grid", "storage_sample_ns", ex.grid.storage_sample / k::ns);
    }
    ex.observation_z = optional_number(root, "", "observation_z", ex.observation_z);

    ex.scheme.validate();
    ex.pol.validate();
    ex.geometry.validate();
    if (ex.d_alpha < 0.0) throw ConfigError("'d_alpha' must be non-negative");
    return ex;
}

inline Experiment load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return experiment_from_json(root);
}

/// Fully resolved configuration in SI units plus derived quantities.
inline json experiment_echo(const Experiment& ex) {
    using detail::spin_json;
    json j;
    j["scheme"] = {{"F_g", spin_json(ex.scheme.F_g)},
                   {"F_gp", spin_json(ex.scheme.F_gp)},
                   {"F_e", spin_json(ex.scheme.F_e)},
                   {"Gamma_e_rad_s", ex.scheme.Gamma_e},
                   {"omega_e_rad_s", ex.scheme.omega_e},
                   {"g_g", ex.scheme.g_g},
                   {"g_gp", ex.scheme.g_gp},
                   {"g_e", ex.scheme.g_e},
                   {"eta", ex.scheme.eta},
                   {"p", ex.scheme.p()}};
    j["polarization"] = {{"alpha", ex.pol.alpha}, {"beta", ex.pol.beta}};
    j["geometry"] = {{"length_m", ex.geometry.length},
                     {"area_m2", ex.geometry.area},
                     {"atom_count", ex.geometry.atom_count}};
    j["d_alpha"] = ex.d_alpha;
    j["control"] = {{"Omega_on_rad_s", ex.control.Omega_on},
                    {"t_off_s", ex.control.t_off},
                    {"ramp_s", ex.control.ramp},
                    {"t_on_s", ex.control.t_on}};
    j["signal"] = {{"fwhm_s", ex.signal.fwhm}, {"peak_entry_s", ex.signal.peak_time}, {"amplitude", ex.signal.amplitude}};
    j["bfield"] = {{"b_gauss", ex.bfield.gauss()},
                   {"theta_rad", ex.bfield.theta},
                   {"omega_B_rad_s", ex.bfield.omega_B()},
                   {"storage_only", ex.field_during_storage_only}};
    j["grid"] = {{"nz", ex.grid.nz},
                 {"dt_s", ex.grid.dt},
                 {"t_start_s", ex.grid.t_start},
                 {"t_end_s", ex.t_end()},
                 {"storage_sample_s", ex.grid.storage_sample}};
    j["observation_z"] = ex.observation_z;

    json derived;
    const auto report = check_eit_feasibility(ex.scheme, ex.pol);
    derived["eit_feasible"] = report.ok();
    derived["optical_thickness_from_density"] = optical_thickness(ex.scheme, ex.geometry, ex.pol);
    const double T_L = ex.bfield.larmor_period(ex.scheme.g_g);
    derived["larmor_period_s"] = std::isfinite(T_L) ? json(T_L) : json(nullptr);
    if (report.ok()) {
        const auto tables = build_coupling_tables(ex.scheme, ex.pol);
        const double coupling = calibrate_coupling(ex.d_alpha, ex.scheme, ex.geometry, ex.pol);
        derived["coupling_N_kappa2"] = coupling;
        derived["group_velocity_m_s"] = group_velocity(ex.scheme, tables, coupling, ex.control.Omega_on);
        derived["collapse_rate_eta"] = collapse_rate(tables);
    }
    j["derived"] = derived;
    return j;
}

}  // namespace eitmem
