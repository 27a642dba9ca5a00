#pragma once

/// \file eitmem/spectra.hpp
/// \brief Linear susceptibility of the degenerate medium under a constant
///        control field, transmission scans and group velocity.

#include <cmath>
#include <complex>
#include <vector>

#include "eitmem/constants.hpp"
#include "eitmem/errors.hpp"
#include "eitmem/scheme.hpp"

namespace eitmem {

/// chi(Delta) for signal detuning Delta and control Rabi frequency Omega.
///
/// Sum over Zeeman lambda systems, each with two-photon window Omega C'.
/// A term whose control coupling vanishes reduces to a bare two-level
/// absorber, which keeps Delta = 0 finite for such terms.
inline cplx susceptibility(const LevelScheme& scheme, const CouplingTables& tables, double length, double d_alpha,
                           double Omega, double Delta) {
    if (Omega < 0.0) throw ContractViolation("susceptibility: Omega must be non-negative");
    const double G = scheme.Gamma_e;
    cplx sum = 0.0;
    for (int i = 0; i < tables.n_g(); ++i) {
        const double x2 = tables.X[i] * tables.X[i];
        if (x2 == 0.0) continue;
        const double w2 = Omega * Omega * tables.Cp_dsp[i] * tables.Cp_dsp[i];
        if (w2 == 0.0) {
            sum += G * x2 * cplx(-Delta, 0.5 * G) / (Delta * Delta + 0.25 * G * G);
            continue;
        }
        const double a = w2 - Delta * Delta;
        const double b = 0.5 * Delta * G;
        sum += G * Delta * x2 * cplx(a, b) / (a * a + b * b);
    }
    return constants::c * d_alpha / (2.0 * scheme.omega_e * length) * sum;
}

/// Intensity transmittance exp(-(omega_e / c) Im chi L) of the whole sample.
inline double transmittance(const LevelScheme& scheme, cplx chi, double length) {
    return std::exp(-(scheme.omega_e / constants::c) * chi.imag() * length);
}

/// c Omega^2 / (Omega^2 + N p |kappa|^2 sum_m R_m^2).
inline double group_velocity(const LevelScheme& scheme, const CouplingTables& tables, double coupling,
                             double Omega) {
    if (Omega < 0.0) throw ContractViolation("group_velocity: Omega must be non-negative");
    const double o2 = Omega * Omega;
    const double denom = o2 + scheme.p() * coupling * tables.sum_R2;
    if (denom == 0.0) return constants::c;
    return constants::c * o2 / denom;
}

struct SusceptibilityResult {
    std::vector<double> detuning;  ///< rad/s
    std::vector<cplx> chi;
    std::vector<double> transmittance;
};

/// Uniform detuning scan over [delta_min, delta_max], endpoints included.
inline SusceptibilityResult transparency_scan(const LevelScheme& scheme, const CouplingTables& tables, double length,
                                              double d_alpha, double Omega, double delta_min, double delta_max,
                                              int n_points) {
    if (n_points < 2) throw ConfigError("transparency scan needs at least two points");
    SusceptibilityResult r;
    r.detuning.resize(n_points);
    r.chi.resize(n_points);
    r.transmittance.resize(n_points);
    for (int k = 0; k < n_points; ++k) {
        const double delta =
            k == n_points - 1 ? delta_max : delta_min + (delta_max - delta_min) * k / (n_points - 1);
        r.detuning[k] = delta;
        r.chi[k] = susceptibility(scheme, tables, length, d_alpha, Omega, delta);
        r.transmittance[k] = transmittance(scheme, r.chi[k], length);
    }
    return r;
}

}  // namespace eitmem
