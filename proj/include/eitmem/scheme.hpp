#pragma once

/// \file eitmem/scheme.hpp
/// \brief Level structure, field polarizations, sample geometry and the
///        Clebsch-Gordan coupling tables derived from them.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "eitmem/angmom.hpp"
#include "eitmem/constants.hpp"
#include "eitmem/errors.hpp"

namespace eitmem {

/// Ground levels g, g' and excited level e of a lambda system with Zeeman
/// degeneracy. Energies and rates in rad/s.
struct LevelScheme {
    HalfInt F_g{2};
    HalfInt F_gp{3};
    HalfInt F_e{3};
    double omega_gp = 0.0;
    double omega_e = constants::two_pi * constants::c / 794.979e-9;
    double Gamma_e = constants::two_pi * 5.98 * constants::MHz;
    double g_g = -1.0 / 3.0;
    double g_gp = 1.0 / 3.0;
    double g_e = 1.0 / 9.0;
    /// Fraction of decays from e that land in g.
    double eta = 0.5;

    /// Initial population of each Zeeman state of g.
    [[nodiscard]] double p() const { return 1.0 / F_g.multiplicity(); }

    void validate() const {
        auto dipole_allowed = [](HalfInt a, HalfInt b) {
            return b.twice >= std::abs(a.twice - 2) && b.twice <= a.twice + 2 && (a.twice + b.twice) % 2 == 0;
        };
        if (F_g.twice < 0 || F_gp.twice < 0 || F_e.twice < 0) throw ConfigError("hyperfine spins must be non-negative");
        if (!dipole_allowed(F_g, F_e)) throw ConfigError("F_g -> F_e is not dipole allowed");
        if (!dipole_allowed(F_gp, F_e)) throw ConfigError("F_gp -> F_e is not dipole allowed");
        if (!(Gamma_e > 0.0) || !std::isfinite(Gamma_e)) throw ConfigError("Gamma_e must be positive");
        if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
        if (!(omega_e > 0.0) || !std::isfinite(omega_e)) throw ConfigError("omega_e must be positive");
    }

    /// 85Rb D1 line: 5S1/2 F=2,3 and 5P1/2 F=3.
    static LevelScheme rb85_d1() { return {}; }
};

/// Helicities of signal (alpha) and control (beta).
struct FieldPolarizations {
    int alpha = 1;
    int beta = 1;

    void validate() const {
        if ((alpha != 1 && alpha != -1) || (beta != 1 && beta != -1))
            throw ConfigError("polarizations must be +1 or -1");
    }
    /// Offset of the g' projection paired with g state m: m' = m + shift.
    [[nodiscard]] int shift() const { return alpha - beta; }
};

struct SampleGeometry {
    double length = 3.0e-3;  ///< m
    double area = 1.0e-6;    ///< m^2
    double atom_count = 1.0e9;

    void validate() const {
        if (!(length > 0.0) || !(area > 0.0) || !(atom_count > 0.0))
            throw ConfigError("sample length, area and atom count must be positive");
    }
};

/// Uniform field of magnitude `tesla` in the x-z plane, `theta` from z.
struct MagneticField {
    double tesla = 0.0;
    double theta = 0.0;

    static MagneticField from_gauss(double gauss, double theta = 0.0) {
        return {gauss / constants::gauss_per_tesla, theta};
    }
    /// Field whose Larmor period on level g equals `period`.
    static MagneticField from_larmor_period(double period, double g_g, double theta = 0.0) {
        if (!(period > 0.0) || g_g == 0.0) throw ConfigError("Larmor period requires period > 0 and g_g != 0");
        const double omega_B = constants::two_pi / (std::abs(g_g) * period);
        return {omega_B / constants::mu_B_over_hbar_per_gauss / constants::gauss_per_tesla, theta};
    }

    [[nodiscard]] double gauss() const { return tesla * constants::gauss_per_tesla; }
    /// mu_B B / hbar in rad/s.
    [[nodiscard]] double omega_B() const { return constants::mu_B_over_hbar_per_gauss * gauss(); }
    /// 2 pi hbar / |g_g mu_B B|; infinite for zero field.
    [[nodiscard]] double larmor_period(double g_g) const {
        const double w = std::abs(g_g * omega_B());
        return w > 0.0 ? constants::two_pi / w : std::numeric_limits<double>::infinity();
    }
};

/// Clebsch-Gordan factors of the signal and control transitions, indexed
/// by position in -F..F of the relevant level.
struct CouplingTables {
    HalfInt F_g, F_gp, F_e;
    int alpha = 1;
    int beta = 1;

    std::vector<double> C;       ///< <F_g m; 1 alpha | F_e m+alpha>, over g
    std::vector<double> Cp;      ///< <F_gp m'; 1 beta | F_e m'+beta>, over g'
    std::vector<double> Cp_dsp;  ///< C'_{m+alpha-beta}, over g (0 when off the g' ladder)
    std::vector<double> R;       ///< C / Cp_dsp where C != 0, else 0
    std::vector<double> X;       ///< C normalized to unit sum of squares
    double sum_C2 = 0.0;
    double sum_R2 = 0.0;

    [[nodiscard]] int n_g() const { return F_g.multiplicity(); }
    [[nodiscard]] int n_gp() const { return F_gp.multiplicity(); }
    [[nodiscard]] int n_e() const { return F_e.multiplicity(); }
    [[nodiscard]] int shift() const { return alpha - beta; }

    /// Index in g' of the partner of g index i, or -1.
    [[nodiscard]] int dsp_partner(int i) const {
        const HalfInt m = projection_at(F_g, i) + HalfInt(shift());
        return is_projection(F_gp, m) ? projection_index(F_gp, m) : -1;
    }
    /// Index in e reached from g index i by the signal, or -1.
    [[nodiscard]] int signal_target(int i) const {
        const HalfInt m = projection_at(F_g, i) + HalfInt(alpha);
        return is_projection(F_e, m) ? projection_index(F_e, m) : -1;
    }
    /// Index in e reached from g' index j by the control, or -1.
    [[nodiscard]] int control_target(int j) const {
        const HalfInt m = projection_at(F_gp, j) + HalfInt(beta);
        return is_projection(F_e, m) ? projection_index(F_e, m) : -1;
    }
};

namespace detail {

/// <F m; 1 q | F_e m+q>, zero when m+q is not a projection of F_e.
inline double dipole_cg(HalfInt F, HalfInt m, int q, HalfInt F_e) {
    const HalfInt target = m + HalfInt(q);
    if (!is_projection(F_e, target)) return 0.0;
    return clebsch_gordan(F, HalfInt(1), F_e, m, HalfInt(q), target);
}

inline constexpr double kZeroCG = 1e-12;

}  // namespace detail

struct FeasibilityReport {
    std::vector<HalfInt> orphaned;  ///< g projections with C != 0 but C' == 0

    [[nodiscard]] bool ok() const { return orphaned.empty(); }
    [[nodiscard]] std::string describe() const {
        if (ok()) return "ok";
        std::ostringstream os;
        os << "unconnected lambda configuration for m =";
        for (auto m : orphaned) os << ' ' << m.str();
        return os.str();
    }
};

/// EIT requires every g state the signal couples to have a control-coupled
/// partner in g'.
inline FeasibilityReport check_eit_feasibility(const LevelScheme& scheme, const FieldPolarizations& pol) {
    FeasibilityReport report;
    for (int i = 0; i < scheme.F_g.multiplicity(); ++i) {
        const HalfInt m = projection_at(scheme.F_g, i);
        const double c = detail::dipole_cg(scheme.F_g, m, pol.alpha, scheme.F_e);
        if (std::abs(c) < detail::kZeroCG) continue;
        const HalfInt mp = m + HalfInt(pol.shift());
        const double cp = is_projection(scheme.F_gp, mp) ? detail::dipole_cg(scheme.F_gp, mp, pol.beta, scheme.F_e) : 0.0;
        if (std::abs(cp) < detail::kZeroCG) report.orphaned.push_back(m);
    }
    return report;
}

/// Coupling tables without the feasibility gate; R is zero wherever C' vanishes.
inline CouplingTables coupling_tables_unchecked(const LevelScheme& scheme, const FieldPolarizations& pol) {
    CouplingTables t;
    t.F_g = scheme.F_g;
    t.F_gp = scheme.F_gp;
    t.F_e = scheme.F_e;
    t.alpha = pol.alpha;
    t.beta = pol.beta;
    const int ng = t.n_g(), ngp = t.n_gp();
    t.C.assign(ng, 0.0);
    t.Cp.assign(ngp, 0.0);
    t.Cp_dsp.assign(ng, 0.0);
    t.R.assign(ng, 0.0);
    t.X.assign(ng, 0.0);
    for (int j = 0; j < ngp; ++j)
        t.Cp[j] = detail::dipole_cg(scheme.F_gp, projection_at(scheme.F_gp, j), pol.beta, scheme.F_e);
    for (int i = 0; i < ng; ++i) {
        t.C[i] = detail::dipole_cg(scheme.F_g, projection_at(scheme.F_g, i), pol.alpha, scheme.F_e);
        const int j = t.dsp_partner(i);
        t.Cp_dsp[i] = j >= 0 ? t.Cp[j] : 0.0;
        if (std::abs(t.C[i]) < detail::kZeroCG) t.C[i] = 0.0;
        if (std::abs(t.Cp_dsp[i]) < detail::kZeroCG) t.Cp_dsp[i] = 0.0;
        if (t.C[i] != 0.0 && t.Cp_dsp[i] != 0.0) t.R[i] = t.C[i] / t.Cp_dsp[i];
        t.sum_C2 += t.C[i] * t.C[i];
        t.sum_R2 += t.R[i] * t.R[i];
    }
    if (t.sum_C2 > 0.0)
        for (int i = 0; i < ng; ++i) t.X[i] = t.C[i] / std::sqrt(t.sum_C2);
    return t;
}

/// Throws ConfigError carrying the feasibility report when EIT is impossible.
inline CouplingTables build_coupling_tables(const LevelScheme& scheme, const FieldPolarizations& pol) {
    scheme.validate();
    pol.validate();
    const auto report = check_eit_feasibility(scheme, pol);
    if (!report.ok()) throw ConfigError("infeasible EIT scheme: " + report.describe());
    auto t = coupling_tables_unchecked(scheme, pol);
    if (t.sum_C2 == 0.0) throw ConfigError("signal polarization couples no Zeeman state of g");
    return t;
}

/// Resonant optical thickness from atom column density.
inline double optical_thickness(const LevelScheme& scheme, const SampleGeometry& geometry,
                                const FieldPolarizations& pol) {
    const auto t = coupling_tables_unchecked(scheme, pol);
    const double k = constants::c / scheme.omega_e;
    return 6.0 * constants::pi * scheme.eta * (geometry.atom_count / geometry.area) * k * k * scheme.p() * t.sum_C2;
}

/// N|kappa|^2 that gives resonant intensity transmittance exp(-d_alpha)
/// without control field.
inline double calibrate_coupling(double d_alpha, const LevelScheme& scheme, const SampleGeometry& geometry,
                                 const FieldPolarizations& pol) {
    if (!(d_alpha >= 0.0) || !std::isfinite(d_alpha)) throw ConfigError("optical thickness must be non-negative");
    const auto t = coupling_tables_unchecked(scheme, pol);
    if (t.sum_C2 == 0.0) throw ConfigError("signal polarization couples no Zeeman state of g");
    return d_alpha * constants::c * scheme.Gamma_e / (4.0 * geometry.length * scheme.p() * t.sum_C2);
}

/// Collective coupling sqrt(N p)|kappa| in rad/s.
inline double collective_coupling(double coupling, const LevelScheme& scheme) {
    return std::sqrt(scheme.p() * coupling);
}

}  // namespace eitmem
