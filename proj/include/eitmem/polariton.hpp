#pragma once

/// \file eitmem/polariton.hpp
/// \brief Dark/bright polariton decomposition and the storage-time
///        retrieval efficiency in a static magnetic field.

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eitmem/angmom.hpp"
#include "eitmem/errors.hpp"
#include "eitmem/scheme.hpp"

namespace eitmem {

/// Dark-state direction in the space spanned by the signal field and the
/// 2F_g+1 hyperfine coherences (g m, g' m+alpha-beta).
///
/// Component order: [field, m = -F_g .. F_g]. The coherence components
/// carry -R_m so that the adiabatic dark state of the propagation
/// equations (optical coherences at rest) is parallel to e_Psi.
struct PolaritonBasis {
    Eigen::VectorXd u_Psi;
    Eigen::VectorXd e_Psi;
};

/// `collective` is sqrt(N p)|kappa| in rad/s, kappa taken real positive.
inline PolaritonBasis make_polariton_basis(const CouplingTables& tables, double Omega, double collective) {
    const int ng = tables.n_g();
    PolaritonBasis b;
    b.u_Psi.resize(ng + 1);
    b.u_Psi(0) = Omega;
    for (int i = 0; i < ng; ++i) b.u_Psi(i + 1) = -collective * tables.R[i];
    const double norm = b.u_Psi.norm();
    if (!(norm > 0.0)) throw ContractViolation("polariton basis undefined: zero control and zero coupling");
    b.e_Psi = b.u_Psi / norm;
    return b;
}

struct PolaritonDecomposition {
    double p_D = 0.0;
    double p_B = 0.0;
    /// Hyperfine coherences outside the dark/bright subspace.
    double p_out = 0.0;
    /// Squared norm of the (field, DSP-diagonal coherence) vector.
    double v_norm_sq = 0.0;
    /// |field|^2 plus every hyperfine coherence.
    double total_norm_sq = 0.0;
};

/// Projects one spatial slice onto the polariton basis.
///
/// `hyperfine` is the (2F_g+1) x (2F_gp+1) matrix of coherences in the
/// same sqrt(N/p) scaling as the field.
template <class Derived>
PolaritonDecomposition decompose(cplx field, const Eigen::MatrixBase<Derived>& hyperfine, const CouplingTables& tables,
                                 const PolaritonBasis& basis) {
    const int ng = tables.n_g();
    Eigen::VectorXcd v(ng + 1);
    v(0) = field;
    for (int i = 0; i < ng; ++i) {
        const int j = tables.dsp_partner(i);
        v(i + 1) = j >= 0 ? cplx(hyperfine(i, j)) : cplx(0.0);
    }
    const cplx proj = basis.e_Psi.cast<cplx>().dot(v);  // e_Psi is real
    PolaritonDecomposition out;
    out.v_norm_sq = v.squaredNorm();
    out.p_D = std::norm(proj);
    out.p_B = (v - basis.e_Psi.cast<cplx>() * proj).squaredNorm();
    const double hf_total = hyperfine.squaredNorm();
    out.total_norm_sq = std::norm(field) + hf_total;
    out.p_out = out.total_norm_sq - out.v_norm_sq;
    if (out.p_out < 0.0) out.p_out = 0.0;
    return out;
}

template <class Derived>
PolaritonDecomposition decompose(cplx field, const Eigen::MatrixBase<Derived>& hyperfine, const CouplingTables& tables,
                                 double Omega, double collective) {
    return decompose(field, hyperfine, tables, make_polariton_basis(tables, Omega, collective));
}

/// Fraction of the dark-state polariton surviving storage time t_s:
/// overlap of the Larmor-rotated spin wave with the initial one.
inline double efficiency(const LevelScheme& scheme, const CouplingTables& tables, const MagneticField& B,
                         double t_s) {
    const double wB = B.omega_B();
    const auto Dg = rotation_matrix(tables.F_g, scheme.g_g, wB, B.theta, t_s);
    const auto Dgp = rotation_matrix(tables.F_gp, scheme.g_gp, wB, B.theta, t_s);
    const int ng = tables.n_g();
    cplx amp = 0.0;
    for (int i1 = 0; i1 < ng; ++i1) {
        if (tables.R[i1] == 0.0) continue;
        const int j1 = tables.dsp_partner(i1);
        for (int i2 = 0; i2 < ng; ++i2) {
            if (tables.R[i2] == 0.0) continue;
            const int j2 = tables.dsp_partner(i2);
            amp += tables.R[i1] * tables.R[i2] * Dg.entries(i2, i1) * std::conj(Dgp.entries(j2, j1));
        }
    }
    amp /= tables.sum_R2;
    return std::norm(amp);
}

struct EfficiencyCurve {
    double theta = 0.0;
    std::vector<std::pair<double, double>> samples;  ///< (t_s, f)
};

inline EfficiencyCurve efficiency_curve(const LevelScheme& scheme, const CouplingTables& tables,
                                        const MagneticField& B, const std::vector<double>& storage_times) {
    EfficiencyCurve curve{B.theta, {}};
    curve.samples.reserve(storage_times.size());
    for (double t : storage_times) curve.samples.emplace_back(t, efficiency(scheme, tables, B, t));
    return curve;
}

/// Short-time collapse rate for a field along the propagation axis.
inline double collapse_rate(const CouplingTables& tables) {
    const int ng = tables.n_g();
    double acc = 0.0;
    for (int i1 = 0; i1 < ng; ++i1)
        for (int i2 = 0; i2 < ng; ++i2) {
            const double dm = projection_at(tables.F_g, i1).value() - projection_at(tables.F_g, i2).value();
            const double r = tables.R[i1] * tables.R[i2];
            acc += r * r * dm * dm;
        }
    return std::sqrt(4.0 * acc / (tables.sum_R2 * tables.sum_R2));
}

/// Gaussian collapse law exp(-eta^2 x^2 / 2), x = Larmor angle Omega_L t_s.
inline double short_time_efficiency(double eta, double larmor_angle) {
    return std::exp(-0.5 * eta * eta * larmor_angle * larmor_angle);
}

/// Revival at half a Larmor period for a transverse field and alpha = beta:
/// the spin wave maps m -> -m, leaving (sum_m R_m R_-m / sum_m R_m^2)^2.
inline double transverse_half_period_efficiency(const CouplingTables& tables) {
    const int ng = tables.n_g();
    double acc = 0.0;
    for (int i = 0; i < ng; ++i) acc += tables.R[i] * tables.R[ng - 1 - i];
    const double ratio = acc / tables.sum_R2;
    return ratio * ratio;
}

/// f(t_s, theta) on a product grid; result(t_index, theta_index).
inline Eigen::MatrixXd revival_surface(const LevelScheme& scheme, const CouplingTables& tables, double tesla,
                                       const std::vector<double>& thetas, const std::vector<double>& storage_times) {
    if (thetas.empty() || storage_times.empty()) throw ConfigError("revival surface needs non-empty grids");
    Eigen::MatrixXd f(static_cast<Eigen::Index>(storage_times.size()), static_cast<Eigen::Index>(thetas.size()));
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const MagneticField B{tesla, thetas[k]};
        for (std::size_t r = 0; r < storage_times.size(); ++r)
            f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = efficiency(scheme, tables, B, storage_times[r]);
    }
    return f;
}

}  // namespace eitmem
