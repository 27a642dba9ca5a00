#pragma once

/// \file eitmem/dynamics.hpp
/// \brief Signal propagation through the degenerate lambda medium with
///        Larmor precession: store-and-retrieve protocol simulation.
///
/// Variables are scaled so that the signal field Phi and the coherences
/// share units: each coherence is multiplied by sqrt(N/p). With the
/// collective coupling G = sqrt(N p)|kappa| and retarded time
/// tau = t - z/c the equations read
///
///   dPhi/dz           = (i G / c) sum_m C_m P[m, m+alpha]
///   dP[m,m'']/dtau    = -Gamma/2 P + i Omega C'_{m''-beta} S[m, m''-beta]
///                       + i G C_m Phi delta_{m'', m+alpha} + Zeeman
///   dS[m,m']/dtau     = i Omega C'_{m'} P[m, m'+beta] + Zeeman
///
/// where S are the g-g' (hyperfine) and P the g-e (optical) coherences.
/// Zeeman terms: i g_g (A_g X) - i g_s' (X A_s') with A = omega_B (n . F).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eitmem/angmom.hpp"
#include "eitmem/constants.hpp"
#include "eitmem/errors.hpp"
#include "eitmem/polariton.hpp"
#include "eitmem/scheme.hpp"
#include "eitmem/spectra.hpp"

namespace eitmem {

/// Control Rabi frequency: Omega_on, smoothstep down over
/// [t_off - ramp, t_off], zero on [t_off, t_on], smoothstep up over
/// [t_on, t_on + ramp], then Omega_on.
struct ControlEnvelope {
    double Omega_on = 0.0;
    double t_off = std::numeric_limits<double>::infinity();
    double ramp = 20.0 * constants::ns;
    double t_on = std::numeric_limits<double>::infinity();

    static double smoothstep(double x) {
        x = std::clamp(x, 0.0, 1.0);
        return x * x * (3.0 - 2.0 * x);
    }

    double operator()(double t) const {
        if (t <= t_off - ramp) return Omega_on;
        if (t < t_off) return Omega_on * (1.0 - smoothstep((t - (t_off - ramp)) / ramp));
        if (t <= t_on) return 0.0;
        if (t < t_on + ramp) return Omega_on * smoothstep((t - t_on) / ramp);
        return Omega_on;
    }

    /// Constant control, never switched off.
    static ControlEnvelope constant(double Omega) { return {Omega}; }
};

/// Gaussian signal entering the sample; fwhm refers to intensity.
struct SignalEnvelope {
    double fwhm = 120.0 * constants::ns;
    double peak_time = -60.0 * constants::ns;
    double amplitude = 1.0;

    cplx operator()(double t) const {
        const double x = (t - peak_time) / fwhm;
        return amplitude * std::exp(-2.0 * std::log(2.0) * x * x);
    }
    [[nodiscard]] double peak_intensity() const { return amplitude * amplitude; }
};

struct GridSpec {
    int nz = 200;
    double dt = 0.25 * constants::ns;
    double t_start = -400.0 * constants::ns;
    /// Simulated time after the control is switched back on.
    double retrieval_window = 1500.0 * constants::ns;
    /// Sampling interval of the record while the dark storage is
    /// transported analytically.
    double storage_sample = 10.0 * constants::ns;
};

/// Everything needed for one store-and-retrieve run.
struct Experiment {
    LevelScheme scheme;
    FieldPolarizations pol;
    SampleGeometry geometry;
    double d_alpha = 8.0;
    ControlEnvelope control;
    SignalEnvelope signal;
    MagneticField bfield;
    GridSpec grid;
    /// Observation point for the polariton decomposition, fraction of L.
    double observation_z = 0.5;
    /// Apply the magnetic field only while the control is off.
    bool field_during_storage_only = true;

    /// End of the simulated interval.
    [[nodiscard]] double t_end() const {
        if (std::isfinite(control.t_on)) return control.t_on + grid.retrieval_window;
        return grid.t_start + grid.retrieval_window;
    }
};

/// Hyperfine (g-g') and optical (g-e) coherences on the z grid plus the
/// signal field profile that goes with them.
///
/// Coherences of slice z occupy columns [z*n, (z+1)*n) of `hf` and `opt`.
struct CoherenceState {
    int n_g = 0, n_gp = 0, n_e = 0, nz = 0;
    Eigen::MatrixXcd hf;
    Eigen::MatrixXcd opt;
    Eigen::VectorXcd field;

    CoherenceState() = default;
    CoherenceState(int ng, int ngp, int ne, int points)
        : n_g(ng), n_gp(ngp), n_e(ne), nz(points),
          hf(Eigen::MatrixXcd::Zero(ng, ngp * points)),
          opt(Eigen::MatrixXcd::Zero(ng, ne * points)),
          field(Eigen::VectorXcd::Zero(points)) {}

    auto hyperfine(int z) { return hf.middleCols(z * n_gp, n_gp); }
    auto hyperfine(int z) const { return hf.middleCols(z * n_gp, n_gp); }
    auto optical(int z) { return opt.middleCols(z * n_e, n_e); }
    auto optical(int z) const { return opt.middleCols(z * n_e, n_e); }

    [[nodiscard]] bool finite() const {
        return hf.allFinite() && opt.allFinite() && field.allFinite();
    }
};

/// Rotates the hyperfine coherences of every slice through a period t_s of
/// free Larmor precession: S -> conj(D_g) S D_g'^T.
///
/// Only valid in the dark: the control must be off and the optical
/// coherences already cleared by the caller.
inline void evolve_storage_analytic(CoherenceState& state, const LevelScheme& scheme, const MagneticField& B,
                                    double t_s, double Omega = 0.0) {
    if (Omega != 0.0) throw ContractViolation("analytic storage transport requires the control field off");
    if (state.opt.squaredNorm() != 0.0)
        throw ContractViolation("analytic storage transport requires cleared optical coherences");
    const auto Dg = rotation_matrix(scheme.F_g, scheme.g_g, B.omega_B(), B.theta, t_s);
    const auto Dgp = rotation_matrix(scheme.F_gp, scheme.g_gp, B.omega_B(), B.theta, t_s);
    const Eigen::MatrixXcd left = Dg.entries.conjugate();
    const Eigen::MatrixXcd right = Dgp.entries.transpose();
    Eigen::MatrixXcd tmp(state.n_g, state.n_gp);
    for (int z = 0; z < state.nz; ++z) {
        tmp.noalias() = left * state.hyperfine(z) * right;
        state.hyperfine(z) = tmp;
    }
    state.field.setZero();
}

/// Method-of-lines integrator: RK4 in retarded time for the coherences,
/// with the field rebuilt by a trapezoidal z-march at every stage.
class MaxwellBlochSolver {
public:
    MaxwellBlochSolver(const LevelScheme& scheme, const CouplingTables& tables, double length, double d_alpha,
                       const MagneticField& B, int nz)
        : scheme_(scheme), tables_(tables), nz_(nz) {
        if (nz < 2) throw ConfigError("need at least two z grid points");
        const SampleGeometry geom{length, 1.0, 1.0};
        const FieldPolarizations pol{tables.alpha, tables.beta};
        coupling_ = calibrate_coupling(d_alpha, scheme, geom, pol);
        G_ = collective_coupling(coupling_, scheme);
        dz_ = length / (nz - 1);

        omega_B_ = B.omega_B();
        zeeman_ = omega_B_ != 0.0;
        auto axis = [&](HalfInt F) {
            const auto s = spin_matrices(F);
            return Eigen::MatrixXcd(omega_B_ * (std::cos(B.theta) * s.z + std::sin(B.theta) * s.x));
        };
        A_g_ = cplx(0, scheme.g_g) * axis(scheme.F_g);
        A_gp_ = cplx(0, -scheme.g_gp) * axis(scheme.F_gp);
        A_e_ = cplx(0, -scheme.g_e) * axis(scheme.F_e);

        signal_target_.resize(tables.n_g());
        for (int i = 0; i < tables.n_g(); ++i) signal_target_[i] = tables.signal_target(i);
        control_target_.resize(tables.n_gp());
        for (int j = 0; j < tables.n_gp(); ++j) control_target_[j] = tables.control_target(j);
    }

    [[nodiscard]] CoherenceState make_state() const {
        return CoherenceState(tables_.n_g(), tables_.n_gp(), tables_.n_e(), nz_);
    }

    [[nodiscard]] double coupling() const { return coupling_; }
    [[nodiscard]] double collective() const { return G_; }
    [[nodiscard]] double dz() const { return dz_; }
    [[nodiscard]] int nz() const { return nz_; }
    [[nodiscard]] const CouplingTables& tables() const { return tables_; }

    /// Switches the Zeeman terms on or off (no effect for zero field).
    void set_zeeman(bool on) { zeeman_ = on && omega_B_ != 0.0; }

    /// Source term (i G / c) sum_m C_m P[m, m+alpha] of slice z.
    [[nodiscard]] cplx field_source(const CoherenceState& s, int z) const {
        cplx acc = 0.0;
        const auto P = s.optical(z);
        for (int i = 0; i < tables_.n_g(); ++i)
            if (signal_target_[i] >= 0) acc += tables_.C[i] * P(i, signal_target_[i]);
        return cplx(0.0, G_ / constants::c) * acc;
    }

    /// Trapezoidal march of the field from the entrance face through the
    /// sample at fixed retarded time.
    void step_field(CoherenceState& s, cplx phi_in) const {
        s.field(0) = phi_in;
        cplx prev = field_source(s, 0);
        for (int z = 1; z < nz_; ++z) {
            const cplx cur = field_source(s, z);
            s.field(z) = s.field(z - 1) + 0.5 * dz_ * (prev + cur);
            prev = cur;
        }
    }

    /// Time derivative of the coherences of one slice for given local field.
    template <class HF, class OPT, class DHF, class DOPT>
    void slice_rhs(const HF& S, const OPT& P, cplx phi, double Omega, DHF&& dS, DOPT&& dP) const {
        const int ng = tables_.n_g(), ngp = tables_.n_gp();
        dP = -0.5 * scheme_.Gamma_e * P;
        dS.setZero();
        const cplx iOmega(0.0, Omega);
        if (Omega != 0.0) {
            for (int j = 0; j < ngp; ++j) {
                const int k = control_target_[j];
                if (k < 0) continue;
                const cplx w = iOmega * tables_.Cp[j];
                dS.col(j) += w * P.col(k);
                dP.col(k) += w * S.col(j);
            }
        }
        const cplx iG(0.0, G_);
        for (int i = 0; i < ng; ++i)
            if (signal_target_[i] >= 0) dP(i, signal_target_[i]) += iG * tables_.C[i] * phi;
        if (zeeman_) {
            dS.noalias() += A_g_ * S;
            dS.noalias() += S * A_gp_;
            dP.noalias() += A_g_ * P;
            dP.noalias() += P * A_e_;
        }
    }

    /// Derivative of all coherences; s.field must already hold the profile.
    void atomic_rhs(const CoherenceState& s, double Omega, CoherenceState& out) const {
        const int ngp = tables_.n_gp(), ne = tables_.n_e();
        for (int z = 0; z < nz_; ++z)
            slice_rhs(s.hyperfine(z), s.optical(z), s.field(z), Omega, out.hf.middleCols(z * ngp, ngp),
                      out.opt.middleCols(z * ne, ne));
    }

    /// One RK4 step of a single slice with the field held fixed.
    void step_atoms(Eigen::Ref<Eigen::MatrixXcd> S, Eigen::Ref<Eigen::MatrixXcd> P, cplx phi, double Omega,
                    double dt) const {
        const Eigen::MatrixXcd S0 = S, P0 = P;
        Eigen::MatrixXcd kS[4], kP[4];
        for (auto& m : kS) m.resize(S.rows(), S.cols());
        for (auto& m : kP) m.resize(P.rows(), P.cols());
        const double c[4] = {0.0, 0.5, 0.5, 1.0};
        Eigen::MatrixXcd Sx = S0, Px = P0;
        for (int k = 0; k < 4; ++k) {
            if (k > 0) {
                Sx = S0 + c[k] * dt * kS[k - 1];
                Px = P0 + c[k] * dt * kP[k - 1];
            }
            slice_rhs(Sx, Px, phi, Omega, kS[k], kP[k]);
        }
        S = S0 + dt / 6.0 * (kS[0] + 2.0 * kS[1] + 2.0 * kS[2] + kS[3]);
        P = P0 + dt / 6.0 * (kP[0] + 2.0 * kP[1] + 2.0 * kP[2] + kP[3]);
    }

    /// Advances the whole sample from t to t + dt; leaves the field profile
    /// at t + dt in s.field.
    template <class Control, class Input>
    void step(CoherenceState& s, double t, double dt, const Control& control, const Input& input) {
        ensure_scratch(s);
        const double c[4] = {0.0, 0.5, 0.5, 1.0};
        for (int k = 0; k < 4; ++k) {
            CoherenceState& x = stage_;
            if (k == 0) {
                x.hf = s.hf;
                x.opt = s.opt;
            } else {
                x.hf = s.hf + (c[k] * dt) * k_[k - 1].hf;
                x.opt = s.opt + (c[k] * dt) * k_[k - 1].opt;
            }
            const double tk = t + c[k] * dt;
            step_field(x, input(tk));
            atomic_rhs(x, control(tk), k_[k]);
        }
        s.hf += (dt / 6.0) * (k_[0].hf + 2.0 * k_[1].hf + 2.0 * k_[2].hf + k_[3].hf);
        s.opt += (dt / 6.0) * (k_[0].opt + 2.0 * k_[1].opt + 2.0 * k_[2].opt + k_[3].opt);
        step_field(s, input(t + dt));
    }

private:
    void ensure_scratch(const CoherenceState& s) {
        if (stage_.nz == s.nz && stage_.n_g == s.n_g) return;
        stage_ = make_state();
        for (auto& k : k_) k = make_state();
    }

    LevelScheme scheme_;
    CouplingTables tables_;
    int nz_;
    double coupling_ = 0.0;
    double G_ = 0.0;
    double dz_ = 0.0;
    double omega_B_ = 0.0;
    bool zeeman_ = false;
    Eigen::MatrixXcd A_g_, A_gp_, A_e_;
    std::vector<int> signal_target_, control_target_;
    CoherenceState stage_;
    CoherenceState k_[4];
};

struct SimulationRecord {
    std::vector<double> t;
    std::vector<double> omega;
    std::vector<double> input_intensity;         ///< |Phi(0,t)|^2 / I0
    std::vector<double> intensity_transmittance;  ///< |Phi(L,t)|^2 / I0
    std::vector<double> p_D, p_B, p_out;          ///< at the observation point
    std::vector<double> p_D_avg, p_B_avg;         ///< averaged over z

    double E_in = 0.0;
    double E_leaked = 0.0;
    double E_retrieved = 0.0;
    double efficiency = 0.0;
    double p_D_peak = 0.0;  ///< raw peak of p_D at the observation point
    int observation_index = 0;

    double coupling = 0.0;        ///< N|kappa|^2
    double group_velocity = 0.0;  ///< at Omega_on
    double larmor_period = 0.0;
    bool analytic_storage = false;
};

namespace detail {

inline double trapezoid_window(const std::vector<double>& t, const std::vector<double>& y, double lo, double hi) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k)
        if (t[k] >= lo && t[k + 1] <= hi) acc += 0.5 * (t[k + 1] - t[k]) * (y[k] + y[k + 1]);
    return acc;
}

}  // namespace detail

/// Largest stable time step for the given experiment.
inline double max_time_step(const Experiment& ex) {
    double rate = ex.scheme.Gamma_e;
    rate = std::max(rate, ex.control.Omega_on);
    const double fmax = std::max({ex.scheme.F_g.value(), ex.scheme.F_gp.value(), ex.scheme.F_e.value()});
    const double gmax = std::max({std::abs(ex.scheme.g_g), std::abs(ex.scheme.g_gp), std::abs(ex.scheme.g_e)});
    rate = std::max(rate, fmax * gmax * ex.bfield.omega_B());
    return 0.05 / rate;
}

/// Simulates storage and retrieval of the signal pulse.
///
/// While the control is off and the optical coherences have decayed below
/// 1e-6 of their peak, the remaining storage is transported with rotation
/// matrices instead of integrated.
inline SimulationRecord run_protocol(const Experiment& ex) {
    ex.scheme.validate();
    ex.pol.validate();
    ex.geometry.validate();
    if (!(ex.d_alpha >= 0.0)) throw ConfigError("optical thickness must be non-negative");
    if (!(ex.signal.fwhm > 0.0)) throw ConfigError("signal FWHM must be positive");
    if (!(ex.observation_z >= 0.0 && ex.observation_z <= 1.0)) throw ConfigError("observation_z must lie in [0, 1]");
    if (ex.control.Omega_on < 0.0) throw ConfigError("control Rabi frequency must be non-negative");
    if (!(ex.grid.dt > 0.0) || !(ex.grid.retrieval_window > 0.0) || !(ex.grid.storage_sample > 0.0))
        throw ConfigError("grid intervals must be positive");
    const double t_end = ex.t_end();
    if (ex.control.t_off < t_end && ex.control.t_on - ex.control.t_off < ex.control.ramp)
        throw ConfigError("storage window shorter than the control ramp");
    if (ex.grid.dt >= max_time_step(ex))
        throw ConfigError("time step " + std::to_string(ex.grid.dt / constants::ns) + " ns exceeds stability bound " +
                          std::to_string(max_time_step(ex) / constants::ns) + " ns");

    const auto tables = build_coupling_tables(ex.scheme, ex.pol);
    MaxwellBlochSolver solver(ex.scheme, tables, ex.geometry.length, ex.d_alpha, ex.bfield, ex.grid.nz);
    auto state = solver.make_state();
    const int nz = ex.grid.nz;
    const int obs = static_cast<int>(std::lround(ex.observation_z * (nz - 1)));
    const double I0 = ex.signal.peak_intensity();
    if (!(I0 > 0.0)) throw ConfigError("signal amplitude must be non-zero");

    SimulationRecord rec;
    rec.observation_index = obs;
    rec.coupling = solver.coupling();
    rec.group_velocity = group_velocity(ex.scheme, tables, rec.coupling, ex.control.Omega_on);
    rec.larmor_period = ex.bfield.larmor_period(ex.scheme.g_g);

    // z weights for the spatial average
    std::vector<double> wz(nz, 1.0 / (nz - 1));
    wz.front() *= 0.5;
    wz.back() *= 0.5;

    const double G = solver.collective();
    auto record = [&](double t, double Omega) {
        rec.t.push_back(t);
        rec.omega.push_back(Omega);
        rec.input_intensity.push_back(std::norm(state.field(0)) / I0);
        rec.intensity_transmittance.push_back(std::norm(state.field(nz - 1)) / I0);
        double pd = 0.0, pb = 0.0, pout = 0.0, pd_avg = 0.0, pb_avg = 0.0;
        if (Omega > 0.0 || G > 0.0) {
            const auto basis = make_polariton_basis(tables, Omega, G);
            for (int z = 0; z < nz; ++z) {
                const auto dec = decompose(state.field(z), state.hyperfine(z), tables, basis);
                pd_avg += wz[z] * dec.p_D;
                pb_avg += wz[z] * dec.p_B;
                if (z == obs) {
                    pd = dec.p_D;
                    pb = dec.p_B;
                    pout = dec.p_out;
                }
            }
        }
        rec.p_D.push_back(pd);
        rec.p_B.push_back(pb);
        rec.p_out.push_back(pout);
        rec.p_D_avg.push_back(pd_avg);
        rec.p_B_avg.push_back(pb_avg);
    };

    const auto& control = ex.control;
    const auto& signal = ex.signal;
    auto input = [&](double t) { return signal(t); };

    double t_base = ex.grid.t_start;
    long step_index = 0;
    double t = t_base;
    solver.step_field(state, input(t));
    record(t, control(t));

    double opt_peak = 0.0;
    const double dark_tol = 1e-6;
    const double input_tol = 1e-6 * std::abs(signal.amplitude);

    while (t < t_end - 1e-3 * ex.grid.dt) {
        const bool in_dark = t >= control.t_off && t < control.t_on;
        if (in_dark && t > signal.peak_time && std::abs(signal(t)) <= input_tol &&
            std::sqrt(state.opt.squaredNorm()) <= dark_tol * opt_peak) {
            state.opt.setZero();
            state.field.setZero();
            rec.analytic_storage = true;
            while (t < control.t_on) {
                const double next = std::min(control.t_on, t + ex.grid.storage_sample);
                evolve_storage_analytic(state, ex.scheme, ex.bfield, next - t);
                t = next;
                record(t, 0.0);
            }
            t_base = t;
            step_index = 0;
            continue;
        }

        if (ex.field_during_storage_only)
            solver.set_zeeman(t >= control.t_off && t + ex.grid.dt <= control.t_on + 1e-3 * ex.grid.dt);
        solver.step(state, t, ex.grid.dt, control, input);
        ++step_index;
        t = t_base + static_cast<double>(step_index) * ex.grid.dt;
        if (!state.finite())
            throw NumericalInstability("non-finite amplitudes at t = " + std::to_string(t) +
                                       " s; reduce grid dt (" + std::to_string(ex.grid.dt) +
                                       " s) or increase nz (" + std::to_string(nz) + ")");
        opt_peak = std::max(opt_peak, std::sqrt(state.opt.squaredNorm()));
        record(t, control(t));
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    rec.E_in = detail::trapezoid_window(rec.t, rec.input_intensity, -kInf, kInf);
    rec.E_leaked = detail::trapezoid_window(rec.t, rec.intensity_transmittance, -kInf, control.t_off);
    rec.E_retrieved = detail::trapezoid_window(rec.t, rec.intensity_transmittance, control.t_on, kInf);
    rec.efficiency = rec.E_in > 0.0 ? rec.E_retrieved / rec.E_in : 0.0;
    rec.p_D_peak = rec.p_D.empty() ? 0.0 : *std::max_element(rec.p_D.begin(), rec.p_D.end());
    return rec;
}

}  // namespace eitmem
