#pragma once

/// \file eitmem/angmom.hpp
/// \brief Clebsch-Gordan coefficients, Wigner d-matrices and rotation
///        matrices for hyperfine levels.
///
/// Phase convention: Condon-Shortley throughout. Stretched couplings
/// <F1 F1; F2 F2 | F1+F2, F1+F2> are +1 and d^F(beta) = <F m'|exp(-i beta F_y)|F m>.
/// Matrices over a level of spin F are indexed by m = -F..F in ascending order.

#include <array>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace eitmem {

using cplx = std::complex<double>;

/// Half-integer stored as twice its value.
struct HalfInt {
    int twice = 0;

    constexpr HalfInt() = default;
    static constexpr HalfInt from_twice(int t) { HalfInt h; h.twice = t; return h; }
    constexpr HalfInt(int whole) : twice(2 * whole) {}

    [[nodiscard]] constexpr bool is_integer() const { return twice % 2 == 0; }
    [[nodiscard]] constexpr double value() const { return 0.5 * twice; }
    /// Multiplicity 2F+1 of a spin F.
    [[nodiscard]] constexpr int multiplicity() const { return twice + 1; }

    constexpr HalfInt operator-() const { return from_twice(-twice); }
    constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice + o.twice); }
    constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice - o.twice); }
    constexpr HalfInt& operator+=(HalfInt o) { twice += o.twice; return *this; }
    constexpr auto operator<=>(const HalfInt&) const = default;

    [[nodiscard]] std::string str() const {
        return is_integer() ? std::to_string(twice / 2) : std::to_string(twice) + "/2";
    }
};

constexpr HalfInt half(int twice) { return HalfInt::from_twice(twice); }
constexpr HalfInt abs(HalfInt h) { return HalfInt::from_twice(h.twice < 0 ? -h.twice : h.twice); }

/// True when m is one of the projections -F..F of spin F.
constexpr bool is_projection(HalfInt F, HalfInt m) {
    return F.twice >= 0 && (F.twice - m.twice) % 2 == 0 && m.twice >= -F.twice && m.twice <= F.twice;
}

/// Row/column index of projection m in a (2F+1)-dimensional matrix.
constexpr int projection_index(HalfInt F, HalfInt m) { return (m.twice + F.twice) / 2; }
constexpr HalfInt projection_at(HalfInt F, int index) { return half(2 * index - F.twice); }

namespace detail {

inline constexpr int kMaxFactorial = 100;

inline const std::array<long double, kMaxFactorial + 1>& factorial_table() {
    static const auto table = [] {
        std::array<long double, kMaxFactorial + 1> t{};
        t[0] = 1.0L;
        for (int i = 1; i <= kMaxFactorial; ++i) t[i] = t[i - 1] * static_cast<long double>(i);
        return t;
    }();
    return table;
}

/// n! for a non-negative integer passed as twice its value.
inline long double fact_twice(int twice_n) {
    if (twice_n < 0 || twice_n % 2 != 0) throw std::logic_error("factorial of non-integer or negative argument");
    const int n = twice_n / 2;
    if (n > kMaxFactorial) throw std::out_of_range("angular momentum too large for factorial table");
    return factorial_table()[n];
}

inline long double fact(int n) { return fact_twice(2 * n); }

inline int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

}  // namespace detail

/// <F1 m1; F2 m2 | F m>, Condon-Shortley phase.
///
/// Throws std::invalid_argument when a projection lies outside its spin or
/// the half-integer parities are inconsistent. Returns 0 for couplings
/// forbidden by m1+m2 != m or the triangle rule.
inline double clebsch_gordan(HalfInt F1, HalfInt F2, HalfInt F, HalfInt m1, HalfInt m2, HalfInt m) {
    if (F1.twice < 0 || F2.twice < 0 || F.twice < 0)
        throw std::invalid_argument("clebsch_gordan: negative spin");
    if (!is_projection(F1, m1) || !is_projection(F2, m2) || !is_projection(F, m))
        throw std::invalid_argument("clebsch_gordan: projection outside -F..F or parity mismatch");
    if ((F1.twice + F2.twice + F.twice) % 2 != 0)
        throw std::invalid_argument("clebsch_gordan: F1+F2+F must be an integer");

    if (m1.twice + m2.twice != m.twice) return 0.0;
    if (F.twice < std::abs(F1.twice - F2.twice) || F.twice > F1.twice + F2.twice) return 0.0;

    using detail::fact_twice;
    const int j1 = F1.twice, j2 = F2.twice, j = F.twice;
    const int a = m1.twice, b = m2.twice, c = m.twice;

    const long double triangle = fact_twice(j1 + j2 - j) * fact_twice(j1 - j2 + j) * fact_twice(-j1 + j2 + j) /
                                 fact_twice(j1 + j2 + j + 2);
    const long double projections = fact_twice(j + c) * fact_twice(j - c) * fact_twice(j1 - a) *
                                    fact_twice(j1 + a) * fact_twice(j2 - b) * fact_twice(j2 + b);
    const long double prefactor = std::sqrt(static_cast<long double>(j + 1) * triangle * projections);

    // summation index k in doubled units
    const int k_min = std::max({0, j2 - j - a, j1 + b - j});
    const int k_max = std::min({j1 + j2 - j, j1 - a, j2 + b});
    long double sum = 0.0L;
    for (int k = k_min; k <= k_max; k += 2) {
        const long double denom = fact_twice(k) * fact_twice(j1 + j2 - j - k) * fact_twice(j1 - a - k) *
                                  fact_twice(j2 + b - k) * fact_twice(j - j2 + a + k) * fact_twice(j - j1 - b + k);
        sum += detail::parity_sign(k / 2) / denom;
    }
    return static_cast<double>(prefactor * sum);
}

/// Wigner small-d matrix d^F_{m' m}(beta), rows m', columns m.
inline Eigen::MatrixXd wigner_small_d(HalfInt F, double beta) {
    if (F.twice < 0) throw std::invalid_argument("wigner_small_d: negative spin");
    if (!std::isfinite(beta)) throw std::invalid_argument("wigner_small_d: non-finite angle");

    using detail::fact_twice;
    const int n = F.multiplicity();
    if (beta == 0.0) return Eigen::MatrixXd::Identity(n, n);
    const int j = F.twice;
    const long double cb = std::cos(static_cast<long double>(beta) / 2);
    const long double sb = std::sin(static_cast<long double>(beta) / 2);

    Eigen::MatrixXd d(n, n);
    for (int r = 0; r < n; ++r) {
        const int mp = projection_at(F, r).twice;
        for (int col = 0; col < n; ++col) {
            const int m = projection_at(F, col).twice;
            const long double norm =
                std::sqrt(fact_twice(j + mp) * fact_twice(j - mp) * fact_twice(j + m) * fact_twice(j - m));
            const int s_min = std::max(0, m - mp);
            const int s_max = std::min(j + m, j - mp);
            long double sum = 0.0L;
            for (int s = s_min; s <= s_max; s += 2) {
                const int cos_pow = (2 * j + m - mp - 2 * s) / 2;
                const int sin_pow = (mp - m + 2 * s) / 2;
                const long double term = std::pow(cb, cos_pow) * std::pow(sb, sin_pow) /
                                         (fact_twice(j + m - s) * fact_twice(s) * fact_twice(mp - m + s) *
                                          fact_twice(j - mp - s));
                sum += detail::parity_sign((mp - m + s) / 2) * term;
            }
            d(r, col) = static_cast<double>(norm * sum);
        }
    }
    return d;
}

/// Cartesian spin matrices F_x, F_y, F_z of a level with spin F.
struct SpinMatrices {
    Eigen::MatrixXcd x, y, z;
};

inline SpinMatrices spin_matrices(HalfInt F) {
    const int n = F.multiplicity();
    const double f = F.value();
    Eigen::MatrixXcd raise = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd fz = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double m = projection_at(F, i).value();
        fz(i, i) = m;
        if (i + 1 < n) raise(i + 1, i) = std::sqrt(f * (f + 1) - m * (m + 1));
    }
    const Eigen::MatrixXcd lower = raise.adjoint();
    return {0.5 * (raise + lower), cplx(0, -0.5) * (raise - lower), fz};
}

/// Matrix of a rotation operator for one hyperfine level.
struct RotationMatrix {
    HalfInt F;
    Eigen::MatrixXcd entries;

    [[nodiscard]] cplx operator()(HalfInt m_row, HalfInt m_col) const {
        return entries(projection_index(F, m_row), projection_index(F, m_col));
    }
};

/// <F m| exp(-i g omega_B (n . F) t) |F m'> for a field axis n in the x-z
/// plane at angle theta from z.
///
/// Built as exp(-i theta F_y) exp(-i phi F_z) exp(+i theta F_y) with
/// precession phase phi = g * omega_B * t.
inline RotationMatrix rotation_matrix(HalfInt F, double g, double omega_B, double theta, double t) {
    const double phi = g * omega_B * t;
    if (phi == 0.0) return {F, Eigen::MatrixXcd::Identity(F.multiplicity(), F.multiplicity())};
    const Eigen::MatrixXd d = wigner_small_d(F, theta);
    const int n = F.multiplicity();
    Eigen::VectorXcd phases(n);
    for (int i = 0; i < n; ++i) phases(i) = std::polar(1.0, -projection_at(F, i).value() * phi);
    Eigen::MatrixXcd D = d.cast<cplx>() * phases.asDiagonal() * d.transpose().cast<cplx>();
    return {F, std::move(D)};
}

}  // namespace eitmem
