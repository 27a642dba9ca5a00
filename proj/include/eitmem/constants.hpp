#pragma once

#include <numbers>

namespace eitmem::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Speed of light in vacuum, m/s.
inline constexpr double c = 2.99792458e8;

/// Bohr magneton over hbar, rad/s per gauss.
inline constexpr double mu_B_over_hbar_per_gauss = two_pi * 1.399624e6;

inline constexpr double gauss_per_tesla = 1.0e4;

// unit helpers
inline constexpr double ns = 1.0e-9;
inline constexpr double us = 1.0e-6;
inline constexpr double MHz = 1.0e6;

}  // namespace eitmem::constants
