#pragma once

#include <numbers>

namespace tnt::constants {

// CODATA 2018.
inline constexpr double hbar = 1.054571817e-34;             // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

inline constexpr double bohr_radius = 5.29e-11;  // m, value used for the scattering cases
inline constexpr double rb87_mass = 87.0 * atomic_mass_unit;

inline constexpr double pi = std::numbers::pi;

}  // namespace tnt::constants
