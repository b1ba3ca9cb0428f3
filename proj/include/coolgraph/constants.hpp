#pragma once

#include <cmath>
#include <numbers>

namespace coolgraph::constants {

// CODATA 2018 exact SI values (and the 2018 recommended atomic mass unit).
inline constexpr double planck = 6.62607015e-34;          ///< J s
inline constexpr double speed_of_light = 299792458.0;     ///< m / s
inline constexpr double boltzmann = 1.380649e-23;         ///< J / K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  ///< kg

inline constexpr double nm_to_m = 1e-9;
inline constexpr double wavenumber_to_nm = 1e7;  ///< lambda[nm] = 1e7 / k[cm^-1]

/// k_B in cm^-1 / K.
inline double boltzmann_wavenumber() { return boltzmann / (planck * speed_of_light * 100.0); }

/// -ln(0.1) k_B in cm^-1 / K: energy of a level with 10% Boltzmann occupancy
/// relative to the ground state, per kelvin.
inline double ten_percent_energy_per_kelvin() { return -std::log(0.1) * boltzmann_wavenumber(); }

/// Kelvin per cm^-1 of starting-state energy for the 10% occupancy rule.
inline double initial_temperature_per_wavenumber() { return 1.0 / ten_percent_energy_per_kelvin(); }

/// sqrt(3 k_B [J/K] * u [kg]) / h * 1e-9: n_cool = coef * p * sqrt(T[K] m[u]) / sum(BR/lambda[nm]).
inline double ncool_coefficient() { return std::sqrt(3.0 * boltzmann * atomic_mass_unit) / planck * nm_to_m; }

/// (2/3) pi h c / I / (1 nm)^3 at I = 1 W/cm^2 = 1e4 W/m^2, in s nm^3.
inline double rate_coefficient() {
  constexpr double one_watt_per_cm2 = 1e4;
  return 2.0 / 3.0 * std::numbers::pi * planck * speed_of_light / one_watt_per_cm2 / (nm_to_m * nm_to_m * nm_to_m);
}

/// 1 GHz of transition frequency expressed in cm^-1.
inline double ghz_to_wavenumber() { return 1e9 / (speed_of_light * 100.0); }

}  // namespace coolgraph::constants
