#pragma once

// Closed-form rate model of photon cycling: closure, survival, scattering
// rate, cooling counts and times, for single excited-state schemes and for
// schemes built from two excited states that share their lower states.
//
// Units are fixed by convention: energies in cm^-1, wavelengths in nm, times
// in s, temperatures in K, masses in u, intensities in mW/cm^2.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <utility>

#include <fmt/format.h>

#include "coolgraph/constants.hpp"
#include "coolgraph/errors.hpp"
#include "coolgraph/scheme.hpp"

namespace coolgraph {

template <class T>
concept ChannelLike = requires(const T& c) {
  { c.branching_ratio } -> std::convertible_to<double>;
  { c.wavelength_nm } -> std::convertible_to<double>;
};

inline constexpr double kBufferGasFloorK = 4.0;
inline constexpr double kClosureSlack = 1e-9;

/// Sum of branching ratios of the driven channels.
template <ChannelLike C>
double closure(std::span<const C> channels) {
  if (channels.empty()) throw DomainError("closure of an empty channel set");
  if constexpr (requires(const C& c) { c.upper_id; }) {
    for (const auto& c : channels)
      if (c.upper_id != channels.front().upper_id) throw DomainError("closure over channels of different upper states");
  }
  double p = 0.0;
  for (const auto& c : channels) p += c.branching_ratio;
  if (p > 1.0 + kClosureSlack) throw DomainError(fmt::format("closure {} exceeds 1", p));
  return p;
}

/// Scatterings after which 10% of molecules remain bright: ln 0.1 / ln p.
inline double n_ten_percent(double p) {
  if (!(p > 0.0) || p > 1.0 + kClosureSlack) throw DomainError(fmt::format("closure {} outside (0, 1]", p));
  if (p >= 1.0) return kInfiniteScatters;
  return std::log(0.1) / std::log(p);
}

/// Multiplier turning the App-D rate coefficient (defined at 1 W/cm^2) into
/// the coefficient at `intensity_mw_cm2`.
inline double intensity_scale(double intensity_mw_cm2) {
  if (!(intensity_mw_cm2 > 0.0)) throw DomainError("intensity must be positive");
  return 1.0e3 / intensity_mw_cm2;
}

/// R^-1 = tau (G + 1) + (2/3) pi h c / I * sum(1 / lambda^3), G = number of
/// driven transitions.
template <ChannelLike C>
double inverse_scattering_rate(double lifetime_s, std::span<const C> channels,
                               double intensity_mw_cm2 = kDefaultIntensity) {
  if (!(lifetime_s > 0.0)) throw DomainError("lifetime must be positive");
  if (channels.empty()) throw DomainError("scattering rate of an empty channel set");
  const double scale = intensity_scale(intensity_mw_cm2);
  double inv_cubes = 0.0;
  for (const auto& c : channels) inv_cubes += 1.0 / (c.wavelength_nm * c.wavelength_nm * c.wavelength_nm);
  return lifetime_s * (static_cast<double>(channels.size()) + 1.0) +
         constants::rate_coefficient() * scale * inv_cubes;
}

/// max(4 K, E / (-ln 0.1 k_B)).
inline double initial_temperature(double energy_cm) {
  if (energy_cm < 0.0) throw DomainError("starting-state energy must be non-negative");
  return std::max(kBufferGasFloorK, energy_cm * constants::initial_temperature_per_wavenumber());
}

/// Energy cutoff E0 = -ln(0.1) k_B T0 for starting states.
inline double starting_energy_cutoff(double t0_k) { return constants::ten_percent_energy_per_kelvin() * t0_k; }

/// n_cool = (p / h) sqrt(3 k_B T m) / sum(BR / lambda).
template <ChannelLike C>
double n_cool(double p, std::span<const C> channels, double t_init_k, double mass_u) {
  if (channels.empty()) throw DomainError("n_cool of an empty channel set");
  if (!(t_init_k > 0.0) || !(mass_u > 0.0)) throw DomainError("temperature and mass must be positive");
  double br_over_lambda = 0.0;
  for (const auto& c : channels) br_over_lambda += c.branching_ratio / c.wavelength_nm;
  if (!(br_over_lambda > 0.0)) throw DomainError("sum of BR / lambda must be positive");
  if (!(p > 0.0)) throw DomainError("closure must be positive");
  const double momentum = std::sqrt(t_init_k * mass_u) * constants::ncool_coefficient();
  return momentum / (br_over_lambda / p);
}

/// Mean momentum of a driven photon, (h / p) sum(BR / lambda), in kg m / s.
template <ChannelLike C>
double mean_photon_momentum(double p, std::span<const C> channels) {
  if (channels.empty()) throw DomainError("mean photon momentum of an empty channel set");
  if (!(p > 0.0)) throw DomainError("closure must be positive");
  double br_over_lambda = 0.0;
  for (const auto& c : channels) br_over_lambda += c.branching_ratio / c.wavelength_nm;
  return constants::planck / constants::nm_to_m * (br_over_lambda / p);
}

/// (t_cool, t10) = (n_cool R^-1, n10 R^-1); t10 is +inf when n10 is.
inline std::pair<double, double> cooling_and_survival_times(double n_cool_count, double n10, double inv_rate_s) {
  if (!(n_cool_count > 0.0) || !(n10 > 0.0) || !(inv_rate_s > 0.0))
    throw DomainError("cooling times need positive inputs");
  const double t10 = std::isinf(n10) ? kInfiniteScatters : n10 * inv_rate_s;
  return {n_cool_count * inv_rate_s, t10};
}

// --- two excited states sharing the same lower states ---

inline double double_lifetime(double tau_a, double tau_b) {
  if (!(tau_a > 0.0) || !(tau_b > 0.0)) throw DomainError("lifetimes must be positive");
  return 0.5 * (tau_a + tau_b);
}

inline double double_closure(double p_a, double p_b) {
  for (double p : {p_a, p_b})
    if (!(p > 0.0) || p > 1.0 + kClosureSlack) throw DomainError(fmt::format("closure {} outside (0, 1]", p));
  return 0.5 * (p_a + p_b);
}

/// The two driven decays (one per excited state) into one shared lower state.
template <ChannelLike C>
struct ChannelPair {
  C a;
  C b;
};

/// R^-1 = tau [(1 + N_g/2) + (1/3) pi h c sum_l (BR_lA + BR_lB) / (I lambda_lA^3 BR_lA + I lambda_lB^3 BR_lB)]
/// with N_e = 2 and N_g = number of shared lower states.
template <ChannelLike C>
double double_inverse_rate(double tau_avg, std::span<const ChannelPair<C>> pairs,
                           double intensity_mw_cm2 = kDefaultIntensity) {
  if (!(tau_avg > 0.0)) throw DomainError("lifetime must be positive");
  if (pairs.empty()) throw DomainError("double scheme needs at least one shared lower state");
  const double scale = intensity_scale(intensity_mw_cm2);
  double sum = 0.0;
  for (const auto& [a, b] : pairs) {
    const double la3 = a.wavelength_nm * a.wavelength_nm * a.wavelength_nm;
    const double lb3 = b.wavelength_nm * b.wavelength_nm * b.wavelength_nm;
    sum += (a.branching_ratio + b.branching_ratio) / (la3 * a.branching_ratio + lb3 * b.branching_ratio);
  }
  // (1/3) pi h c / I is half of the single-scheme coefficient (2/3) pi h c / I.
  return tau_avg * (1.0 + 0.5 * static_cast<double>(pairs.size())) + 0.5 * constants::rate_coefficient() * scale * sum;
}

/// n_cool = (2/h) sqrt(3 k_B T m) / [(1/p_A) sum BR_A/lambda_A + (1/p_B) sum BR_B/lambda_B].
template <ChannelLike C>
double double_n_cool(double p_a, double p_b, std::span<const C> channels_a, std::span<const C> channels_b,
                     double t_init_k, double mass_u) {
  if (channels_a.empty() || channels_b.empty()) throw DomainError("double n_cool needs both channel sets");
  if (!(t_init_k > 0.0) || !(mass_u > 0.0)) throw DomainError("temperature and mass must be positive");
  if (!(p_a > 0.0) || !(p_b > 0.0)) throw DomainError("closures must be positive");
  const auto weighted = [](std::span<const C> chans) {
    double s = 0.0;
    for (const auto& c : chans) s += c.branching_ratio / c.wavelength_nm;
    return s;
  };
  const double denom = weighted(channels_a) / p_a + weighted(channels_b) / p_b;
  if (!(denom > 0.0)) throw DomainError("mean photon momentum must be positive");
  const double momentum = std::sqrt(t_init_k * mass_u) * constants::ncool_coefficient();
  return 2.0 * momentum / denom;
}

/// Closure-weighted average of the two sub-schemes' mean photon momenta.
template <ChannelLike C>
double double_mean_photon_momentum(double p_a, double p_b, std::span<const C> channels_a,
                                   std::span<const C> channels_b) {
  return 0.5 * (mean_photon_momentum(p_a, channels_a) + mean_photon_momentum(p_b, channels_b));
}

}  // namespace coolgraph
