#pragma once

// Plain data describing search parameters and enumerated schemes. Holds no
// formulas, so consumers such as the cycling simulator stay independent of
// the closed-form rate model.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <fmt/format.h>

#include "coolgraph/errors.hpp"
#include "coolgraph/level_graph.hpp"

namespace coolgraph {

inline constexpr double kInfiniteScatters = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultIntensity = 1.0e3;  ///< mW/cm^2

/// User-preset search knobs.
struct SearchParams {
  std::size_t g_max = 1;               ///< largest number of driven transitions
  double lambda_min_nm = 0.0;
  double lambda_max_nm = 0.0;
  double t0_k = 500.0;                 ///< maximal initial gas temperature
  double mass_u = 0.0;
  double intensity_mw_cm2 = kDefaultIntensity;
  double br_floor = 1e-8;
  double min_starting_lifetime_s = 1e-6;
  double lifetime_sentinel_s = 1e4;
  bool relaxed_4k = false;             ///< also evaluate every scheme as if T_init were 4 K
  bool s2_lifetime_floor = true;       ///< drop driven channels whose lower state lives <= min_starting_lifetime_s
  double double_lifetime_ratio_max = 1.5;

  void validate() const {
    if (g_max < 1) throw UsageError("g_max must be at least 1");
    if (!(lambda_min_nm < lambda_max_nm))
      throw UsageError(fmt::format("lambda_min_nm ({}) must be below lambda_max_nm ({})", lambda_min_nm, lambda_max_nm));
    if (!(lambda_min_nm >= 0.0)) throw UsageError("lambda_min_nm must be non-negative");
    if (!(t0_k > 0.0)) throw UsageError("t0_k must be positive");
    if (!(mass_u > 0.0)) throw UsageError("mass_u must be positive");
    if (!(intensity_mw_cm2 > 0.0)) throw UsageError("intensity_mw_cm2 must be positive");
    if (br_floor < 0.0) throw UsageError("br_floor must be non-negative");
    if (!(min_starting_lifetime_s >= 0.0)) throw UsageError("min_starting_lifetime_s must be non-negative");
    if (!(lifetime_sentinel_s > 0.0)) throw UsageError("lifetime_sentinel_s must be positive");
    if (!(double_lifetime_ratio_max >= 1.0)) throw UsageError("double_lifetime_ratio_max must be at least 1");
  }
};

/// Figures of merit of one scheme.
struct SchemeFigures {
  double closure_p = 0.0;
  double n10 = 0.0;           ///< may be +inf for a perfectly closed scheme
  double inv_rate_s = 0.0;    ///< R^-1
  double t_init_k = 0.0;
  double n_cool = 0.0;
  double t_cool_s = 0.0;
  double t10_s = 0.0;
  double min_tau_br_ratio_s = 0.0;  ///< min over driven lower states of lifetime / BR

  double ratio() const noexcept { return n_cool / n10; }
  bool closed_enough() const noexcept { return n_cool < n10; }
  bool lower_states_survive() const noexcept { return t_cool_s < min_tau_br_ratio_s; }
  bool viable() const noexcept { return closed_enough() && lower_states_survive(); }
};

enum class SchemeKind { single, dual };

struct CoolingScheme {
  SchemeKind kind = SchemeKind::single;
  std::vector<StateId> s1_ids;  ///< one id, or two for a dual scheme
  std::vector<StateId> s0_ids;  ///< the starting state this row was emitted for
  std::vector<DecayChannel> driven_channels;  ///< grouped by upper state, descending BR within each
  std::size_t g = 0;            ///< requested number of lasers that produced the driven set
  SchemeFigures figures;        ///< at T_init derived from the starting state
  std::optional<SchemeFigures> relaxed;  ///< same scheme assuming T_init = 4 K

  std::size_t num_decays() const noexcept { return driven_channels.size(); }

  /// Figures the emission predicate was evaluated on.
  const SchemeFigures& deciding_figures() const noexcept { return relaxed ? *relaxed : figures; }

  std::vector<StateId> lower_ids() const {
    std::vector<StateId> out;
    for (const auto& c : driven_channels) out.push_back(c.lower_id);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

}  // namespace coolgraph
