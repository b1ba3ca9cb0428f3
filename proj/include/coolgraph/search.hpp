#pragma once

// Enumeration of laser cooling schemes over a LevelGraph.
//
// Single excited-state schemes follow four steps: starting states S0 (cold
// enough and long-lived), reachable excited states S1 (an in-band decay S1 ->
// S0 exists), their decay targets S2, and finally for each S1 the G strongest
// in-band channels, kept when n_cool < n10 and every driven lower state
// outlives the time a molecule spends there (t_cool * BR < tau(S2)).
//
// Double schemes pair two S1 states that share a starting state and drive the
// same set of lower states.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "coolgraph/level_graph.hpp"
#include "coolgraph/rate_model.hpp"
#include "coolgraph/scheme.hpp"

namespace coolgraph {

struct CandidateSets {
  std::vector<StateId> s0;
  std::vector<StateId> s1;
  std::vector<StateId> s2;
};

namespace detail {

inline std::vector<StateId> to_ids(const LevelGraph& graph, const std::vector<StateIndex>& indices) {
  std::vector<StateId> ids;
  ids.reserve(indices.size());
  for (auto i : indices) ids.push_back(graph.state(i).id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline std::vector<StateIndex> to_indices(const LevelGraph& graph, const std::vector<StateId>& ids) {
  std::vector<StateIndex> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(graph.require(id));
  return out;
}

inline WavelengthBand band_of(const SearchParams& params) { return {params.lambda_min_nm, params.lambda_max_nm}; }

inline std::vector<StateIndex> starting_states(const LevelGraph& graph, const SearchParams& params) {
  const double cutoff = starting_energy_cutoff(params.t0_k);
  std::vector<StateIndex> out;
  for (StateIndex i = 0; i < graph.state_count(); ++i) {
    const auto& s = graph.state(i);
    if (s.energy < cutoff && s.lifetime_s > params.min_starting_lifetime_s) out.push_back(i);
  }
  return out;
}

/// S1 index -> starting states it can be driven from, both ascending by id.
inline std::vector<std::pair<StateIndex, std::vector<StateIndex>>> excited_with_sources(
    const LevelGraph& graph, const std::vector<StateIndex>& s0, const SearchParams& params) {
  const auto band = band_of(params);
  std::map<StateId, std::pair<StateIndex, std::vector<StateIndex>>> by_id;
  for (const auto s0_index : s0) {
    for (const auto k : graph.incoming(s0_index)) {
      const auto& e = graph.edges()[k];
      if (!band.contains(e.wavelength_nm)) continue;
      auto& slot = by_id[graph.state(e.upper).id];
      slot.first = e.upper;
      if (std::find(slot.second.begin(), slot.second.end(), s0_index) == slot.second.end())
        slot.second.push_back(s0_index);
    }
  }
  std::vector<std::pair<StateIndex, std::vector<StateIndex>>> out;
  out.reserve(by_id.size());
  for (auto& [id, entry] : by_id) {
    std::sort(entry.second.begin(), entry.second.end(),
              [&](StateIndex a, StateIndex b) { return graph.state(a).id < graph.state(b).id; });
    out.push_back(std::move(entry));
  }
  return out;
}

/// In-band channels above the floor whose BR reaches the g-th largest such
/// BR; with the lower-state lifetime floor, short-lived targets are then
/// dropped from the driven set.
inline std::vector<Edge> driven_set(const LevelGraph& graph, StateIndex s1, std::size_t g,
                                    const SearchParams& params) {
  const auto band = band_of(params);
  std::vector<Edge> eligible;
  for (const auto& e : graph.outgoing(s1))
    if (band.contains(e.wavelength_nm) && e.branching_ratio > params.br_floor) eligible.push_back(e);
  if (eligible.size() > g) {
    const double threshold = eligible[g - 1].branching_ratio;
    std::erase_if(eligible, [&](const Edge& e) { return e.branching_ratio < threshold; });
  }
  if (params.s2_lifetime_floor)
    std::erase_if(eligible,
                  [&](const Edge& e) { return !(graph.state(e.lower).lifetime_s > params.min_starting_lifetime_s); });
  return eligible;
}

inline double min_tau_br_ratio(const LevelGraph& graph, std::span<const Edge> driven) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : driven) best = std::min(best, graph.state(e.lower).lifetime_s / e.branching_ratio);
  return best;
}

/// Temperature-independent part of a single scheme's figures.
struct SingleCore {
  double p = 0.0;
  double n10 = 0.0;
  double inv_rate_s = 0.0;
  double min_tau_br = 0.0;
};

inline SingleCore single_core(const LevelGraph& graph, StateIndex s1, std::span<const Edge> driven,
                              const SearchParams& params) {
  SingleCore core;
  core.p = std::min(closure(driven), 1.0 + kClosureSlack);
  core.n10 = n_ten_percent(core.p);
  core.inv_rate_s = inverse_scattering_rate(graph.state(s1).lifetime_s, driven, params.intensity_mw_cm2);
  core.min_tau_br = min_tau_br_ratio(graph, driven);
  return core;
}

inline SchemeFigures complete_figures(double p, double n10, double inv_rate_s, double min_tau_br, double t_init,
                                      double n_cool_count) {
  SchemeFigures f;
  f.closure_p = p;
  f.n10 = n10;
  f.inv_rate_s = inv_rate_s;
  f.t_init_k = t_init;
  f.n_cool = n_cool_count;
  std::tie(f.t_cool_s, f.t10_s) = cooling_and_survival_times(n_cool_count, n10, inv_rate_s);
  f.min_tau_br_ratio_s = min_tau_br;
  return f;
}

inline bool contains_lower(std::span<const Edge> driven, StateIndex lower) {
  return std::any_of(driven.begin(), driven.end(), [&](const Edge& e) { return e.lower == lower; });
}

/// Single-scheme candidates of one S1 for one G. `keep` decides emission from
/// the figures (the normal predicate, or the relaxed one of the dual search).
template <class Keep>
void schemes_for_excited(const LevelGraph& graph, StateIndex s1, const std::vector<StateIndex>& sources,
                         std::size_t g, const SearchParams& params, Keep&& keep, std::vector<CoolingScheme>& out) {
  const auto driven = driven_set(graph, s1, g, params);
  if (driven.empty()) return;
  const auto core = single_core(graph, s1, driven, params);
  const std::span<const Edge> span(driven);

  for (const auto s0 : sources) {
    if (!contains_lower(span, s0)) continue;
    const double t_init = initial_temperature(graph.state(s0).energy);
    const double n = n_cool(core.p, span, t_init, params.mass_u);
    CoolingScheme scheme;
    scheme.figures = complete_figures(core.p, core.n10, core.inv_rate_s, core.min_tau_br, t_init, n);
    if (params.relaxed_4k) {
      const double n4 = n * std::sqrt(kBufferGasFloorK / t_init);
      scheme.relaxed = complete_figures(core.p, core.n10, core.inv_rate_s, core.min_tau_br, t_init, n4);
    }
    if (!keep(scheme.deciding_figures())) continue;
    scheme.kind = SchemeKind::single;
    scheme.s1_ids = {graph.state(s1).id};
    scheme.s0_ids = {graph.state(s0).id};
    scheme.g = g;
    scheme.driven_channels.reserve(driven.size());
    for (const auto& e : driven) scheme.driven_channels.push_back(graph.channel(e));
    out.push_back(std::move(scheme));
  }
}

inline unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

/// Runs `work(item, out)` over items split into contiguous chunks, one per
/// worker, and concatenates chunk outputs in item order.
template <class Item, class Work>
std::vector<CoolingScheme> parallel_collect(const std::vector<Item>& items, unsigned threads, Work&& work) {
  const unsigned workers = worker_count(threads, items.size());
  std::vector<std::vector<CoolingScheme>> parts(workers);
  const auto run = [&](unsigned w) {
    const std::size_t begin = items.size() * w / workers;
    const std::size_t end = items.size() * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) work(items[i], parts[w]);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  std::vector<CoolingScheme> out;
  for (auto& part : parts) std::move(part.begin(), part.end(), std::back_inserter(out));
  return out;
}

inline auto scheme_key(const CoolingScheme& s) {
  std::vector<std::pair<StateId, StateId>> channels;
  for (const auto& c : s.driven_channels) channels.emplace_back(c.upper_id, c.lower_id);
  std::sort(channels.begin(), channels.end());
  return std::tuple(s.kind, s.s1_ids, s.s0_ids, std::move(channels));
}

inline void sort_and_dedupe(std::vector<CoolingScheme>& schemes) {
  std::stable_sort(schemes.begin(), schemes.end(), [](const CoolingScheme& a, const CoolingScheme& b) {
    const auto& fa = a.deciding_figures();
    const auto& fb = b.deciding_figures();
    if (fa.t_cool_s != fb.t_cool_s) return fa.t_cool_s < fb.t_cool_s;
    if (a.num_decays() != b.num_decays()) return a.num_decays() < b.num_decays();
    if (fa.ratio() != fb.ratio()) return fa.ratio() < fb.ratio();
    return scheme_key(a) < scheme_key(b);
  });
  std::vector<CoolingScheme> unique;
  unique.reserve(schemes.size());
  for (auto& s : schemes)
    if (unique.empty() || scheme_key(unique.back()) != scheme_key(s)) unique.push_back(std::move(s));
  // Equal keys imply equal figures, so duplicates are adjacent after the sort.
  schemes = std::move(unique);
}

}  // namespace detail

/// States colder than E0 = -ln(0.1) k_B T0 that live longer than the
/// minimal starting lifetime (sentinel lifetimes qualify). Ascending ids.
inline std::vector<StateId> find_starting_states(const LevelGraph& graph, const SearchParams& params) {
  return detail::to_ids(graph, detail::starting_states(graph, params));
}

/// States with an in-band decay into any of `s0`.
inline std::vector<StateId> find_reachable_excited(const LevelGraph& graph, const std::vector<StateId>& s0,
                                                   const SearchParams& params) {
  std::vector<StateId> out;
  for (const auto& [s1, sources] : detail::excited_with_sources(graph, detail::to_indices(graph, s0), params))
    out.push_back(graph.state(s1).id);
  return out;
}

/// Lower states of the in-band, above-floor decays of `s1`.
inline std::vector<StateId> find_reachable(const LevelGraph& graph, const std::vector<StateId>& s1,
                                           const SearchParams& params) {
  const auto band = detail::band_of(params);
  std::vector<StateId> out;
  for (const auto id : s1)
    for (const auto& e : graph.outgoing(graph.require(id)))
      if (band.contains(e.wavelength_nm) && e.branching_ratio > params.br_floor) out.push_back(graph.state(e.lower).id);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline CandidateSets find_candidates(const LevelGraph& graph, const SearchParams& params) {
  CandidateSets sets;
  sets.s0 = find_starting_states(graph, params);
  sets.s1 = find_reachable_excited(graph, sets.s0, params);
  sets.s2 = find_reachable(graph, sets.s1, params);
  return sets;
}

/// Viable single-S1 schemes driving the G strongest channels, one per
/// (S1, S0) pair, sorted by (t_cool, number of decays, n_cool / n10).
inline std::vector<CoolingScheme> enumerate_single_schemes(const LevelGraph& graph, const SearchParams& params,
                                                           std::size_t g, unsigned threads = 0) {
  params.validate();
  if (g < 1) throw UsageError("g must be at least 1");
  const auto excited = detail::excited_with_sources(graph, detail::starting_states(graph, params), params);
  auto out = detail::parallel_collect(excited, threads, [&](const auto& item, std::vector<CoolingScheme>& sink) {
    detail::schemes_for_excited(graph, item.first, item.second, g, params,
                                [](const SchemeFigures& f) { return f.viable(); }, sink);
  });
  detail::sort_and_dedupe(out);
  return out;
}

/// Union of single-scheme searches for G = 1..g_max, de-duplicated on
/// (S1, driven channel set, S0).
inline std::vector<CoolingScheme> sweep(const LevelGraph& graph, const SearchParams& params, unsigned threads = 0) {
  params.validate();
  const auto excited = detail::excited_with_sources(graph, detail::starting_states(graph, params), params);
  auto out = detail::parallel_collect(excited, threads, [&](const auto& item, std::vector<CoolingScheme>& sink) {
    for (std::size_t g = 1; g <= params.g_max; ++g)
      detail::schemes_for_excited(graph, item.first, item.second, g, params,
                                  [](const SchemeFigures& f) { return f.viable(); }, sink);
  });
  detail::sort_and_dedupe(out);
  return out;
}

/// Schemes built on two excited states that share a starting state and drive
/// the same lower states. Candidates come from a single-scheme pass with the
/// relaxed predicate n_cool / 2 < n10; pairs whose lifetimes differ by more
/// than `double_lifetime_ratio_max` are skipped.
inline std::vector<CoolingScheme> enumerate_double_schemes(const LevelGraph& graph, const SearchParams& params,
                                                           unsigned threads = 0) {
  params.validate();
  const auto excited = detail::excited_with_sources(graph, detail::starting_states(graph, params), params);
  auto candidates = detail::parallel_collect(excited, threads, [&](const auto& item, std::vector<CoolingScheme>& sink) {
    for (std::size_t g = 1; g <= params.g_max; ++g)
      detail::schemes_for_excited(graph, item.first, item.second, g, params,
                                  [](const SchemeFigures& f) { return f.n_cool / 2.0 < f.n10; }, sink);
  });
  detail::sort_and_dedupe(candidates);

  // Group candidates by (S0, driven lower-state set); a lower state driven
  // twice from the same S1 cannot be paired one-to-one and is skipped.
  std::map<std::pair<StateId, std::vector<StateId>>, std::vector<const CoolingScheme*>> groups;
  for (const auto& c : candidates) {
    auto lowers = c.lower_ids();
    if (lowers.size() != c.driven_channels.size()) continue;
    groups[{c.s0_ids.front(), std::move(lowers)}].push_back(&c);
  }

  std::vector<CoolingScheme> out;
  for (const auto& [key, members] : groups) {
    const auto s0 = graph.require(key.first);
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = 0; j < members.size(); ++j) {
        const auto& a = *members[i];
        const auto& b = *members[j];
        if (!(a.s1_ids.front() < b.s1_ids.front())) continue;
        const double tau_a = graph.state(graph.require(a.s1_ids.front())).lifetime_s;
        const double tau_b = graph.state(graph.require(b.s1_ids.front())).lifetime_s;
        if (std::max(tau_a, tau_b) / std::min(tau_a, tau_b) > params.double_lifetime_ratio_max) continue;

        std::vector<ChannelPair<DecayChannel>> pairs;
        for (const auto& ca : a.driven_channels)
          for (const auto& cb : b.driven_channels)
            if (ca.lower_id == cb.lower_id) pairs.push_back({ca, cb});
        const std::span<const DecayChannel> chans_a(a.driven_channels);
        const std::span<const DecayChannel> chans_b(b.driven_channels);

        const double tau = double_lifetime(tau_a, tau_b);
        const double p_a = std::min(closure(chans_a), 1.0);
        const double p_b = std::min(closure(chans_b), 1.0);
        const double p = double_closure(p_a, p_b);
        const double n10 = n_ten_percent(p);
        const double inv_rate = double_inverse_rate<DecayChannel>(tau, pairs, params.intensity_mw_cm2);
        double min_tau_br = std::numeric_limits<double>::infinity();
        for (const auto& [ca, cb] : pairs) {
          const double occupancy = 0.5 * (ca.branching_ratio + cb.branching_ratio);
          min_tau_br = std::min(min_tau_br, graph.state(graph.require(ca.lower_id)).lifetime_s / occupancy);
        }
        const double t_init = initial_temperature(graph.state(s0).energy);
        const double n = double_n_cool(p_a, p_b, chans_a, chans_b, t_init, params.mass_u);

        CoolingScheme scheme;
        scheme.kind = SchemeKind::dual;
        scheme.s1_ids = {a.s1_ids.front(), b.s1_ids.front()};
        scheme.s0_ids = {key.first};
        scheme.g = std::max(a.g, b.g);
        scheme.figures = detail::complete_figures(p, n10, inv_rate, min_tau_br, t_init, n);
        if (params.relaxed_4k) {
          const double n4 = n * std::sqrt(kBufferGasFloorK / t_init);
          scheme.relaxed = detail::complete_figures(p, n10, inv_rate, min_tau_br, t_init, n4);
        }
        if (!scheme.deciding_figures().viable()) continue;
        scheme.driven_channels = a.driven_channels;
        scheme.driven_channels.insert(scheme.driven_channels.end(), b.driven_channels.begin(),
                                      b.driven_channels.end());
        out.push_back(std::move(scheme));
      }
    }
  }
  detail::sort_and_dedupe(out);
  return out;
}

}  // namespace coolgraph
