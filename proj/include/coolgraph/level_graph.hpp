#pragma once

// Immutable decay graph over molecular states.
//
// Storage is compressed-sparse-row: per-state spans into one contiguous edge
// array, each span sorted by descending branching ratio (ties: ascending lower
// id). A reverse index lists, per state, the edges decaying into it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "coolgraph/detail/id_index.hpp"
#include "coolgraph/errors.hpp"
#include "coolgraph/exomol.hpp"

namespace coolgraph {

using StateIndex = std::uint32_t;
using EdgeIndex = std::uint64_t;

inline constexpr double kDefaultLifetimeSentinel = 1.0e4;  ///< s, ground / metastable states
inline constexpr double kDefaultBranchingFloor = 1.0e-8;

inline double wavelength_nm(double upper_energy, double lower_energy) {
  return 1.0e7 / (upper_energy - lower_energy);
}

struct MolecularState {
  StateId id = 0;
  double energy = 0.0;      ///< cm^-1
  double lifetime_s = 0.0;  ///< 1 / sum(A), or the sentinel when the state never decays
  bool decays = false;      ///< has at least one tabulated decay channel
  double pruned_branching = 0.0;  ///< branching mass dropped by the build floor
  Attributes attrs;
};

/// Public value form of one spontaneous decay.
struct DecayChannel {
  StateId upper_id = 0;
  StateId lower_id = 0;
  double einstein_a = 0.0;       ///< s^-1
  double branching_ratio = 0.0;  ///< A / sum(A) over all decays of the upper state
  double wavelength_nm = 0.0;

  friend bool operator==(const DecayChannel&, const DecayChannel&) = default;
};

/// Compact stored edge; endpoints are dense state indices.
struct Edge {
  StateIndex upper = 0;
  StateIndex lower = 0;
  double einstein_a = 0.0;
  double branching_ratio = 0.0;
  double wavelength_nm = 0.0;
};

struct GraphOptions {
  double br_floor = kDefaultBranchingFloor;  ///< channels with BR below this are dropped after normalisation
  double lifetime_sentinel_s = kDefaultLifetimeSentinel;
  double wavenumber_tolerance = 0.01;  ///< cm^-1; larger file/level disagreements are reported
};

struct BuildStats {
  std::size_t transitions = 0;
  std::size_t pruned = 0;
  std::size_t wavenumber_mismatches = 0;
  std::string first_mismatch;
};

/// Open wavelength interval (min_nm, max_nm).
struct WavelengthBand {
  double min_nm = 0.0;
  double max_nm = 0.0;
  bool contains(double nm) const noexcept { return nm > min_nm && nm < max_nm; }
};

class LevelGraph {
 public:
  LevelGraph() = default;

  /// Assembles a graph from already-sorted CSR parts (used by the builder and
  /// the snapshot reader).
  static LevelGraph from_parts(std::vector<MolecularState> states, std::vector<EdgeIndex> offsets,
                               std::vector<Edge> edges, GraphOptions options, BuildStats stats) {
    LevelGraph g;
    g.states_ = std::move(states);
    g.out_offsets_ = std::move(offsets);
    g.edges_ = std::move(edges);
    g.options_ = options;
    g.stats_ = std::move(stats);
    if (g.out_offsets_.size() != g.states_.size() + 1) throw DataError("graph offsets do not match state count");
    std::vector<StateId> ids;
    ids.reserve(g.states_.size());
    for (const auto& s : g.states_) ids.push_back(s.id);
    g.index_ = detail::IdIndex(ids);
    g.build_incoming();
    return g;
  }

  std::size_t state_count() const noexcept { return states_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const MolecularState& state(StateIndex i) const { return states_[i]; }
  const std::vector<MolecularState>& states() const noexcept { return states_; }

  std::optional<StateIndex> find(StateId id) const noexcept {
    const auto i = index_.find(id);
    if (i == detail::IdIndex::npos) return std::nullopt;
    return i;
  }

  StateIndex require(StateId id) const {
    if (const auto i = find(id)) return *i;
    throw LookupError(fmt::format("unknown state id {}", id));
  }

  std::span<const Edge> outgoing(StateIndex i) const {
    return {edges_.data() + out_offsets_[i], static_cast<std::size_t>(out_offsets_[i + 1] - out_offsets_[i])};
  }

  /// Indices (into `edges()`) of channels decaying into state i.
  std::span<const EdgeIndex> incoming(StateIndex i) const {
    return {in_edges_.data() + in_offsets_[i], static_cast<std::size_t>(in_offsets_[i + 1] - in_offsets_[i])};
  }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<EdgeIndex>& offsets() const noexcept { return out_offsets_; }

  DecayChannel channel(const Edge& e) const {
    return {states_[e.upper].id, states_[e.lower].id, e.einstein_a, e.branching_ratio, e.wavelength_nm};
  }

  std::vector<DecayChannel> channels(StateId upper_id) const {
    std::vector<DecayChannel> out;
    for (const auto& e : outgoing(require(upper_id))) out.push_back(channel(e));
    return out;
  }

  const GraphOptions& options() const noexcept { return options_; }
  const BuildStats& stats() const noexcept { return stats_; }

 private:
  void build_incoming() {
    in_offsets_.assign(states_.size() + 1, 0);
    for (const auto& e : edges_) ++in_offsets_[e.lower + 1];
    for (std::size_t i = 0; i < states_.size(); ++i) in_offsets_[i + 1] += in_offsets_[i];
    in_edges_.resize(edges_.size());
    auto cursor = in_offsets_;
    for (EdgeIndex k = 0; k < edges_.size(); ++k) in_edges_[cursor[edges_[k].lower]++] = k;
  }

  std::vector<MolecularState> states_;
  std::vector<EdgeIndex> out_offsets_;
  std::vector<Edge> edges_;
  std::vector<EdgeIndex> in_offsets_;
  std::vector<EdgeIndex> in_edges_;
  detail::IdIndex index_;
  GraphOptions options_;
  BuildStats stats_;
};

/// Builds the decay graph in two passes over the transitions: the first
/// accumulates A-sums and degrees, the second fills the edge array. Lifetimes
/// are 1/sum(A), branching ratios A/sum(A); pruning by `br_floor` happens after
/// normalisation so surviving ratios keep their physical values.
inline LevelGraph build_graph(const LevelDataset& dataset, const GraphOptions& options = {}) {
  if (!(options.lifetime_sentinel_s > 0.0)) throw DomainError("lifetime sentinel must be positive");
  if (options.br_floor < 0.0) throw DomainError("branching-ratio floor must be non-negative");

  const auto n = dataset.states.size();
  const auto index = detail::index_states(dataset.states);
  std::vector<double> a_sum(n, 0.0);
  std::vector<EdgeIndex> offsets(n + 1, 0);
  BuildStats stats;

  const auto resolve = [&](const RawTransition& t) {
    const auto up = index.find(t.upper);
    const auto lo = index.find(t.lower);
    if (up == detail::IdIndex::npos || lo == detail::IdIndex::npos)
      throw ReferentialIntegrityError(fmt::format("transition {} -> {} references an unknown state", t.upper, t.lower),
                                      up == detail::IdIndex::npos ? t.upper : t.lower);
    return std::pair{up, lo};
  };

  dataset.transitions.for_each([&](const RawTransition& t) {
    const auto [up, lo] = resolve(t);
    const double gap = dataset.states[up].energy - dataset.states[lo].energy;
    if (!(gap > 0.0))
      throw DataError(fmt::format("transition {} -> {}: upper energy {} is not above lower energy {}", t.upper,
                                  t.lower, dataset.states[up].energy, dataset.states[lo].energy));
    if (t.wavenumber && std::abs(*t.wavenumber - gap) > options.wavenumber_tolerance) {
      if (stats.wavenumber_mismatches++ == 0)
        stats.first_mismatch = fmt::format("{} -> {}: file {} cm^-1, levels {} cm^-1", t.upper, t.lower,
                                           *t.wavenumber, gap);
    }
    a_sum[up] += t.einstein_a;
    ++offsets[up + 1];
    ++stats.transitions;
  });
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];

  std::vector<Edge> edges(offsets[n]);
  {
    auto cursor = offsets;
    dataset.transitions.for_each([&](const RawTransition& t) {
      const auto [up, lo] = resolve(t);
      edges[cursor[up]++] = Edge{up, lo, t.einstein_a, t.einstein_a / a_sum[up],
                                 wavelength_nm(dataset.states[up].energy, dataset.states[lo].energy)};
    });
  }

  std::vector<MolecularState> states(n);
  std::vector<EdgeIndex> kept_offsets(n + 1, 0);
  EdgeIndex write = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& raw = dataset.states[i];
    auto& s = states[i];
    s.id = raw.id;
    s.energy = raw.energy;
    s.attrs = raw.attrs;
    s.decays = offsets[i + 1] > offsets[i];
    s.lifetime_s = s.decays ? 1.0 / a_sum[i] : options.lifetime_sentinel_s;

    const auto begin = edges.begin() + static_cast<std::ptrdiff_t>(offsets[i]);
    const auto end = edges.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]);
    std::stable_sort(begin, end, [&](const Edge& x, const Edge& y) {
      if (x.branching_ratio != y.branching_ratio) return x.branching_ratio > y.branching_ratio;
      return dataset.states[x.lower].id < dataset.states[y.lower].id;
    });
    kept_offsets[i] = write;
    for (auto it = begin; it != end; ++it) {
      if (it->branching_ratio < options.br_floor) {
        s.pruned_branching += it->branching_ratio;
        ++stats.pruned;
        continue;
      }
      edges[write++] = *it;
    }
  }
  kept_offsets[n] = write;
  edges.resize(write);
  edges.shrink_to_fit();

  if (stats.wavenumber_mismatches > 0)
    std::clog << fmt::format("warning: {} transition wavenumber(s) differ from level energies by more than {} cm^-1 "
                             "(first: {}); level energies are used\n",
                             stats.wavenumber_mismatches, options.wavenumber_tolerance, stats.first_mismatch);

  return LevelGraph::from_parts(std::move(states), std::move(kept_offsets), std::move(edges), options,
                                std::move(stats));
}

/// The G strongest in-band channels above `br_floor` of one upper state.
/// Channels tied with the G-th ratio are all included, so the result can be
/// longer than `g`.
inline std::vector<DecayChannel> top_channels(const LevelGraph& graph, StateId upper_id, std::size_t g,
                                              WavelengthBand band, double br_floor) {
  if (g < 1) throw DomainError("top_channels needs g >= 1");
  if (!(band.min_nm < band.max_nm)) throw DomainError("wavelength band must satisfy min < max");
  const auto upper = graph.require(upper_id);
  std::vector<DecayChannel> eligible;
  for (const auto& e : graph.outgoing(upper))
    if (band.contains(e.wavelength_nm) && e.branching_ratio > br_floor) eligible.push_back(graph.channel(e));
  if (eligible.size() <= g) return eligible;
  const double threshold = eligible[g - 1].branching_ratio;
  std::erase_if(eligible, [&](const DecayChannel& c) { return c.branching_ratio < threshold; });
  return eligible;
}

}  // namespace coolgraph
