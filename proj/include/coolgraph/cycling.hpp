#pragma once

// Stochastic photon-cycling simulator used to cross-check the closed-form
// rate model. Each trial molecule sits in the excited state, decays along a
// channel drawn from the full branching distribution, and is lost for good
// when the channel is not driven (including branching mass pruned from the
// graph). Deliberately independent of rate_model.hpp.
//
// Random numbers: trials are cut into fixed blocks of kCyclingBlock trials;
// block b draws from std::mt19937_64 seeded with
// splitmix64(seed + (b + 1) * 0x9E3779B97F4A7C15). Results depend only on
// (seed, trials), never on the number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "coolgraph/errors.hpp"
#include "coolgraph/level_graph.hpp"
#include "coolgraph/scheme.hpp"

namespace coolgraph {

inline constexpr std::size_t kCyclingBlock = 1 << 14;

struct CyclingRun {
  CoolingScheme scheme;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t max_scatters = 0;
};

struct SurvivalCurve {
  std::size_t trials = 0;
  std::vector<double> survival;  ///< survival[n]: fraction still bright after n scatters; survival[0] == 1
  double lost_per_scatter = 0.0;  ///< empirical loss probability per scatter

  double at(std::size_t n) const { return survival.at(n); }
};

struct MomentumEstimate {
  double mean = 0.0;            ///< kg m / s
  double standard_error = 0.0;  ///< kg m / s
  std::size_t photons = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t block_seed(std::uint64_t seed, std::size_t block) {
  return splitmix64(seed + (static_cast<std::uint64_t>(block) + 1) * 0x9E3779B97F4A7C15ull);
}

inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Categorical decay distribution of one excited state.
class DecayDistribution {
 public:
  DecayDistribution(const LevelGraph& graph, const CoolingScheme& scheme) {
    if (scheme.kind != SchemeKind::single || scheme.s1_ids.size() != 1)
      throw PreconditionError("cycling simulation supports single excited-state schemes only");
    const auto s1 = graph.require(scheme.s1_ids.front());
    const auto out = graph.outgoing(s1);
    if (out.empty()) throw PreconditionError("excited state has no decay channels in the graph");

    std::vector<bool> matched(scheme.driven_channels.size(), false);
    double total = 0.0;
    for (const auto& e : out) {
      bool driven = false;
      for (std::size_t i = 0; i < scheme.driven_channels.size(); ++i) {
        const auto& c = scheme.driven_channels[i];
        if (!matched[i] && c.upper_id == graph.state(e.upper).id && c.lower_id == graph.state(e.lower).id) {
          matched[i] = true;
          driven = true;
          break;
        }
      }
      total += e.branching_ratio;
      cumulative_.push_back(total);
      driven_.push_back(driven);
      wavelength_m_.push_back(e.wavelength_nm * 1e-9);
    }
    if (std::find(matched.begin(), matched.end(), false) != matched.end())
      throw PreconditionError("a driven channel of the scheme is missing from the graph's decay data");
    // Mass removed by the build floor is an undriven (loss) outcome.
    total += graph.state(s1).pruned_branching;
    cumulative_.push_back(total);
    driven_.push_back(false);
    wavelength_m_.push_back(0.0);
    for (auto& c : cumulative_) c /= total;
    cumulative_.back() = 1.0;
  }

  std::size_t draw(std::mt19937_64& rng) const {
    const double u = unit_uniform(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

  bool driven(std::size_t k) const { return driven_[k]; }
  double wavelength_m(std::size_t k) const { return wavelength_m_[k]; }

 private:
  std::vector<double> cumulative_;
  std::vector<bool> driven_;
  std::vector<double> wavelength_m_;
};

/// Processes blocks [0, n_blocks) across workers; `body(block, rng, trials)`
/// writes into per-block storage owned by the caller.
template <class Body>
void for_each_block(std::size_t trials, std::uint64_t seed, unsigned threads, Body&& body) {
  const std::size_t n_blocks = (trials + kCyclingBlock - 1) / kCyclingBlock;
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n_blocks, 1)));
  const auto run = [&](unsigned w) {
    for (std::size_t b = w; b < n_blocks; b += workers) {
      std::mt19937_64 rng(block_seed(seed, b));
      const std::size_t count = std::min(kCyclingBlock, trials - b * kCyclingBlock);
      body(b, rng, count);
    }
  };
  if (workers <= 1) {
    run(0);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
}

inline void check_run(const CyclingRun& run) {
  if (run.trials < 1) throw PreconditionError("cycling run needs at least one trial");
  if (run.max_scatters < 1) throw PreconditionError("cycling run needs max_scatters >= 1");
}

}  // namespace detail

/// Empirical fraction of molecules still bright after n = 0..max_scatters scatters.
inline SurvivalCurve simulate_survival(const LevelGraph& graph, const CyclingRun& run, unsigned threads = 0) {
  detail::check_run(run);
  const detail::DecayDistribution dist(graph, run.scheme);
  const std::size_t n_blocks = (run.trials + kCyclingBlock - 1) / kCyclingBlock;
  // deaths[b][n]: trials of block b lost exactly at scatter n (1-based).
  std::vector<std::vector<std::uint64_t>> deaths(n_blocks, std::vector<std::uint64_t>(run.max_scatters + 1, 0));
  std::vector<std::uint64_t> scatters(n_blocks, 0);

  detail::for_each_block(run.trials, run.seed, threads, [&](std::size_t b, std::mt19937_64& rng, std::size_t count) {
    for (std::size_t t = 0; t < count; ++t) {
      for (std::size_t n = 1; n <= run.max_scatters; ++n) {
        ++scatters[b];
        if (!dist.driven(dist.draw(rng))) {
          ++deaths[b][n];
          break;
        }
      }
    }
  });

  SurvivalCurve curve;
  curve.trials = run.trials;
  curve.survival.assign(run.max_scatters + 1, 0.0);
  std::uint64_t lost = 0;
  std::uint64_t total_scatters = 0;
  for (std::size_t b = 0; b < n_blocks; ++b) total_scatters += scatters[b];
  for (std::size_t n = 0; n <= run.max_scatters; ++n) {
    for (std::size_t b = 0; b < n_blocks; ++b) lost += deaths[b][n];
    curve.survival[n] = 1.0 - static_cast<double>(lost) / static_cast<double>(run.trials);
  }
  curve.lost_per_scatter = static_cast<double>(lost) / static_cast<double>(total_scatters);
  return curve;
}

/// Mean h / lambda over photons emitted on driven channels, sampled from
/// `trials` molecules cycling for up to `max_scatters` scatters each.
inline MomentumEstimate estimate_mean_photon_momentum(const LevelGraph& graph, const CyclingRun& run,
                                                      unsigned threads = 0) {
  detail::check_run(run);
  constexpr double planck = 6.62607015e-34;
  const detail::DecayDistribution dist(graph, run.scheme);
  const std::size_t n_blocks = (run.trials + kCyclingBlock - 1) / kCyclingBlock;
  struct Acc {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t n = 0;
  };
  std::vector<Acc> acc(n_blocks);

  detail::for_each_block(run.trials, run.seed, threads, [&](std::size_t b, std::mt19937_64& rng, std::size_t count) {
    auto& a = acc[b];
    for (std::size_t t = 0; t < count; ++t) {
      for (std::size_t n = 1; n <= run.max_scatters; ++n) {
        const auto k = dist.draw(rng);
        if (!dist.driven(k)) break;
        const double momentum = planck / dist.wavelength_m(k);
        a.sum += momentum;
        a.sum_sq += momentum * momentum;
        ++a.n;
      }
    }
  });

  Acc total;
  for (const auto& a : acc) {
    total.sum += a.sum;
    total.sum_sq += a.sum_sq;
    total.n += a.n;
  }
  if (total.n == 0) throw PreconditionError("no driven photons were emitted");
  MomentumEstimate est;
  est.photons = total.n;
  est.mean = total.sum / static_cast<double>(total.n);
  const double var = std::max(0.0, total.sum_sq / static_cast<double>(total.n) - est.mean * est.mean);
  est.standard_error = std::sqrt(var / static_cast<double>(total.n));
  return est;
}

}  // namespace coolgraph
