#pragma once

// Random toy line lists for property tests, plus adapters between the oracle's
// plain records and coolgraph's dataset types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "coolgraph/exomol.hpp"
#include "coolgraph/scheme.hpp"
#include "oracle.hpp"

namespace toy {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// At most 30 levels: a low-lying manifold, some metastable "dark" levels
/// (some short-lived), and excited levels with one strong decay plus weaker
/// ones. Ties in A, sub-floor channels and out-of-band decays occur on purpose.
inline oracle::Toy random_toy(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  oracle::Toy t;
  std::int64_t next_id = 1;
  std::vector<std::int64_t> ground, dark, excited;
  const auto add = [&](double e, std::vector<std::int64_t>& bucket) {
    t.levels.push_back({next_id, e});
    bucket.push_back(next_id++);
  };
  const auto n_ground = pick(rng, 2, 10);
  const auto n_dark = pick(rng, 0, 8);
  const auto n_excited = pick(rng, 1, 10);
  for (std::size_t i = 0; i < n_ground; ++i) add(i == 0 ? 0.0 : uniform(rng, 0.0, 1500.0), ground);
  for (std::size_t i = 0; i < n_dark; ++i) add(uniform(rng, 2000.0, 12000.0), dark);
  for (std::size_t i = 0; i < n_excited; ++i) add(uniform(rng, 15000.0, 32000.0), excited);
  // Shuffle ids so that id order does not follow energy order.
  std::vector<std::int64_t> perm(t.levels.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<std::int64_t>(i) * 3 + 7;
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto remap = [&](std::int64_t id) { return perm[static_cast<std::size_t>(id - 1)]; };

  for (const auto d : dark) {
    if (pick(rng, 0, 3) == 0) continue;  // some dark levels never decay
    const auto n = pick(rng, 1, std::min<std::size_t>(3, ground.size()));
    for (std::size_t k = 0; k < n; ++k)
      t.lines.push_back({d, ground[pick(rng, 0, ground.size() - 1)], std::pow(10.0, uniform(rng, 1.0, 7.5))});
  }
  for (const auto e : excited) {
    std::vector<std::int64_t> targets = ground;
    targets.insert(targets.end(), dark.begin(), dark.end());
    for (const auto x : excited)
      if (x != e && pick(rng, 0, 4) == 0) targets.push_back(x);
    std::shuffle(targets.begin(), targets.end(), rng);
    const auto n = pick(rng, 1, std::min<std::size_t>(8, targets.size()));
    const double strong = std::pow(10.0, uniform(rng, 6.0, 8.0));
    double last = strong;
    for (std::size_t k = 0; k < n; ++k) {
      const auto low = targets[k];
      const auto e_low = std::find_if(t.levels.begin(), t.levels.end(), [&](auto& l) { return l.id == low; })->energy;
      const auto e_up = std::find_if(t.levels.begin(), t.levels.end(), [&](auto& l) { return l.id == e; })->energy;
      if (!(e_up > e_low)) continue;
      double a;
      if (k == 0) a = strong;
      else if (pick(rng, 0, 5) == 0) a = last;  // exact tie with the previous channel
      else if (pick(rng, 0, 9) == 0) a = strong * 1e-10;  // below the default floor
      else a = strong * std::pow(10.0, uniform(rng, -6.0, -0.3));
      last = a;
      t.lines.push_back({e, low, a});
    }
  }
  for (auto& l : t.levels) l.id = remap(l.id);
  for (auto& ln : t.lines) {
    ln.up = remap(ln.up);
    ln.low = remap(ln.low);
  }
  return t;
}

/// Parameters under which random toys emit a fair number of schemes.
inline oracle::Params random_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xABCDEFull);
  oracle::Params p;
  p.gmax = pick(rng, 1, 6);
  p.lmin = uniform(rng, 250.0, 400.0);
  p.lmax = uniform(rng, 700.0, 2000.0);
  p.t0 = uniform(rng, 50.0, 800.0);
  p.mass = uniform(rng, 0.5, 6.0);
  p.intensity = pick(rng, 0, 1) ? 1000.0 : uniform(rng, 10.0, 5000.0);
  p.floor = 1e-8;
  p.min_tau = 1e-6;
  return p;
}

/// A toy whose single excited level decays into a few near-degenerate
/// low-lying levels (all in band) and leaks a fraction `leak` out of band.
/// Used where the survival curve must be compared against p^n.
inline oracle::Toy leaky_toy(std::uint64_t seed, double leak) {
  std::mt19937_64 rng(seed);
  oracle::Toy t;
  const auto n_low = pick(rng, 1, 4);
  for (std::size_t i = 0; i < n_low; ++i)
    t.levels.push_back({static_cast<std::int64_t>(i + 1), i == 0 ? 0.0 : uniform(rng, 0.0, 6.0)});
  const std::int64_t dark = 100;
  const std::int64_t up = 200;
  t.levels.push_back({dark, 31000.0});
  t.levels.push_back({up, uniform(rng, 32000.0, 34000.0)});
  std::vector<double> w(n_low);
  double total = 0;
  for (auto& x : w) total += (x = uniform(rng, 0.2, 1.0));
  const double a_total = std::pow(10.0, uniform(rng, 7.0, 8.0));
  for (std::size_t i = 0; i < n_low; ++i)
    t.lines.push_back({up, static_cast<std::int64_t>(i + 1), a_total * (1.0 - leak) * w[i] / total});
  t.lines.push_back({up, dark, a_total * leak});
  return t;
}

inline coolgraph::LevelDataset to_dataset(const oracle::Toy& t) {
  std::vector<coolgraph::RawState> states;
  for (const auto& l : t.levels) states.push_back({l.id, l.energy, {}});
  std::vector<coolgraph::RawTransition> trans;
  for (const auto& ln : t.lines) trans.push_back({ln.up, ln.low, ln.a, std::nullopt});
  return coolgraph::make_dataset(std::move(states), std::move(trans));
}

inline coolgraph::SearchParams to_search(const oracle::Params& p) {
  coolgraph::SearchParams s;
  s.g_max = p.gmax;
  s.lambda_min_nm = p.lmin;
  s.lambda_max_nm = p.lmax;
  s.t0_k = p.t0;
  s.mass_u = p.mass;
  s.intensity_mw_cm2 = p.intensity;
  s.br_floor = p.floor;
  s.min_starting_lifetime_s = p.min_tau;
  s.lifetime_sentinel_s = p.sentinel;
  s.s2_lifetime_floor = p.s2_floor;
  return s;
}

inline oracle::Key key_of(const coolgraph::CoolingScheme& s) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (const auto& c : s.driven_channels) pairs.emplace_back(c.upper_id, c.lower_id);
  std::sort(pairs.begin(), pairs.end());
  return {s.s1_ids.front(), s.s0_ids.front(), pairs};
}

}  // namespace toy
