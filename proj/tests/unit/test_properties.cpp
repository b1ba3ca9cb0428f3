#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "coolgraph/exomol.hpp"
#include "coolgraph/level_graph.hpp"
#include "coolgraph/rate_model.hpp"
#include "coolgraph/search.hpp"
#include "../support/oracle.hpp"
#include "../support/toy.hpp"

using namespace coolgraph;

TEST(Property, BranchingRatiosSumToOne) {
  GraphOptions o;
  o.br_floor = 0.0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto g = build_graph(toy::to_dataset(toy::random_toy(seed)), o);
    for (StateIndex i = 0; i < g.state_count(); ++i) {
      const auto out = g.outgoing(i);
      if (out.empty()) continue;
      double sum = 0;
      for (const auto& e : out) sum += e.branching_ratio;
      EXPECT_NEAR(sum, 1.0, 1e-9) << "seed " << seed;
    }
  }
}

TEST(Property, TopChannelsAreNested) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto g = build_graph(toy::to_dataset(toy::random_toy(seed)));
    const WavelengthBand band{300.0, 1500.0};
    for (const auto& s : g.states()) {
      if (!s.decays) continue;
      for (std::size_t k = 1; k < 8; ++k) {
        const auto small = top_channels(g, s.id, k, band, 1e-8);
        const auto large = top_channels(g, s.id, k + 1, band, 1e-8);
        EXPECT_LE(small.size(), large.size());
        for (const auto& c : small) EXPECT_NE(std::find(large.begin(), large.end(), c), large.end());
      }
    }
  }
}

TEST(Property, NCoolScalesWithSqrtT) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<DecayChannel> c;
    const auto n = 1 + static_cast<int>(u(rng) * 6);
    double left = 1.0;
    for (int i = 0; i < n; ++i) {
      const double br = left * u(rng);
      left -= br;
      c.push_back({1, i + 2, 1.0, br, 250.0 + 1000.0 * u(rng)});
    }
    const std::span<const DecayChannel> sp(c);
    const double p = closure(sp);
    if (!(p > 0)) continue;
    const double t1 = 4.0 + 500 * u(rng), t2 = 4.0 + 500 * u(rng), m = 1 + 200 * u(rng);
    const double ratio = n_cool(p, sp, t1, m) / n_cool(p, sp, t2, m);
    EXPECT_NEAR(ratio / std::sqrt(t1 / t2), 1.0, 1e-12);
  }
}

TEST(Property, DoubleSchemeReducesExactlyForIdenticalHalves) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<DecayChannel> c;
    double left = 1.0;
    for (int i = 0; i < 4; ++i) {
      const double br = left * u(rng);
      left -= br;
      c.push_back({1, i + 2, 1.0, br, 300.0 + 900.0 * u(rng)});
    }
    const std::span<const DecayChannel> sp(c);
    const double p = closure(sp);
    const double tau = 1e-8 + 1e-7 * u(rng);
    const double t = 4 + 100 * u(rng), m = 1 + 100 * u(rng);
    EXPECT_EQ(double_closure(p, p), p);
    EXPECT_EQ(double_lifetime(tau, tau), tau);
    EXPECT_EQ(double_n_cool(p, p, sp, sp, t, m), n_cool(p, sp, t, m));
    EXPECT_EQ(double_mean_photon_momentum(p, p, sp, sp), mean_photon_momentum(p, sp));
  }
}

TEST(Property, SearchEqualsBruteForceOnRandomToys) {
  std::size_t graphs = 0, schemes = 0, nonempty = 0;
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const auto t = toy::random_toy(seed);
    ASSERT_LE(t.levels.size(), 30u);
    const auto op = toy::random_params(seed);
    const auto expected = oracle::brute_force(t, op);
    const auto got = sweep(build_graph(toy::to_dataset(t)), toy::to_search(op));
    ++graphs;
    schemes += got.size();
    nonempty += got.empty() ? 0 : 1;
    std::set<oracle::Key> keys;
    for (const auto& s : got) {
      keys.insert(toy::key_of(s));
      const auto it = expected.find(toy::key_of(s));
      ASSERT_NE(it, expected.end()) << "seed " << seed << ": search emitted a scheme the oracle rejects";
      EXPECT_NEAR(s.figures.n_cool, it->second.n_cool, 1e-9 * it->second.n_cool);
      EXPECT_NEAR(s.figures.t_cool_s, it->second.t_cool, 1e-9 * it->second.t_cool);
      EXPECT_NEAR(s.figures.closure_p, it->second.p, 1e-12);
    }
    EXPECT_EQ(keys.size(), got.size()) << "duplicates for seed " << seed;
    EXPECT_EQ(got.size(), expected.size()) << "seed " << seed;
  }
  EXPECT_GE(graphs, 100u);
  // Guard against a vacuous comparison.
  EXPECT_GE(nonempty, 30u);
  RecordProperty("schemes", static_cast<int>(schemes));
}

TEST(Property, SearchIsDeterministic) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto g = build_graph(toy::to_dataset(toy::random_toy(seed)));
    const auto p = toy::to_search(toy::random_params(seed));
    const auto a = sweep(g, p, 2);
    const auto b = sweep(g, p, 3);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].driven_channels, b[i].driven_channels);
      EXPECT_EQ(a[i].s0_ids, b[i].s0_ids);
      EXPECT_EQ(a[i].figures.n_cool, b[i].figures.n_cool);
    }
  }
}

TEST(Property, TextRoundTripOfRandomDatasets) {
  const StatesSchema schema({"id", "energy"});
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto t = toy::random_toy(seed);
    const auto ds = toy::to_dataset(t);
    std::ostringstream so, to;
    write_states(so, ds.states, schema, seed % 2 == 0);
    std::vector<RawTransition> trans;
    ds.transitions.for_each([&](const RawTransition& r) { trans.push_back(r); });
    write_transitions(to, trans);
    std::istringstream si(so.str()), ti(to.str());
    EXPECT_EQ(parse_states(si, schema), ds.states);
    EXPECT_EQ(read_all_transitions(ti), trans);
  }
}

TEST(Property, ChunkedLineReaderMatchesWholeBuffer) {
  std::string text;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    text += std::string(rng() % 40, 'x') + std::to_string(i);
    text += (i % 7 == 0) ? "\r\n" : "\n";
  }
  text += "tail-without-newline";
  const auto lines = [&](std::size_t chunk) {
    std::istringstream in(text);
    detail::LineReader reader(in, chunk);
    std::vector<std::string> out;
    std::string_view line;
    while (reader.next(line)) out.emplace_back(line);
    return out;
  };
  const auto whole = lines(1 << 20);
  EXPECT_EQ(whole.size(), 501u);
  EXPECT_EQ(whole.back(), "tail-without-newline");
  for (std::size_t chunk : {1, 2, 3, 7, 16, 61, 4096}) EXPECT_EQ(lines(chunk), whole) << "chunk " << chunk;
}
