#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "coolgraph/report.hpp"

using namespace coolgraph;

namespace {

DecayChannel ch(StateId up, StateId low, double br, double nm) { return {up, low, 1.0, br, nm}; }

CoolingScheme make_scheme(StateId s1, StateId s0, std::vector<DecayChannel> chans, double t_cool_s, double n_cool,
                          double n10, double p, double t_init) {
  CoolingScheme s;
  s.s1_ids = {s1};
  s.s0_ids = {s0};
  s.driven_channels = std::move(chans);
  s.g = s.driven_channels.size();
  s.figures.closure_p = p;
  s.figures.n10 = n10;
  s.figures.n_cool = n_cool;
  s.figures.t_cool_s = t_cool_s;
  s.figures.t_init_k = t_init;
  s.figures.inv_rate_s = t_cool_s / n_cool;
  return s;
}

// Values shaped like the NH golden rows (rounding targets of the ranked table).
std::vector<CoolingScheme> nh_like() {
  const std::vector<DecayChannel> a{ch(744, 1, 0.5, 335.27), ch(744, 7, 0.3, 375.83), ch(744, 3, 0.1, 336.37),
                                    ch(744, 9, 0.09994935, 374.51)};
  const std::vector<DecayChannel> b{ch(745, 3, 0.5, 335.61), ch(745, 8, 0.3, 374.93), ch(745, 4, 0.1, 421.87),
                                    ch(745, 5, 0.09999997, 478.64)};
  return {make_scheme(744, 7, a, 8.04e-3, 4023.4, 44700.0, 0.99994935, 61.04),
          make_scheme(744, 1, a, 2.04e-3, 1030.2, 45000.0, 0.99994935, 4.0),
          make_scheme(745, 3, b, 4.96e-3, 2352.3, 7.6e7, 0.99999997, 20.81)};
}

}  // namespace

TEST(Rows, RoundingAndOrder) {
  const auto rows = make_rows(nh_like());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].s1_ids, std::vector<StateId>{744});
  EXPECT_EQ(rows[0].s0_id, 1);
  EXPECT_EQ(rows[1].s0_id, 3);
  EXPECT_EQ(rows[2].s0_id, 7);
  EXPECT_EQ(rows[0].lambdas_nm, (std::vector<double>{335.27, 336.37, 374.51, 375.83}));
  const auto csv = to_csv(rows);
  EXPECT_EQ(csv,
            "S1_id,S0_id,T_init,num_decays,n_cool,t_cool_ms,n_cool_n10_ratio,closure,lambda_list_nm\n"
            "744,1,4.0,4,1030,2.0,0.023,0.99994935,\"[335.27, 336.37, 374.51, 375.83]\"\n"
            "745,3,20.8,4,2352,5.0,0.000,0.99999997,\"[335.61, 374.93, 421.87, 478.64]\"\n"
            "744,7,61.0,4,4023,8.0,0.090,0.99994935,\"[335.27, 336.37, 374.51, 375.83]\"\n");
}

TEST(Rows, TieBreakOnIds) {
  const std::vector<DecayChannel> c{ch(5, 1, 0.99, 500)};
  std::vector<CoolingScheme> s{make_scheme(9, 2, c, 1e-3, 100, 1000, 0.99, 4),
                               make_scheme(5, 2, {ch(5, 2, 0.99, 500)}, 1e-3, 100, 1000, 0.99, 4),
                               make_scheme(5, 1, c, 1e-3, 100, 1000, 0.99, 4)};
  const auto rows = make_rows(s);
  EXPECT_EQ(rows[0].s1_ids.front(), 5);
  EXPECT_EQ(rows[0].s0_id, 1);
  EXPECT_EQ(rows[1].s0_id, 2);
  EXPECT_EQ(rows[2].s1_ids.front(), 9);
}

TEST(Csv, EmptyResultHasHeader) {
  EXPECT_EQ(to_csv({}), "S1_id,S0_id,T_init,num_decays,n_cool,t_cool_ms,n_cool_n10_ratio,closure,lambda_list_nm\n");
  EXPECT_TRUE(parse_csv(to_csv({})).empty());
}

TEST(Csv, RoundTripIsByteIdentical) {
  ReportOptions full;
  full.full_precision = true;
  ReportOptions relaxed;
  relaxed.relaxed_4k = true;
  for (const auto& opts : {ReportOptions{}, full, relaxed}) {
    auto schemes = nh_like();
    if (opts.relaxed_4k)
      for (auto& s : schemes) s.relaxed = s.figures;
    const auto text = to_csv(make_rows(schemes, opts), opts);
    EXPECT_EQ(to_csv(parse_csv(text), opts), text);
  }
}

TEST(Csv, DualSchemeIds) {
  auto s = make_scheme(34, 151, {ch(34, 151, 0.5, 482.1), ch(22, 151, 0.5, 482.2)}, 5e-4, 3180, 9000, 0.9994, 4);
  s.kind = SchemeKind::dual;
  s.s1_ids = {22, 34};
  const auto text = to_csv(make_rows({s}));
  EXPECT_NE(text.find("\n22+34,151,"), std::string::npos);
  const auto back = parse_csv(text);
  EXPECT_EQ(back.at(0).s1_ids, (std::vector<StateId>{22, 34}));
}

TEST(Csv, ParseErrors) {
  EXPECT_THROW(parse_csv(""), ParseError);
  EXPECT_THROW(parse_csv("a,b\n"), SchemaError);
  const std::string header =
      "S1_id,S0_id,T_init,num_decays,n_cool,t_cool_ms,n_cool_n10_ratio,closure,lambda_list_nm\n";
  EXPECT_THROW(parse_csv(header + "1,2,3\n"), ParseError);
  EXPECT_THROW(parse_csv(header + "1,2,x,4,5,6,7,8,\"[1.00]\"\n"), ParseError);
}

TEST(Lasers, GroupingByFrequency) {
  // Two transitions 0.5 GHz apart share a laser; 2 GHz apart do not.
  const double k0 = 20000.0;
  const double ghz = constants::ghz_to_wavenumber();
  const auto at = [](double k) { return 1e7 / k; };
  std::vector<DecayChannel> c{ch(1, 2, 0.3, at(k0)), ch(1, 3, 0.3, at(k0 + 0.5 * ghz)), ch(1, 4, 0.3, at(k0 + 2.5 * ghz))};
  EXPECT_EQ(group_lasers(c).size(), 2u);
  EXPECT_EQ(group_lasers(c, 0.1).size(), 3u);
  EXPECT_EQ(group_lasers(c, 5.0).size(), 1u);
  EXPECT_TRUE(group_lasers({}).empty());
}

TEST(Lasers, ThreeDegeneratePairs) {
  // Six transitions in three pairs, each pair split by much less than 1 GHz.
  const double ghz = constants::ghz_to_wavenumber();
  std::vector<DecayChannel> c;
  for (double k : {19000.0, 19900.0, 20740.0}) {
    c.push_back(ch(34, 1, 0.1, 1e7 / k));
    c.push_back(ch(34, 2, 0.1, 1e7 / (k + 0.01 * ghz)));
  }
  EXPECT_EQ(group_lasers(c).size(), 3u);
  auto s = make_scheme(34, 1, c, 1e-3, 100, 1000, 0.6, 4);
  const auto row = make_row(s);
  EXPECT_EQ(row.laser_count, 3u);
  EXPECT_LE(row.laser_count, row.num_decays);
}

TEST(Json, CarriesRowsAndChannels) {
  const auto text = to_json(nh_like());
  const auto j = nlohmann::json::parse(text);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["S1_id"], 744);
  EXPECT_EQ(j[0]["S0_id"], 1);
  EXPECT_EQ(j[0]["n_cool"], 1030.0);
  EXPECT_EQ(j[0]["laser_count"], 4);
  EXPECT_EQ(j[0]["channels"].size(), 4u);
  EXPECT_EQ(j[0]["lambda_list_nm"][0], 335.27);
  EXPECT_EQ(j[1]["S0_id"], 3);
  EXPECT_TRUE(nlohmann::json::parse(to_json({})).empty());
}

TEST(Json, PerfectClosureHasNullN10) {
  auto s = make_scheme(1, 2, {ch(1, 2, 1.0, 500)}, 1e-3, 100, kInfiniteScatters, 1.0, 4);
  s.figures.t10_s = kInfiniteScatters;
  const auto j = nlohmann::json::parse(to_json({s}));
  EXPECT_TRUE(j[0]["figures"]["n10"].is_null());
}

TEST(Dot, NodesAndColours) {
  const auto dot = export_diagram(nh_like()[1]);
  EXPECT_NE(dot.find("s744 [label=\"744\", fillcolor=purple]"), std::string::npos);
  EXPECT_NE(dot.find("s1 [label=\"1\", fillcolor=red]"), std::string::npos);
  EXPECT_NE(dot.find("s7 [label=\"7\", fillcolor=blue]"), std::string::npos);
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '>'), 4);
  EXPECT_NE(dot.find("335.27 nm"), std::string::npos);
  std::size_t nodes = 0;
  for (std::size_t pos = 0; (pos = dot.find("fillcolor=", pos)) != std::string::npos; ++pos) ++nodes;
  EXPECT_EQ(nodes, 5u);
}

TEST(Dot, TwoLevelToy) {
  const auto dot = export_diagram(make_scheme(2, 1, {ch(2, 1, 1.0, 600)}, 1e-3, 10, 1e9, 1.0, 4));
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '>'), 1);
  EXPECT_NE(dot.find("s2 -> s1"), std::string::npos);
}

TEST(Dot, DualSchemeSharesLowerNodes) {
  auto s = make_scheme(34, 151, {ch(34, 151, 0.5, 482.1), ch(34, 152, 0.4, 502.9), ch(22, 151, 0.5, 482.2),
                                  ch(22, 152, 0.4, 503.0)},
                       5e-4, 3180, 9000, 0.9, 4);
  s.kind = SchemeKind::dual;
  s.s1_ids = {22, 34};
  const auto dot = export_diagram(s);
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '>'), 4);
  std::size_t purple = 0;
  for (std::size_t pos = 0; (pos = dot.find("purple", pos)) != std::string::npos; ++pos) ++purple;
  EXPECT_EQ(purple, 2u);
  EXPECT_NE(dot.find("s151 [label=\"151\", fillcolor=red]"), std::string::npos);
}

TEST(AtomicWrite, ReplacesTarget) {
  const auto p = std::filesystem::temp_directory_path() / "coolgraph_atomic.csv";
  write_atomic(p, "one\n");
  write_atomic(p, "two\n");
  std::ifstream in(p);
  std::string s((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(s, "two\n");
  EXPECT_FALSE(std::filesystem::exists(p.string() + ".tmp"));
  EXPECT_THROW(write_atomic("/nonexistent-dir/x.csv", "x"), IoError);
}
