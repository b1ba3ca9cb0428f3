#pragma once

// Ranked scheme tables (text, CSV, JSON), laser grouping and DOT diagrams.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "coolgraph/constants.hpp"
#include "coolgraph/detail/text.hpp"
#include "coolgraph/errors.hpp"
#include "coolgraph/level_graph.hpp"
#include "coolgraph/scheme.hpp"

namespace coolgraph {

inline constexpr double kDefaultLaserToleranceGhz = 1.0;

/// Driven channels grouped into lasers: channels whose transition
/// frequencies lie within `tolerance_ghz` of a neighbour share a laser
/// (single linkage). Groups ascend by frequency; reporting only.
inline std::vector<std::vector<DecayChannel>> group_lasers(std::vector<DecayChannel> channels,
                                                           double tolerance_ghz = kDefaultLaserToleranceGhz) {
  std::vector<std::vector<DecayChannel>> groups;
  if (channels.empty()) return groups;
  const auto wavenumber = [](const DecayChannel& c) { return constants::wavenumber_to_nm / c.wavelength_nm; };
  std::stable_sort(channels.begin(), channels.end(),
                   [&](const DecayChannel& a, const DecayChannel& b) { return wavenumber(a) < wavenumber(b); });
  const double tol = tolerance_ghz * constants::ghz_to_wavenumber();
  groups.push_back({channels.front()});
  for (std::size_t i = 1; i < channels.size(); ++i) {
    if (wavenumber(channels[i]) - wavenumber(channels[i - 1]) < tol) groups.back().push_back(channels[i]);
    else groups.push_back({channels[i]});
  }
  return groups;
}

/// One output row, in the columns of the ranked table.
struct SchemeRow {
  std::vector<StateId> s1_ids;
  StateId s0_id = 0;
  double t_init_k = 0.0;
  std::size_t num_decays = 0;
  double n_cool = 0.0;
  double t_cool_ms = 0.0;
  double ratio = 0.0;
  double closure = 0.0;
  std::vector<double> lambdas_nm;  ///< ascending
  std::size_t laser_count = 0;     ///< not part of the CSV columns

  friend bool operator==(const SchemeRow&, const SchemeRow&) = default;
};

struct ReportOptions {
  bool full_precision = false;  ///< raw shortest round-trip doubles instead of table rounding
  bool relaxed_4k = false;      ///< rows carry the 4 K figures and the _4K column names
  double laser_tolerance_ghz = kDefaultLaserToleranceGhz;
};

inline SchemeRow make_row(const CoolingScheme& scheme, const ReportOptions& opts = {}) {
  const SchemeFigures& f = opts.relaxed_4k ? scheme.deciding_figures() : scheme.figures;
  SchemeRow row;
  row.s1_ids = scheme.s1_ids;
  row.s0_id = scheme.s0_ids.at(0);
  row.t_init_k = scheme.figures.t_init_k;
  row.num_decays = scheme.num_decays();
  row.n_cool = f.n_cool;
  row.t_cool_ms = f.t_cool_s * 1e3;
  row.ratio = f.ratio();
  row.closure = f.closure_p;
  for (const auto& c : scheme.driven_channels) row.lambdas_nm.push_back(c.wavelength_nm);
  std::sort(row.lambdas_nm.begin(), row.lambdas_nm.end());
  row.laser_count = group_lasers(scheme.driven_channels, opts.laser_tolerance_ghz).size();
  return row;
}

namespace detail {

inline std::string fixed(double x, int digits, bool full) {
  if (full) return fmt::format("{}", x);
  auto s = fmt::format("{:.{}f}", x, digits);
  if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);  // no "-0.0"
  return s;
}

inline double rounded(double x, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(x * scale) / scale;
}

inline std::string s1_text(const std::vector<StateId>& ids) { return fmt::format("{}", fmt::join(ids, "+")); }

inline std::string lambda_text(const std::vector<double>& lambdas, bool full) {
  std::vector<std::string> parts;
  for (double l : lambdas) parts.push_back(fixed(l, 2, full));
  return fmt::format("[{}]", fmt::join(parts, ", "));
}

}  // namespace detail

/// Order by the displayed (t_cool_ms, num_decays, ratio), then S1 and S0 ids.
inline void sort_rows(std::vector<SchemeRow>& rows) {
  using detail::rounded;
  std::stable_sort(rows.begin(), rows.end(), [](const SchemeRow& a, const SchemeRow& b) {
    const auto key = [](const SchemeRow& r) {
      return std::tuple(rounded(r.t_cool_ms, 1), r.num_decays, rounded(r.ratio, 3));
    };
    const auto ka = key(a);
    const auto kb = key(b);
    if (ka != kb) return ka < kb;
    if (a.s1_ids != b.s1_ids) return a.s1_ids < b.s1_ids;
    return a.s0_id < b.s0_id;
  });
}

inline std::vector<SchemeRow> make_rows(const std::vector<CoolingScheme>& schemes, const ReportOptions& opts = {}) {
  std::vector<SchemeRow> rows;
  rows.reserve(schemes.size());
  for (const auto& s : schemes) rows.push_back(make_row(s, opts));
  sort_rows(rows);
  return rows;
}

inline std::vector<std::string> csv_columns(bool relaxed_4k) {
  if (relaxed_4k)
    return {"S1_id",         "S0_id",   "approx_T_init",       "num_decays",         "n_cool_4K",
            "t_cool_ms_4K", "n_cool_n10_ratio_4K", "closure", "lambda_list_nm"};
  return {"S1_id", "S0_id", "T_init", "num_decays", "n_cool", "t_cool_ms", "n_cool_n10_ratio", "closure",
          "lambda_list_nm"};
}

inline std::vector<std::string> row_fields(const SchemeRow& r, const ReportOptions& opts) {
  const bool full = opts.full_precision;
  return {detail::s1_text(r.s1_ids),
          fmt::format("{}", r.s0_id),
          detail::fixed(r.t_init_k, 1, full),
          fmt::format("{}", r.num_decays),
          detail::fixed(r.n_cool, 0, full),
          detail::fixed(r.t_cool_ms, 1, full),
          detail::fixed(r.ratio, 3, full),
          detail::fixed(r.closure, 8, full),
          detail::lambda_text(r.lambdas_nm, full)};
}

inline std::string to_csv(const std::vector<SchemeRow>& rows, const ReportOptions& opts = {}) {
  std::string out = fmt::format("{}\n", fmt::join(csv_columns(opts.relaxed_4k), ","));
  for (const auto& r : rows) {
    auto fields = row_fields(r, opts);
    fields.back() = "\"" + fields.back() + "\"";
    out += fmt::format("{}\n", fmt::join(fields, ","));
  }
  return out;
}

/// Parses text written by to_csv. laser_count is not stored in CSV and comes back as 0.
inline std::vector<SchemeRow> parse_csv(std::string_view text) {
  std::vector<SchemeRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty CSV", 0);
  ++line_no;
  if (line != fmt::format("{}", fmt::join(csv_columns(false), ",")) &&
      line != fmt::format("{}", fmt::join(csv_columns(true), ",")))
    throw SchemaError("unexpected CSV header: " + line);

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto quote = line.find('"');
    if (quote == std::string::npos || quote == 0 || line[quote - 1] != ',' || line.back() != '"')
      throw ParseError("missing quoted wavelength list", line_no);
    std::vector<std::string_view> fields;
    detail::split_fields(std::string_view(line).substr(0, quote - 1), fields);
    if (fields.size() != 8) throw ParseError("expected 9 CSV columns", line_no);
    const auto num = [&](std::string_view s) {
      const auto v = detail::to_double(s);
      if (!v) throw ParseError(fmt::format("bad number '{}'", s), line_no);
      return *v;
    };
    const auto integer = [&](std::string_view s) {
      const auto v = detail::to_int(s);
      if (!v) throw ParseError(fmt::format("bad integer '{}'", s), line_no);
      return *v;
    };
    SchemeRow r;
    std::string_view s1 = fields[0];
    for (std::size_t pos; (pos = s1.find('+')) != std::string_view::npos; s1.remove_prefix(pos + 1))
      r.s1_ids.push_back(integer(s1.substr(0, pos)));
    r.s1_ids.push_back(integer(s1));
    r.s0_id = integer(fields[1]);
    r.t_init_k = num(fields[2]);
    r.num_decays = static_cast<std::size_t>(integer(fields[3]));
    r.n_cool = num(fields[4]);
    r.t_cool_ms = num(fields[5]);
    r.ratio = num(fields[6]);
    r.closure = num(fields[7]);
    std::string_view list = std::string_view(line).substr(quote + 1, line.size() - quote - 2);
    if (list.size() < 2 || list.front() != '[' || list.back() != ']') throw ParseError("bad wavelength list", line_no);
    list = list.substr(1, list.size() - 2);
    std::vector<std::string_view> items;
    detail::split_fields(list, items);
    for (auto item : items) r.lambdas_nm.push_back(num(detail::trim(item)));
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Fixed-width text table; laser_count is appended as a last column.
inline std::string to_table(const std::vector<SchemeRow>& rows, const ReportOptions& opts = {}) {
  auto header = csv_columns(opts.relaxed_4k);
  header.push_back("laser_count");
  std::vector<std::vector<std::string>> cells{header};
  for (const auto& r : rows) {
    auto f = row_fields(r, opts);
    f.push_back(fmt::format("{}", r.laser_count));
    cells.push_back(std::move(f));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  std::string out;
  for (const auto& line : cells) {
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) text += "  ";
      text += i + 1 == line.size() ? line[i] : fmt::format("{:<{}}", line[i], width[i]);
    }
    out += text + "\n";
  }
  return out;
}

inline nlohmann::ordered_json channel_json(const DecayChannel& c) {
  return {{"upper_id", c.upper_id},
          {"lower_id", c.lower_id},
          {"einstein_a", c.einstein_a},
          {"branching_ratio", c.branching_ratio},
          {"wavelength_nm", c.wavelength_nm}};
}

/// One object per scheme: the rounded row fields, laser_count, and the raw
/// figures and driven channels.
inline std::string to_json(const std::vector<CoolingScheme>& schemes, const ReportOptions& opts = {}) {
  std::vector<std::pair<SchemeRow, const CoolingScheme*>> ordered;
  for (const auto& s : schemes) ordered.emplace_back(make_row(s, opts), &s);
  std::vector<SchemeRow> rows;
  for (const auto& [row, s] : ordered) rows.push_back(row);
  sort_rows(rows);
  // Re-associate schemes with the sorted rows (rows are unique per scheme key).
  auto out = nlohmann::ordered_json::array();
  std::vector<bool> used(ordered.size(), false);
  const auto columns = csv_columns(opts.relaxed_4k);
  for (const auto& row : rows) {
    std::size_t k = 0;
    while (used[k] || !(ordered[k].first == row)) ++k;
    used[k] = true;
    const CoolingScheme& s = *ordered[k].second;
    const auto fields = row_fields(row, opts);
    nlohmann::ordered_json obj;
    obj["kind"] = s.kind == SchemeKind::single ? "single" : "dual";
    obj[columns[0]] = row.s1_ids.size() == 1 ? nlohmann::ordered_json(row.s1_ids.front())
                                             : nlohmann::ordered_json(row.s1_ids);
    obj[columns[1]] = row.s0_id;
    for (std::size_t i = 2; i < 8; ++i) {
      const auto v = detail::to_double(fields[i]);
      obj[columns[i]] = i == 3 ? nlohmann::ordered_json(row.num_decays) : nlohmann::ordered_json(*v);
    }
    auto lambdas = nlohmann::ordered_json::array();
    for (double l : row.lambdas_nm) lambdas.push_back(opts.full_precision ? l : detail::rounded(l, 2));
    obj[columns[8]] = lambdas;
    obj["laser_count"] = row.laser_count;
    obj["g"] = s.g;
    const auto figures = [](const SchemeFigures& f) {
      // JSON has no infinity; a perfectly closed scheme reports null n10 / t10.
      const auto finite = [](double x) { return std::isinf(x) ? nlohmann::ordered_json() : nlohmann::ordered_json(x); };
      nlohmann::ordered_json j;
      j["closure"] = f.closure_p;
      j["n10"] = finite(f.n10);
      j["inv_rate_s"] = f.inv_rate_s;
      j["t_init_k"] = f.t_init_k;
      j["n_cool"] = f.n_cool;
      j["t_cool_s"] = f.t_cool_s;
      j["t10_s"] = finite(f.t10_s);
      j["min_tau_br_ratio_s"] = finite(f.min_tau_br_ratio_s);
      return j;
    };
    obj["figures"] = figures(s.figures);
    if (s.relaxed) obj["figures_4k"] = figures(*s.relaxed);
    auto channels = nlohmann::ordered_json::array();
    for (const auto& c : s.driven_channels) channels.push_back(channel_json(c));
    obj["channels"] = channels;
    auto lasers = nlohmann::ordered_json::array();
    for (const auto& group : group_lasers(s.driven_channels, opts.laser_tolerance_ghz)) {
      auto members = nlohmann::ordered_json::array();
      for (const auto& c : group) members.push_back(nlohmann::ordered_json::array({c.upper_id, c.lower_id}));
      lasers.push_back(members);
    }
    obj["lasers"] = lasers;
    out.push_back(std::move(obj));
  }
  return out.dump(2) + "\n";
}

/// DOT digraph of a scheme: starting states red, excited states purple,
/// other lower states blue; edges carry wavelength and branching ratio.
inline std::string export_diagram(const CoolingScheme& scheme) {
  std::string out = "digraph scheme {\n  rankdir=TB;\n  node [style=filled, fontcolor=white];\n";
  std::vector<StateId> lowers = scheme.lower_ids();
  const auto is_in = [](const std::vector<StateId>& v, StateId id) {
    return std::find(v.begin(), v.end(), id) != v.end();
  };
  for (const auto id : scheme.s1_ids) out += fmt::format("  s{0} [label=\"{0}\", fillcolor=purple];\n", id);
  for (const auto id : lowers) {
    if (is_in(scheme.s1_ids, id)) continue;
    const char* colour = is_in(scheme.s0_ids, id) ? "red" : "blue";
    out += fmt::format("  s{0} [label=\"{0}\", fillcolor={1}];\n", id, colour);
  }
  for (const auto& c : scheme.driven_channels)
    out += fmt::format("  s{} -> s{} [label=\"{:.2f} nm\\nBR {:.6g}\"];\n", c.upper_id, c.lower_id, c.wavelength_nm,
                       c.branching_ratio);
  out += "}\n";
  return out;
}

/// Writes `content` to a sibling temporary file and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place: " + path.string());
  }
}

}  // namespace coolgraph
