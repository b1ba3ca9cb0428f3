#pragma once

// Binary snapshot of a built LevelGraph so repeated searches skip parsing.
// Layout is documented in docs/snapshot-format.md; all integers and doubles
// are little-endian fixed width.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "coolgraph/errors.hpp"
#include "coolgraph/level_graph.hpp"

namespace coolgraph {

inline constexpr std::array<char, 8> kSnapshotMagic = {'C', 'O', 'O', 'L', 'G', 'R', 'P', 'H'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {

template <class T>
std::uint64_t to_bits(T value) {
  if constexpr (std::is_same_v<T, double>) return std::bit_cast<std::uint64_t>(value);
  else return static_cast<std::uint64_t>(value);
}

class LeWriter {
 public:
  explicit LeWriter(std::ostream& out) : out_(&out) {}

  template <class T>
  void put(T value) {
    static_assert(std::is_arithmetic_v<T>);
    const auto bits = to_bits(value);
    char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    buffer_.append(bytes, sizeof(T));
    if (buffer_.size() > (1u << 20)) flush();
  }

  void put_bytes(const char* data, std::size_t n) {
    buffer_.append(data, n);
    if (buffer_.size() > (1u << 20)) flush();
  }

  void put_string(std::string_view s) {
    put(static_cast<std::uint32_t>(s.size()));
    put_bytes(s.data(), s.size());
  }

  void flush() {
    out_->write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    buffer_.clear();
    if (!*out_) throw IoError("snapshot write failed");
  }

 private:
  std::ostream* out_;
  std::string buffer_;
};

class LeReader {
 public:
  explicit LeReader(std::istream& in) : in_(&in) {}

  template <class T>
  T get() {
    unsigned char bytes[sizeof(T)];
    read(reinterpret_cast<char*>(bytes), sizeof(T));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    if constexpr (std::is_same_v<T, double>) return std::bit_cast<double>(bits);
    else return static_cast<T>(bits);
  }

  std::string get_string() {
    const auto n = get<std::uint32_t>();
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }

  void read(char* data, std::size_t n) {
    in_->read(data, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_->gcount()) != n) throw ParseError("truncated graph snapshot", 0);
  }

 private:
  std::istream* in_;
};

}  // namespace detail

inline void write_snapshot(std::ostream& out, const LevelGraph& graph) {
  std::shared_ptr<const std::vector<std::string>> names;
  for (const auto& s : graph.states())
    if (s.attrs.size() > 0) {
      names = s.attrs.names();
      break;
    }
  const std::size_t name_count = names ? names->size() : 0;

  detail::LeWriter w(out);
  w.put_bytes(kSnapshotMagic.data(), kSnapshotMagic.size());
  w.put(kSnapshotVersion);
  w.put(std::uint32_t{0});
  w.put(static_cast<std::uint64_t>(graph.state_count()));
  w.put(static_cast<std::uint64_t>(graph.edge_count()));
  w.put(graph.options().br_floor);
  w.put(graph.options().lifetime_sentinel_s);
  w.put(graph.options().wavenumber_tolerance);
  w.put(static_cast<std::uint64_t>(graph.stats().transitions));
  w.put(static_cast<std::uint64_t>(graph.stats().pruned));
  w.put(static_cast<std::uint64_t>(graph.stats().wavenumber_mismatches));
  w.put(static_cast<std::uint64_t>(name_count));
  for (std::size_t i = 0; i < name_count; ++i) w.put_string((*names)[i]);

  for (const auto& s : graph.states()) {
    w.put(static_cast<std::int64_t>(s.id));
    w.put(s.energy);
    w.put(s.lifetime_s);
    w.put(s.pruned_branching);
    w.put(static_cast<std::uint8_t>(s.decays ? 1 : 0));
    const char pad[7] = {};
    w.put_bytes(pad, sizeof pad);
  }
  for (const auto off : graph.offsets()) w.put(static_cast<std::uint64_t>(off));
  for (const auto& e : graph.edges()) {
    w.put(e.upper);
    w.put(e.lower);
    w.put(e.einstein_a);
    w.put(e.branching_ratio);
    w.put(e.wavelength_nm);
  }
  for (const auto& s : graph.states()) {
    if (s.attrs.size() != 0 && s.attrs.size() != name_count)
      throw DataError("states carry attribute sets of different shapes; cannot snapshot");
    w.put(static_cast<std::uint32_t>(s.attrs.size()));
    for (std::size_t i = 0; i < s.attrs.size(); ++i) w.put_string(s.attrs.value(i));
  }
  w.flush();
}

inline LevelGraph read_snapshot(std::istream& in) {
  detail::LeReader r(in);
  std::array<char, 8> magic{};
  r.read(magic.data(), magic.size());
  if (magic != kSnapshotMagic) throw ParseError("not a graph snapshot (bad magic)", 0);
  const auto version = r.get<std::uint32_t>();
  if (version != kSnapshotVersion) throw ParseError("unsupported snapshot version " + std::to_string(version), 0);
  r.get<std::uint32_t>();
  const auto n_states = r.get<std::uint64_t>();
  const auto n_edges = r.get<std::uint64_t>();
  GraphOptions options;
  options.br_floor = r.get<double>();
  options.lifetime_sentinel_s = r.get<double>();
  options.wavenumber_tolerance = r.get<double>();
  BuildStats stats;
  stats.transitions = r.get<std::uint64_t>();
  stats.pruned = r.get<std::uint64_t>();
  stats.wavenumber_mismatches = r.get<std::uint64_t>();
  const auto name_count = r.get<std::uint64_t>();
  auto names = std::make_shared<std::vector<std::string>>();
  for (std::uint64_t i = 0; i < name_count; ++i) names->push_back(r.get_string());

  std::vector<MolecularState> states(n_states);
  for (auto& s : states) {
    s.id = r.get<std::int64_t>();
    s.energy = r.get<double>();
    s.lifetime_s = r.get<double>();
    s.pruned_branching = r.get<double>();
    s.decays = r.get<std::uint8_t>() != 0;
    char pad[7];
    r.read(pad, sizeof pad);
  }
  std::vector<EdgeIndex> offsets(n_states + 1);
  for (auto& off : offsets) off = r.get<std::uint64_t>();
  if (offsets.back() != n_edges) throw ParseError("snapshot offsets disagree with edge count", 0);
  std::vector<Edge> edges(n_edges);
  for (auto& e : edges) {
    e.upper = r.get<std::uint32_t>();
    e.lower = r.get<std::uint32_t>();
    e.einstein_a = r.get<double>();
    e.branching_ratio = r.get<double>();
    e.wavelength_nm = r.get<double>();
    if (e.upper >= n_states || e.lower >= n_states) throw ParseError("snapshot edge endpoint out of range", 0);
  }
  std::shared_ptr<const std::vector<std::string>> shared_names = std::move(names);
  for (auto& s : states) {
    const auto count = r.get<std::uint32_t>();
    if (count == 0) continue;
    if (count != name_count) throw ParseError("snapshot attribute count mismatch", 0);
    std::vector<std::string> values(count);
    for (auto& v : values) v = r.get_string();
    s.attrs = Attributes(shared_names, std::move(values));
  }
  return LevelGraph::from_parts(std::move(states), std::move(offsets), std::move(edges), options, std::move(stats));
}

inline void write_snapshot(const std::filesystem::path& path, const LevelGraph& graph) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  write_snapshot(out, graph);
}

inline LevelGraph read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace coolgraph
