#pragma once

// ExoMol .states / .trans ingestion.
//
// State files carry a molecule-specific column layout, so the caller supplies
// a StatesSchema naming every column; only `id` and `energy` are interpreted.
// Transition files are `upper lower A [wavenumber]` rows and are consumed as a
// stream so that line lists larger than memory can be aggregated in one pass.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "coolgraph/detail/id_index.hpp"
#include "coolgraph/detail/input.hpp"
#include "coolgraph/detail/text.hpp"
#include "coolgraph/errors.hpp"

namespace coolgraph {

using StateId = std::int64_t;

/// Ordered column names of a states file.
class StatesSchema {
 public:
  StatesSchema() = default;

  explicit StatesSchema(std::vector<std::string> columns, std::string id_column = "id",
                        std::string energy_column = "energy")
      : columns_(std::move(columns)) {
    std::unordered_set<std::string> seen;
    for (const auto& name : columns_) {
      if (name.empty()) throw SchemaError("empty column name in states schema");
      if (!seen.insert(name).second) throw SchemaError("duplicate column name '" + name + "' in states schema");
    }
    const auto id_pos = position(id_column);
    const auto energy_pos = position(energy_column);
    if (!id_pos) throw SchemaError("states schema has no '" + id_column + "' column");
    if (!energy_pos) throw SchemaError("states schema has no '" + energy_column + "' column");
    id_pos_ = *id_pos;
    energy_pos_ = *energy_pos;
    auto names = std::make_shared<std::vector<std::string>>();
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (i != id_pos_ && i != energy_pos_) names->push_back(columns_[i]);
    attr_names_ = std::move(names);
  }

  /// One header line, comma- or blank-separated: "id,energy,gtot,J,...".
  static StatesSchema from_header(std::string_view header) {
    std::vector<std::string_view> fields;
    detail::split_fields(header, fields);
    return StatesSchema(std::vector<std::string>(fields.begin(), fields.end()));
  }

  /// Schema config text: either a single header line, or `key = value` lines
  /// with keys `columns` (required), `id_column` and `energy_column`.
  /// Lines starting with '#' are ignored.
  static StatesSchema from_config(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto nl = text.find('\n', start);
      if (nl == std::string_view::npos) nl = text.size();
      const auto line = detail::trim(text.substr(start, nl - start));
      if (!line.empty() && line.front() != '#') lines.push_back(line);
      start = nl + 1;
    }
    if (lines.empty()) throw SchemaError("empty schema config");
    if (lines.size() == 1 && lines.front().find('=') == std::string_view::npos) return from_header(lines.front());

    std::optional<std::string> columns;
    std::string id_column = "id";
    std::string energy_column = "energy";
    for (auto line : lines) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw SchemaError("schema config line without '=': " + std::string(line));
      const auto key = detail::trim(line.substr(0, eq));
      const auto value = std::string(detail::trim(line.substr(eq + 1)));
      if (key == "columns") columns = value;
      else if (key == "id_column") id_column = value;
      else if (key == "energy_column") energy_column = value;
      else throw SchemaError("unknown schema config key '" + std::string(key) + "'");
    }
    if (!columns) throw SchemaError("schema config lacks 'columns'");
    std::vector<std::string_view> fields;
    detail::split_fields(*columns, fields);
    return StatesSchema(std::vector<std::string>(fields.begin(), fields.end()), id_column, energy_column);
  }

  static StatesSchema load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_config(text);
  }

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return columns_.size(); }
  std::size_t id_position() const noexcept { return id_pos_; }
  std::size_t energy_position() const noexcept { return energy_pos_; }
  const std::shared_ptr<const std::vector<std::string>>& attribute_names() const noexcept { return attr_names_; }

  std::optional<std::size_t> position(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i] == name) return i;
    return std::nullopt;
  }

 private:
  std::vector<std::string> columns_;
  std::size_t id_pos_ = 0;
  std::size_t energy_pos_ = 1;
  std::shared_ptr<const std::vector<std::string>> attr_names_;
};

/// Remaining (non id/energy) columns of a state row, kept as opaque strings.
class Attributes {
 public:
  Attributes() = default;
  Attributes(std::shared_ptr<const std::vector<std::string>> names, std::vector<std::string> values)
      : names_(std::move(names)), values_(std::move(values)) {}

  std::optional<std::string_view> get(std::string_view name) const noexcept {
    if (!names_) return std::nullopt;
    for (std::size_t i = 0; i < names_->size(); ++i)
      if ((*names_)[i] == name) return std::string_view(values_[i]);
    return std::nullopt;
  }

  std::optional<double> get_number(std::string_view name) const noexcept {
    const auto v = get(name);
    return v ? detail::to_double(*v) : std::nullopt;
  }

  std::size_t size() const noexcept { return values_.size(); }
  const std::shared_ptr<const std::vector<std::string>>& names() const noexcept { return names_; }
  std::string_view name(std::size_t i) const { return (*names_)[i]; }
  std::string_view value(std::size_t i) const { return values_[i]; }

  friend bool operator==(const Attributes& a, const Attributes& b) {
    if (a.values_ != b.values_) return false;
    if (a.names_ == b.names_) return true;
    const auto empty = [](const auto& p) { return !p || p->empty(); };
    if (empty(a.names_) || empty(b.names_)) return empty(a.names_) && empty(b.names_);
    return *a.names_ == *b.names_;
  }

 private:
  std::shared_ptr<const std::vector<std::string>> names_;
  std::vector<std::string> values_;
};

struct RawState {
  StateId id = 0;
  double energy = 0.0;  ///< cm^-1
  Attributes attrs;

  friend bool operator==(const RawState&, const RawState&) = default;
};

struct RawTransition {
  StateId upper = 0;
  StateId lower = 0;
  double einstein_a = 0.0;            ///< s^-1
  std::optional<double> wavenumber;  ///< cm^-1, informational only

  friend bool operator==(const RawTransition&, const RawTransition&) = default;
};

namespace detail {

inline void check_stream(std::istream& in, std::size_t row) {
  if (in.bad()) throw ParseError("input stream error (corrupt or truncated compressed data?)", row);
}

}  // namespace detail

/// Parses a states table. A leading row equal to the schema's column names is
/// skipped, as are blank lines and lines starting with '#'.
inline std::vector<RawState> parse_states(std::istream& input, const StatesSchema& schema) {
  detail::DecodedInput decoded(input);
  detail::LineReader reader(decoded.stream());
  std::vector<RawState> states;
  std::vector<std::string_view> fields;
  std::unordered_set<StateId> seen;
  bool first_row = true;
  std::string_view line;
  while (reader.next(line)) {
    const auto row = reader.line_number();
    const auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    detail::split_fields(trimmed, fields);
    if (first_row) {
      first_row = false;
      if (fields.size() == schema.size() && std::equal(fields.begin(), fields.end(), schema.columns().begin()))
        continue;
    }
    if (fields.size() != schema.size())
      throw SchemaError(fmt::format("row {}: expected {} columns, found {}", row, schema.size(), fields.size()));
    const auto id = detail::to_int(fields[schema.id_position()]);
    if (!id || *id <= 0)
      throw ParseError(fmt::format("state id '{}' is not a positive integer", fields[schema.id_position()]), row);
    const auto energy = detail::to_double(fields[schema.energy_position()]);
    if (!energy) throw ParseError(fmt::format("state energy '{}' is not numeric", fields[schema.energy_position()]), row);
    if (*energy < 0.0) throw ParseError(fmt::format("state energy {} is negative", *energy), row);
    if (!seen.insert(*id).second) throw DuplicateKeyError(fmt::format("row {}: duplicate state id {}", row, *id));

    std::vector<std::string> values;
    values.reserve(fields.size() - 2);
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (i != schema.id_position() && i != schema.energy_position()) values.emplace_back(fields[i]);
    states.push_back(RawState{*id, *energy, Attributes(schema.attribute_names(), std::move(values))});
  }
  detail::check_stream(decoded.stream(), reader.line_number());
  return states;
}

inline std::vector<RawState> parse_states(const std::filesystem::path& path, const StatesSchema& schema) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  return parse_states(file, schema);
}

/// Lazy reader over `upper lower A [wavenumber]` rows. A first row whose
/// leading field is not an integer (e.g. ":START_ID,...") is treated as a header.
class TransitionReader {
 public:
  explicit TransitionReader(std::istream& input) : decoded_(std::make_unique<detail::DecodedInput>(input)) {
    reader_ = std::make_unique<detail::LineReader>(decoded_->stream());
  }

  explicit TransitionReader(const std::filesystem::path& path)
      : decoded_(std::make_unique<detail::DecodedInput>(path)) {
    reader_ = std::make_unique<detail::LineReader>(decoded_->stream());
  }

  bool next(RawTransition& out) {
    std::string_view line;
    while (reader_->next(line)) {
      const auto row = reader_->line_number();
      const auto trimmed = detail::trim(line);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      detail::split_fields(trimmed, fields_);
      const bool first = first_row_;
      first_row_ = false;
      if (first && !fields_.empty() && !detail::to_int(fields_[0])) continue;
      if (fields_.size() < 3)
        throw ParseError(fmt::format("transition row needs 'upper lower A', found {} column(s)", fields_.size()), row);
      const auto upper = detail::to_int(fields_[0]);
      const auto lower = detail::to_int(fields_[1]);
      const auto a = detail::to_double(fields_[2]);
      if (!upper || !lower) throw ParseError("transition state ids must be integers", row);
      if (!a) throw ParseError(fmt::format("Einstein A '{}' is not numeric", fields_[2]), row);
      if (!(*a > 0.0)) throw DataError(fmt::format("row {}: Einstein A must be positive, got {}", row, *a));
      if (*upper == *lower) throw DataError(fmt::format("row {}: transition {} -> {} is a self-loop", row, *upper, *lower));
      out.upper = *upper;
      out.lower = *lower;
      out.einstein_a = *a;
      out.wavenumber.reset();
      if (fields_.size() >= 4) {
        const auto nu = detail::to_double(fields_[3]);
        if (!nu) throw ParseError(fmt::format("wavenumber '{}' is not numeric", fields_[3]), row);
        out.wavenumber = *nu;
      }
      ++rows_;
      return true;
    }
    detail::check_stream(decoded_->stream(), reader_->line_number());
    return false;
  }

  std::size_t rows_read() const noexcept { return rows_; }

 private:
  std::unique_ptr<detail::DecodedInput> decoded_;
  std::unique_ptr<detail::LineReader> reader_;
  std::vector<std::string_view> fields_;
  bool first_row_ = true;
  std::size_t rows_ = 0;
};

inline TransitionReader parse_trans(std::istream& input) { return TransitionReader(input); }

inline std::vector<RawTransition> read_all_transitions(std::istream& input) {
  TransitionReader reader(input);
  std::vector<RawTransition> out;
  RawTransition t;
  while (reader.next(t)) out.push_back(t);
  return out;
}

/// Transitions either held in memory or re-streamed from files on each pass.
class TransitionSource {
 public:
  TransitionSource() = default;
  explicit TransitionSource(std::vector<RawTransition> transitions) : data_(std::move(transitions)) {}
  explicit TransitionSource(std::vector<std::filesystem::path> files) : data_(std::move(files)) {}

  bool streaming() const noexcept { return std::holds_alternative<std::vector<std::filesystem::path>>(data_); }

  template <class F>
  void for_each(F&& f) const {
    if (const auto* mem = std::get_if<std::vector<RawTransition>>(&data_)) {
      for (const auto& t : *mem) f(t);
      return;
    }
    RawTransition t;
    for (const auto& path : std::get<std::vector<std::filesystem::path>>(data_)) {
      TransitionReader reader(path);
      while (reader.next(t)) f(static_cast<const RawTransition&>(t));
    }
  }

 private:
  std::variant<std::vector<RawTransition>, std::vector<std::filesystem::path>> data_;
};

struct Provenance {
  std::filesystem::path states_path;
  std::vector<std::filesystem::path> trans_paths;
  std::size_t state_rows = 0;
  std::vector<std::size_t> transition_rows;  ///< per trans file (one entry for in-memory data)
};

struct LevelDataset {
  std::vector<RawState> states;
  TransitionSource transitions;
  std::size_t transition_count = 0;
  Provenance provenance;
};

namespace detail {

inline IdIndex index_states(const std::vector<RawState>& states) {
  std::vector<StateId> ids;
  ids.reserve(states.size());
  for (const auto& s : states) ids.push_back(s.id);
  return IdIndex(ids);
}

inline void check_reference(const IdIndex& index, const RawTransition& t) {
  for (const auto id : {t.upper, t.lower})
    if (!index.contains(id))
      throw ReferentialIntegrityError(
          fmt::format("transition {} -> {} references unknown state id {}", t.upper, t.lower, id), id);
}

}  // namespace detail

/// Builds an in-memory dataset, checking that every transition endpoint exists.
inline LevelDataset make_dataset(std::vector<RawState> states, std::vector<RawTransition> transitions) {
  const auto index = detail::index_states(states);
  for (const auto& t : transitions) detail::check_reference(index, t);
  LevelDataset ds;
  ds.provenance.state_rows = states.size();
  ds.provenance.transition_rows = {transitions.size()};
  ds.transition_count = transitions.size();
  ds.states = std::move(states);
  ds.transitions = TransitionSource(std::move(transitions));
  return ds;
}

/// Loads the states file fully and validates the transition files in one
/// streaming pass. With `materialize` false the transitions stay on disk and
/// are re-read by each consumer pass.
inline LevelDataset load_dataset(const std::filesystem::path& states_path,
                                 const std::vector<std::filesystem::path>& trans_paths, const StatesSchema& schema,
                                 bool materialize = false) {
  LevelDataset ds;
  ds.states = parse_states(states_path, schema);
  ds.provenance.states_path = states_path;
  ds.provenance.trans_paths = trans_paths;
  ds.provenance.state_rows = ds.states.size();
  const auto index = detail::index_states(ds.states);

  std::vector<RawTransition> kept;
  RawTransition t;
  for (const auto& path : trans_paths) {
    TransitionReader reader(path);
    while (reader.next(t)) {
      detail::check_reference(index, t);
      if (materialize) kept.push_back(t);
    }
    ds.provenance.transition_rows.push_back(reader.rows_read());
    ds.transition_count += reader.rows_read();
  }
  ds.transitions = materialize ? TransitionSource(std::move(kept)) : TransitionSource(trans_paths);
  return ds;
}

// Writers emit the same delimited text the parsers accept; doubles use the
// shortest round-tripping representation.

inline void write_states(std::ostream& out, const std::vector<RawState>& states, const StatesSchema& schema,
                         bool with_header = true) {
  if (with_header) out << fmt::format("{}\n", fmt::join(schema.columns(), ","));
  std::vector<std::string> row(schema.size());
  for (const auto& s : states) {
    std::size_t a = 0;
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (i == schema.id_position()) row[i] = std::to_string(s.id);
      else if (i == schema.energy_position()) row[i] = fmt::format("{}", s.energy);
      else row[i] = std::string(s.attrs.value(a++));
    }
    out << fmt::format("{}\n", fmt::join(row, ","));
  }
}

inline void write_transitions(std::ostream& out, const std::vector<RawTransition>& transitions) {
  for (const auto& t : transitions) {
    if (t.wavenumber) out << fmt::format("{} {} {} {}\n", t.upper, t.lower, t.einstein_a, *t.wavenumber);
    else out << fmt::format("{} {} {}\n", t.upper, t.lower, t.einstein_a);
  }
}

}  // namespace coolgraph
