#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace coolgraph::detail {

inline bool is_blank(char c) noexcept { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

/// Splits a row into fields. Rows containing a comma are comma-delimited
/// (each field trimmed, empty fields kept); otherwise runs of blanks delimit.
inline void split_fields(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  line = trim(line);
  if (line.empty()) return;
  if (line.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        out.push_back(trim(line.substr(start)));
        break;
      }
      out.push_back(trim(line.substr(start, comma - start)));
      start = comma + 1;
    }
    return;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_blank(line[i])) ++i;
    const auto begin = i;
    while (i < line.size() && !is_blank(line[i])) ++i;
    if (i > begin) out.push_back(line.substr(begin, i - begin));
  }
}

inline std::optional<double> to_double(std::string_view s) noexcept {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

inline std::optional<std::int64_t> to_int(std::string_view s) noexcept {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

/// Chunked line reader over an istream. Yielded views stay valid until the
/// next call to `next`. Carriage returns before the newline are dropped.
class LineReader {
 public:
  explicit LineReader(std::istream& in, std::size_t chunk = std::size_t{1} << 20)
      : in_(&in), chunk_(chunk) {}

  bool next(std::string_view& line) {
    while (true) {
      const auto nl = buffer_.find('\n', pos_);
      if (nl != std::string::npos) {
        line = std::string_view(buffer_).substr(pos_, nl - pos_);
        pos_ = nl + 1;
        return finish(line);
      }
      if (eof_) {
        if (pos_ >= buffer_.size()) return false;
        line = std::string_view(buffer_).substr(pos_);
        pos_ = buffer_.size();
        return finish(line);
      }
      refill();
    }
  }

  std::size_t line_number() const noexcept { return line_no_; }

 private:
  bool finish(std::string_view& line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no_;
    return true;
  }

  void refill() {
    buffer_.erase(0, pos_);
    pos_ = 0;
    const auto old = buffer_.size();
    buffer_.resize(old + chunk_);
    in_->read(buffer_.data() + old, static_cast<std::streamsize>(chunk_));
    const auto got = static_cast<std::size_t>(in_->gcount());
    buffer_.resize(old + got);
    if (got == 0 || !*in_) eof_ = true;
  }

  std::istream* in_;
  std::size_t chunk_;
  std::string buffer_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
  bool eof_ = false;
};

}  // namespace coolgraph::detail
