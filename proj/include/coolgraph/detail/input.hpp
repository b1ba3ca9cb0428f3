#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <string>

#include <boost/iostreams/categories.hpp>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include "coolgraph/errors.hpp"

namespace coolgraph::detail {

/// Boost source that replays bytes already consumed for format sniffing,
/// then continues with the underlying stream.
class PrefixedSource {
 public:
  using char_type = char;
  using category = boost::iostreams::source_tag;

  PrefixedSource(std::string prefix, std::istream& in) : prefix_(std::move(prefix)), in_(&in) {}

  std::streamsize read(char* s, std::streamsize n) {
    std::streamsize written = 0;
    if (pos_ < prefix_.size()) {
      const auto take = std::min<std::streamsize>(n, static_cast<std::streamsize>(prefix_.size() - pos_));
      std::copy_n(prefix_.data() + pos_, take, s);
      pos_ += static_cast<std::size_t>(take);
      written = take;
    }
    if (written < n && *in_) {
      in_->read(s + written, n - written);
      written += in_->gcount();
    }
    return written == 0 ? -1 : written;
  }

 private:
  std::string prefix_;
  std::size_t pos_ = 0;
  std::istream* in_;
};

/// A readable stream with bz2 transparently removed. Owns the file when
/// opened from a path.
class DecodedInput {
 public:
  explicit DecodedInput(std::istream& raw) { attach(raw); }

  explicit DecodedInput(const std::filesystem::path& path)
      : file_(std::make_unique<std::ifstream>(path, std::ios::binary)) {
    if (!*file_) throw IoError("cannot open " + path.string());
    attach(*file_);
  }

  DecodedInput(const DecodedInput&) = delete;
  DecodedInput& operator=(const DecodedInput&) = delete;

  std::istream& stream() { return *stream_; }
  bool compressed() const noexcept { return compressed_; }

 private:
  void attach(std::istream& raw) {
    std::string magic(3, '\0');
    raw.read(magic.data(), 3);
    magic.resize(static_cast<std::size_t>(raw.gcount()));
    compressed_ = magic == "BZh";
    stream_ = std::make_unique<boost::iostreams::filtering_istream>();
    if (compressed_) stream_->push(boost::iostreams::bzip2_decompressor());
    stream_->push(PrefixedSource(std::move(magic), raw), 1 << 16);
  }

  std::unique_ptr<std::ifstream> file_;
  std::unique_ptr<boost::iostreams::filtering_istream> stream_;
  bool compressed_ = false;
};

}  // namespace coolgraph::detail
