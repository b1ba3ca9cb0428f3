#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

namespace coolgraph::detail {

/// Maps external state ids onto dense indices. ExoMol ids are usually
/// 1..N, so a flat table is used when the id range is not too sparse.
class IdIndex {
 public:
  static constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();

  IdIndex() = default;

  explicit IdIndex(const std::vector<std::int64_t>& ids) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (auto id : ids) {
      lo = std::min(lo, id);
      hi = std::max(hi, id);
    }
    if (!ids.empty() && lo >= 0 && static_cast<std::uint64_t>(hi) <= 4 * ids.size() + 1024) {
      dense_.assign(static_cast<std::size_t>(hi) + 1, npos);
      for (std::size_t i = 0; i < ids.size(); ++i) dense_[static_cast<std::size_t>(ids[i])] = static_cast<std::uint32_t>(i);
      use_dense_ = true;
    } else {
      sparse_.reserve(ids.size());
      for (std::size_t i = 0; i < ids.size(); ++i) sparse_.emplace(ids[i], static_cast<std::uint32_t>(i));
    }
  }

  std::uint32_t find(std::int64_t id) const noexcept {
    if (use_dense_) {
      if (id < 0 || static_cast<std::uint64_t>(id) >= dense_.size()) return npos;
      return dense_[static_cast<std::size_t>(id)];
    }
    const auto it = sparse_.find(id);
    return it == sparse_.end() ? npos : it->second;
  }

  bool contains(std::int64_t id) const noexcept { return find(id) != npos; }

 private:
  bool use_dense_ = false;
  std::vector<std::uint32_t> dense_;
  std::unordered_map<std::int64_t, std::uint32_t> sparse_;
};

}  // namespace coolgraph::detail
