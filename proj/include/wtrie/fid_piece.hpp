#pragma once

// Read-only building blocks shared by the append-only bitvectors: a piece is
// either a finished static vector or a frozen small_bv still answering
// queries while its static replacement is being built.

#include <algorithm>
#include <memory>
#include <variant>
#include <vector>

#include "wtrie/rrr.hpp"
#include "wtrie/small_bv.hpp"

namespace wtrie::detail {

using fid_piece = std::variant<std::shared_ptr<const rrr_vector>, std::shared_ptr<const small_bv>>;

inline std::size_t piece_size(const fid_piece& p) {
  return std::visit([](const auto& v) { return v->size(); }, p);
}
inline std::size_t piece_count(const fid_piece& p, bool b) {
  return std::visit([b](const auto& v) { return v->count(b); }, p);
}
inline bool piece_access(const fid_piece& p, std::size_t pos) {
  return std::visit([pos](const auto& v) { return v->access(pos); }, p);
}
inline std::size_t piece_rank(const fid_piece& p, bool b, std::size_t pos) {
  return std::visit([b, pos](const auto& v) { return v->rank(b, pos); }, p);
}
inline std::size_t piece_select(const fid_piece& p, bool b, std::size_t idx) {
  return std::visit([b, idx](const auto& v) { return v->select(b, idx); }, p);
}
inline std::uint64_t piece_extract(const fid_piece& p, std::size_t pos, unsigned len) {
  return std::visit([pos, len](const auto& v) { return v->extract(pos, len); }, p);
}
inline std::size_t piece_bits(const fid_piece& p) {
  return std::visit([](const auto& v) { return v->size_in_bits(); }, p);
}

// Concatenation of pieces with prefix sums of lengths and 1-counts.
class piece_list {
 public:
  void push_back(fid_piece p) {
    const std::size_t len = piece_size(p);
    if (len == 0) return;
    starts_.push_back(size_);
    ones_before_.push_back(ones_);
    size_ += len;
    ones_ += piece_count(p, true);
    pieces_.push_back(std::move(p));
  }

  std::size_t size() const { return size_; }
  std::size_t count(bool b) const { return b ? ones_ : size_ - ones_; }
  const std::vector<fid_piece>& pieces() const { return pieces_; }

  bool access(std::size_t pos) const {
    const std::size_t i = locate(pos);
    return piece_access(pieces_[i], pos - starts_[i]);
  }

  std::size_t rank(bool b, std::size_t pos) const {
    if (pos == size_) return count(b);
    const std::size_t i = locate(pos);
    const std::size_t before = b ? ones_before_[i] : starts_[i] - ones_before_[i];
    return before + piece_rank(pieces_[i], b, pos - starts_[i]);
  }

  std::size_t select(bool b, std::size_t idx) const {
    std::size_t lo = 0, hi = pieces_.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (before(b, mid) <= idx) lo = mid; else hi = mid;
    }
    return starts_[lo] + piece_select(pieces_[lo], b, idx - before(b, lo));
  }

  std::uint64_t extract(std::size_t pos, unsigned len) const {
    std::uint64_t out = 0;
    unsigned got = 0;
    while (got < len) {
      const std::size_t p = pos + got;
      const std::size_t i = locate(p);
      const std::size_t in_piece = p - starts_[i];
      const auto take = static_cast<unsigned>(std::min<std::size_t>(len - got, piece_size(pieces_[i]) - in_piece));
      out |= piece_extract(pieces_[i], in_piece, take) << got;
      got += take;
    }
    return out;
  }

  std::size_t size_in_bits() const {
    std::size_t bits = 2 * kWordBits * pieces_.size();
    for (const auto& p : pieces_) bits += piece_bits(p);
    return bits;
  }

 private:
  std::size_t locate(std::size_t pos) const {
    return static_cast<std::size_t>(std::upper_bound(starts_.begin(), starts_.end(), pos) - starts_.begin()) - 1;
  }
  std::size_t before(bool b, std::size_t i) const { return b ? ones_before_[i] : starts_[i] - ones_before_[i]; }

  std::vector<fid_piece> pieces_;
  std::vector<std::size_t> starts_;
  std::vector<std::size_t> ones_before_;
  std::size_t size_ = 0;
  std::size_t ones_ = 0;
};

}  // namespace wtrie::detail
