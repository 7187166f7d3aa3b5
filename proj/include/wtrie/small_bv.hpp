#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "wtrie/bits.hpp"
#include "wtrie/error.hpp"

namespace wtrie {

// Appendable bitvector of bounded length with explicit query support: the
// 1-count before every 64-bit word is stored as a saturating 32-bit sample,
// so rank is a sample plus an in-word popcount. A running 1-count and the
// last positions of each bit value make append O(1).
class small_bv {
 public:
  static constexpr std::size_t kMaxBits = std::size_t{1} << 16;
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  explicit small_bv(std::size_t capacity = kMaxBits) : capacity_(std::min(capacity, kMaxBits)) {}

  std::size_t size() const { return bits_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return bits_.size() >= capacity_; }
  std::size_t count(bool b) const { return b ? ones_ : size() - ones_; }
  std::size_t last_position(bool b) const { return last_[b]; }
  const bit_string& bits() const { return bits_; }

  void append(bool b) {
    if (full()) throw range_error("small_bv::append: capacity exceeded");
    if (bits_.size() % kWordBits == 0) samples_.push_back(saturate(ones_));
    last_[b] = bits_.size();
    bits_.push_back(b);
    ones_ += b;
  }

  bool access(std::size_t pos) const {
    if (pos >= size()) throw range_error("small_bv::access: position out of range");
    return bits_[pos];
  }

  std::size_t rank(bool b, std::size_t pos) const {
    if (pos > size()) throw range_error("small_bv::rank: position out of range");
    std::size_t ones;
    if (pos == size()) {
      ones = ones_;
    } else {
      const std::size_t w = pos / kWordBits;
      ones = samples_[w] + rank_word(bits_.words()[w], pos % kWordBits, true);
    }
    return b ? ones : pos - ones;
  }

  std::size_t select(bool b, std::size_t idx) const {
    if (idx >= count(b)) throw range_error("small_bv::select: index out of range");
    if (idx + 1 == count(b)) return last_[b];
    // Last word whose preceding b-count is <= idx.
    std::size_t lo = 0, hi = samples_.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (before_word(b, mid) <= idx) lo = mid; else hi = mid;
    }
    std::uint64_t w = bits_.words()[lo];
    if (!b) {
      const std::size_t len = std::min<std::size_t>(kWordBits, size() - lo * kWordBits);
      w = ~w & low_mask(static_cast<unsigned>(len));
    }
    return lo * kWordBits + select_word(w, static_cast<unsigned>(idx - before_word(b, lo)));
  }

  std::uint64_t extract(std::size_t pos, unsigned len) const {
    if (pos + len > size()) throw range_error("small_bv::extract out of range");
    return bits_.get_word(pos, len);
  }

  std::size_t size_in_bits() const {
    return bits_.capacity_bits() + 32 * samples_.capacity() + 4 * kWordBits;
  }

 private:
  static std::uint32_t saturate(std::size_t v) {
    return static_cast<std::uint32_t>(std::min<std::size_t>(v, std::numeric_limits<std::uint32_t>::max()));
  }

  std::size_t before_word(bool b, std::size_t w) const {
    return b ? samples_[w] : w * kWordBits - samples_[w];
  }

  std::size_t capacity_;
  bit_string bits_;
  std::vector<std::uint32_t> samples_;
  std::size_t ones_ = 0;
  std::size_t last_[2] = {npos, npos};
};

}  // namespace wtrie
