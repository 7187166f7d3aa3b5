#pragma once

// Append-only bitvector built with the logarithmic method.
//
// The bitvector is the concatenation V_t . V_{t-1} ... V_1. V_1 is a small_bv
// of at most r bits; every other V_i is empty or holds exactly 2^(i-2) * r
// bits in a static rrr_vector, like the digits of a binary counter. When V_1
// fills up, the smallest empty V_j absorbs V_{j-1} ... V_1. Its static vector
// is not built on the spot: a proxy over the absorbed pieces answers queries
// while a resumable builder runs a bounded number of blocks per append.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "wtrie/fid_piece.hpp"
#include "wtrie/rrr.hpp"
#include "wtrie/small_bv.hpp"

namespace wtrie {

class segment_stack {
 public:
  // Blocks encoded per append, shared by all pending builds (smallest first).
  static constexpr std::size_t kStepsPerAppend = 2;
  // r tracks kRateConstant * log2(n0), doubled when the top segment is rebuilt.
  static constexpr std::size_t kRateConstant = 4;
  static constexpr std::size_t kMinRate = 8;

  segment_stack() : r_(kMinRate), adaptive_(true), tail_(r_) {}

  // Fixed r, never updated.
  explicit segment_stack(std::size_t r) : r_(std::max<std::size_t>(r, 1)), adaptive_(false), tail_(r_) {}

  std::size_t size() const { return size_; }
  std::size_t count(bool b) const { return b ? ones_ : size_ - ones_; }
  std::size_t rate() const { return r_; }

  void append(bool b) {
    tail_.append(b);
    ++size_;
    ones_ += b;
    if (tail_.size() == r_) carry();
    run_builders(kStepsPerAppend);
  }

  bool access(std::size_t pos) const {
    if (pos >= size_) throw range_error("segment_stack::access: position out of range");
    if (pos >= tail_start()) return tail_.access(pos - tail_start());
    const auto& e = dir_[find(pos)];
    return levels_[e.level].access(pos - e.start);
  }

  std::size_t rank(bool b, std::size_t pos) const {
    if (pos > size_) throw range_error("segment_stack::rank: position out of range");
    if (pos == size_) return count(b);
    if (pos >= tail_start()) {
      const std::size_t s = tail_start(), o = ones_ - tail_.count(true);
      return (b ? o : s - o) + tail_.rank(b, pos - s);
    }
    const auto& e = dir_[find(pos)];
    const std::size_t before = b ? e.ones_before : e.start - e.ones_before;
    return before + levels_[e.level].rank(b, pos - e.start);
  }

  std::size_t select(bool b, std::size_t idx) const {
    if (idx >= count(b)) throw range_error("segment_stack::select: index out of range");
    const std::size_t s = tail_start(), o = ones_ - tail_.count(true);
    const std::size_t tail_before = b ? o : s - o;
    if (idx >= tail_before) return s + tail_.select(b, idx - tail_before);
    std::size_t lo = 0, hi = dir_.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      const std::size_t before = b ? dir_[mid].ones_before : dir_[mid].start - dir_[mid].ones_before;
      if (before <= idx) lo = mid; else hi = mid;
    }
    const auto& e = dir_[lo];
    const std::size_t before = b ? e.ones_before : e.start - e.ones_before;
    return e.start + levels_[e.level].select(b, idx - before);
  }

  // Segment lengths n_1, n_2, ..., n_t.
  std::vector<std::size_t> segment_sizes() const {
    std::vector<std::size_t> out{tail_.size()};
    for (const auto& l : levels_) out.push_back(l.size);
    return out;
  }

  // n_1 < r and n_i in {0, 2^(i-2) r} for i > 1.
  bool shape_ok() const {
    if (tail_.size() >= r_) return false;
    std::size_t total = tail_.size();
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      if (levels_[i].size != 0 && levels_[i].size != (std::size_t{1} << i) * r_) return false;
      total += levels_[i].size;
    }
    return total == size_;
  }

  std::size_t pending_builds() const {
    return static_cast<std::size_t>(std::count_if(levels_.begin(), levels_.end(), [](const level& l) { return l.builder.has_value(); }));
  }
  std::size_t abandoned_builds() const { return abandoned_; }
  std::size_t last_append_steps() const { return last_steps_; }
  std::size_t max_append_steps() const { return max_steps_; }

  // Completes every pending build regardless of budget.
  void flush() {
    for (auto& l : levels_)
      if (l.builder) finish_level(l, l.builder->blocks_left());
  }

  std::size_t size_in_bits() const {
    std::size_t bits = tail_.size_in_bits() + 4 * kWordBits * dir_.size();
    for (const auto& l : levels_) {
      if (l.fid) bits += l.fid->size_in_bits();
      if (l.proxy) bits += l.proxy->size_in_bits();
    }
    return bits;
  }

 private:
  struct level {
    std::size_t size = 0;
    std::size_t ones = 0;
    std::shared_ptr<const rrr_vector> fid;
    std::shared_ptr<const detail::piece_list> proxy;
    std::optional<rrr_builder> builder;

    bool access(std::size_t pos) const { return fid ? fid->access(pos) : proxy->access(pos); }
    std::size_t rank(bool b, std::size_t pos) const { return fid ? fid->rank(b, pos) : proxy->rank(b, pos); }
    std::size_t select(bool b, std::size_t idx) const { return fid ? fid->select(b, idx) : proxy->select(b, idx); }
  };

  struct dir_entry {
    std::size_t start;
    std::size_t ones_before;
    std::size_t level;
  };

  std::size_t tail_start() const { return size_ - tail_.size(); }

  std::size_t find(std::size_t pos) const {
    std::size_t lo = 0, hi = dir_.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (dir_[mid].start <= pos) lo = mid; else hi = mid;
    }
    return lo;
  }

  void carry() {
    std::size_t j = 0;
    while (j < levels_.size() && levels_[j].size != 0) ++j;
    const bool new_top = j == levels_.size();
    if (new_top) levels_.emplace_back();

    auto proxy = std::make_shared<detail::piece_list>();
    std::size_t ones = 0;
    for (std::size_t i = j; i-- > 0;) {
      level& l = levels_[i];
      if (l.fid) {
        proxy->push_back(l.fid);
      } else {
        for (const auto& p : l.proxy->pieces()) proxy->push_back(p);
        if (l.builder) ++abandoned_;
      }
      ones += l.ones;
      l = level{};
    }
    ones += tail_.count(true);
    proxy->push_back(std::make_shared<const small_bv>(std::move(tail_)));
    tail_ = small_bv(r_);

    level& top = levels_[j];
    top.size = proxy->size();
    top.ones = ones;
    top.proxy = proxy;
    top.builder.emplace(
        [proxy](std::size_t pos, unsigned len) { return proxy->extract(pos, len); }, proxy->size());

    if (new_top && adaptive_ && j >= 1) {
      const double target = kRateConstant * std::log2(static_cast<double>(std::max<std::size_t>(size_, 2)));
      if (static_cast<double>(2 * r_) <= target) {
        // V_j holds 2^(j-2) r bits = 2^(j-3) (2r): relabel it one level down.
        r_ *= 2;
        levels_.erase(levels_.begin());
        tail_ = small_bv(r_);
      }
    }
    rebuild_directory();
  }

  void rebuild_directory() {
    dir_.clear();
    std::size_t start = 0, ones = 0;
    for (std::size_t i = levels_.size(); i-- > 0;) {
      if (levels_[i].size == 0) continue;
      dir_.push_back({start, ones, i});
      start += levels_[i].size;
      ones += levels_[i].ones;
    }
  }

  std::size_t finish_level(level& l, std::size_t budget) {
    const std::size_t before = l.builder->blocks_done();
    l.builder->step(budget);
    const std::size_t used = l.builder->blocks_done() - before;
    if (l.builder->done()) {
      l.fid = std::make_shared<const rrr_vector>(l.builder->finish());
      l.builder.reset();
      l.proxy.reset();
    }
    return used;
  }

  void run_builders(std::size_t budget) {
    std::size_t used = 0;
    for (auto& l : levels_) {
      if (used == budget) break;
      if (l.builder) used += finish_level(l, budget - used);
    }
    last_steps_ = used;
    max_steps_ = std::max(max_steps_, used);
  }

  std::size_t r_;
  bool adaptive_;
  small_bv tail_;
  std::vector<level> levels_;  // levels_[i] is V_{i+2}
  std::vector<dir_entry> dir_;  // non-empty levels in bit order
  std::size_t size_ = 0;
  std::size_t ones_ = 0;
  std::size_t abandoned_ = 0;
  std::size_t last_steps_ = 0;
  std::size_t max_steps_ = 0;
};

}  // namespace wtrie
