#pragma once

// Append-only bitvector: sealed blocks of L bits stored as rrr_vectors plus a
// small_bv tail of fewer than L bits. A freshly sealed block keeps answering
// from its frozen tail until its rrr_vector is finished; the build advances a
// fixed number of blocks per append. When the length reaches L^2 the block
// length doubles and adjacent pairs of old blocks are re-encoded, again a few
// blocks per append.
//
// The vector may also carry a logical left offset: positions below the offset
// read as a fixed fill bit without any storage. This is how a wavelet trie
// node is initialized to a constant run in O(1).

#include <algorithm>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wtrie/fid_piece.hpp"
#include "wtrie/rrr.hpp"
#include "wtrie/serialize.hpp"
#include "wtrie/small_bv.hpp"

namespace wtrie {

class append_fid {
 public:
  static constexpr std::size_t kDefaultBlockBits = std::size_t{1} << 12;
  static constexpr std::size_t kMaxBlockBits = small_bv::kMaxBits;
  static constexpr std::size_t kStepsPerAppend = 2;

  append_fid() : append_fid(false, 0, kDefaultBlockBits) {}
  explicit append_fid(std::size_t block_bits) : append_fid(false, 0, block_bits) {}

  append_fid(bool fill, std::size_t offset, std::size_t block_bits = kDefaultBlockBits)
      : fill_(fill), offset_(offset), block_bits_(normalize_block_bits(block_bits)), tail_(block_bits_) {}

  // b^n in O(1).
  static append_fid constant(bool b, std::size_t n) { return append_fid(b, n); }

  std::size_t size() const { return offset_ + stored_; }
  std::size_t count(bool b) const { return (b == fill_ ? offset_ : 0) + (b ? ones_ : stored_ - ones_); }

  void append(bool b) {
    tail_.append(b);
    ++stored_;
    ones_ += b;
    if (tail_.full()) seal_block();
    if (!growth_ && block_bits_ < kMaxBlockBits && stored_ >= block_bits_ * block_bits_) grow_block_length();
    const std::size_t used = rebuild_step(kStepsPerAppend);
    last_steps_ = used;
    max_steps_ = std::max(max_steps_, used);
  }

  bool access(std::size_t pos) const {
    if (pos >= size()) throw range_error("append_fid::access: position out of range");
    if (pos < offset_) return fill_;
    pos -= offset_;
    if (pos >= tail_start_) return tail_.access(pos - tail_start_);
    const block& blk = find_block(pos);
    return detail::piece_access(blk.piece, pos - blk.start);
  }

  std::size_t rank(bool b, std::size_t pos) const {
    if (pos > size()) throw range_error("append_fid::rank: position out of range");
    if (pos <= offset_) return b == fill_ ? pos : 0;
    return (b == fill_ ? offset_ : 0) + stored_rank(b, pos - offset_);
  }

  std::size_t select(bool b, std::size_t idx) const {
    if (idx >= count(b)) throw range_error("append_fid::select: index out of range");
    if (b == fill_) {
      if (idx < offset_) return idx;
      idx -= offset_;
    }
    return offset_ + stored_select(b, idx);
  }

  // --- structure inspection -------------------------------------------------

  std::size_t block_bits() const { return block_bits_; }
  std::size_t offset() const { return offset_; }
  bool fill() const { return fill_; }
  std::size_t tail_size() const { return tail_.size(); }
  std::size_t sealed_blocks() const { return merged_.size() + blocks_.size() - consumed_; }
  std::size_t pending_builds() const { return pending_.size(); }
  bool growth_in_progress() const { return growth_.has_value(); }
  bool quiescent() const { return pending_.empty() && !growth_; }
  std::size_t last_append_steps() const { return last_steps_; }
  std::size_t max_append_steps() const { return max_steps_; }

  // Lengths of the sealed blocks in bit order.
  std::vector<std::size_t> block_lengths() const {
    std::vector<std::size_t> out;
    for (const auto& b : merged_) out.push_back(b.length);
    for (std::size_t i = consumed_; i < blocks_.size(); ++i) out.push_back(blocks_[i].length);
    return out;
  }

  // --- incremental maintenance (driven by append; public for testing) -------

  // Turns the full tail into a sealed block and starts its static build.
  void seal_block() {
    if (!tail_.full()) throw std::logic_error("append_fid::seal_block: tail is not full");
    auto frozen = std::make_shared<const small_bv>(std::move(tail_));
    block blk{tail_start_, ones_ - frozen->count(true), frozen->size(), frozen->count(true), frozen};
    pending_.push_back({blk.start, rrr_builder(
                                       [frozen](std::size_t pos, unsigned len) { return frozen->extract(pos, len); },
                                       frozen->size())});
    blocks_.push_back(std::move(blk));
    tail_start_ += frozen->size();
    tail_ = small_bv(block_bits_);
  }

  // Starts doubling the block length; pairs of old blocks merge incrementally.
  void grow_block_length() {
    if (growth_) throw std::logic_error("append_fid::grow_block_length: growth already in progress");
    if (block_bits_ >= kMaxBlockBits) return;
    growth_ = growth_state{block_bits_, blocks_.size(), std::nullopt};
    block_bits_ *= 2;
    if (tail_.size() == 0) tail_ = small_bv(block_bits_);
  }

  // Runs up to `budget` block encodings: pending seals first, then growth.
  // Returns the number of blocks encoded.
  std::size_t rebuild_step(std::size_t budget) {
    std::size_t used = 0;
    while (used < budget && !pending_.empty()) {
      auto& p = pending_.front();
      const std::size_t before = p.builder.blocks_done();
      p.builder.step(budget - used);
      used += p.builder.blocks_done() - before;
      if (!p.builder.done()) break;
      block& blk = find_block_by_start(p.start);
      blk.piece = std::make_shared<const rrr_vector>(p.builder.finish());
      pending_.pop_front();
    }
    if (pending_.empty()) used += growth_step(budget - used);
    return used;
  }

  // Completes all pending work regardless of budget.
  void flush() {
    while (!quiescent()) rebuild_step(std::size_t{1} << 20);
  }

  // --- space ----------------------------------------------------------------

  // Encoded bits of sealed blocks (static payload only).
  std::size_t sealed_payload_bits() const {
    std::size_t bits = 0;
    for_each_block([&](const block& b) {
      if (auto* f = std::get_if<std::shared_ptr<const rrr_vector>>(&b.piece)) bits += (*f)->payload_bits();
    });
    return bits;
  }

  std::size_t size_in_bits() const {
    std::size_t bits = tail_.size_in_bits() + 8 * kWordBits;
    for_each_block([&](const block& b) { bits += detail::piece_bits(b.piece) + 2 * kWordBits; });
    if (growth_ && growth_->pair) bits += growth_->pair->built_bits;
    return bits;
  }

  // --- serialization (quiescent state only) --------------------------------

  void serialize(byte_writer& out) const {
    if (!quiescent()) throw std::logic_error("append_fid::serialize: pending rebuilds; call flush() first");
    out.put_bytes("ABV1");
    out.put_u8(fill_);
    out.put_u64(offset_);
    out.put_u64(block_bits_);
    out.put_u64(blocks_.size());
    for (const auto& b : blocks_) std::get<std::shared_ptr<const rrr_vector>>(b.piece)->serialize(out);
    write_bits(out, tail_.bits());
    out.put_u64(tail_.capacity());
    for (const auto& b : blocks_) out.put_u64(b.start);
    for (const auto& b : blocks_) out.put_u64(b.ones_before);
  }

  static append_fid deserialize(byte_reader& in) {
    in.expect_magic("ABV1");
    const std::uint8_t fill = in.get_u8();
    if (fill > 1) throw decode_error("ABV1: bad fill bit");
    const std::uint64_t offset = in.get_u64();
    const std::uint64_t block_bits = in.get_u64();
    if (block_bits == 0 || block_bits > kMaxBlockBits || (block_bits & (block_bits - 1)) != 0)
      throw decode_error("ABV1: bad block length");
    append_fid v(fill != 0, offset, block_bits);
    const std::uint64_t nblocks = in.get_u64();
    if (nblocks > in.remaining()) throw decode_error("ABV1: block count exceeds payload");
    std::vector<std::shared_ptr<const rrr_vector>> fids;
    for (std::uint64_t i = 0; i < nblocks; ++i) fids.push_back(std::make_shared<const rrr_vector>(rrr_vector::deserialize(in)));
    const bit_string tail_bits = read_bits(in);
    const std::uint64_t tail_cap = in.get_u64();
    if (tail_cap == 0 || tail_cap > kMaxBlockBits || tail_bits.size() >= tail_cap)
      throw decode_error("ABV1: bad tail capacity");
    std::size_t start = 0, ones = 0;
    for (std::uint64_t i = 0; i < nblocks; ++i) {
      if (in.get_u64() != start) throw decode_error("ABV1: block start sums mismatch");
      v.blocks_.push_back({start, ones, fids[i]->size(), fids[i]->count(true), fids[i]});
      start += fids[i]->size();
      ones += fids[i]->count(true);
    }
    for (std::uint64_t i = 0; i < nblocks; ++i)
      if (in.get_u64() != v.blocks_[i].ones_before) throw decode_error("ABV1: block rank sums mismatch");
    v.tail_start_ = start;
    v.tail_ = small_bv(tail_cap);
    for (std::size_t i = 0; i < tail_bits.size(); ++i) v.tail_.append(tail_bits[i]);
    v.stored_ = start + tail_bits.size();
    v.ones_ = ones + tail_bits.count_ones();
    return v;
  }

 private:
  struct block {
    std::size_t start;
    std::size_t ones_before;
    std::size_t length;
    std::size_t ones;
    detail::fid_piece piece;
  };

  struct pending_seal {
    std::size_t start;
    rrr_builder builder;
  };

  struct pair_build {
    rrr_builder builder;
    std::size_t built_bits;
  };

  struct growth_state {
    std::size_t old_block_bits;
    std::size_t end;  // blocks_[0, end) existed when growth started
    std::optional<pair_build> pair;
  };

  static std::size_t normalize_block_bits(std::size_t l) {
    l = std::clamp<std::size_t>(l, 2, kMaxBlockBits);
    return std::bit_ceil(l);
  }

  template <class F>
  void for_each_block(F&& f) const {
    for (const auto& b : merged_) f(b);
    for (std::size_t i = consumed_; i < blocks_.size(); ++i) f(blocks_[i]);
  }

  static std::size_t search(const std::vector<block>& v, std::size_t lo, std::size_t hi, std::size_t pos) {
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (v[mid].start <= pos) lo = mid; else hi = mid;
    }
    return lo;
  }

  const block& find_block(std::size_t pos) const {
    if (!merged_.empty() && pos < merged_.back().start + merged_.back().length)
      return merged_[search(merged_, 0, merged_.size(), pos)];
    return blocks_[search(blocks_, consumed_, blocks_.size(), pos)];
  }

  block& find_block_by_start(std::size_t start) {
    auto& v = (!merged_.empty() && start < merged_.back().start + merged_.back().length) ? merged_ : blocks_;
    const std::size_t lo = &v == &blocks_ ? consumed_ : 0;
    block& b = v[search(v, lo, v.size(), start)];
    if (b.start != start) throw std::logic_error("append_fid: pending block not found");
    return b;
  }

  template <class Pred>
  std::size_t search_rank(const std::vector<block>& v, std::size_t lo, std::size_t hi, Pred before) const {
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (before(v[mid])) lo = mid; else hi = mid;
    }
    return lo;
  }

  std::size_t stored_rank(bool b, std::size_t pos) const {
    if (pos == stored_) return b ? ones_ : stored_ - ones_;
    std::size_t ones;
    if (pos >= tail_start_) {
      ones = ones_ - tail_.count(true) + tail_.rank(true, pos - tail_start_);
    } else {
      const block& blk = find_block(pos);
      ones = blk.ones_before + detail::piece_rank(blk.piece, true, pos - blk.start);
    }
    return b ? ones : pos - ones;
  }

  std::size_t stored_select(bool b, std::size_t idx) const {
    const auto before = [b](const block& blk) { return b ? blk.ones_before : blk.start - blk.ones_before; };
    const std::size_t tail_ones_before = ones_ - tail_.count(true);
    const std::size_t tail_before = b ? tail_ones_before : tail_start_ - tail_ones_before;
    if (idx >= tail_before) return tail_start_ + tail_.select(b, idx - tail_before);
    const auto fits = [&](const block& x) { return before(x) <= idx; };
    const std::size_t rest_before = consumed_ < blocks_.size() ? before(blocks_[consumed_]) : tail_before;
    const block* blk = !merged_.empty() && idx < rest_before
                           ? &merged_[search_rank(merged_, 0, merged_.size(), fits)]
                           : &blocks_[search_rank(blocks_, consumed_, blocks_.size(), fits)];
    return blk->start + detail::piece_select(blk->piece, b, idx - before(*blk));
  }

  static bool is_built(const block& b) { return std::holds_alternative<std::shared_ptr<const rrr_vector>>(b.piece); }

  std::size_t growth_step(std::size_t budget) {
    std::size_t used = 0;
    while (growth_ && used < budget) {
      auto& g = *growth_;
      if (!g.pair) {
        if (consumed_ == g.end) {
          finish_growth();
          break;
        }
        const block& first = blocks_[consumed_];
        const bool pairable = consumed_ + 1 < g.end && first.length == g.old_block_bits &&
                              blocks_[consumed_ + 1].length == g.old_block_bits;
        if (!pairable) {
          if (!is_built(first)) break;
          merged_.push_back(first);
          blocks_[consumed_].piece = std::shared_ptr<const rrr_vector>();
          ++consumed_;
          continue;
        }
        const block& second = blocks_[consumed_ + 1];
        if (!is_built(first) || !is_built(second)) break;
        auto a = std::get<std::shared_ptr<const rrr_vector>>(first.piece);
        auto b = std::get<std::shared_ptr<const rrr_vector>>(second.piece);
        const std::size_t split = a->size();
        g.pair.emplace(pair_build{
            rrr_builder(
                [a, b, split](std::size_t pos, unsigned len) {
                  if (pos + len <= split) return a->extract(pos, len);
                  if (pos >= split) return b->extract(pos - split, len);
                  const auto left = static_cast<unsigned>(split - pos);
                  return a->extract(pos, left) | (b->extract(0, len - left) << left);
                },
                a->size() + b->size()),
            0});
      }
      auto& pb = *g.pair;
      const std::size_t before = pb.builder.blocks_done();
      pb.builder.step(budget - used);
      used += pb.builder.blocks_done() - before;
      pb.built_bits = pb.builder.blocks_done() * rrr_detail::kBlockBits;
      if (!pb.builder.done()) break;
      const block& first = blocks_[consumed_];
      const block& second = blocks_[consumed_ + 1];
      merged_.push_back({first.start, first.ones_before, first.length + second.length, first.ones + second.ones,
                         std::make_shared<const rrr_vector>(pb.builder.finish())});
      // The old pair is released as soon as its replacement exists.
      blocks_[consumed_].piece = std::shared_ptr<const rrr_vector>();
      blocks_[consumed_ + 1].piece = std::shared_ptr<const rrr_vector>();
      consumed_ += 2;
      g.pair.reset();
    }
    return used;
  }

  void finish_growth() {
    for (std::size_t i = consumed_; i < blocks_.size(); ++i) merged_.push_back(std::move(blocks_[i]));
    blocks_ = std::move(merged_);
    merged_.clear();
    consumed_ = 0;
    growth_.reset();
  }

  bool fill_;
  std::size_t offset_;
  std::size_t block_bits_;
  small_bv tail_;
  std::size_t tail_start_ = 0;
  std::size_t stored_ = 0;
  std::size_t ones_ = 0;
  // During growth, merged_ holds the re-encoded prefix and blocks_[consumed_..]
  // the rest; otherwise merged_ is empty and consumed_ is 0.
  std::vector<block> merged_;
  std::vector<block> blocks_;
  std::size_t consumed_ = 0;
  std::deque<pending_seal> pending_;
  std::optional<growth_state> growth_;
  std::size_t last_steps_ = 0;
  std::size_t max_steps_ = 0;
};

}  // namespace wtrie
