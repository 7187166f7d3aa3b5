#pragma once

// Static compressed bitvector in the class/offset block encoding.
//
// The bitvector is cut into 63-bit blocks. Each block is stored as its class
// (popcount, 6 bits) plus the lexicographic rank of its bit pattern among all
// patterns of that class, in ceil(log2 C(63, class)) bits. Every 32 blocks a
// superblock sample records the absolute 1-count and the offset-stream
// position, so rank/access decode at most 32 classes and one block. select
// binary-searches the superblock samples, which makes it O(log n).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wtrie/bits.hpp"
#include "wtrie/error.hpp"
#include "wtrie/serialize.hpp"

namespace wtrie {

namespace rrr_detail {

inline constexpr unsigned kBlockBits = 63;
inline constexpr unsigned kClassBits = 6;
inline constexpr unsigned kBlocksPerSuper = 32;
inline constexpr unsigned kSuperBits = kBlockBits * kBlocksPerSuper;

struct tables {
  std::array<std::array<std::uint64_t, 64>, 64> binom{};
  std::array<std::uint8_t, 64> width{};
};

constexpr std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > ~std::uint64_t{0} - b ? ~std::uint64_t{0} : a + b;
}

constexpr tables make_tables() {
  tables t;
  for (unsigned n = 0; n < 64; ++n) {
    t.binom[n][0] = 1;
    for (unsigned k = 1; k <= n; ++k)
      t.binom[n][k] = saturating_add(t.binom[n - 1][k - 1], k <= n - 1 ? t.binom[n - 1][k] : 0);
  }
  for (unsigned k = 0; k <= kBlockBits; ++k)
    t.width[k] = static_cast<std::uint8_t>(std::bit_width(t.binom[kBlockBits][k] - 1));
  return t;
}

inline constexpr tables kTables = make_tables();

inline constexpr std::uint64_t binom(unsigned n, unsigned k) { return k > n ? 0 : kTables.binom[n][k]; }
inline constexpr unsigned offset_width(unsigned cls) { return kTables.width[cls]; }

// Lexicographic rank of a 63-bit pattern among patterns with the same popcount.
constexpr std::uint64_t encode_block(std::uint64_t bits) {
  unsigned k = static_cast<unsigned>(std::popcount(bits));
  std::uint64_t offset = 0;
  for (unsigned i = 0; i < kBlockBits && k > 0; ++i) {
    if ((bits >> i) & 1) {
      offset += binom(kBlockBits - i - 1, k);
      --k;
    }
  }
  return offset;
}

constexpr std::uint64_t decode_block(std::uint64_t offset, unsigned k) {
  std::uint64_t bits = 0;
  for (unsigned i = 0; i < kBlockBits && k > 0; ++i) {
    const std::uint64_t c = binom(kBlockBits - i - 1, k);
    if (offset >= c) {
      bits |= std::uint64_t{1} << i;
      offset -= c;
      --k;
    }
  }
  return bits;
}

}  // namespace rrr_detail

// Supplies up to 64 bits of a builder's input starting at pos, LSB first.
using bit_source = std::function<std::uint64_t(std::size_t pos, unsigned len)>;

inline bit_source make_bit_source(std::shared_ptr<const bit_string> bits) {
  return [bits = std::move(bits)](std::size_t pos, unsigned len) { return bits->get_word(pos, len); };
}

class rrr_builder;

class rrr_vector {
 public:
  // Redundancy allowance above B(m, n) for the payload of an n-bit vector:
  // kRedundancyScale * n * loglog(n) / log(n) + kRedundancyConstant.
  static constexpr double kRedundancyScale = 2.0;
  static constexpr double kRedundancyConstant = 256.0;

  static double redundancy_bound(std::uint64_t n) {
    if (n < 4) return kRedundancyConstant;
    const double lg = std::log2(static_cast<double>(n));
    return kRedundancyScale * static_cast<double>(n) * std::log2(lg) / lg + kRedundancyConstant;
  }

  rrr_vector() = default;
  explicit rrr_vector(const bit_string& bits);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::size_t count(bool b) const { return b ? ones_ : size_ - ones_; }

  bool access(std::size_t pos) const {
    if (pos >= size_) throw range_error("rrr_vector::access: position out of range");
    const auto loc = locate(pos / rrr_detail::kBlockBits);
    return (block_bits(loc) >> (pos % rrr_detail::kBlockBits)) & 1;
  }

  std::size_t rank(bool b, std::size_t pos) const {
    if (pos > size_) throw range_error("rrr_vector::rank: position out of range");
    std::size_t ones;
    if (pos == size_) {
      ones = ones_;
    } else {
      const auto loc = locate(pos / rrr_detail::kBlockBits);
      ones = loc.ones_before + rank_word(block_bits(loc), pos % rrr_detail::kBlockBits, true);
    }
    return b ? ones : pos - ones;
  }

  std::size_t select(bool b, std::size_t idx) const {
    using namespace rrr_detail;
    if (idx >= count(b)) throw range_error("rrr_vector::select: index out of range");
    // Last superblock whose preceding b-count is <= idx.
    std::size_t lo = 0, hi = sb_ones_.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (before_super(b, mid) <= idx) lo = mid; else hi = mid;
    }
    std::size_t seen = before_super(b, lo);
    std::size_t pos = sb_pos_[lo];
    const std::size_t nblocks = num_blocks();
    for (std::size_t bi = lo * kBlocksPerSuper; bi < nblocks; ++bi) {
      const unsigned cls = class_of(bi);
      const std::size_t len = block_length(bi);
      const std::size_t here = b ? cls : len - cls;
      if (seen + here > idx) {
        std::uint64_t bits = decode_block(offsets_.get_word(pos, offset_width(cls)), cls);
        if (!b) bits = ~bits & low_mask(static_cast<unsigned>(len));
        return bi * kBlockBits + select_word(bits, static_cast<unsigned>(idx - seen));
      }
      seen += here;
      pos += offset_width(cls);
    }
    throw range_error("rrr_vector::select: inconsistent directory");
  }

  // Up to 64 bits starting at pos (pos + len <= size()).
  std::uint64_t extract(std::size_t pos, unsigned len) const {
    using namespace rrr_detail;
    if (pos + len > size_) throw range_error("rrr_vector::extract out of range");
    std::uint64_t out = 0;
    unsigned got = 0;
    while (got < len) {
      const std::size_t p = pos + got;
      const auto loc = locate(p / kBlockBits);
      const unsigned in_block = p % kBlockBits;
      const unsigned take = std::min<unsigned>(len - got, kBlockBits - in_block);
      out |= ((block_bits(loc) >> in_block) & low_mask(take)) << got;
      got += take;
    }
    return out;
  }

  bit_string to_bits() const {
    bit_string out;
    out.reserve(size_);
    for (std::size_t p = 0; p < size_; p += kWordBits) {
      const auto len = static_cast<unsigned>(std::min<std::size_t>(kWordBits, size_ - p));
      out.append_bits(extract(p, len), len);
    }
    return out;
  }

  // Class stream + offset stream + superblock samples.
  std::size_t payload_bits() const {
    return classes_.size() + offsets_.size() + 2 * kWordBits * sb_ones_.size();
  }

  std::size_t size_in_bits() const { return payload_bits() + 2 * kWordBits; }

  void serialize(byte_writer& out) const {
    out.put_bytes("RRR1");
    out.put_u64(size_);
    out.put_u64(ones_);
    write_bits(out, classes_);
    write_bits(out, offsets_);
    out.put_u64(sb_ones_.size());
    for (auto v : sb_ones_) out.put_u64(v);
    for (auto v : sb_pos_) out.put_u64(v);
  }

  static rrr_vector deserialize(byte_reader& in) {
    using namespace rrr_detail;
    in.expect_magic("RRR1");
    rrr_vector v;
    v.size_ = in.get_u64();
    v.ones_ = in.get_u64();
    v.classes_ = read_bits(in);
    v.offsets_ = read_bits(in);
    const std::uint64_t supers = in.get_u64();
    if (supers > in.remaining() / 16) throw decode_error("RRR1: superblock count exceeds payload");
    v.sb_ones_.resize(supers);
    v.sb_pos_.resize(supers);
    for (auto& x : v.sb_ones_) x = in.get_u64();
    for (auto& x : v.sb_pos_) x = in.get_u64();
    v.validate();
    return v;
  }

  friend bool operator==(const rrr_vector&, const rrr_vector&) = default;

 private:
  friend class rrr_builder;

  struct block_loc {
    std::size_t block;
    std::size_t ones_before;
    std::size_t offset_pos;
  };

  std::size_t num_blocks() const { return classes_.size() / rrr_detail::kClassBits; }

  std::size_t block_length(std::size_t bi) const {
    const std::size_t start = bi * rrr_detail::kBlockBits;
    return std::min<std::size_t>(rrr_detail::kBlockBits, size_ - start);
  }

  unsigned class_of(std::size_t bi) const {
    return static_cast<unsigned>(classes_.get_word(bi * rrr_detail::kClassBits, rrr_detail::kClassBits));
  }

  std::size_t before_super(bool b, std::size_t sb) const {
    return b ? sb_ones_[sb] : sb * rrr_detail::kSuperBits - sb_ones_[sb];
  }

  block_loc locate(std::size_t bi) const {
    const std::size_t sb = bi / rrr_detail::kBlocksPerSuper;
    block_loc loc{bi, sb_ones_[sb], sb_pos_[sb]};
    for (std::size_t j = sb * rrr_detail::kBlocksPerSuper; j < bi; ++j) {
      const unsigned cls = class_of(j);
      loc.ones_before += cls;
      loc.offset_pos += rrr_detail::offset_width(cls);
    }
    return loc;
  }

  std::uint64_t block_bits(const block_loc& loc) const {
    const unsigned cls = class_of(loc.block);
    return rrr_detail::decode_block(offsets_.get_word(loc.offset_pos, rrr_detail::offset_width(cls)), cls);
  }

  void validate() const {
    using namespace rrr_detail;
    const std::size_t nblocks = (size_ + kBlockBits - 1) / kBlockBits;
    if (classes_.size() != nblocks * kClassBits) throw decode_error("RRR1: class stream length mismatch");
    if (sb_ones_.size() != (nblocks + kBlocksPerSuper - 1) / kBlocksPerSuper)
      throw decode_error("RRR1: superblock count mismatch");
    std::size_t ones = 0, pos = 0;
    for (std::size_t bi = 0; bi < nblocks; ++bi) {
      if (bi % kBlocksPerSuper == 0 && (sb_ones_[bi / kBlocksPerSuper] != ones || sb_pos_[bi / kBlocksPerSuper] != pos))
        throw decode_error("RRR1: superblock sample mismatch");
      const unsigned cls = class_of(bi);
      if (cls > block_length(bi)) throw decode_error("RRR1: block class exceeds block length");
      const unsigned w = offset_width(cls);
      if (pos + w > offsets_.size()) throw decode_error("RRR1: offset stream truncated");
      if (offsets_.get_word(pos, w) >= binom(kBlockBits, cls)) throw decode_error("RRR1: offset out of range");
      ones += cls;
      pos += w;
    }
    if (ones != ones_ || pos != offsets_.size()) throw decode_error("RRR1: stream totals mismatch");
    // Padding past size() in the last block must decode to zeros.
    if (nblocks > 0) {
      const auto loc = locate(nblocks - 1);
      const auto len = static_cast<unsigned>(block_length(nblocks - 1));
      if ((block_bits(loc) & ~low_mask(len)) != 0) throw decode_error("RRR1: padding bits set");
    }
  }

  std::size_t size_ = 0;
  std::size_t ones_ = 0;
  bit_string classes_;
  bit_string offsets_;
  std::vector<std::uint64_t> sb_ones_;
  std::vector<std::uint64_t> sb_pos_;
};

// Incremental construction: each step encodes at most `budget` blocks, so the
// encoding of a long input can be interleaved with other work.
class rrr_builder {
 public:
  rrr_builder(bit_source source, std::size_t n) : source_(std::move(source)), n_(n) {
    result_.size_ = n;
    const std::size_t nblocks = total_blocks();
    result_.classes_.reserve(nblocks * rrr_detail::kClassBits);
  }

  explicit rrr_builder(std::shared_ptr<const bit_string> bits)
      : rrr_builder(make_bit_source(bits), bits->size()) {}

  explicit rrr_builder(const bit_string& bits) : rrr_builder(std::make_shared<const bit_string>(bits)) {}

  std::size_t total_blocks() const { return (n_ + rrr_detail::kBlockBits - 1) / rrr_detail::kBlockBits; }
  std::size_t blocks_done() const { return cursor_; }
  std::size_t blocks_left() const { return total_blocks() - cursor_; }
  bool done() const { return cursor_ == total_blocks(); }

  // Encodes up to `budget` blocks; returns true once the build is complete.
  // Stepping a completed builder does nothing.
  bool step(std::size_t budget) {
    using namespace rrr_detail;
    const std::size_t nblocks = total_blocks();
    for (; budget > 0 && cursor_ < nblocks; --budget, ++cursor_) {
      if (cursor_ % kBlocksPerSuper == 0) {
        result_.sb_ones_.push_back(result_.ones_);
        result_.sb_pos_.push_back(result_.offsets_.size());
      }
      const std::size_t start = cursor_ * kBlockBits;
      const auto len = static_cast<unsigned>(std::min<std::size_t>(kBlockBits, n_ - start));
      const std::uint64_t bits = source_(start, len);
      const auto cls = static_cast<unsigned>(std::popcount(bits));
      result_.classes_.append_bits(cls, kClassBits);
      result_.offsets_.append_bits(encode_block(bits), offset_width(cls));
      result_.ones_ += cls;
    }
    if (done()) source_ = nullptr;
    return done();
  }

  rrr_vector finish() {
    step(blocks_left());
    return std::move(result_);
  }

 private:
  bit_source source_;
  std::size_t n_;
  std::size_t cursor_ = 0;
  rrr_vector result_;
};

inline rrr_vector::rrr_vector(const bit_string& bits) {
  rrr_builder builder(make_bit_source(std::shared_ptr<const bit_string>(&bits, [](const bit_string*) {})), bits.size());
  *this = builder.finish();
}

}  // namespace wtrie
