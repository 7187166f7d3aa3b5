#pragma once

// Fully dynamic bitvector: the bit sequence is run-length encoded, each run
// written as an Elias gamma code, and the code stream is cut (between codes)
// into chunks of roughly 2048 bits. The chunks are the in-order leaves of an
// AVL tree whose nodes carry subtree bit and 1-counts, so access, rank,
// select, insert and delete are O(log n). A constant vector is a single run,
// so init(b, n) builds one chunk holding one gamma code.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wtrie/bits.hpp"
#include "wtrie/error.hpp"

namespace wtrie {

struct bit_run {
  bool bit;
  std::uint64_t length;
  friend bool operator==(const bit_run&, const bit_run&) = default;
};

// Maximal runs of bits, gamma-coded. Stores its first bit value explicitly.
class rle_chunk {
 public:
  rle_chunk() = default;

  // Adjacent runs with equal bits are merged and empty runs dropped.
  static rle_chunk from_runs(std::span<const bit_run> runs) {
    rle_chunk c;
    bool have = false;
    bit_run cur{false, 0};
    auto flush = [&] {
      if (!have) return;
      if (c.runs_ == 0) c.first_ = cur.bit;
      c.last_ = c.code_.size();
      gamma_append(c.code_, cur.length);
      c.bits_ += cur.length;
      if (cur.bit) c.ones_ += cur.length;
      ++c.runs_;
    };
    for (const auto& r : runs) {
      if (r.length == 0) continue;
      if (have && r.bit == cur.bit) {
        cur.length += r.length;
      } else {
        flush();
        cur = r;
        have = true;
      }
    }
    flush();
    c.code_.shrink_to_fit();
    return c;
  }

  std::vector<bit_run> runs() const {
    std::vector<bit_run> out;
    out.reserve(runs_);
    std::size_t p = 0;
    bool bit = first_;
    for (std::size_t i = 0; i < runs_; ++i, bit = !bit) {
      const auto d = decode_at(p);
      out.push_back({bit, d.value});
      p += d.consumed;
    }
    return out;
  }

  std::size_t size() const { return bits_; }
  std::size_t ones() const { return ones_; }
  std::size_t run_count() const { return runs_; }
  std::size_t encoded_bits() const { return code_.size(); }
  std::size_t last_code() const { return last_; }
  bool first_bit() const { return first_; }
  const bit_string& code() const { return code_; }

  bool access(std::size_t pos) const {
    std::size_t p = 0, start = 0;
    bool bit = first_;
    for (std::size_t i = 0; i < runs_; ++i, bit = !bit) {
      const auto d = decode_at(p);
      if (pos < start + d.value) return bit;
      start += d.value;
      p += d.consumed;
    }
    throw range_error("rle_chunk::access: position out of range");
  }

  // 1-bits strictly before pos (pos <= size()).
  std::size_t rank1(std::size_t pos) const {
    if (pos >= bits_) return ones_;
    std::size_t p = 0, start = 0, ones = 0;
    bool bit = first_;
    for (std::size_t i = 0; i < runs_ && start < pos; ++i, bit = !bit) {
      const auto d = decode_at(p);
      const std::size_t take = std::min<std::size_t>(d.value, pos - start);
      if (bit) ones += take;
      start += d.value;
      p += d.consumed;
    }
    return ones;
  }

  std::size_t select(bool b, std::size_t idx) const {
    std::size_t p = 0, start = 0;
    bool bit = first_;
    for (std::size_t i = 0; i < runs_; ++i, bit = !bit) {
      const auto d = decode_at(p);
      if (bit == b) {
        if (idx < d.value) return start + idx;
        idx -= d.value;
      }
      start += d.value;
      p += d.consumed;
    }
    throw range_error("rle_chunk::select: index out of range");
  }

  // offset <= size(). Only the codes of the touched runs are rewritten.
  void insert(std::size_t offset, bool b) {
    if (offset > bits_) throw range_error("rle_chunk::insert: position out of range");
    const std::size_t n = bits_;
    ++bits_;
    if (b) ++ones_;
    if (runs_ == 0) {
      first_ = b;
      runs_ = 1;
      splice(0, 0, {1});
      return;
    }
    std::size_t prev_p = 0, prev_len = 0;
    auto edit = [&](std::size_t i, std::size_t start, std::size_t p, decoded_value d, bool bit) {
      const std::size_t end = start + d.value;
      if (offset == start && i > 0 && bit != b) {
        splice(prev_p, p, {prev_len + 1});
      } else if (bit == b) {
        splice(p, p + d.consumed, {d.value + 1});
      } else if (offset == start) {
        first_ = b;
        ++runs_;
        splice(0, 0, {1});
      } else if (offset == end) {
        ++runs_;
        splice(code_.size(), code_.size(), {1});
      } else {
        runs_ += 2;
        splice(p, p + d.consumed, {offset - start, 1, end - offset});
      }
    };
    // Past the start of the last run (the append case): no scan.
    const auto last = decode_at(last_);
    if (offset > n - last.value) {
      edit(runs_ - 1, n - last.value, last_, last, first_ != ((runs_ - 1) % 2 == 1));
      return;
    }
    std::size_t p = 0, start = 0;
    bool bit = first_;
    for (std::size_t i = 0;; ++i, bit = !bit) {
      const auto d = decode_at(p);
      if (offset < start + d.value || i + 1 == runs_) {
        edit(i, start, p, d, bit);
        return;
      }
      prev_p = p;
      prev_len = d.value;
      start += d.value;
      p += d.consumed;
    }
  }

  void erase(std::size_t offset) {
    if (offset >= bits_) throw range_error("rle_chunk::erase: position out of range");
    std::size_t p = 0, start = 0, prev_p = 0, prev_len = 0;
    bool bit = first_;
    for (std::size_t i = 0;; ++i, bit = !bit) {
      const auto d = decode_at(p);
      if (offset < start + d.value) {
        --bits_;
        if (bit) --ones_;
        const std::size_t q = p + d.consumed;
        if (d.value > 1) {
          splice(p, q, {d.value - 1});
        } else if (i > 0 && i + 1 < runs_) {
          const auto next = decode_at(q);
          runs_ -= 2;
          splice(prev_p, q + next.consumed, {prev_len + next.value});
        } else {
          if (i == 0) first_ = !first_;
          --runs_;
          splice(p, q, {}, prev_p);
        }
        return;
      }
      prev_p = p;
      prev_len = d.value;
      start += d.value;
      p += d.consumed;
    }
  }

  void append_to(bit_string& out) const {
    bool bit = first_;
    std::size_t p = 0;
    for (std::size_t i = 0; i < runs_; ++i, bit = !bit) {
      const auto d = decode_at(p);
      out.append_run(bit, d.value);
      p += d.consumed;
    }
  }

 private:
  // Gamma code at bit p, read straight from the words; codes longer than a
  // word go through the general decoder.
  decoded_value decode_at(std::size_t p) const {
    const auto w = code_.words();
    const std::size_t i = p / kWordBits, o = p % kWordBits;
    std::uint64_t x = w[i] >> o;
    if (o != 0 && i + 1 < w.size()) x |= w[i + 1] << (kWordBits - o);
    if (x != 0) {
      const auto z = static_cast<unsigned>(std::countr_zero(x));
      if (2 * z + 1 <= kWordBits) {
        const std::uint64_t raw = (x >> z) & low_mask(z + 1);
        return {reverse_word(raw) >> (kWordBits - 1 - z), 2 * z + 1};
      }
    }
    return gamma_decode(code_, p);
  }

  // Replaces code bits [from, to) with the codes of lengths and keeps last_
  // on the last code. A range reaching the end that is replaced by nothing
  // leaves last_at as the new last code.
  void splice(std::size_t from, std::size_t to, std::initializer_list<std::uint64_t> lengths,
              std::size_t last_at = 0) {
    std::size_t len = code_.size() - (to - from);
    for (auto l : lengths) len += gamma_length(l);
    if (to == code_.size()) {
      last_ = lengths.size() == 0 ? last_at : from;
      for (std::size_t k = 0; k + 1 < lengths.size(); ++k) last_ += gamma_length(lengths.begin()[k]);
    } else {
      last_ = last_ + len - code_.size();
    }
    bit_string out;
    out.reserve(len);
    const bit_view v = code_.view();
    out.append(v.slice(0, from));
    for (auto l : lengths) gamma_append(out, l);
    out.append(v.slice(to, v.size() - to));
    code_ = std::move(out);
  }

  bit_string code_;
  std::size_t last_ = 0;  // bit offset of the last run's code
  bool first_ = false;
  std::size_t bits_ = 0;
  std::size_t ones_ = 0;
  std::size_t runs_ = 0;
};

class dynamic_fid {
 public:
  static constexpr std::size_t kTargetChunkBits = 2048;
  static constexpr std::size_t kMaxChunkBits = 2 * kTargetChunkBits;
  static constexpr std::size_t kMinChunkBits = kTargetChunkBits / 2;

  dynamic_fid() = default;
  dynamic_fid(dynamic_fid&&) noexcept = default;
  dynamic_fid& operator=(dynamic_fid&&) noexcept = default;
  dynamic_fid(const dynamic_fid& other) : root_(clone(other.root_.get())) {}
  dynamic_fid& operator=(const dynamic_fid& other) {
    if (this != &other) root_ = clone(other.root_.get());
    return *this;
  }

  // b^n, as a single chunk holding one run.
  static dynamic_fid constant(bool b, std::size_t n) {
    dynamic_fid v;
    if (n > 0) {
      const bit_run r{b, n};
      v.root_ = std::make_unique<node>(rle_chunk::from_runs(std::span(&r, 1)));
    }
    return v;
  }

  static dynamic_fid from_bits(const bit_view& bits) {
    std::vector<bit_run> runs;
    for (std::size_t i = 0; i < bits.size();) {
      const bool b = bits[i];
      std::size_t j = i + 1;
      while (j < bits.size() && bits[j] == b) ++j;
      runs.push_back({b, j - i});
      i = j;
    }
    std::vector<rle_chunk> chunks;
    std::vector<bit_run> cur;
    std::size_t cur_bits = 0;
    for (const auto& r : runs) {
      cur.push_back(r);
      cur_bits += gamma_length(r.length);
      if (cur_bits >= kTargetChunkBits) {
        chunks.push_back(rle_chunk::from_runs(cur));
        cur.clear();
        cur_bits = 0;
      }
    }
    if (!cur.empty()) {
      if (!chunks.empty() && cur_bits < kMinChunkBits) {
        auto merged = chunks.back().runs();
        merged.insert(merged.end(), cur.begin(), cur.end());
        chunks.back() = rle_chunk::from_runs(merged);
      } else {
        chunks.push_back(rle_chunk::from_runs(cur));
      }
    }
    if (!chunks.empty() && chunks.back().encoded_bits() > kMaxChunkBits) {
      auto [a, b] = split_half(chunks.back());
      chunks.back() = std::move(a);
      chunks.push_back(std::move(b));
    }
    dynamic_fid v;
    v.root_ = build_balanced(chunks, 0, chunks.size());
    return v;
  }

  bit_string to_bits() const {
    bit_string out;
    out.reserve(size());
    for_each_chunk([&](const rle_chunk& c) { c.append_to(out); });
    return out;
  }

  std::size_t size() const { return root_ ? root_->bits : 0; }
  std::size_t count(bool b) const { return b ? ones() : size() - ones(); }
  std::size_t chunk_count() const { return root_ ? root_->chunks : 0; }
  int height() const { return h(root_.get()); }

  bool access(std::size_t pos) const {
    if (pos >= size()) throw range_error("dynamic_fid::access: position out of range");
    const node* t = root_.get();
    for (;;) {
      const std::size_t lb = bits_of(t->left.get());
      if (pos < lb) {
        t = t->left.get();
      } else if (pos - lb < t->chunk.size()) {
        return t->chunk.access(pos - lb);
      } else {
        pos -= lb + t->chunk.size();
        t = t->right.get();
      }
    }
  }

  std::size_t rank(bool b, std::size_t pos) const {
    if (pos > size()) throw range_error("dynamic_fid::rank: position out of range");
    const std::size_t total = pos;
    std::size_t ones = 0;
    const node* t = root_.get();
    while (t && pos > 0) {
      const std::size_t lb = bits_of(t->left.get());
      if (pos <= lb) {
        t = t->left.get();
        continue;
      }
      ones += ones_of(t->left.get());
      pos -= lb;
      if (pos <= t->chunk.size()) {
        ones += t->chunk.rank1(pos);
        break;
      }
      ones += t->chunk.ones();
      pos -= t->chunk.size();
      t = t->right.get();
    }
    return b ? ones : total - ones;
  }

  std::size_t select(bool b, std::size_t idx) const {
    if (idx >= count(b)) throw range_error("dynamic_fid::select: index out of range");
    std::size_t base = 0;
    const node* t = root_.get();
    for (;;) {
      const std::size_t lc = count_of(t->left.get(), b);
      if (idx < lc) {
        t = t->left.get();
        continue;
      }
      idx -= lc;
      base += bits_of(t->left.get());
      const std::size_t here = b ? t->chunk.ones() : t->chunk.size() - t->chunk.ones();
      if (idx < here) return base + t->chunk.select(b, idx);
      idx -= here;
      base += t->chunk.size();
      t = t->right.get();
    }
  }

  void insert(std::size_t pos, bool b) {
    if (pos > size()) throw range_error("dynamic_fid::insert: position out of range");
    if (!root_) {
      *this = constant(b, 1);
      return;
    }
    std::size_t offset = 0;
    const std::size_t idx = locate(pos, offset);
    modify_chunk(idx, [&](rle_chunk& c) { c.insert(offset, b); });
    fix_chunk(idx);
  }

  void erase(std::size_t pos) {
    if (pos >= size()) throw range_error("dynamic_fid::erase: position out of range");
    std::size_t offset = 0;
    const std::size_t idx = locate(pos, offset);
    modify_chunk(idx, [&](rle_chunk& c) { c.erase(offset); });
    fix_chunk(idx);
  }

  // Gamma-coded payload bits over all chunks.
  std::size_t encoded_bits() const {
    std::size_t bits = 0;
    for_each_chunk([&](const rle_chunk& c) { bits += c.encoded_bits(); });
    return bits;
  }

  // Allocated code words plus per-node bookkeeping (pointers, counters,
  // chunk header).
  std::size_t size_in_bits() const {
    std::size_t bits = chunk_count() * 8 * sizeof(node);
    for_each_chunk([&](const rle_chunk& c) { bits += c.code().capacity_bits(); });
    return bits;
  }

  template <class F>
  void for_each_chunk(F&& f) const {
    walk(root_.get(), f);
  }

  // Full consistency walk; throws std::logic_error describing the violation.
  void check_invariants() const {
    const std::size_t chunks = chunk_count();
    check(root_.get(), chunks);
  }

 private:
  struct node {
    explicit node(rle_chunk c) : chunk(std::move(c)) { update(); }
    rle_chunk chunk;
    std::unique_ptr<node> left, right;
    int height = 1;
    std::size_t bits = 0, ones = 0, chunks = 1;

    void update() {
      height = 1 + std::max(h(left.get()), h(right.get()));
      bits = bits_of(left.get()) + chunk.size() + bits_of(right.get());
      ones = ones_of(left.get()) + chunk.ones() + ones_of(right.get());
      chunks = chunks_of(left.get()) + 1 + chunks_of(right.get());
    }
  };
  using node_ptr = std::unique_ptr<node>;

  static int h(const node* t) { return t ? t->height : 0; }
  static std::size_t bits_of(const node* t) { return t ? t->bits : 0; }
  static std::size_t ones_of(const node* t) { return t ? t->ones : 0; }
  static std::size_t chunks_of(const node* t) { return t ? t->chunks : 0; }
  static std::size_t count_of(const node* t, bool b) { return b ? ones_of(t) : bits_of(t) - ones_of(t); }
  std::size_t ones() const { return ones_of(root_.get()); }

  static node_ptr clone(const node* t) {
    if (!t) return nullptr;
    auto n = std::make_unique<node>(t->chunk);
    n->left = clone(t->left.get());
    n->right = clone(t->right.get());
    n->update();
    return n;
  }

  template <class F>
  static void walk(const node* t, F& f) {
    if (!t) return;
    walk(t->left.get(), f);
    f(t->chunk);
    walk(t->right.get(), f);
  }

  static node_ptr build_balanced(std::vector<rle_chunk>& chunks, std::size_t lo, std::size_t hi) {
    if (lo >= hi) return nullptr;
    const std::size_t mid = (lo + hi) / 2;
    auto n = std::make_unique<node>(std::move(chunks[mid]));
    n->left = build_balanced(chunks, lo, mid);
    n->right = build_balanced(chunks, mid + 1, hi);
    n->update();
    return n;
  }

  static std::pair<rle_chunk, rle_chunk> split_half(const rle_chunk& c) {
    const auto runs = c.runs();
    const std::size_t half = c.encoded_bits() / 2;
    std::size_t acc = 0, cut = 0;
    while (cut + 1 < runs.size() && acc < half) acc += gamma_length(runs[cut++].length);
    if (cut == 0) cut = 1;
    return {rle_chunk::from_runs(std::span(runs).first(cut)), rle_chunk::from_runs(std::span(runs).subspan(cut))};
  }

  // Chunk index holding pos; pos == size() maps to the end of the last chunk.
  std::size_t locate(std::size_t pos, std::size_t& offset) const {
    const node* t = root_.get();
    std::size_t idx = 0;
    for (;;) {
      const std::size_t lb = bits_of(t->left.get());
      if (pos < lb) {
        t = t->left.get();
        continue;
      }
      pos -= lb;
      idx += chunks_of(t->left.get());
      if (pos < t->chunk.size() || !t->right) {
        offset = pos;
        return idx;
      }
      pos -= t->chunk.size();
      ++idx;
      t = t->right.get();
    }
  }

  template <class F>
  void modify_chunk(std::size_t idx, F&& f) {
    std::vector<node*> path;
    node* t = root_.get();
    for (;;) {
      path.push_back(t);
      const std::size_t lc = chunks_of(t->left.get());
      if (idx < lc) {
        t = t->left.get();
      } else if (idx == lc) {
        break;
      } else {
        idx -= lc + 1;
        t = t->right.get();
      }
    }
    f(t->chunk);
    for (auto it = path.rbegin(); it != path.rend(); ++it) (*it)->update();
  }

  const rle_chunk& chunk_at(std::size_t idx) const {
    const node* t = root_.get();
    for (;;) {
      const std::size_t lc = chunks_of(t->left.get());
      if (idx < lc) {
        t = t->left.get();
      } else if (idx == lc) {
        return t->chunk;
      } else {
        idx -= lc + 1;
        t = t->right.get();
      }
    }
  }

  // Restores the chunk size invariant around chunk idx after an edit.
  void fix_chunk(std::size_t idx) {
    const rle_chunk& c = chunk_at(idx);
    if (c.encoded_bits() > kMaxChunkBits) {
      auto [a, b] = split_half(c);
      modify_chunk(idx, [&](rle_chunk& x) { x = std::move(a); });
      root_ = insert_at(std::move(root_), idx + 1, std::move(b));
      return;
    }
    if (chunk_count() == 1) {
      if (c.size() == 0) root_.reset();
      return;
    }
    if (c.size() == 0) {
      root_ = erase_at(std::move(root_), idx);
      return;
    }
    if (c.encoded_bits() >= kMinChunkBits) return;
    const std::size_t lo = idx + 1 < chunk_count() ? idx : idx - 1;
    auto runs = chunk_at(lo).runs();
    const auto more = chunk_at(lo + 1).runs();
    runs.insert(runs.end(), more.begin(), more.end());
    auto merged = rle_chunk::from_runs(runs);
    root_ = erase_at(std::move(root_), lo + 1);
    const bool oversized = merged.encoded_bits() > kMaxChunkBits;
    modify_chunk(lo, [&](rle_chunk& x) { x = std::move(merged); });
    if (oversized) fix_chunk(lo);
  }

  static node_ptr rotate_right(node_ptr t) {
    node_ptr l = std::move(t->left);
    t->left = std::move(l->right);
    t->update();
    l->right = std::move(t);
    l->update();
    return l;
  }

  static node_ptr rotate_left(node_ptr t) {
    node_ptr r = std::move(t->right);
    t->right = std::move(r->left);
    t->update();
    r->left = std::move(t);
    r->update();
    return r;
  }

  static node_ptr rebalance(node_ptr t) {
    t->update();
    const int bf = h(t->left.get()) - h(t->right.get());
    if (bf > 1) {
      if (h(t->left->left.get()) < h(t->left->right.get())) t->left = rotate_left(std::move(t->left));
      return rotate_right(std::move(t));
    }
    if (bf < -1) {
      if (h(t->right->right.get()) < h(t->right->left.get())) t->right = rotate_right(std::move(t->right));
      return rotate_left(std::move(t));
    }
    return t;
  }

  static node_ptr insert_at(node_ptr t, std::size_t idx, rle_chunk c) {
    if (!t) return std::make_unique<node>(std::move(c));
    const std::size_t lc = chunks_of(t->left.get());
    if (idx <= lc)
      t->left = insert_at(std::move(t->left), idx, std::move(c));
    else
      t->right = insert_at(std::move(t->right), idx - lc - 1, std::move(c));
    return rebalance(std::move(t));
  }

  static node_ptr remove_min(node_ptr t, rle_chunk& out) {
    if (!t->left) {
      out = std::move(t->chunk);
      return std::move(t->right);
    }
    t->left = remove_min(std::move(t->left), out);
    return rebalance(std::move(t));
  }

  static node_ptr erase_at(node_ptr t, std::size_t idx) {
    const std::size_t lc = chunks_of(t->left.get());
    if (idx < lc) {
      t->left = erase_at(std::move(t->left), idx);
    } else if (idx > lc) {
      t->right = erase_at(std::move(t->right), idx - lc - 1);
    } else {
      if (!t->left) return std::move(t->right);
      if (!t->right) return std::move(t->left);
      t->right = remove_min(std::move(t->right), t->chunk);
    }
    return rebalance(std::move(t));
  }

  static void fail(const std::string& what) { throw std::logic_error("dynamic_fid invariant: " + what); }

  static void check(const node* t, std::size_t total_chunks) {
    if (!t) return;
    check(t->left.get(), total_chunks);
    check(t->right.get(), total_chunks);
    const int hl = h(t->left.get()), hr = h(t->right.get());
    if (hl - hr > 1 || hr - hl > 1) fail("AVL balance");
    if (t->height != 1 + std::max(hl, hr)) fail("height");
    if (t->bits != bits_of(t->left.get()) + t->chunk.size() + bits_of(t->right.get())) fail("bit aggregate");
    if (t->ones != ones_of(t->left.get()) + t->chunk.ones() + ones_of(t->right.get())) fail("ones aggregate");
    if (t->chunks != chunks_of(t->left.get()) + 1 + chunks_of(t->right.get())) fail("chunk aggregate");
    const auto runs = t->chunk.runs();
    std::size_t bits = 0, ones = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].length == 0) fail("empty run");
      if (i > 0 && runs[i].bit == runs[i - 1].bit) fail("runs do not alternate");
      bits += runs[i].length;
      if (runs[i].bit) ones += runs[i].length;
    }
    if (bits != t->chunk.size() || ones != t->chunk.ones()) fail("chunk counts");
    if (t->chunk.size() == 0) fail("empty chunk");
    const std::size_t enc = t->chunk.encoded_bits();
    if (t->chunk.last_code() + gamma_length(runs.back().length) != enc) fail("last code offset");
    if (enc > kMaxChunkBits) fail("chunk above maximum size");
    if (total_chunks > 1 && enc < kMinChunkBits) fail("chunk below minimum size");
  }

  node_ptr root_;
};

}  // namespace wtrie
