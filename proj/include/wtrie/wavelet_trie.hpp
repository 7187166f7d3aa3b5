#pragma once

// Wavelet trie over a sequence of bit strings whose distinct values form a
// prefix-free set. The tree is the Patricia trie of the distinct values; each
// internal node holds a bitvector with one bit per element routed through it,
// telling which child the element continues into.
//
// wavelet_queries<Derived> implements every query on top of a small view
// interface, so the static layout and the pointer-based dynamic variants
// share one copy of the algorithms. Derived provides:
//
//   Handle                          node reference (cheap to copy, hashable)
//   size(), empty()
//   root_node(), is_leaf(h), is_root(h), label(h) -> bit_view,
//   child(h, b), parent(h), branch(h), bits(h) -> bitvector of an internal node
//   for_each_node(f)                pre-order

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "wtrie/append_fid.hpp"
#include "wtrie/bits.hpp"
#include "wtrie/dynamic_fid.hpp"
#include "wtrie/error.hpp"
#include "wtrie/patricia.hpp"

namespace wtrie {

struct value_count {
  bit_string value;
  std::size_t count;
  friend bool operator==(const value_count&, const value_count&) = default;
};

struct space_report {
  std::size_t n = 0;
  std::size_t distinct = 0;
  double h0 = 0;           // zero-order entropy of the sequence, bits per element
  double nh0 = 0;          // n * h0
  std::size_t label_bits = 0;  // |L|, total label length
  std::size_t edges = 0;       // e
  std::size_t lt_bits = 0;     // |L| + e + B(e, |L| + e)
  double lower_bound = 0;      // lt_bits + nh0
  std::size_t bitvector_length = 0;  // sum of |beta|
  double avg_height = 0;             // sum of |beta| / n
  double mean_length = 0;            // mean string length in bits
  std::size_t bitvector_bits = 0;    // measured, all node bitvectors
  std::size_t record_bits = 0;       // measured, node records / pointers
  std::size_t trie_bits = 0;         // label_bits + record_bits
  std::size_t total_bits = 0;        // bitvector_bits + trie_bits
  std::size_t max_height = 0;        // internal nodes on the deepest path
};

template <class Derived, class Handle>
class wavelet_queries {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  bit_string access(std::size_t pos) const {
    if (pos >= self().size()) throw range_error("access: position out of range");
    bit_string out;
    auto h = self().root_node();
    for (;;) {
      out.append(self().label(h));
      if (self().is_leaf(h)) return out;
      const auto& bv = self().bits(h);
      const bool b = bv.access(pos);
      pos = bv.rank(b, pos);
      out.push_back(b);
      h = self().child(h, b);
    }
  }

  // Occurrences of s in positions [0, pos).
  std::size_t rank(const bit_view& s, std::size_t pos) const {
    if (pos > self().size()) throw range_error("rank: position out of range");
    if (self().empty()) return 0;
    auto h = self().root_node();
    std::size_t used = 0;
    for (;;) {
      const bit_view label = self().label(h);
      if (!s.substr(used).starts_with(label)) return 0;
      used += label.size();
      if (self().is_leaf(h)) return used == s.size() ? pos : 0;
      if (used == s.size() || pos == 0) return 0;
      const bool b = s[used++];
      pos = self().bits(h).rank(b, pos);
      h = self().child(h, b);
    }
  }

  // Elements in [0, pos) that have p as a prefix.
  std::size_t rank_prefix(const bit_view& p, std::size_t pos) const {
    if (pos > self().size()) throw range_error("rank_prefix: position out of range");
    if (self().empty()) return 0;
    auto h = self().root_node();
    std::size_t used = 0;
    for (;;) {
      const bit_view label = self().label(h);
      const bit_view rest = p.substr(used);
      const std::size_t k = label.lcp(rest);
      if (k == rest.size()) return pos;
      if (k < label.size() || self().is_leaf(h) || pos == 0) return 0;
      used += k;
      const bool b = p[used++];
      pos = self().bits(h).rank(b, pos);
      h = self().child(h, b);
    }
  }

  // Position of the (idx+1)-th occurrence of s.
  std::size_t select(const bit_view& s, std::size_t idx) const {
    const auto h = find(s, false);
    if (!h) throw not_found_error("select: string not in the sequence");
    return select_from(*h, idx);
  }

  // Position of the (idx+1)-th element having prefix p.
  std::size_t select_prefix(const bit_view& p, std::size_t idx) const {
    const auto h = find(p, true);
    if (!h) throw not_found_error("select_prefix: no element has this prefix");
    return select_from(*h, idx);
  }

  // Number of elements routed through node h.
  std::size_t count_of(Handle h) const {
    if (self().is_root(h)) return self().size();
    return self().bits(self().parent(h)).count(self().branch(h));
  }

  std::size_t distinct_count() const {
    std::size_t k = 0;
    self().for_each_node([&](Handle h) { k += self().is_leaf(h); });
    return k;
  }

  // Distinct values of [l, r) with counts, in lexicographic order. With
  // depth_bits set, values are grouped by their first depth_bits bits.
  std::vector<value_count> range_distinct(std::size_t l, std::size_t r, std::size_t depth_bits = npos) const {
    check_range(l, r);
    std::vector<value_count> out;
    if (l == r) return out;
    bit_string path;
    collect(self().root_node(), l, r, 1, depth_bits, path, out);
    return out;
  }

  // Values occurring at least threshold times in [l, r): count descending,
  // ties by value.
  std::vector<value_count> range_threshold(std::size_t l, std::size_t r, std::size_t threshold) const {
    check_range(l, r);
    if (threshold == 0) throw std::invalid_argument("range_threshold: threshold must be at least 1");
    std::vector<value_count> out;
    if (r - l < threshold) return out;
    bit_string path;
    collect(self().root_node(), l, r, threshold, npos, path, out);
    std::stable_sort(out.begin(), out.end(), [](const value_count& a, const value_count& b) { return a.count > b.count; });
    return out;
  }

  // The value occurring more than (r - l) / 2 times in [l, r), if any.
  std::optional<bit_string> range_majority(std::size_t l, std::size_t r) const {
    check_range(l, r);
    if (l == r) throw range_error("range_majority: empty range");
    // Only the branch holding more than half of the original range can
    // contain the majority value.
    const std::size_t half = (r - l) / 2;
    bit_string path;
    auto h = self().root_node();
    for (;;) {
      path.append(self().label(h));
      if (self().is_leaf(h)) return path;
      const auto& bv = self().bits(h);
      const std::size_t l1 = bv.rank(true, l), r1 = bv.rank(true, r);
      if (r1 - l1 > half) {
        l = l1;
        r = r1;
        path.push_back(true);
        h = self().child(h, true);
      } else if ((r - r1) - (l - l1) > half) {
        l -= l1;
        r -= r1;
        path.push_back(false);
        h = self().child(h, false);
      } else {
        return std::nullopt;
      }
    }
  }

  // Sequential access to [l, r). Each node is ranked at most once, when the
  // iteration first enters it; afterwards its cursor advances by one per visit.
  class range_iterator {
   public:
    range_iterator(const Derived& t, std::size_t l, std::size_t r) : t_(&t), next_(l), end_(r) {
      if (l < r) cursor_[t.root_node()] = l;
    }

    bool done() const { return next_ >= end_; }
    std::size_t rank_calls() const { return ranks_; }
    std::size_t nodes_touched() const { return cursor_.size(); }

    bit_string next() {
      if (done()) throw range_error("range_iterator: past the end");
      bit_string out;
      auto h = t_->root_node();
      for (;;) {
        out.append(t_->label(h));
        if (t_->is_leaf(h)) break;
        std::size_t& p = cursor_[h];
        const auto& bv = t_->bits(h);
        const bool b = bv.access(p);
        const auto c = t_->child(h, b);
        auto it = cursor_.find(c);
        if (it == cursor_.end()) {
          cursor_.emplace(c, bv.rank(b, p));
          ++ranks_;
        }
        ++p;
        out.push_back(b);
        h = c;
      }
      ++next_;
      return out;
    }

   private:
    // Per-node position of the next element (for leaves: unused).
    const Derived* t_;
    std::unordered_map<Handle, std::size_t> cursor_;
    std::size_t next_;
    std::size_t end_;
    std::size_t ranks_ = 0;
  };

  range_iterator range_iter(std::size_t l, std::size_t r) const {
    check_range(l, r);
    return range_iterator(self(), l, r);
  }

  space_report report() const {
    space_report rep;
    rep.n = self().size();
    std::vector<std::uint64_t> counts;
    double length_sum = 0;
    std::size_t records = 0;
    self().for_each_node([&](Handle h) {
      ++records;
      rep.label_bits += self().label(h).size();
      if (self().is_leaf(h)) {
        const std::size_t c = count_of(h);
        counts.push_back(c);
        length_sum += static_cast<double>(c) * static_cast<double>(depth_bits(h));
        rep.max_height = std::max(rep.max_height, internal_depth(h));
      } else {
        rep.edges += 2;
        rep.bitvector_length += self().bits(h).size();
        rep.bitvector_bits += self().bits(h).size_in_bits();
      }
    });
    rep.distinct = counts.size();
    rep.lt_bits = rep.label_bits + rep.edges + binomial_bound(rep.edges, rep.label_bits + rep.edges);
    if (rep.n > 0) {
      rep.h0 = zero_order_entropy(counts, rep.n);
      rep.nh0 = rep.h0 * static_cast<double>(rep.n);
      rep.avg_height = static_cast<double>(rep.bitvector_length) / static_cast<double>(rep.n);
      rep.mean_length = length_sum / static_cast<double>(rep.n);
    }
    rep.lower_bound = static_cast<double>(rep.lt_bits) + rep.nh0;
    rep.record_bits = self().record_bits();
    rep.trie_bits = rep.label_bits + rep.record_bits;
    rep.total_bits = rep.bitvector_bits + rep.trie_bits;
    return rep;
  }

  // Internal nodes on the deepest root-to-leaf path.
  std::size_t height() const {
    std::size_t h = 0;
    self().for_each_node([&](Handle x) {
      if (self().is_leaf(x)) h = std::max(h, internal_depth(x));
    });
    return h;
  }

  // Checks the wavelet property at every node; throws std::logic_error.
  void check_structure() const {
    if (self().empty()) {
      if (self().size() != 0) throw std::logic_error("wavelet trie: empty trie with non-zero length");
      return;
    }
    std::size_t leaf_total = 0;
    self().for_each_node([&](Handle h) {
      const std::size_t c = count_of(h);
      if (c == 0) throw std::logic_error("wavelet trie: node with no elements");
      if (self().is_leaf(h)) {
        leaf_total += c;
        return;
      }
      const auto& bv = self().bits(h);
      if (bv.size() != c) throw std::logic_error("wavelet trie: bitvector length differs from routed count");
      if (bv.count(false) == 0 || bv.count(true) == 0) throw std::logic_error("wavelet trie: constant bitvector");
      for (bool b : {false, true}) {
        const auto ch = self().child(h, b);
        if (!self().is_leaf(ch) && self().bits(ch).size() != bv.count(b))
          throw std::logic_error("wavelet trie: child bitvector length mismatch");
      }
    });
    if (leaf_total != self().size()) throw std::logic_error("wavelet trie: leaf counts do not sum to n");
  }

 protected:
  const Derived& self() const { return static_cast<const Derived&>(*this); }

  void check_range(std::size_t l, std::size_t r) const {
    if (l > r || r > self().size()) throw range_error("range query: bad range");
  }

  // Leaf for s (prefix = false) or node n_p for prefix s.
  std::optional<Handle> find(const bit_view& s, bool prefix) const {
    if (self().empty()) return std::nullopt;
    auto h = self().root_node();
    std::size_t used = 0;
    for (;;) {
      const bit_view label = self().label(h);
      const bit_view rest = s.substr(used);
      const std::size_t k = label.lcp(rest);
      if (prefix && k == rest.size()) return h;
      if (k < label.size()) return std::nullopt;
      used += k;
      if (self().is_leaf(h)) {
        if (used == s.size()) return h;
        return std::nullopt;
      }
      if (used == s.size()) return std::nullopt;
      h = self().child(h, s[used++]);
    }
  }

  std::size_t select_from(Handle h, std::size_t idx) const {
    if (idx >= count_of(h)) throw not_found_error("select: fewer occurrences than requested");
    while (!self().is_root(h)) {
      const bool b = self().branch(h);
      h = self().parent(h);
      idx = self().bits(h).select(b, idx);
    }
    return idx;
  }

  std::size_t internal_depth(Handle h) const {
    std::size_t d = 0;
    for (; !self().is_root(h); h = self().parent(h)) ++d;
    return d;
  }

  std::size_t depth_bits(Handle h) const {
    std::size_t d = self().label(h).size();
    for (; !self().is_root(h); h = self().parent(h)) d += 1 + self().label(self().parent(h)).size();
    return d;
  }

  void collect(Handle h, std::size_t l, std::size_t r, std::size_t threshold, std::size_t depth,
               bit_string& path, std::vector<value_count>& out) const {
    const std::size_t mark = path.size();
    path.append(self().label(h));
    if (path.size() >= depth) {
      out.push_back({bit_string(path.slice(0, depth)), r - l});
    } else if (self().is_leaf(h)) {
      out.push_back({path, r - l});
    } else {
      const auto& bv = self().bits(h);
      const std::size_t l1 = bv.rank(true, l), r1 = bv.rank(true, r);
      const std::size_t l0 = l - l1, r0 = r - r1;
      if (r0 - l0 >= threshold) {
        path.push_back(false);
        collect(self().child(h, false), l0, r0, threshold, depth, path, out);
        path.resize(path.size() - 1);
      }
      if (r1 - l1 >= threshold) {
        path.push_back(true);
        collect(self().child(h, true), l1, r1, threshold, depth, path, out);
        path.resize(path.size() - 1);
      }
    }
    path.resize(mark);
  }
};

// Pointer-based wavelet trie whose node bitvectors can grow: append_fid for
// the append-only variant, dynamic_fid for the fully dynamic one.
namespace detail {
template <class BV>
struct wt_payload {
  std::optional<BV> bv;
};
template <class BV>
using wt_node = typename patricia_trie<wt_payload<BV>>::node;
}  // namespace detail

template <class BV>
class basic_wavelet_trie : public wavelet_queries<basic_wavelet_trie<BV>, const detail::wt_node<BV>*> {
  using trie_type = patricia_trie<detail::wt_payload<BV>>;
  using node = typename trie_type::node;

 public:
  using bitvector_type = BV;
  using handle = const node*;
  static constexpr bool supports_insert = requires(BV& v) { v.insert(std::size_t{0}, true); };

  basic_wavelet_trie() = default;

  template <class Range>
  static basic_wavelet_trie from_sequence(const Range& seq) {
    basic_wavelet_trie t;
    for (const auto& s : seq) t.append(s);
    return t;
  }

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  const trie_type& trie() const { return trie_; }

  handle root_node() const { return trie_.root(); }
  bool is_leaf(handle h) const { return h->is_leaf(); }
  bool is_root(handle h) const { return h->is_root(); }
  bit_view label(handle h) const { return h->label.view(); }
  handle child(handle h, bool b) const { return h->child[b].get(); }
  handle parent(handle h) const { return h->parent; }
  bool branch(handle h) const { return h->branch(); }
  const BV& bits(handle h) const { return *h->payload.bv; }

  template <class F>
  void for_each_node(F&& f) const {
    trie_.visit([&](const node& x) { f(&x); });
  }

  std::size_t record_bits() const {
    std::size_t nodes = 0;
    trie_.visit([&](const node&) { ++nodes; });
    return nodes * 8 * sizeof(node);
  }

  void append(const bit_view& s) { add(s, n_); }

  void insert(const bit_view& s, std::size_t pos)
    requires supports_insert
  {
    if (pos > n_) throw range_error("insert: position out of range");
    add(s, pos);
  }

  void erase(std::size_t pos)
    requires supports_insert
  {
    if (pos >= n_) throw range_error("erase: position out of range");
    struct step {
      node* at;
      std::size_t pos;
    };
    std::vector<step> path;
    node* t = trie_.root();
    while (!t->is_leaf()) {
      BV& bv = *t->payload.bv;
      const bool b = bv.access(pos);
      path.push_back({t, pos});
      pos = bv.rank(b, pos);
      t = t->child[b].get();
    }
    for (const auto& st : path) st.at->payload.bv->erase(st.pos);
    --n_;
    // Last occurrence gone: the parent's bitvector is now constant.
    if (path.empty()) {
      if (n_ == 0) trie_.erase_leaf(t);
    } else if (t->parent->payload.bv->count(t->branch()) == 0) {
      trie_.erase_leaf(t);
    }
  }

  // Completes deferred bitvector work (append-only variant).
  void flush() {
    if constexpr (requires(BV& v) { v.flush(); }) visit_mut(trie_.root(), [](node& x) {
        if (x.payload.bv) x.payload.bv->flush();
      });
  }

  // Rebuilds from parts (deserialization); takes ownership of a loaded trie
  // whose internal nodes already carry bitvectors.
  static basic_wavelet_trie from_parts(trie_type trie, std::size_t n) {
    basic_wavelet_trie t;
    t.trie_ = std::move(trie);
    t.n_ = n;
    return t;
  }

  static void set_bits(node* x, BV bv) { x->payload.bv = std::move(bv); }

 private:
  template <class F>
  static void visit_mut(node* x, F&& f) {
    if (!x) return;
    f(*x);
    visit_mut(x->child[0].get(), f);
    visit_mut(x->child[1].get(), f);
  }

  void add(const bit_view& s, std::size_t pos) {
    if (trie_.empty()) {
      trie_.insert(s);
      n_ = 1;
      return;
    }
    const auto m = trie_.lookup(s);
    if (m.kind != match_kind::leaf) {
      if (m.kind == match_kind::prefix || m.offset == m.at->label.size())
        throw std::invalid_argument("wavelet trie: value set would not be prefix-free");
      const std::size_t mult = this->count_of(m.at);
      const auto r = trie_.insert(s);
      const bool old_bit = !r.leaf->branch();
      r.split->payload.bv = BV::constant(old_bit, mult);
    }
    node* t = trie_.root();
    std::size_t used = 0;
    while (!t->is_leaf()) {
      used += t->label.size();
      const bool b = s[used++];
      BV& bv = *t->payload.bv;
      if constexpr (supports_insert) {
        const std::size_t next = bv.rank(b, pos);
        bv.insert(pos, b);
        pos = next;
      } else {
        bv.append(b);
      }
      t = t->child[b].get();
    }
    ++n_;
  }

  trie_type trie_;
  std::size_t n_ = 0;
};

using append_wavelet_trie = basic_wavelet_trie<append_fid>;
using dynamic_wavelet_trie = basic_wavelet_trie<dynamic_fid>;

}  // namespace wtrie
