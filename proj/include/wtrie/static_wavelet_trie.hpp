#pragma once

// Immutable wavelet trie. Nodes are flat records in depth-first pre-order with
// explicit child and parent indexes; labels are slices of one concatenated
// label stream; internal nodes own an rrr_vector.

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "wtrie/bits.hpp"
#include "wtrie/patricia.hpp"
#include "wtrie/rrr.hpp"
#include "wtrie/wavelet_trie.hpp"

namespace wtrie {

class static_wavelet_trie : public wavelet_queries<static_wavelet_trie, std::uint32_t> {
 public:
  using handle = std::uint32_t;
  using bitvector_type = rrr_vector;
  static constexpr handle kNone = std::numeric_limits<handle>::max();

  struct record {
    handle parent = kNone;
    handle child[2] = {kNone, kNone};
    handle bv = kNone;  // index into the bitvector array, internal nodes only
    std::uint64_t label_start = 0;
    std::uint64_t label_len = 0;
  };

  static_wavelet_trie() = default;

  // Builds from any range of bit strings (or views) with a prefix-free set of
  // distinct values.
  template <class Range>
  static static_wavelet_trie build(const Range& seq) {
    patricia_trie<handle> trie;
    std::unordered_set<bit_string, bit_string_hash> seen;
    std::size_t n = 0;
    for (const auto& s : seq) {
      ++n;
      bit_string key(static_cast<bit_view>(s));
      if (seen.insert(key).second) trie.insert(key);
    }
    static_wavelet_trie t;
    t.n_ = n;
    if (n == 0) return t;

    // Flatten in pre-order; the payload remembers each node's index.
    using tnode = patricia_trie<handle>::node;
    std::vector<tnode*> stack{trie.root()};
    while (!stack.empty()) {
      tnode* x = stack.back();
      stack.pop_back();
      const auto id = static_cast<handle>(t.nodes_.size());
      x->payload = id;
      record r;
      r.parent = x->parent ? x->parent->payload : kNone;
      if (x->parent) t.nodes_[r.parent].child[x->branch()] = id;
      r.label_start = t.labels_.size();
      r.label_len = x->label.size();
      t.labels_.append(x->label);
      if (!x->is_leaf()) {
        r.bv = static_cast<handle>(t.internal_++);
        stack.push_back(x->child[1].get());
        stack.push_back(x->child[0].get());
      }
      t.nodes_.push_back(r);
    }

    std::vector<bit_string> routed(t.internal_);
    for (const auto& s : seq) {
      const bit_view v = static_cast<bit_view>(s);
      handle h = 0;
      std::size_t used = 0;
      for (;;) {
        used += t.nodes_[h].label_len;
        if (t.nodes_[h].bv == kNone) break;
        const bool b = v[used++];
        routed[t.nodes_[h].bv].push_back(b);
        h = t.nodes_[h].child[b];
      }
    }
    t.bvs_.reserve(routed.size());
    for (const auto& r : routed) t.bvs_.emplace_back(r);
    return t;
  }

  // Assembles a trie from deserialized parts; validates the layout.
  static static_wavelet_trie from_parts(std::size_t n, std::vector<record> nodes, bit_string labels,
                                        std::vector<rrr_vector> bvs) {
    static_wavelet_trie t;
    t.n_ = n;
    t.nodes_ = std::move(nodes);
    t.labels_ = std::move(labels);
    t.bvs_ = std::move(bvs);
    for (const auto& r : t.nodes_) t.internal_ += r.bv != kNone;
    return t;
  }

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<record>& records() const { return nodes_; }
  const bit_string& labels() const { return labels_; }
  const std::vector<rrr_vector>& bitvectors() const { return bvs_; }

  handle root_node() const { return 0; }
  bool is_leaf(handle h) const { return nodes_[h].bv == kNone; }
  bool is_root(handle h) const { return nodes_[h].parent == kNone; }
  bit_view label(handle h) const { return labels_.slice(nodes_[h].label_start, nodes_[h].label_len); }
  handle child(handle h, bool b) const { return nodes_[h].child[b]; }
  handle parent(handle h) const { return nodes_[h].parent; }
  bool branch(handle h) const { return nodes_[nodes_[h].parent].child[1] == h; }
  const rrr_vector& bits(handle h) const { return bvs_[nodes_[h].bv]; }

  template <class F>
  void for_each_node(F&& f) const {
    for (handle h = 0; h < nodes_.size(); ++h) f(h);
  }

  // Node records: 3 node indexes + bitvector index (32 bits each) and a
  // 64-bit label offset and length.
  std::size_t record_bits() const { return nodes_.size() * (4 * 32 + 2 * 64); }

 private:
  std::size_t n_ = 0;
  std::size_t internal_ = 0;
  std::vector<record> nodes_;
  bit_string labels_;
  std::vector<rrr_vector> bvs_;
};

}  // namespace wtrie
