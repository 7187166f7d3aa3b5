#pragma once

// Binary Patricia trie over a prefix-free set of bit strings. Every node owns
// its label (the bits between its parent's branching bit and its own
// branching point); internal nodes always have two children. Each node also
// carries a Payload, which the wavelet trie uses for its bitvectors.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "wtrie/bits.hpp"
#include "wtrie/error.hpp"

namespace wtrie {

enum class match_kind {
  leaf,      // the query is a string of the set
  prefix,    // the query is a prefix of every string below `at` (n_p)
  mismatch,  // the query leaves the trie inside at->label at `offset`
};

template <class Payload = std::monostate>
class patricia_trie {
 public:
  struct node {
    bit_string label;
    std::unique_ptr<node> child[2];
    node* parent = nullptr;
    Payload payload{};

    bool is_leaf() const { return !child[0]; }
    bool is_root() const { return parent == nullptr; }
    // Branch bit leading from the parent to this node.
    bool branch() const { return parent->child[1].get() == this; }
  };

  struct match {
    match_kind kind;
    node* at;
    std::size_t consumed;  // query bits consumed before at->label
    std::size_t offset;    // mismatch offset inside at->label
  };

  struct insert_result {
    node* leaf;
    node* split;  // new internal node, or nullptr for the first string
  };

  struct measure_result {
    std::size_t label_bits;
    std::size_t edges;
    std::size_t nodes;
  };

  patricia_trie() = default;
  patricia_trie(patricia_trie&&) noexcept = default;
  patricia_trie& operator=(patricia_trie&&) noexcept = default;

  bool empty() const { return !root_; }
  std::size_t leaf_count() const { return leaves_; }
  node* root() { return root_.get(); }
  const node* root() const { return root_.get(); }

  match lookup(const bit_view& s) const {
    if (!root_) throw not_found_error("patricia_trie::lookup: empty trie");
    node* t = root_.get();
    std::size_t consumed = 0;
    for (;;) {
      const bit_view rest = s.substr(consumed);
      const std::size_t k = t->label.view().lcp(rest);
      if (k < t->label.size()) {
        if (k == rest.size()) return {match_kind::prefix, t, consumed, k};
        return {match_kind::mismatch, t, consumed, k};
      }
      consumed += k;
      if (consumed == s.size()) return {t->is_leaf() ? match_kind::leaf : match_kind::prefix, t, consumed - k, k};
      if (t->is_leaf()) return {match_kind::mismatch, t, consumed - k, k};
      t = t->child[s[consumed]].get();
      ++consumed;
    }
  }

  bool contains(const bit_view& s) const { return root_ && lookup(s).kind == match_kind::leaf; }

  insert_result insert(const bit_view& s) {
    if (!root_) {
      root_ = std::make_unique<node>();
      root_->label = bit_string(s);
      leaves_ = 1;
      return {root_.get(), nullptr};
    }
    const match m = lookup(s);
    if (m.kind == match_kind::leaf) throw std::invalid_argument("patricia_trie::insert: duplicate string");
    if (m.kind == match_kind::prefix || m.offset == m.at->label.size())
      throw std::invalid_argument("patricia_trie::insert: string set would not be prefix-free");

    node* old = m.at;
    const std::size_t k = m.offset;
    const bool old_bit = old->label[k];
    auto split = std::make_unique<node>();
    split->label = bit_string(old->label.slice(0, k));
    auto leaf = std::make_unique<node>();
    leaf->label = bit_string(s.substr(m.consumed + k + 1));
    node* leaf_ptr = leaf.get();
    node* split_ptr = split.get();

    std::unique_ptr<node>& slot = slot_of(old);
    split->parent = old->parent;
    std::unique_ptr<node> owned = std::move(slot);
    owned->label = bit_string(owned->label.view().substr(k + 1));
    owned->parent = split_ptr;
    leaf->parent = split_ptr;
    split->child[old_bit] = std::move(owned);
    split->child[!old_bit] = std::move(leaf);
    slot = std::move(split);
    ++leaves_;
    return {leaf_ptr, split_ptr};
  }

  // Removes the leaf for s; its sibling takes the parent's place and absorbs
  // the parent's label and branch bit. Returns the sibling (nullptr if the
  // trie became empty).
  node* erase(const bit_view& s) {
    if (!root_ || lookup(s).kind != match_kind::leaf) throw not_found_error("patricia_trie::erase: string not present");
    return erase_leaf(lookup(s).at);
  }

  node* erase_leaf(node* leaf) {
    if (leaf->is_root()) {
      root_.reset();
      leaves_ = 0;
      return nullptr;
    }
    node* parent = leaf->parent;
    const bool sib_bit = !leaf->branch();
    std::unique_ptr<node> sibling = std::move(parent->child[sib_bit]);
    bit_string label = parent->label;
    label.push_back(sib_bit);
    label.append(sibling->label);
    sibling->label = std::move(label);
    sibling->parent = parent->parent;
    node* result = sibling.get();
    slot_of(parent) = std::move(sibling);
    --leaves_;
    return result;
  }

  // Root-to-node string: labels joined by branch bits.
  static bit_string path_of(const node* t) {
    std::vector<const node*> chain;
    for (; t; t = t->parent) chain.push_back(t);
    bit_string out;
    for (std::size_t i = chain.size(); i-- > 0;) {
      if (i + 1 < chain.size()) out.push_back(chain[i]->branch());
      out.append(chain[i]->label);
    }
    return out;
  }

  measure_result measure() const {
    measure_result r{0, 0, 0};
    visit([&](const node& n) {
      r.label_bits += n.label.size();
      ++r.nodes;
      if (!n.is_leaf()) r.edges += 2;
    });
    return r;
  }

  // Node overhead (pointers, label headers, payload handle) plus label bits.
  std::size_t size_in_bits() const {
    std::size_t bits = 0;
    visit([&](const node& n) { bits += 8 * sizeof(node) + n.label.capacity_bits(); });
    return bits;
  }

  // Pre-order walk.
  template <class F>
  void visit(F&& f) const {
    if (root_) visit_node(*root_, f);
  }

  // Same shape and labels; payloads are ignored.
  bool same_structure(const patricia_trie& other) const { return same(root_.get(), other.root_.get()); }

  template <class P>
  bool same_structure(const patricia_trie<P>& other) const {
    return same(root_.get(), other.root());
  }

  // Direct construction, used when loading a serialized trie.
  node* make_root(bit_string label) {
    root_ = std::make_unique<node>();
    root_->label = std::move(label);
    leaves_ = 1;
    return root_.get();
  }

  node* add_child(node* parent, bool b, bit_string label) {
    if (parent->child[b]) throw std::logic_error("patricia_trie::add_child: slot taken");
    auto n = std::make_unique<node>();
    n->label = std::move(label);
    n->parent = parent;
    node* out = n.get();
    // The first child replaces the parent as a leaf; the second one adds one.
    if (parent->child[!b]) ++leaves_;
    parent->child[b] = std::move(n);
    return out;
  }

 private:
  std::unique_ptr<node>& slot_of(node* n) { return n->parent ? n->parent->child[n->branch()] : root_; }

  template <class F>
  static void visit_node(const node& n, F& f) {
    f(n);
    if (!n.is_leaf()) {
      visit_node(*n.child[0], f);
      visit_node(*n.child[1], f);
    }
  }

  template <class A, class B>
  static bool same(const A* a, const B* b) {
    if (!a || !b) return !a && !b;
    if (a->label != b->label || a->is_leaf() != b->is_leaf()) return false;
    if (a->is_leaf()) return true;
    return same(a->child[0].get(), b->child[0].get()) && same(a->child[1].get(), b->child[1].get());
  }

  std::unique_ptr<node> root_;
  std::size_t leaves_ = 0;
};

}  // namespace wtrie
