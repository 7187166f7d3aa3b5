#pragma once

// WTRI index format, all integers little-endian:
//
//   "WTRI" u32 version u32 variant u64 n u64 node_count
//   node_count x { u8 internal, u64 label_len, u64 child0, u64 child1 }   pre-order
//   label stream (bit string: u64 length, words)
//   u64 blob_count, then one length-prefixed blob per internal node, pre-order:
//     static  -> RRR1, append -> ABV1, dynamic -> plain bit string
//
// Leaves store kNoChild in both child slots. Loading validates the whole
// payload before anything is returned.

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "wtrie/error.hpp"
#include "wtrie/serialize.hpp"
#include "wtrie/static_wavelet_trie.hpp"
#include "wtrie/wavelet_trie.hpp"

namespace wtrie {

enum class variant_kind : std::uint32_t { static_trie = 0, append_trie = 1, dynamic_trie = 2 };

inline const char* variant_name(variant_kind v) {
  switch (v) {
    case variant_kind::static_trie: return "static";
    case variant_kind::append_trie: return "append";
    case variant_kind::dynamic_trie: return "dynamic";
  }
  return "unknown";
}

using any_wavelet_trie = std::variant<static_wavelet_trie, append_wavelet_trie, dynamic_wavelet_trie>;

namespace index_detail {

inline constexpr char kMagic[] = "WTRI";
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::uint64_t kNoChild = std::numeric_limits<std::uint64_t>::max();
inline constexpr std::size_t kRecordBytes = 1 + 3 * 8;

template <class T>
constexpr variant_kind kind_of() {
  if constexpr (std::is_same_v<T, static_wavelet_trie>) return variant_kind::static_trie;
  else if constexpr (std::is_same_v<T, append_wavelet_trie>) return variant_kind::append_trie;
  else return variant_kind::dynamic_trie;
}

inline void write_blob(byte_writer& out, const rrr_vector& v) {
  byte_writer w;
  v.serialize(w);
  out.put_blob(w.str());
}
inline void write_blob(byte_writer& out, const append_fid& v) {
  byte_writer w;
  v.serialize(w);
  out.put_blob(w.str());
}
inline void write_blob(byte_writer& out, const dynamic_fid& v) {
  byte_writer w;
  write_bits(w, v.to_bits());
  out.put_blob(w.str());
}

template <class BV>
BV read_blob(byte_reader& in) {
  const std::string blob(in.get_blob());
  byte_reader r(blob);
  BV v = [&] {
    if constexpr (std::is_same_v<BV, rrr_vector>) return rrr_vector::deserialize(r);
    else if constexpr (std::is_same_v<BV, append_fid>) return append_fid::deserialize(r);
    else return dynamic_fid::from_bits(read_bits(r));
  }();
  r.expect_end();
  return v;
}

struct raw_node {
  bool internal;
  std::uint64_t label_len;
  std::uint64_t child[2];
};

}  // namespace index_detail

// Serializes any variant. The append-only variant must be quiescent; call
// flush() first (string_index does this).
template <class W>
void write_index(byte_writer& out, const W& t) {
  using namespace index_detail;
  using handle = typename W::handle;
  std::vector<handle> order;
  std::unordered_map<handle, std::uint64_t> id;
  t.for_each_node([&](handle h) {
    id.emplace(h, order.size());
    order.push_back(h);
  });

  out.put_bytes(kMagic);
  out.put_u32(kVersion);
  out.put_u32(static_cast<std::uint32_t>(kind_of<W>()));
  out.put_u64(t.size());
  out.put_u64(t.empty() ? 0 : order.size());
  if (t.empty()) return;
  bit_string labels;
  std::uint64_t internal = 0;
  for (handle h : order) {
    const bool in = !t.is_leaf(h);
    internal += in;
    out.put_u8(in);
    out.put_u64(t.label(h).size());
    out.put_u64(in ? id.at(t.child(h, false)) : kNoChild);
    out.put_u64(in ? id.at(t.child(h, true)) : kNoChild);
    labels.append(t.label(h));
  }
  write_bits(out, labels);
  out.put_u64(internal);
  for (handle h : order)
    if (!t.is_leaf(h)) write_blob(out, t.bits(h));
}

inline variant_kind peek_variant(std::string_view data) {
  byte_reader in(data);
  in.expect_magic(index_detail::kMagic);
  if (in.get_u32() != index_detail::kVersion) throw decode_error("WTRI: unsupported version");
  const std::uint32_t v = in.get_u32();
  if (v > 2) throw decode_error("WTRI: unknown variant tag");
  return static_cast<variant_kind>(v);
}

namespace index_detail {

// Checks the pre-order tree shape and returns the parent of every node.
inline std::vector<std::uint64_t> check_shape(const std::vector<raw_node>& nodes) {
  std::vector<std::uint64_t> parent(nodes.size(), kNoChild);
  std::vector<std::uint64_t> stack{0};
  std::uint64_t expect = 0;
  while (!stack.empty()) {
    const std::uint64_t i = stack.back();
    stack.pop_back();
    if (i != expect++) throw decode_error("WTRI: node records are not in pre-order");
    const raw_node& r = nodes[i];
    if (!r.internal) {
      if (r.child[0] != kNoChild || r.child[1] != kNoChild) throw decode_error("WTRI: leaf with children");
      continue;
    }
    for (int b = 0; b < 2; ++b) {
      if (r.child[b] <= i || r.child[b] >= nodes.size()) throw decode_error("WTRI: child index out of range");
      parent[r.child[b]] = i;
    }
    stack.push_back(r.child[1]);
    stack.push_back(r.child[0]);
  }
  if (expect != nodes.size()) throw decode_error("WTRI: unreachable node records");
  return parent;
}

template <class BV>
void check_counts(const std::vector<raw_node>& nodes, const std::vector<std::uint64_t>& parent,
                  const std::vector<const BV*>& bv, std::uint64_t n) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::uint64_t routed = n;
    if (parent[i] != kNoChild) {
      const bool b = nodes[parent[i]].child[1] == i;
      routed = bv[parent[i]]->count(b);
    }
    if (routed == 0) throw decode_error("WTRI: node with no elements");
    if (nodes[i].internal && bv[i]->size() != routed) throw decode_error("WTRI: bitvector length mismatch");
  }
}

}  // namespace index_detail

inline any_wavelet_trie read_index(byte_reader& in) {
  using namespace index_detail;
  in.expect_magic(kMagic);
  if (in.get_u32() != kVersion) throw decode_error("WTRI: unsupported version");
  const std::uint32_t tag = in.get_u32();
  if (tag > 2) throw decode_error("WTRI: unknown variant tag");
  const auto kind = static_cast<variant_kind>(tag);
  const std::uint64_t n = in.get_u64();
  const std::uint64_t count = in.get_u64();
  if ((n == 0) != (count == 0)) throw decode_error("WTRI: length and node count disagree");
  if (count > in.remaining() / kRecordBytes) throw decode_error("WTRI: node count exceeds payload");

  if (count == 0) {
    in.expect_end();
    switch (kind) {
      case variant_kind::static_trie: return static_wavelet_trie{};
      case variant_kind::append_trie: return append_wavelet_trie{};
      case variant_kind::dynamic_trie: return dynamic_wavelet_trie{};
    }
  }

  std::vector<raw_node> nodes(count);
  std::uint64_t label_total = 0, internal = 0;
  for (auto& r : nodes) {
    const std::uint8_t flag = in.get_u8();
    if (flag > 1) throw decode_error("WTRI: bad node flag");
    r.internal = flag != 0;
    r.label_len = in.get_u64();
    r.child[0] = in.get_u64();
    r.child[1] = in.get_u64();
    if (r.label_len > (std::uint64_t{1} << 48)) throw decode_error("WTRI: label length out of range");
    label_total += r.label_len;
    internal += r.internal;
  }
  const auto parent = check_shape(nodes);
  bit_string labels = read_bits(in);
  if (labels.size() != label_total) throw decode_error("WTRI: label stream length mismatch");
  if (in.get_u64() != internal) throw decode_error("WTRI: bitvector count mismatch");

  auto load = [&]<class BV>(std::vector<BV>& bvs) {
    bvs.reserve(internal);
    for (std::uint64_t i = 0; i < internal; ++i) bvs.push_back(read_blob<BV>(in));
    in.expect_end();
    std::vector<const BV*> per_node(count, nullptr);
    std::size_t next = 0;
    for (std::size_t i = 0; i < count; ++i)
      if (nodes[i].internal) per_node[i] = &bvs[next++];
    check_counts(nodes, parent, per_node, n);
  };

  if (kind == variant_kind::static_trie) {
    std::vector<rrr_vector> bvs;
    load(bvs);
    std::vector<static_wavelet_trie::record> recs(count);
    std::uint64_t start = 0, next_bv = 0;
    for (std::size_t i = 0; i < count; ++i) {
      auto& r = recs[i];
      r.parent = parent[i] == kNoChild ? static_wavelet_trie::kNone : static_cast<std::uint32_t>(parent[i]);
      r.label_start = start;
      r.label_len = nodes[i].label_len;
      start += r.label_len;
      if (nodes[i].internal) {
        r.child[0] = static_cast<std::uint32_t>(nodes[i].child[0]);
        r.child[1] = static_cast<std::uint32_t>(nodes[i].child[1]);
        r.bv = static_cast<std::uint32_t>(next_bv++);
      }
    }
    if (count >= static_wavelet_trie::kNone) throw decode_error("WTRI: too many nodes");
    return static_wavelet_trie::from_parts(n, std::move(recs), std::move(labels), std::move(bvs));
  }

  auto assemble = [&]<class BV>(std::vector<BV>& bvs) {
    using W = basic_wavelet_trie<BV>;
    using trie_type = patricia_trie<detail::wt_payload<BV>>;
    using node = typename trie_type::node;
    trie_type trie;
    std::vector<node*> ptr(count, nullptr);
    std::uint64_t start = 0, next_bv = 0;
    for (std::size_t i = 0; i < count; ++i) {
      bit_string label(labels.slice(start, nodes[i].label_len));
      start += nodes[i].label_len;
      if (parent[i] == kNoChild) {
        ptr[i] = trie.make_root(std::move(label));
      } else {
        const bool b = nodes[parent[i]].child[1] == i;
        ptr[i] = trie.add_child(ptr[parent[i]], b, std::move(label));
      }
      if (nodes[i].internal) W::set_bits(ptr[i], std::move(bvs[next_bv++]));
    }
    return W::from_parts(std::move(trie), n);
  };

  if (kind == variant_kind::append_trie) {
    std::vector<append_fid> bvs;
    load(bvs);
    return assemble(bvs);
  }
  std::vector<dynamic_fid> bvs;
  load(bvs);
  return assemble(bvs);
}

}  // namespace wtrie
