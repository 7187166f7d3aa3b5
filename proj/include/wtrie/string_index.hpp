#pragma once

// Byte-string sequence index. Strings are binarized (9 bits per byte plus a
// terminator) so any set of byte strings is prefix-free, and stored in one of
// the three wavelet trie variants chosen at runtime:
//
//   static   built once; queries only
//   append   queries + append
//   dynamic  queries + append, insert, erase
//
// Updates a variant does not support throw variant_error.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wtrie/bits.hpp"
#include "wtrie/error.hpp"
#include "wtrie/index_io.hpp"
#include "wtrie/serialize.hpp"
#include "wtrie/static_wavelet_trie.hpp"
#include "wtrie/wavelet_trie.hpp"

namespace wtrie {

inline variant_kind parse_variant(std::string_view name) {
  if (name == "static") return variant_kind::static_trie;
  if (name == "append") return variant_kind::append_trie;
  if (name == "dynamic") return variant_kind::dynamic_trie;
  throw std::invalid_argument("unknown variant: " + std::string(name));
}

class string_index {
 public:
  struct entry {
    std::string value;
    std::size_t count;
    bool complete;  // false: value is a byte prefix standing for a group
    friend bool operator==(const entry&, const entry&) = default;
  };

  string_index() = default;
  explicit string_index(variant_kind v) { reset(v); }

  static string_index build(std::span<const std::string> seq, variant_kind v) {
    string_index out;
    std::vector<bit_string> bin;
    bin.reserve(seq.size());
    for (const auto& s : seq) bin.push_back(binarize(s));
    switch (v) {
      case variant_kind::static_trie: out.impl_ = static_wavelet_trie::build(bin); break;
      case variant_kind::append_trie: out.impl_ = append_wavelet_trie::from_sequence(bin); break;
      case variant_kind::dynamic_trie: out.impl_ = dynamic_wavelet_trie::from_sequence(bin); break;
    }
    return out;
  }

  variant_kind variant() const { return static_cast<variant_kind>(impl_.index()); }
  const any_wavelet_trie& trie() const { return impl_; }

  std::size_t size() const {
    return std::visit([](const auto& t) { return t.size(); }, impl_);
  }

  std::string access(std::size_t pos) const {
    return debinarize(std::visit([&](const auto& t) { return t.access(pos); }, impl_));
  }

  std::size_t rank(std::string_view s, std::size_t pos) const {
    const bit_string b = binarize(s);
    return std::visit([&](const auto& t) { return t.rank(b, pos); }, impl_);
  }

  std::size_t rank_prefix(std::string_view p, std::size_t pos) const {
    const bit_string b = binarize_prefix(p);
    return std::visit([&](const auto& t) { return t.rank_prefix(b, pos); }, impl_);
  }

  std::size_t select(std::string_view s, std::size_t idx) const {
    const bit_string b = binarize(s);
    return std::visit([&](const auto& t) { return t.select(b, idx); }, impl_);
  }

  std::size_t select_prefix(std::string_view p, std::size_t idx) const {
    const bit_string b = binarize_prefix(p);
    return std::visit([&](const auto& t) { return t.select_prefix(b, idx); }, impl_);
  }

  // Distinct values of [l, r) in byte order. With depth set, values are
  // grouped by their first depth bytes; shorter values stay complete.
  std::vector<entry> distinct(std::size_t l, std::size_t r, std::optional<std::size_t> depth = std::nullopt) const {
    std::size_t bits = static_wavelet_trie::npos;
    if (depth) bits = *depth * kBinarizedSymbolBits;
    return convert(std::visit([&](const auto& t) { return t.range_distinct(l, r, bits); }, impl_));
  }

  std::optional<std::string> majority(std::size_t l, std::size_t r) const {
    auto m = std::visit([&](const auto& t) { return t.range_majority(l, r); }, impl_);
    if (!m) return std::nullopt;
    return debinarize(*m);
  }

  std::vector<entry> threshold(std::size_t l, std::size_t r, std::size_t t) const {
    return convert(std::visit([&](const auto& w) { return w.range_threshold(l, r, t); }, impl_));
  }

  void append(std::string_view s) {
    const bit_string b = binarize(s);
    if (auto* t = std::get_if<append_wavelet_trie>(&impl_)) return t->append(b);
    if (auto* t = std::get_if<dynamic_wavelet_trie>(&impl_)) return t->append(b);
    throw variant_error("append is not supported by the static variant");
  }

  void insert(std::string_view s, std::size_t pos) {
    auto* t = std::get_if<dynamic_wavelet_trie>(&impl_);
    if (!t) throw variant_error(std::string("insert is not supported by the ") + variant_name(variant()) + " variant");
    t->insert(binarize(s), pos);
  }

  void erase(std::size_t pos) {
    auto* t = std::get_if<dynamic_wavelet_trie>(&impl_);
    if (!t) throw variant_error(std::string("erase is not supported by the ") + variant_name(variant()) + " variant");
    t->erase(pos);
  }

  space_report report() const {
    return std::visit([](const auto& t) { return t.report(); }, impl_);
  }

  std::size_t height() const {
    return std::visit([](const auto& t) { return t.height(); }, impl_);
  }

  void check_structure() const {
    std::visit([](const auto& t) { t.check_structure(); }, impl_);
  }

  // Calls f(std::string) for each element of [l, r) in order.
  template <class F>
  void for_each(std::size_t l, std::size_t r, F&& f) const {
    std::visit(
        [&](const auto& t) {
          auto it = t.range_iter(l, r);
          while (!it.done()) f(debinarize(it.next()));
        },
        impl_);
  }

  // Completes deferred work so the index can be written.
  void flush() {
    if (auto* t = std::get_if<append_wavelet_trie>(&impl_)) t->flush();
  }

  void save(byte_writer& out) {
    flush();
    std::visit([&](const auto& t) { write_index(out, t); }, impl_);
  }

  std::string save() {
    byte_writer out;
    save(out);
    return std::move(out).str();
  }

  static string_index load(std::string_view data) {
    byte_reader in(data);
    string_index out;
    out.impl_ = read_index(in);
    out.check_binarized();
    return out;
  }

 private:
  void reset(variant_kind v) {
    switch (v) {
      case variant_kind::static_trie: impl_ = static_wavelet_trie{}; break;
      case variant_kind::append_trie: impl_ = append_wavelet_trie{}; break;
      case variant_kind::dynamic_trie: impl_ = dynamic_wavelet_trie{}; break;
    }
  }

  // Every stored value must be a well-formed binarized string.
  void check_binarized() const {
    if (size() == 0) return;
    std::visit(
        [](const auto& t) {
          for (const auto& v : t.range_distinct(0, t.size())) (void)debinarize(v.value);
        },
        impl_);
  }

  static std::vector<entry> convert(const std::vector<value_count>& in) {
    std::vector<entry> out;
    out.reserve(in.size());
    for (const auto& v : in) {
      auto d = debinarize_prefix(v.value);
      out.push_back({std::move(d.bytes), v.count, d.terminated});
    }
    return out;
  }

  any_wavelet_trie impl_;
};

}  // namespace wtrie
