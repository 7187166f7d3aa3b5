#pragma once

// Dynamic sequence of integers in [0, 2^k). Each value x is stored as the
// k-bit string of (a * x) mod 2^k, least significant bit first, in a dynamic
// wavelet trie; a random odd multiplier keeps the trie shallow with high
// probability whatever the input values are. Prefix queries are not offered:
// prefixes of hashed values carry no meaning.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "wtrie/bits.hpp"
#include "wtrie/error.hpp"
#include "wtrie/index_io.hpp"
#include "wtrie/serialize.hpp"
#include "wtrie/wavelet_trie.hpp"

namespace wtrie {

// Inverse of an odd a modulo 2^64 (Newton: each step doubles the correct
// low bits; a is its own inverse mod 8).
inline std::uint64_t odd_inverse(std::uint64_t a) {
  if ((a & 1) == 0) throw std::invalid_argument("odd_inverse: even multiplier");
  std::uint64_t x = a;
  for (int i = 0; i < 5; ++i) x *= 2 - a * x;
  return x;
}

class hashed_wavelet_tree {
 public:
  // Multiplier drawn from mt19937_64(seed).
  hashed_wavelet_tree(unsigned k, std::uint64_t seed) : k_(check_width(k)), seed_(seed) {
    std::mt19937_64 rng(seed);
    set_multiplier((rng() & mask()) | 1);
  }

  static hashed_wavelet_tree with_multiplier(unsigned k, std::uint64_t a) {
    hashed_wavelet_tree t(k);
    t.set_multiplier(a);
    return t;
  }

  unsigned width() const { return k_; }
  std::uint64_t multiplier() const { return a_; }
  std::uint64_t inverse() const { return a_inv_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return inner_.size(); }
  const dynamic_wavelet_trie& inner() const { return inner_; }

  bit_string hash(std::uint64_t x) const {
    check_value(x);
    bit_string out;
    out.append_bits((a_ * x) & mask(), k_);
    return out;
  }

  std::uint64_t unhash(const bit_view& bits) const {
    if (bits.size() != k_) throw std::invalid_argument("unhash: wrong bit length");
    return (a_inv_ * bits.get_word(0, k_)) & mask();
  }

  std::uint64_t access(std::size_t pos) const { return unhash(inner_.access(pos)); }
  std::size_t rank(std::uint64_t x, std::size_t pos) const { return inner_.rank(hash(x), pos); }
  std::size_t select(std::uint64_t x, std::size_t idx) const { return inner_.select(hash(x), idx); }
  void insert(std::uint64_t x, std::size_t pos) { inner_.insert(hash(x), pos); }
  void append(std::uint64_t x) { inner_.append(hash(x)); }
  void erase(std::size_t pos) { inner_.erase(pos); }

  // Internal nodes on the deepest root-to-leaf path.
  std::size_t measured_height() const { return inner_.height(); }
  space_report report() const { return inner_.report(); }

  // "HWT1" u32 k u64 a u64 seed, then the inner WTRI index as a blob.
  void serialize(byte_writer& out) const {
    out.put_bytes("HWT1");
    out.put_u32(k_);
    out.put_u64(a_);
    out.put_u64(seed_);
    byte_writer inner;
    write_index(inner, inner_);
    out.put_blob(inner.str());
  }

  static hashed_wavelet_tree deserialize(byte_reader& in) {
    in.expect_magic("HWT1");
    const std::uint32_t k = in.get_u32();
    if (k == 0 || k > kWordBits) throw decode_error("HWT1: bad width");
    const std::uint64_t a = in.get_u64();
    const std::uint64_t seed = in.get_u64();
    if ((a & 1) == 0 || (a & ~low_mask(k)) != 0) throw decode_error("HWT1: bad multiplier");
    hashed_wavelet_tree t(k);
    t.set_multiplier(a);
    t.seed_ = seed;
    const std::string blob(in.get_blob());
    byte_reader r(blob);
    auto loaded = read_index(r);
    auto* inner = std::get_if<dynamic_wavelet_trie>(&loaded);
    if (!inner) throw decode_error("HWT1: inner index is not dynamic");
    inner->trie().visit([&](const auto& x) {
      if (x.is_leaf() && std::remove_cvref_t<decltype(inner->trie())>::path_of(&x).size() != k)
        throw decode_error("HWT1: stored value has the wrong width");
    });
    t.inner_ = std::move(*inner);
    return t;
  }

 private:
  explicit hashed_wavelet_tree(unsigned k) : k_(check_width(k)) {}

  static unsigned check_width(unsigned k) {
    if (k == 0 || k > kWordBits) throw std::invalid_argument("hashed_wavelet_tree: width must be in [1, 64]");
    return k;
  }

  std::uint64_t mask() const { return low_mask(k_); }

  void check_value(std::uint64_t x) const {
    if ((x & ~mask()) != 0) throw std::invalid_argument("hashed_wavelet_tree: value outside [0, 2^k)");
  }

  void set_multiplier(std::uint64_t a) {
    if ((a & 1) == 0 || (a & ~mask()) != 0) throw std::invalid_argument("hashed_wavelet_tree: multiplier must be odd and below 2^k");
    a_ = a;
    a_inv_ = odd_inverse(a) & mask();
    if (((a_ * a_inv_) & mask()) != 1) throw std::logic_error("hashed_wavelet_tree: inverse check failed");
  }

  unsigned k_;
  std::uint64_t a_ = 1;
  std::uint64_t a_inv_ = 1;
  std::uint64_t seed_ = 0;
  dynamic_wavelet_trie inner_;
};

}  // namespace wtrie
