#pragma once

// Bit-level foundations: packed bit strings, broadword rank/select, Elias
// gamma/delta codes, byte-string binarization and entropy helpers.
//
// Bit i of a bit string lives in bit (i mod 64) of word i/64, least
// significant bit first, so word-level rank is a mask and a popcount.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wtrie/error.hpp"
#include "wtrie/serialize.hpp"

namespace wtrie {

inline constexpr unsigned kWordBits = 64;

constexpr std::uint64_t low_mask(unsigned len) {
  return len >= kWordBits ? ~std::uint64_t{0} : (std::uint64_t{1} << len) - 1;
}

// Number of `b` bits in word strictly before bit `pos` (pos <= 64).
constexpr std::size_t rank_word(std::uint64_t word, unsigned pos, bool b) {
  const auto ones = static_cast<std::size_t>(std::popcount(word & low_mask(pos)));
  return b ? ones : pos - ones;
}

// Position of the (k+1)-th 1-bit of word; requires k < popcount(word).
constexpr unsigned select_word(std::uint64_t word, unsigned k) {
  unsigned base = 0;
  for (unsigned shift = 32; shift >= 8; shift /= 2) {
    const auto c = static_cast<unsigned>(std::popcount(word & low_mask(shift)));
    if (k >= c) {
      k -= c;
      word >>= shift;
      base += shift;
    }
  }
  for (;; ++base, word >>= 1) {
    if (word & 1) {
      if (k == 0) return base;
      --k;
    }
  }
}

constexpr std::uint64_t reverse_word(std::uint64_t v) {
  v = ((v >> 1) & 0x5555555555555555ULL) | ((v & 0x5555555555555555ULL) << 1);
  v = ((v >> 2) & 0x3333333333333333ULL) | ((v & 0x3333333333333333ULL) << 2);
  v = ((v >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((v & 0x0F0F0F0F0F0F0F0FULL) << 4);
  v = ((v >> 8) & 0x00FF00FF00FF00FFULL) | ((v & 0x00FF00FF00FF00FFULL) << 8);
  v = ((v >> 16) & 0x0000FFFF0000FFFFULL) | ((v & 0x0000FFFF0000FFFFULL) << 16);
  return (v >> 32) | (v << 32);
}

namespace detail {

// Reads len <= 64 bits starting at absolute bit pos, LSB-first.
inline std::uint64_t read_bits(const std::uint64_t* words, std::size_t pos, unsigned len) {
  if (len == 0) return 0;
  const std::size_t w = pos / kWordBits;
  const unsigned o = pos % kWordBits;
  std::uint64_t v = words[w] >> o;
  if (o + len > kWordBits) v |= words[w + 1] << (kWordBits - o);
  return v & low_mask(len);
}

}  // namespace detail

class bit_string;

// Non-owning view of a contiguous run of bits.
class bit_view {
 public:
  bit_view() = default;
  bit_view(const std::uint64_t* words, std::size_t offset, std::size_t size)
      : words_(words), offset_(offset), size_(size) {}

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool operator[](std::size_t i) const {
    const std::size_t p = offset_ + i;
    return (words_[p / kWordBits] >> (p % kWordBits)) & 1;
  }

  bool at(std::size_t i) const {
    if (i >= size_) throw range_error("bit_view::at: index out of range");
    return (*this)[i];
  }

  // Up to 64 bits starting at pos, bit pos in the least significant position.
  std::uint64_t get_word(std::size_t pos, unsigned len) const {
    return detail::read_bits(words_, offset_ + pos, len);
  }

  bit_view slice(std::size_t pos, std::size_t len) const {
    if (pos > size_ || len > size_ - pos) throw range_error("bit_view::slice out of range");
    return bit_view(words_, offset_ + pos, len);
  }
  bit_view substr(std::size_t pos) const { return slice(pos, size_ - pos); }

  // Length of the longest common prefix.
  std::size_t lcp(const bit_view& other) const {
    const std::size_t n = std::min(size_, other.size_);
    for (std::size_t i = 0; i < n; i += kWordBits) {
      const auto len = static_cast<unsigned>(std::min<std::size_t>(kWordBits, n - i));
      const std::uint64_t x = get_word(i, len) ^ other.get_word(i, len);
      if (x != 0) return i + static_cast<std::size_t>(std::countr_zero(x));
    }
    return n;
  }

  bool starts_with(const bit_view& prefix) const {
    return prefix.size_ <= size_ && lcp(prefix) == prefix.size_;
  }

  std::size_t count_ones() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < size_; i += kWordBits)
      c += std::popcount(get_word(i, static_cast<unsigned>(std::min<std::size_t>(kWordBits, size_ - i))));
    return c;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
      if ((*this)[i]) s[i] = '1';
    return s;
  }

  friend bool operator==(const bit_view& a, const bit_view& b) {
    return a.size_ == b.size_ && a.lcp(b) == a.size_;
  }

  // Lexicographic by bit value, shorter-is-smaller on a shared prefix.
  friend std::strong_ordering operator<=>(const bit_view& a, const bit_view& b) {
    const std::size_t l = a.lcp(b);
    if (l == a.size_ || l == b.size_) return a.size_ <=> b.size_;
    return a[l] ? std::strong_ordering::greater : std::strong_ordering::less;
  }

 private:
  const std::uint64_t* words_ = nullptr;
  std::size_t offset_ = 0;
  std::size_t size_ = 0;
};

// Owning packed bit sequence. Bits past size() in the last word are kept zero.
class bit_string {
 public:
  bit_string() = default;
  explicit bit_string(std::size_t n, bool value = false) { resize(n, value); }
  explicit bit_string(const bit_view& v) { append(v); }

  // Parses a string of '0'/'1' characters in index order.
  static bit_string from_string(std::string_view s) {
    bit_string out;
    out.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("bit_string::from_string: expected '0' or '1'");
      out.push_back(c == '1');
    }
    return out;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::span<const std::uint64_t> words() const { return words_; }

  bool operator[](std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1; }

  bool at(std::size_t i) const {
    if (i >= size_) throw range_error("bit_string::at: index out of range");
    return (*this)[i];
  }

  void set(std::size_t i, bool b) {
    const std::uint64_t m = std::uint64_t{1} << (i % kWordBits);
    if (b)
      words_[i / kWordBits] |= m;
    else
      words_[i / kWordBits] &= ~m;
  }

  void reserve(std::size_t bits) { words_.reserve((bits + kWordBits - 1) / kWordBits); }
  void shrink_to_fit() { words_.shrink_to_fit(); }

  void push_back(bool b) {
    if (size_ % kWordBits == 0) words_.push_back(0);
    if (b) words_.back() |= std::uint64_t{1} << (size_ % kWordBits);
    ++size_;
  }

  // Appends the low `len` bits of value, least significant first.
  void append_bits(std::uint64_t value, unsigned len) {
    if (len == 0) return;
    value &= low_mask(len);
    const unsigned o = size_ % kWordBits;
    if (o == 0) words_.push_back(0);
    words_.back() |= value << o;
    if (o + len > kWordBits) words_.push_back(value >> (kWordBits - o));
    size_ += len;
  }

  void append(const bit_view& v) {
    for (std::size_t i = 0; i < v.size(); i += kWordBits) {
      const auto len = static_cast<unsigned>(std::min<std::size_t>(kWordBits, v.size() - i));
      append_bits(v.get_word(i, len), len);
    }
  }

  void append(const bit_string& other) { append(other.view()); }

  void append_run(bool b, std::size_t n) {
    for (; n >= kWordBits; n -= kWordBits) append_bits(b ? ~std::uint64_t{0} : 0, kWordBits);
    append_bits(b ? low_mask(static_cast<unsigned>(n)) : 0, static_cast<unsigned>(n));
  }

  void resize(std::size_t n, bool value = false) {
    if (n <= size_) {
      size_ = n;
      words_.resize((n + kWordBits - 1) / kWordBits);
      if (n % kWordBits != 0) words_.back() &= low_mask(n % kWordBits);
      return;
    }
    append_run(value, n - size_);
  }

  void clear() {
    words_.clear();
    size_ = 0;
  }

  std::uint64_t get_word(std::size_t pos, unsigned len) const { return detail::read_bits(words_.data(), pos, len); }

  bit_view view() const { return bit_view(words_.data(), 0, size_); }
  bit_view slice(std::size_t pos, std::size_t len) const { return view().slice(pos, len); }
  operator bit_view() const { return view(); }  // NOLINT(google-explicit-constructor)

  std::size_t count_ones() const {
    std::size_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  std::string to_string() const { return view().to_string(); }

  friend bool operator==(const bit_string& a, const bit_string& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }
  friend std::strong_ordering operator<=>(const bit_string& a, const bit_string& b) { return a.view() <=> b.view(); }

  // Heap footprint of the payload in bits.
  std::size_t capacity_bits() const { return words_.capacity() * kWordBits; }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

inline bit_string operator+(const bit_string& a, const bit_view& b) {
  bit_string out = a;
  out.append(b);
  return out;
}

struct bit_string_hash {
  std::size_t operator()(const bit_string& s) const noexcept {
    std::uint64_t h = 1469598103934665603ULL ^ s.size();
    for (auto w : s.words()) {
      h ^= w;
      h *= 1099511628211ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

// Serialized form: u64 length in bits, then ceil(length/64) u64 words, all LE.
inline void write_bits(byte_writer& out, const bit_string& bits) {
  out.put_u64(bits.size());
  for (auto w : bits.words()) out.put_u64(w);
}

inline bit_string read_bits(byte_reader& in) {
  const std::uint64_t n = in.get_u64();
  const std::uint64_t words = n / kWordBits + (n % kWordBits != 0);
  if (words > in.remaining() / 8) throw decode_error("bit string length exceeds payload");
  bit_string out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < words; ++i) {
    const std::uint64_t w = in.get_u64();
    const auto len = static_cast<unsigned>(std::min<std::uint64_t>(kWordBits, n - i * kWordBits));
    if ((w & ~low_mask(len)) != 0) throw decode_error("bit string has set bits past its length");
    out.append_bits(w, len);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elias codes. Codes are written in index order, most significant bit first.

// Appends the Elias gamma code of n >= 1.
inline void gamma_append(bit_string& out, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("gamma code is undefined for 0");
  const auto len = static_cast<unsigned>(std::bit_width(n));
  out.append_run(false, len - 1);
  out.append_bits(reverse_word(n) >> (kWordBits - len), len);
}

inline bit_string gamma_encode(std::uint64_t n) {
  bit_string out;
  gamma_append(out, n);
  return out;
}

inline constexpr std::size_t gamma_length(std::uint64_t n) {
  return 2 * static_cast<std::size_t>(std::bit_width(n)) - 1;
}

struct decoded_value {
  std::uint64_t value;
  std::size_t consumed;
  friend bool operator==(const decoded_value&, const decoded_value&) = default;
};

// Decodes the gamma code starting at offset.
inline decoded_value gamma_decode(const bit_view& bits, std::size_t offset) {
  std::size_t zeros = 0;
  for (std::size_t p = offset;; p += kWordBits) {
    if (p >= bits.size()) throw decode_error("truncated gamma code");
    const auto len = static_cast<unsigned>(std::min<std::size_t>(kWordBits, bits.size() - p));
    const std::uint64_t w = bits.get_word(p, len);
    if (w != 0) {
      zeros += static_cast<std::size_t>(std::countr_zero(w));
      break;
    }
    zeros += len;
  }
  if (zeros >= kWordBits) throw decode_error("gamma code exceeds 64-bit range");
  const std::size_t len = zeros + 1;
  if (offset + zeros + len > bits.size()) throw decode_error("truncated gamma code");
  const std::uint64_t raw = bits.get_word(offset + zeros, static_cast<unsigned>(len));
  return {reverse_word(raw) >> (kWordBits - len), zeros + len};
}

inline void delta_append(bit_string& out, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("delta code is undefined for 0");
  const auto len = static_cast<unsigned>(std::bit_width(n));
  gamma_append(out, len);
  if (len > 1) out.append_bits(reverse_word(n) >> (kWordBits - len + 1), len - 1);
}

inline bit_string delta_encode(std::uint64_t n) {
  bit_string out;
  delta_append(out, n);
  return out;
}

inline decoded_value delta_decode(const bit_view& bits, std::size_t offset) {
  const auto head = gamma_decode(bits, offset);
  if (head.value > kWordBits) throw decode_error("delta code exceeds 64-bit range");
  const auto rest = static_cast<unsigned>(head.value - 1);
  if (offset + head.consumed + rest > bits.size()) throw decode_error("truncated delta code");
  std::uint64_t v = std::uint64_t{1} << rest;
  if (rest > 0) v |= reverse_word(bits.get_word(offset + head.consumed, rest)) >> (kWordBits - rest);
  return {v, head.consumed + rest};
}

// ---------------------------------------------------------------------------
// Binarization: every byte becomes a 1-bit followed by its 8 bits MSB first,
// and the string ends with a single 0-bit. The image of any set of distinct
// byte strings is prefix-free and preserves bytewise lexicographic order.

inline constexpr unsigned kBinarizedSymbolBits = 9;

inline void binarize_append(bit_string& out, std::string_view s, bool terminate) {
  out.reserve(out.size() + s.size() * kBinarizedSymbolBits + 1);
  for (unsigned char c : s) out.append_bits((reverse_word(c) >> 55) | 1u, kBinarizedSymbolBits);
  if (terminate) out.push_back(false);
}

inline bit_string binarize(std::string_view s) {
  bit_string out;
  binarize_append(out, s, true);
  return out;
}

// Binarized form of a byte prefix: the symbols without the terminator.
inline bit_string binarize_prefix(std::string_view p) {
  bit_string out;
  binarize_append(out, p, false);
  return out;
}

struct debinarized_prefix {
  std::string bytes;
  bool terminated;  // the terminator was reached
};

// Decodes the complete symbols of a (possibly truncated) binarized string.
inline debinarized_prefix debinarize_prefix(const bit_view& bits) {
  debinarized_prefix out{{}, false};
  std::size_t p = 0;
  while (p < bits.size()) {
    if (!bits[p]) {
      out.terminated = true;
      if (p + 1 != bits.size()) throw decode_error("bits after binarized terminator");
      return out;
    }
    if (p + kBinarizedSymbolBits > bits.size()) return out;
    out.bytes.push_back(static_cast<char>(reverse_word(bits.get_word(p + 1, 8)) >> 56));
    p += kBinarizedSymbolBits;
  }
  return out;
}

inline std::string debinarize(const bit_view& bits) {
  auto d = debinarize_prefix(bits);
  if (!d.terminated) {
    const std::size_t rest = bits.size() - d.bytes.size() * kBinarizedSymbolBits;
    throw decode_error(rest == 0 ? "missing binarization terminator" : "truncated binarized symbol");
  }
  return std::move(d.bytes);
}

// ---------------------------------------------------------------------------
// Entropy and combinatorial bounds. All logarithms are base 2.

// Zero-order empirical entropy, in bits per symbol, of a histogram.
inline double zero_order_entropy(std::span<const std::uint64_t> counts) {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) throw std::invalid_argument("zero_order_entropy: empty histogram");
  const double dn = static_cast<double>(n);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / dn;
    h -= p * std::log2(p);
  }
  return h;
}

inline double zero_order_entropy(std::span<const std::uint64_t> counts, std::uint64_t n) {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  if (n == 0 || sum != n) throw std::invalid_argument("zero_order_entropy: counts must sum to n > 0");
  return zero_order_entropy(counts);
}

// H(p) = -p log p - (1-p) log(1-p).
inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

inline double log2_binomial(std::uint64_t n, std::uint64_t m) {
  if (m > n) throw std::invalid_argument("log2_binomial: m > n");
  const long double r = std::lgamma(static_cast<long double>(n) + 1) -
                        std::lgamma(static_cast<long double>(m) + 1) -
                        std::lgamma(static_cast<long double>(n - m) + 1);
  return static_cast<double>(r / std::log(2.0L));
}

// B(m, n) = ceil(log2 C(n, m)).
inline std::uint64_t binomial_bound(std::uint64_t m, std::uint64_t n) {
  const double v = log2_binomial(n, m);
  return v <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(v - 1e-9));
}

}  // namespace wtrie
