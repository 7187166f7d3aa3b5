#pragma once

// Linear-scan reference implementation of the sequence operations. Used as
// ground truth by the tests and by `wt selfcheck`.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wtrie/bits.hpp"
#include "wtrie/error.hpp"

namespace wtrie {

namespace oracle_detail {

inline bool has_prefix(const std::string& s, std::string_view p) { return std::string_view(s).starts_with(p); }
inline bool has_prefix(const bit_string& s, const bit_view& p) { return s.view().starts_with(p); }

}  // namespace oracle_detail

template <class T>
class vector_oracle {
 public:
  vector_oracle() = default;
  explicit vector_oracle(std::vector<T> seq) : seq_(std::move(seq)) {}

  std::size_t size() const { return seq_.size(); }
  const std::vector<T>& values() const { return seq_; }

  const T& access(std::size_t pos) const {
    if (pos >= seq_.size()) throw range_error("oracle access: position out of range");
    return seq_[pos];
  }

  template <class S>
  std::size_t rank(const S& s, std::size_t pos) const {
    check_pos(pos);
    return static_cast<std::size_t>(std::count_if(seq_.begin(), seq_.begin() + diff(pos), [&](const T& x) { return x == s; }));
  }

  template <class P>
  std::size_t rank_prefix(const P& p, std::size_t pos) const {
    check_pos(pos);
    return static_cast<std::size_t>(
        std::count_if(seq_.begin(), seq_.begin() + diff(pos), [&](const T& x) { return oracle_detail::has_prefix(x, p); }));
  }

  template <class S>
  std::size_t select(const S& s, std::size_t idx) const {
    for (std::size_t i = 0; i < seq_.size(); ++i)
      if (seq_[i] == s && idx-- == 0) return i;
    throw not_found_error("oracle select: not enough occurrences");
  }

  template <class P>
  std::size_t select_prefix(const P& p, std::size_t idx) const {
    for (std::size_t i = 0; i < seq_.size(); ++i)
      if (oracle_detail::has_prefix(seq_[i], p) && idx-- == 0) return i;
    throw not_found_error("oracle select_prefix: not enough occurrences");
  }

  void append(T s) { seq_.push_back(std::move(s)); }

  void insert(T s, std::size_t pos) {
    check_pos(pos);
    seq_.insert(seq_.begin() + diff(pos), std::move(s));
  }

  void erase(std::size_t pos) {
    if (pos >= seq_.size()) throw range_error("oracle erase: position out of range");
    seq_.erase(seq_.begin() + diff(pos));
  }

  // Value -> count over [l, r), ordered by value.
  std::map<T, std::size_t> histogram(std::size_t l, std::size_t r) const {
    check_range(l, r);
    std::map<T, std::size_t> h;
    for (std::size_t i = l; i < r; ++i) ++h[seq_[i]];
    return h;
  }

  std::optional<T> majority(std::size_t l, std::size_t r) const {
    for (const auto& [v, c] : histogram(l, r))
      if (2 * c > r - l) return v;
    return std::nullopt;
  }

  // Values with count >= t, count descending then value ascending.
  std::vector<std::pair<T, std::size_t>> threshold(std::size_t l, std::size_t r, std::size_t t) const {
    std::vector<std::pair<T, std::size_t>> out;
    for (const auto& [v, c] : histogram(l, r))
      if (c >= t) out.emplace_back(v, c);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
  }

 private:
  static std::ptrdiff_t diff(std::size_t i) { return static_cast<std::ptrdiff_t>(i); }
  void check_pos(std::size_t pos) const {
    if (pos > seq_.size()) throw range_error("oracle: position out of range");
  }
  void check_range(std::size_t l, std::size_t r) const {
    if (l > r || r > seq_.size()) throw range_error("oracle: bad range");
  }

  std::vector<T> seq_;
};

}  // namespace wtrie
