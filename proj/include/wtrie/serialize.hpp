#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "wtrie/error.hpp"

namespace wtrie {

// Append-only little-endian byte buffer.
class byte_writer {
 public:
  void put_u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }

  void put_u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) put_u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void put_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) put_u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void put_bytes(std::string_view bytes) { buf_.append(bytes); }

  // Length-prefixed (u64) byte blob.
  void put_blob(std::string_view bytes) {
    put_u64(bytes.size());
    put_bytes(bytes);
  }

  const std::string& str() const& { return buf_; }
  std::string str() && { return std::move(buf_); }
  std::size_t size() const { return buf_.size(); }

 private:
  std::string buf_;
};

// Bounds-checked reader over a byte buffer; every short read is a decode_error.
class byte_reader {
 public:
  explicit byte_reader(std::string_view data) : data_(data) {}

  std::uint8_t get_u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }

  std::uint32_t get_u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t get_u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  std::string_view get_bytes(std::size_t n) {
    need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::string_view get_blob() { return get_bytes(get_u64()); }

  void expect_magic(std::string_view magic) {
    if (remaining() < magic.size() || data_.substr(pos_, magic.size()) != magic)
      throw decode_error("bad magic, expected \"" + std::string(magic) + "\"");
    pos_ += magic.size();
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  bool at_end() const { return pos_ == data_.size(); }

  void expect_end() const {
    if (!at_end()) throw decode_error("trailing bytes after payload");
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw decode_error("truncated input");
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace wtrie
