#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "test_util.hpp"
#include "wtrie/bits.hpp"
#include "wtrie/serialize.hpp"

using namespace wtrie;

namespace {

bit_string bits(std::string_view s) { return bit_string::from_string(s); }

std::uint64_t word_from(std::string_view s) {
  std::uint64_t w = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == '1') w |= std::uint64_t{1} << i;
  return w;
}

}  // namespace

TEST(RankWord, SmallCases) {
  EXPECT_EQ(rank_word(word_from("00000000"), 8, true), 0u);
  EXPECT_EQ(rank_word(word_from("10110000"), 4, true), 3u);
  EXPECT_EQ(rank_word(word_from("10110000"), 0, false), 0u);
  EXPECT_EQ(rank_word(~std::uint64_t{0}, 64, true), 64u);
}

TEST(RankWord, AgreesWithBitLoop) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100000; ++t) {
    const std::uint64_t w = rng();
    const auto pos = static_cast<unsigned>(rng() % 65);
    const bool b = rng() & 1;
    std::size_t c = 0;
    for (unsigned i = 0; i < pos; ++i) c += ((w >> i) & 1) == b;
    ASSERT_EQ(rank_word(w, pos, b), c);
  }
}

TEST(SelectWord, AgreesWithBitLoop) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20000; ++t) {
    const std::uint64_t w = rng() & rng();
    unsigned k = 0;
    for (unsigned i = 0; i < 64; ++i)
      if ((w >> i) & 1) { ASSERT_EQ(select_word(w, k++), i); }
  }
}

TEST(BitString, BasicOps) {
  auto s = bits("0010101");
  EXPECT_EQ(s.size(), 7u);
  EXPECT_EQ(s.to_string(), "0010101");
  EXPECT_EQ(s.count_ones(), 3u);
  EXPECT_THROW((void)s.at(7), range_error);
  EXPECT_EQ(s, bits("0010101"));
  EXPECT_NE(s, bits("00101010"));
  EXPECT_TRUE(bits("001") < bits("0010"));
  EXPECT_TRUE(bits("0011") > bits("0010101"));
  EXPECT_EQ(s.view().lcp(bits("0011")), 3u);
  EXPECT_TRUE(s.view().starts_with(bits("001")));
  EXPECT_EQ(s.slice(2, 3).to_string(), "101");
}

TEST(BitString, LongAppendAndSlices) {
  std::mt19937_64 rng(3);
  auto a = test::random_bits(rng, 1000, 0.3);
  auto ref = test::to_vector(a);
  for (std::size_t pos = 0; pos < 1000; pos += 37) {
    for (std::size_t len : {0u, 1u, 63u, 64u, 65u, 200u}) {
      if (pos + len > 1000) continue;
      bit_string c(a.slice(pos, len));
      for (std::size_t i = 0; i < len; ++i) ASSERT_EQ(c[i], ref[pos + i]);
    }
  }
}

TEST(BitString, SerializationRoundTrip) {
  std::mt19937_64 rng(4);
  for (std::size_t n : {0u, 1u, 64u, 65u, 1000u}) {
    auto a = test::random_bits(rng, n, 0.5);
    byte_writer w;
    write_bits(w, a);
    EXPECT_EQ(w.str().size(), 8 + 8 * ((n + 63) / 64));
    byte_reader r(w.str());
    EXPECT_EQ(read_bits(r), a);
    EXPECT_TRUE(r.at_end());
  }
  byte_writer w;
  w.put_u64(3);
  w.put_u64(0xF);  // bit 3 set past the length
  byte_reader r(w.str());
  EXPECT_THROW(read_bits(r), decode_error);
}

TEST(Gamma, Encode) {
  EXPECT_EQ(gamma_encode(1).to_string(), "1");
  EXPECT_EQ(gamma_encode(3).to_string(), "011");
  EXPECT_EQ(gamma_encode(5).to_string(), "00101");
  EXPECT_THROW(gamma_encode(0), std::invalid_argument);
}

TEST(Gamma, Decode) {
  EXPECT_EQ(gamma_decode(bits("1"), 0), (decoded_value{1, 1}));
  EXPECT_EQ(gamma_decode(bits("0110101"), 0), (decoded_value{3, 3}));
  EXPECT_EQ(gamma_decode(bits("0110101"), 3), (decoded_value{2, 3}));
  EXPECT_THROW(gamma_decode(bits("001"), 0), decode_error);
  EXPECT_THROW(gamma_decode(bits("000"), 0), decode_error);
}

TEST(Gamma, RoundTrip) {
  bit_string stream;
  for (std::uint64_t v = 1; v <= 100000; ++v) {
    const auto code = gamma_encode(v);
    ASSERT_EQ(code.size(), gamma_length(v));
    ASSERT_EQ(gamma_decode(code, 0).value, v);
    gamma_append(stream, v);
  }
  std::size_t p = 0;
  for (std::uint64_t v = 1; v <= 100000; ++v) {
    const auto d = gamma_decode(stream, p);
    ASSERT_EQ(d.value, v);
    p += d.consumed;
  }
  const std::uint64_t big = (std::uint64_t{1} << 32) - 1;
  EXPECT_EQ(gamma_decode(gamma_encode(big), 0).value, big);
}

TEST(Delta, RoundTrip) {
  for (std::uint64_t v = 1; v <= 100000; ++v) ASSERT_EQ(delta_decode(delta_encode(v), 0).value, v);
  EXPECT_EQ(delta_encode(1).to_string(), "1");
  EXPECT_EQ(delta_encode(2).to_string(), "0100");
  EXPECT_EQ(delta_decode(delta_encode(~std::uint64_t{0}), 0).value, ~std::uint64_t{0});
}

TEST(Binarize, Scheme) {
  EXPECT_EQ(binarize("").to_string(), "0");
  EXPECT_EQ(binarize(std::string(1, '\0')).to_string(), "1000000000");
  EXPECT_EQ(binarize("a").to_string(), "1011000010");  // 'a' = 0x61
  EXPECT_EQ(binarize_prefix("a").to_string(), "101100001");
}

TEST(Binarize, RoundTrip) {
  EXPECT_EQ(debinarize(bits("0")), "");
  EXPECT_EQ(debinarize(binarize("ab")), "ab");
  const std::string all = [] {
    std::string s;
    for (int c = 0; c < 256; ++c) s.push_back(static_cast<char>(c));
    return s;
  }();
  EXPECT_EQ(debinarize(binarize(all)), all);
  EXPECT_THROW(debinarize(bits("1")), decode_error);
  EXPECT_THROW(debinarize(binarize_prefix("ab")), decode_error);
  EXPECT_THROW(debinarize(bits("00")), decode_error);
}

TEST(Binarize, PrefixFreeExhaustiveShort) {
  // All byte strings of length <= 2. In sorted order a prefix of any string
  // would be a prefix of its successor, so adjacent pairs suffice.
  std::vector<bit_string> images{binarize("")};
  for (int a = 0; a < 256; ++a) {
    images.push_back(binarize(std::string(1, static_cast<char>(a))));
    for (int b = 0; b < 256; ++b) images.push_back(binarize(std::string{static_cast<char>(a), static_cast<char>(b)}));
  }
  std::sort(images.begin(), images.end());
  for (std::size_t i = 1; i < images.size(); ++i) {
    ASSERT_NE(images[i - 1], images[i]);
    ASSERT_FALSE(images[i].view().starts_with(images[i - 1]));
  }
}

TEST(Binarize, PrefixFreeRandomSetsAndOrder) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    std::set<std::string> set;
    while (set.size() < 1000) {
      std::string s(rng() % 6, '\0');
      for (auto& c : s) c = static_cast<char>(rng() % 4 + 'a');
      set.insert(s);
    }
    std::vector<std::string> words(set.begin(), set.end());
    for (std::size_t i = 1; i < words.size(); ++i) {
      const auto x = binarize(words[i - 1]), y = binarize(words[i]);
      ASSERT_TRUE(x < y);  // order preserved
      ASSERT_FALSE(y.view().starts_with(x));
    }
  }
}

TEST(Entropy, Examples) {
  const std::vector<std::uint64_t> single{7};
  EXPECT_EQ(zero_order_entropy(single, 7), 0.0);
  const std::vector<std::uint64_t> half{5, 5};
  EXPECT_DOUBLE_EQ(zero_order_entropy(half), 1.0);
  const std::vector<std::uint64_t> abra{5, 2, 2, 1, 1};
  double expect = 0.0;
  for (double c : {5.0, 2.0, 2.0, 1.0, 1.0}) expect += c / 11.0 * std::log2(11.0 / c);
  EXPECT_NEAR(zero_order_entropy(abra, 11), expect, 1e-12);
  EXPECT_NEAR(zero_order_entropy(abra, 11), 2.040, 1e-3);
  EXPECT_THROW(zero_order_entropy(std::vector<std::uint64_t>{}, 0), std::invalid_argument);
}

TEST(Entropy, BinarySymmetry) {
  for (int i = 0; i <= 100; ++i) {
    const double p = i / 100.0;
    EXPECT_NEAR(binary_entropy(p), binary_entropy(1.0 - p), 1e-12);
  }
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
}

TEST(Entropy, BinomialBound) {
  // Exact values: C(6,2)=15 -> 4 bits, C(10,5)=252 -> 8 bits, C(n,0)=1 -> 0.
  EXPECT_EQ(binomial_bound(2, 6), 4u);
  EXPECT_EQ(binomial_bound(5, 10), 8u);
  EXPECT_EQ(binomial_bound(0, 100), 0u);
  EXPECT_EQ(binomial_bound(100, 100), 0u);
  EXPECT_EQ(binomial_bound(1, 1024), 10u);
}
