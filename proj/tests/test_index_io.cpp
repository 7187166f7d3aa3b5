#include <gtest/gtest.h>

#include <map>
#include <random>

#include "test_util.hpp"
#include "wtrie/index_io.hpp"
#include "wtrie/oracle.hpp"
#include "wtrie/string_index.hpp"

using namespace wtrie;

namespace {

const variant_kind kAll[] = {variant_kind::static_trie, variant_kind::append_trie, variant_kind::dynamic_trie};

std::vector<std::string> random_log(std::mt19937_64& rng, std::size_t n, int distinct) {
  std::vector<std::string> dict;
  for (int i = 0; i < distinct; ++i) dict.push_back(test::random_word(rng, 6, 4));
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(dict[rng() % dict.size()]);
  return out;
}

void expect_same_answers(const string_index& a, const vector_oracle<std::string>& o, std::mt19937_64& rng) {
  ASSERT_EQ(a.size(), o.size());
  const std::size_t n = o.size();
  for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(a.access(i), o.access(i)) << i;
  for (int q = 0; q < 200 && n > 0; ++q) {
    const std::string s = o.access(rng() % n);
    const std::size_t pos = rng() % (n + 1);
    ASSERT_EQ(a.rank(s, pos), o.rank(s, pos));
    const std::string p = s.substr(0, rng() % (s.size() + 1));
    ASSERT_EQ(a.rank_prefix(p, pos), o.rank_prefix(p, pos));
    const std::size_t k = rng() % o.rank(s, n);
    ASSERT_EQ(a.select(s, k), o.select(s, k));
    const std::size_t kp = rng() % o.rank_prefix(p, n);
    ASSERT_EQ(a.select_prefix(p, kp), o.select_prefix(p, kp));
    std::size_t l = rng() % (n + 1), r = rng() % (n + 1);
    if (l > r) std::swap(l, r);
    const auto hist = o.histogram(l, r);
    const auto d = a.distinct(l, r);
    ASSERT_EQ(d.size(), hist.size());
    std::size_t i = 0;
    for (const auto& [v, c] : hist) {
      ASSERT_EQ(d[i].value, v);
      ASSERT_EQ(d[i].count, c);
      ASSERT_TRUE(d[i].complete);
      ++i;
    }
    if (l < r) { ASSERT_EQ(a.majority(l, r), o.majority(l, r)); }
  }
}

}  // namespace

TEST(StringIndex, BuildAndQueryAllVariants) {
  std::mt19937_64 rng(1);
  const auto log = random_log(rng, 2000, 50);
  vector_oracle<std::string> o(log);
  for (auto v : kAll) {
    auto idx = string_index::build(log, v);
    EXPECT_EQ(idx.variant(), v);
    idx.check_structure();
    expect_same_answers(idx, o, rng);
  }
}

TEST(StringIndex, ArbitraryBytes) {
  const std::vector<std::string> log = {std::string("a\0b", 3), "", std::string(1, '\xff'), std::string("a\0", 2), "", "a"};
  auto idx = string_index::build(log, variant_kind::static_trie);
  for (std::size_t i = 0; i < log.size(); ++i) EXPECT_EQ(idx.access(i), log[i]);
  EXPECT_EQ(idx.rank("", 6), 2u);
  EXPECT_EQ(idx.rank_prefix("a", 6), 3u);
  EXPECT_EQ(idx.rank_prefix(std::string("a\0", 2), 6), 2u);
  EXPECT_EQ(idx.rank_prefix("", 6), 6u);
}

TEST(StringIndex, DemoStringsAsText) {
  const std::vector<std::string> log = {"0001", "0011", "0100", "00100", "0100", "00100", "0100"};
  auto idx = string_index::build(log, variant_kind::static_trie);
  EXPECT_EQ(idx.rank_prefix("00", 7), 4u);
  EXPECT_EQ(idx.access(0), "0001");
  EXPECT_EQ(idx.majority(2, 7), "0100");
  const auto t = idx.threshold(0, 7, 2);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].value, "0100");
  EXPECT_EQ(t[0].count, 3u);
  EXPECT_EQ(t[1].value, "00100");
}

TEST(StringIndex, DistinctByDepth) {
  const std::vector<std::string> log = {"ab", "abc", "b", "abd", "a", "abc"};
  auto idx = string_index::build(log, variant_kind::dynamic_trie);
  const auto d = idx.distinct(0, 6, 2);
  // "a" is shorter than the depth; "ab*" and "b" group.
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0], (string_index::entry{"a", 1, true}));
  EXPECT_EQ(d[1], (string_index::entry{"ab", 4, false}));
  EXPECT_EQ(d[2], (string_index::entry{"b", 1, true}));
  const auto d0 = idx.distinct(0, 6, 0);
  ASSERT_EQ(d0.size(), 1u);
  EXPECT_EQ(d0[0], (string_index::entry{"", 6, false}));
}

TEST(StringIndex, VariantRestrictions) {
  const std::vector<std::string> log = {"x", "y"};
  auto s = string_index::build(log, variant_kind::static_trie);
  EXPECT_THROW(s.append("z"), variant_error);
  EXPECT_THROW(s.insert("z", 0), variant_error);
  auto a = string_index::build(log, variant_kind::append_trie);
  EXPECT_NO_THROW(a.append("z"));
  EXPECT_THROW(a.erase(0), variant_error);
  auto d = string_index::build(log, variant_kind::dynamic_trie);
  d.insert("w", 0);
  d.erase(2);
  EXPECT_EQ(d.access(0), "w");
  EXPECT_EQ(d.access(1), "x");
  EXPECT_EQ(d.size(), 2u);
}

TEST(StringIndex, AppendMatchesOneShotBuild) {
  std::mt19937_64 rng(4);
  const auto log = random_log(rng, 3000, 80);
  const std::size_t half = 1234;
  for (auto v : {variant_kind::append_trie, variant_kind::dynamic_trie}) {
    auto idx = string_index::build(std::span(log).first(half), v);
    for (std::size_t i = half; i < log.size(); ++i) idx.append(log[i]);
    auto one = string_index::build(log, v);
    EXPECT_EQ(idx.save(), one.save()) << variant_name(v);
  }
}

TEST(IndexIo, RoundTripAllVariants) {
  std::mt19937_64 rng(2);
  const auto log = random_log(rng, 5000, 120);
  vector_oracle<std::string> o(log);
  for (auto v : kAll) {
    auto idx = string_index::build(log, v);
    const std::string blob = idx.save();
    EXPECT_EQ(peek_variant(blob), v);
    auto back = string_index::load(blob);
    EXPECT_EQ(back.variant(), v);
    back.check_structure();
    expect_same_answers(back, o, rng);
    EXPECT_EQ(back.save(), blob);
    // Deterministic: a second build writes the same bytes.
    EXPECT_EQ(string_index::build(log, v).save(), blob);
  }
}

TEST(IndexIo, LoadedIndexKeepsGrowing) {
  std::mt19937_64 rng(8);
  auto log = random_log(rng, 700, 30);
  for (auto v : {variant_kind::append_trie, variant_kind::dynamic_trie}) {
    auto back = string_index::load(string_index::build(log, v).save());
    vector_oracle<std::string> o(log);
    for (int i = 0; i < 500; ++i) {
      const std::string s = test::random_word(rng, 7, 5);
      back.append(s);
      o.append(s);
    }
    back.check_structure();
    expect_same_answers(back, o, rng);
  }
}

TEST(IndexIo, EmptyIndex) {
  for (auto v : kAll) {
    auto idx = string_index::build(std::vector<std::string>{}, v);
    const std::string blob = idx.save();
    auto back = string_index::load(blob);
    EXPECT_EQ(back.size(), 0u);
    EXPECT_EQ(back.variant(), v);
    EXPECT_TRUE(back.distinct(0, 0).empty());
  }
}

TEST(IndexIo, SingleValue) {
  for (auto v : kAll) {
    auto idx = string_index::build(std::vector<std::string>(5, "same"), v);
    auto back = string_index::load(idx.save());
    EXPECT_EQ(back.rank("same", 5), 5u);
    EXPECT_EQ(back.report().nh0, 0.0);
  }
}

TEST(IndexIo, TruncationIsRejected) {
  std::mt19937_64 rng(3);
  const auto log = random_log(rng, 200, 12);
  for (auto v : kAll) {
    const std::string blob = string_index::build(log, v).save();
    for (std::size_t len = 0; len < blob.size(); ++len)
      ASSERT_THROW(string_index::load(std::string_view(blob).substr(0, len)), decode_error) << variant_name(v) << " " << len;
    ASSERT_THROW(string_index::load(blob + "x"), decode_error);
  }
}

TEST(IndexIo, HeaderCorruptionIsRejected) {
  const std::string blob = string_index::build(std::vector<std::string>{"a", "b"}, variant_kind::static_trie).save();
  for (std::size_t at : {0u, 3u, 4u, 8u}) {
    std::string bad = blob;
    bad[at] = static_cast<char>(bad[at] + 7);
    EXPECT_THROW(string_index::load(bad), decode_error) << at;
  }
}

// Random single-byte damage either fails cleanly or yields a consistent index.
TEST(IndexIo, ByteFlipsNeverCrash) {
  std::mt19937_64 rng(6);
  const auto log = random_log(rng, 300, 20);
  for (auto v : kAll) {
    const std::string blob = string_index::build(log, v).save();
    int rejected = 0;
    for (int trial = 0; trial < 400; ++trial) {
      std::string bad = blob;
      bad[rng() % bad.size()] ^= static_cast<char>(1u << (rng() % 8));
      try {
        auto idx = string_index::load(bad);
        idx.check_structure();
        for (std::size_t i = 0; i < idx.size(); ++i) (void)idx.access(i);
      } catch (const decode_error&) {
        ++rejected;
      }
    }
    EXPECT_GT(rejected, 0);
  }
}

TEST(IndexIo, VariantNames) {
  for (auto v : kAll) EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_THROW(parse_variant("fast"), std::invalid_argument);
}
