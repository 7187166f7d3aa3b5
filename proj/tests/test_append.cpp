#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "wtrie/append_fid.hpp"
#include "wtrie/segment_stack.hpp"
#include "wtrie/serialize.hpp"
#include "wtrie/small_bv.hpp"

using namespace wtrie;

namespace {

template <class V>
void check_queries(const V& v, const std::vector<bool>& ref, std::mt19937_64& rng, int samples) {
  ASSERT_EQ(v.size(), ref.size());
  const test::rank_table t(ref);
  ASSERT_EQ(v.count(true), t.sel1.size());
  for (int s = 0; s < samples; ++s) {
    const std::size_t pos = rng() % (ref.size() + 1);
    ASSERT_EQ(v.rank(true, pos), t.rank(true, pos)) << pos;
    ASSERT_EQ(v.rank(false, pos), t.rank(false, pos)) << pos;
    if (pos < ref.size()) { ASSERT_EQ(v.access(pos), ref[pos]) << pos; }
    if (!t.sel1.empty()) {
      const std::size_t i = rng() % t.sel1.size();
      ASSERT_EQ(v.select(true, i), t.sel1[i]);
    }
    if (!t.sel0.empty()) {
      const std::size_t i = rng() % t.sel0.size();
      ASSERT_EQ(v.select(false, i), t.sel0[i]);
    }
  }
}

std::string serialized(const append_fid& v) {
  byte_writer w;
  v.serialize(w);
  return w.str();
}

}  // namespace

TEST(SmallBv, MatchesScan) {
  std::mt19937_64 rng(21);
  small_bv v(1000);
  std::vector<bool> ref;
  for (int i = 0; i < 1000; ++i) {
    const bool b = rng() % 3 == 0;
    v.append(b);
    ref.push_back(b);
    if (i % 97 == 0) check_queries(v, ref, rng, 50);
  }
  check_queries(v, ref, rng, 2000);
  EXPECT_TRUE(v.full());
  EXPECT_THROW(v.append(true), range_error);
}

TEST(SegmentStack, BinaryCounterShape) {
  segment_stack s(64);
  for (int i = 0; i < 320; ++i) s.append(i % 3 == 0);
  // 320 = 256 + 64: V_1 empty, V_2 = 64, V_3 empty, V_4 = 256.
  EXPECT_EQ(s.segment_sizes(), (std::vector<std::size_t>{0, 64, 0, 256}));
  EXPECT_TRUE(s.shape_ok());
}

TEST(SegmentStack, ShapeAndQueriesThroughoutFixedRate) {
  std::mt19937_64 rng(22);
  segment_stack s(16);
  std::vector<bool> ref;
  for (int i = 0; i < 5000; ++i) {
    const bool b = rng() % 4 == 0;
    s.append(b);
    ref.push_back(b);
    ASSERT_TRUE(s.shape_ok()) << i;
    if (i % 211 == 0) check_queries(s, ref, rng, 30);
  }
  check_queries(s, ref, rng, 3000);
  EXPECT_EQ(s.abandoned_builds(), 0u);
  EXPECT_LE(s.max_append_steps(), segment_stack::kStepsPerAppend);
}

TEST(SegmentStack, AdaptiveRate) {
  std::mt19937_64 rng(23);
  segment_stack s;
  std::vector<bool> ref;
  std::size_t last_rate = s.rate();
  for (int i = 0; i < 200000; ++i) {
    const bool b = rng() % 2;
    s.append(b);
    ref.push_back(b);
    ASSERT_TRUE(s.shape_ok()) << i;
    ASSERT_GE(s.rate(), last_rate);
    last_rate = s.rate();
  }
  EXPECT_GT(s.rate(), segment_stack::kMinRate);
  EXPECT_EQ(s.abandoned_builds(), 0u);
  check_queries(s, ref, rng, 5000);
  s.flush();
  EXPECT_EQ(s.pending_builds(), 0u);
  check_queries(s, ref, rng, 5000);
}

TEST(AppendFid, SmallExamples) {
  append_fid v;
  EXPECT_EQ(v.size(), 0u);
  EXPECT_EQ(v.rank(true, 0), 0u);
  for (char c : std::string("0010101")) v.append(c == '1');
  EXPECT_EQ(v.rank(true, 7), 3u);

  append_fid w;
  for (char c : std::string("0111")) w.append(c == '1');
  EXPECT_EQ(w.select(true, 2), 3u);
  EXPECT_THROW((void)w.select(true, 3), range_error);
  EXPECT_THROW((void)w.rank(true, 5), range_error);
}

TEST(AppendFid, SealExactlyOneBlock) {
  append_fid v(1024);
  for (int i = 0; i < 1024; ++i) v.append(i % 5 == 0);
  EXPECT_EQ(v.sealed_blocks(), 1u);
  EXPECT_EQ(v.tail_size(), 0u);
  EXPECT_THROW(v.seal_block(), std::logic_error);  // tail is empty, not full
}

TEST(AppendFid, BuildCompletesWithinHalfBlock) {
  append_fid v(1024);
  std::size_t sealed_at = 0;
  for (std::size_t i = 0; i < 4 * 1024; ++i) {
    v.append(i % 7 == 0);
    if (v.tail_size() == 0) sealed_at = i + 1;
    if (v.pending_builds() > 0) { ASSERT_LT(i + 1 - sealed_at, 1024u / 2) << "build still pending at " << i; }
  }
  EXPECT_LE(v.max_append_steps(), append_fid::kStepsPerAppend);
}

TEST(AppendFid, QueriesDuringInFlightBuilds) {
  std::mt19937_64 rng(24);
  append_fid v(256);
  std::vector<bool> ref;
  for (int i = 0; i < 20000; ++i) {
    const bool b = rng() % 3 == 0;
    v.append(b);
    ref.push_back(b);
    if (v.pending_builds() > 0 && rng() % 8 == 0) check_queries(v, ref, rng, 4);
  }
  check_queries(v, ref, rng, 3000);
}

TEST(AppendFid, RandomAppendsAgainstOracle) {
  std::mt19937_64 rng(25);
  append_fid v(64);
  std::vector<bool> ref;
  for (int i = 0; i < 100000; ++i) {
    const bool b = rng() % 5 < 2;
    v.append(b);
    ref.push_back(b);
  }
  check_queries(v, ref, rng, 10000);
}

TEST(AppendFid, GrowthMergesPairs) {
  std::mt19937_64 rng(26);
  append_fid v(16);
  std::vector<bool> ref;
  std::size_t grows = 0;
  bool was_growing = false;
  for (int i = 0; i < 60000; ++i) {
    const bool b = rng() % 2;
    v.append(b);
    ref.push_back(b);
    if (v.growth_in_progress() && !was_growing) ++grows;
    was_growing = v.growth_in_progress();
    std::size_t total = v.tail_size();
    for (auto len : v.block_lengths()) total += len;
    ASSERT_EQ(total, ref.size());  // doubling never loses bits
    if (was_growing && rng() % 64 == 0) check_queries(v, ref, rng, 4);
  }
  EXPECT_GE(grows, 2u);
  EXPECT_GT(v.block_bits(), 16u);
  check_queries(v, ref, rng, 5000);
}

TEST(AppendFid, ManualGrowthTwoBlocksBecomeOne) {
  std::mt19937_64 rng(27);
  append_fid v(64);
  std::vector<bool> ref;
  for (int i = 0; i < 128; ++i) {
    const bool b = rng() % 2;
    v.append(b);
    ref.push_back(b);
  }
  v.flush();
  ASSERT_EQ(v.block_lengths(), (std::vector<std::size_t>{64, 64}));
  v.grow_block_length();
  check_queries(v, ref, rng, 300);
  v.flush();
  EXPECT_EQ(v.block_lengths(), (std::vector<std::size_t>{128}));
  check_queries(v, ref, rng, 300);
}

TEST(AppendFid, OddTrailingBlockKeptAtOldLength) {
  append_fid v(64);
  for (int i = 0; i < 3 * 64; ++i) v.append(i % 3 == 0);
  v.flush();
  v.grow_block_length();
  v.flush();
  EXPECT_EQ(v.block_lengths(), (std::vector<std::size_t>{128, 64}));
  EXPECT_EQ(v.block_bits(), 128u);
}

TEST(AppendFid, InitByOffset) {
  auto v = append_fid::constant(true, 1000);
  EXPECT_EQ(v.size(), 1000u);
  EXPECT_EQ(v.rank(true, 1000), 1000u);
  EXPECT_EQ(v.select(true, 999), 999u);
  EXPECT_THROW((void)v.select(false, 0), range_error);
  v.append(false);
  v.append(true);
  EXPECT_EQ(v.select(false, 0), 1000u);
  EXPECT_EQ(v.select(true, 1000), 1001u);
  EXPECT_EQ(v.rank(false, 1002), 1u);
}

TEST(AppendFid, EagerEqualsBudgeted) {
  std::mt19937_64 rng(28);
  append_fid budgeted(128), eager(128);
  for (int i = 0; i < 50000; ++i) {
    const bool b = rng() % 4 == 0;
    budgeted.append(b);
    eager.append(b);
    eager.flush();
  }
  budgeted.flush();
  EXPECT_EQ(serialized(budgeted), serialized(eager));
}

TEST(AppendFid, SerializationRoundTrip) {
  std::mt19937_64 rng(29);
  append_fid v(false, 17, 256);
  std::vector<bool> ref(17, false);
  for (int i = 0; i < 3000; ++i) {
    const bool b = rng() % 2;
    v.append(b);
    ref.push_back(b);
  }
  append_fid busy(256);
  for (int i = 0; i < 256; ++i) busy.append(i % 2);
  ASSERT_FALSE(busy.quiescent());
  EXPECT_THROW(serialized(busy), std::logic_error);
  v.flush();
  const auto blob = serialized(v);
  byte_reader r(blob);
  auto back = append_fid::deserialize(r);
  check_queries(back, ref, rng, 2000);
  EXPECT_EQ(serialized(back), blob);
  for (int i = 0; i < 500; ++i) {
    back.append(i % 2);
    ref.push_back(i % 2);
  }
  check_queries(back, ref, rng, 500);
  byte_reader cut(std::string_view(blob).substr(0, blob.size() - 3));
  EXPECT_THROW(append_fid::deserialize(cut), decode_error);
}

TEST(AppendFid, SealedPayloadWithinBlockBounds) {
  std::mt19937_64 rng(30);
  append_fid v(1024);
  std::vector<bool> ref;
  for (int i = 0; i < 64 * 1024; ++i) {
    const bool b = rng() % 10 == 0;
    v.append(b);
    ref.push_back(b);
  }
  v.flush();
  double bound = 0;
  std::size_t start = 0;
  for (auto len : v.block_lengths()) {
    std::size_t m = 0;
    for (std::size_t i = start; i < start + len; ++i) m += ref[i];
    bound += static_cast<double>(binomial_bound(m, len)) + rrr_vector::redundancy_bound(len);
    start += len;
  }
  EXPECT_LE(static_cast<double>(v.sealed_payload_bits()), bound);
}
