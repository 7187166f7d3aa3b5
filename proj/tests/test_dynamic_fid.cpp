#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "wtrie/dynamic_fid.hpp"

using namespace wtrie;

namespace {

void check_all(const dynamic_fid& v, const std::vector<bool>& ref) {
  ASSERT_NO_THROW(v.check_invariants());
  ASSERT_EQ(test::to_vector(v.to_bits()), ref);
  const test::rank_table t(ref);
  for (std::size_t i = 0; i <= ref.size(); ++i) ASSERT_EQ(v.rank(true, i), t.rank(true, i));
  for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_EQ(v.access(i), ref[i]);
  for (std::size_t i = 0; i < t.sel1.size(); ++i) ASSERT_EQ(v.select(true, i), t.sel1[i]);
  for (std::size_t i = 0; i < t.sel0.size(); ++i) ASSERT_EQ(v.select(false, i), t.sel0[i]);
}

std::vector<bool> from(std::string_view s) {
  std::vector<bool> out;
  for (char c : s) out.push_back(c == '1');
  return out;
}

}  // namespace

TEST(RleChunk, Canonical) {
  const std::vector<bit_run> runs{{true, 2}, {true, 3}, {false, 0}, {false, 4}};
  const auto c = rle_chunk::from_runs(runs);
  EXPECT_EQ(c.run_count(), 2u);
  EXPECT_TRUE(c.first_bit());
  EXPECT_EQ(c.size(), 9u);
  EXPECT_EQ(c.ones(), 5u);
  EXPECT_EQ(c.code().to_string(), gamma_encode(5).to_string() + gamma_encode(4).to_string());
}

TEST(DynamicFid, Init) {
  auto e = dynamic_fid::constant(false, 0);
  EXPECT_EQ(e.size(), 0u);
  auto v = dynamic_fid::constant(true, 5);
  EXPECT_EQ(v.rank(true, 5), 5u);
  EXPECT_EQ(v.select(true, 4), 4u);
  auto z = dynamic_fid::constant(false, 4);
  EXPECT_EQ(z.rank(false, 4), 4u);
  EXPECT_EQ(z.rank(true, 4), 0u);
  const auto huge = dynamic_fid::constant(false, 1000000000);
  EXPECT_EQ(huge.size(), 1000000000u);
  EXPECT_EQ(huge.chunk_count(), 1u);
  EXPECT_EQ(huge.encoded_bits(), gamma_length(1000000000));
  EXPECT_EQ(huge.rank(false, 999999999), 999999999u);
}

TEST(DynamicFid, InsertExamples) {
  dynamic_fid v;
  v.insert(0, true);
  EXPECT_EQ(v.to_bits().to_string(), "1");

  auto root = dynamic_fid::from_bits(bit_string::from_string("0010101"));
  root.insert(3, false);
  EXPECT_EQ(root.to_bits().to_string(), "00100101");

  dynamic_fid w;
  for (char c : std::string("0111")) w.insert(w.size(), c == '1');
  EXPECT_EQ(w.select(true, 0), 1u);
  EXPECT_THROW(w.insert(6, true), range_error);
  EXPECT_THROW(w.erase(4), range_error);
}

TEST(DynamicFid, FromBitsRoundTrip) {
  std::mt19937_64 rng(31);
  for (double p : {0.01, 0.1, 0.5}) {
    for (std::size_t n : {0u, 1u, 100u, 10000u}) {
      const auto src = test::random_bits(rng, n, p);
      const auto v = dynamic_fid::from_bits(src);
      check_all(v, test::to_vector(src));
    }
  }
}

TEST(DynamicFid, DeleteReinsertRoundTrip) {
  std::mt19937_64 rng(32);
  const auto src = test::random_bits(rng, 5000, 0.3);
  auto v = dynamic_fid::from_bits(src);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t pos = rng() % v.size();
    const bool b = v.access(pos);
    v.erase(pos);
    v.insert(pos, b);
  }
  check_all(v, test::to_vector(src));
}

TEST(DynamicFid, RandomScheduleAgainstOracle) {
  std::mt19937_64 rng(33);
  dynamic_fid v;
  std::vector<bool> ref;
  for (int op = 0; op < 100000; ++op) {
    const auto kind = rng() % 10;
    if (kind < 6 || ref.empty()) {
      const std::size_t pos = rng() % (ref.size() + 1);
      const bool b = rng() % 4 == 0;
      v.insert(pos, b);
      ref.insert(ref.begin() + static_cast<std::ptrdiff_t>(pos), b);
    } else if (kind < 9) {
      const std::size_t pos = rng() % ref.size();
      v.erase(pos);
      ref.erase(ref.begin() + static_cast<std::ptrdiff_t>(pos));
    } else {
      const std::size_t pos = rng() % (ref.size() + 1);
      std::size_t ones = 0;
      for (std::size_t i = 0; i < pos; ++i) ones += ref[i];
      ASSERT_EQ(v.rank(true, pos), ones);
      if (pos < ref.size()) { ASSERT_EQ(v.access(pos), ref[pos]); }
    }
    if (op % 5000 == 0) check_all(v, ref);
  }
  check_all(v, ref);
}

TEST(DynamicFid, InvariantsAfterEveryMutation) {
  std::mt19937_64 rng(34);
  auto v = dynamic_fid::constant(false, 3000);
  std::vector<bool> ref(3000, false);
  for (int op = 0; op < 4000; ++op) {
    if (rng() % 3 != 0) {
      const std::size_t pos = rng() % (ref.size() + 1);
      const bool b = rng() % 2;
      v.insert(pos, b);
      ref.insert(ref.begin() + static_cast<std::ptrdiff_t>(pos), b);
    } else {
      const std::size_t pos = rng() % ref.size();
      v.erase(pos);
      ref.erase(ref.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    ASSERT_NO_THROW(v.check_invariants()) << op;
  }
  check_all(v, ref);
  // Height stays logarithmic in the chunk count (AVL: < 1.45 log2(k + 2)).
  EXPECT_LE(v.height(), 1.45 * std::log2(static_cast<double>(v.chunk_count()) + 2) + 1);
  while (!ref.empty()) {
    v.erase(0);
    ref.erase(ref.begin());
  }
  EXPECT_EQ(v.size(), 0u);
  EXPECT_EQ(v.chunk_count(), 0u);
}

TEST(DynamicFid, SpaceWithinEntropyEnvelope) {
  std::mt19937_64 rng(35);
  for (double p : {0.01, 0.1, 0.5}) {
    const std::size_t n = 100000;
    const auto src = test::random_bits(rng, n, p);
    const auto v = dynamic_fid::from_bits(src);
    const double m = static_cast<double>(src.count_ones()), dn = static_cast<double>(n);
    const double nh0 = dn * binary_entropy(m / dn);
    EXPECT_LE(static_cast<double>(v.encoded_bits()), static_cast<double>(v.size_in_bits()));
    EXPECT_LE(static_cast<double>(v.size_in_bits()), 4.0 * (nh0 + std::log2(dn))) << p;
  }
}

TEST(DynamicFid, CopyIsDeep) {
  auto a = dynamic_fid::from_bits(bit_string::from_string("0110"));
  auto b = a;
  b.insert(0, true);
  EXPECT_EQ(a.to_bits().to_string(), "0110");
  EXPECT_EQ(b.to_bits().to_string(), "10110");
  (void)from;
}
