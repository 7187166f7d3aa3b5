#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_util.hpp"
#include "wtrie/hashed_wavelet_tree.hpp"
#include "wtrie/oracle.hpp"

using namespace wtrie;

namespace {

// Extended Euclid on (a, 2^k), independent of the Newton iteration.
__extension__ using i128 = __int128;

std::uint64_t euclid_inverse(std::uint64_t a, unsigned k) {
  i128 r0 = static_cast<i128>(1) << k, r1 = a, t0 = 0, t1 = 1;
  while (r1 != 0) {
    const i128 q = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
    std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
  }
  const i128 m = static_cast<i128>(1) << k;
  return static_cast<std::uint64_t>(((t0 % m) + m) % m);
}

}  // namespace

TEST(HashedWaveletTree, SmallExample) {
  auto t = hashed_wavelet_tree::with_multiplier(4, 5);
  EXPECT_EQ(t.hash(3).to_string(), "1111");
  EXPECT_EQ(t.inverse(), 13u);
  EXPECT_EQ(t.inverse(), euclid_inverse(5, 4));
  EXPECT_EQ(t.unhash(bit_string::from_string("1111")), 3u);
  // LSB first: 5 * 1 = 5 = 0b0101.
  EXPECT_EQ(t.hash(1).to_string(), "1010");
}

TEST(HashedWaveletTree, IdentityMultiplier) {
  auto t = hashed_wavelet_tree::with_multiplier(8, 1);
  for (std::uint64_t x = 0; x < 256; ++x) {
    bit_string expect;
    expect.append_bits(x, 8);
    EXPECT_EQ(t.hash(x), expect);
  }
}

TEST(HashedWaveletTree, InverseMatchesEuclid) {
  std::mt19937_64 rng(3);
  for (unsigned k : {1u, 2u, 7u, 16u, 31u, 32u, 33u, 63u}) {
    for (int i = 0; i < 20; ++i) {
      const std::uint64_t a = (rng() & low_mask(k)) | 1;
      EXPECT_EQ(hashed_wavelet_tree::with_multiplier(k, a).inverse(), euclid_inverse(a, k)) << k << " " << a;
    }
  }
  EXPECT_EQ(odd_inverse(0xdeadbeefcafebabfULL) * 0xdeadbeefcafebabfULL, 1u);
}

TEST(HashedWaveletTree, ExhaustiveBijection) {
  std::mt19937_64 rng(5);
  for (unsigned k : {1u, 5u, 12u, 16u}) {
    for (int trial = 0; trial < 8; ++trial) {
      hashed_wavelet_tree t(k, rng());
      std::vector<bool> hit(std::size_t{1} << k, false);
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << k); ++x) {
        const bit_string h = t.hash(x);
        ASSERT_EQ(h.size(), k);
        ASSERT_EQ(t.unhash(h), x);
        const std::uint64_t v = h.view().get_word(0, k);
        ASSERT_FALSE(hit[v]);
        hit[v] = true;
      }
    }
  }
}

TEST(HashedWaveletTree, RejectsOutOfUniverse) {
  hashed_wavelet_tree t(4, 1);
  EXPECT_THROW(t.hash(16), std::invalid_argument);
  EXPECT_THROW(t.append(16), std::invalid_argument);
  EXPECT_THROW(hashed_wavelet_tree::with_multiplier(4, 6), std::invalid_argument);
  EXPECT_THROW(hashed_wavelet_tree::with_multiplier(4, 17), std::invalid_argument);
  EXPECT_THROW(hashed_wavelet_tree(0, 1), std::invalid_argument);
  EXPECT_THROW(hashed_wavelet_tree(65, 1), std::invalid_argument);
  EXPECT_NO_THROW(hashed_wavelet_tree(64, 1).hash(~std::uint64_t{0}));
}

TEST(HashedWaveletTree, RepeatedValue) {
  hashed_wavelet_tree t(16, 9);
  for (int i = 0; i < 3; ++i) t.insert(7, 0);
  EXPECT_EQ(t.rank(7, 3), 3u);
  EXPECT_EQ(t.measured_height(), 0u);
  EXPECT_EQ(t.access(1), 7u);
}

TEST(HashedWaveletTree, WorkloadAgainstOracleAndAcrossSeeds) {
  std::mt19937_64 rng(11);
  std::vector<std::uint64_t> alphabet;
  for (int i = 0; i < 200; ++i) alphabet.push_back(rng() & 0xffffffffu);
  vector_oracle<std::uint64_t> o;
  hashed_wavelet_tree a(32, 1), b(32, 2);
  ASSERT_NE(a.multiplier(), b.multiplier());
  for (int op = 0; op < 10000; ++op) {
    const std::uint64_t x = alphabet[rng() % alphabet.size()];
    const std::size_t n = o.size();
    switch (rng() % 6) {
      case 0:
      case 1: {
        const std::size_t pos = rng() % (n + 1);
        o.insert(x, pos);
        a.insert(x, pos);
        b.insert(x, pos);
        break;
      }
      case 2:
        if (n > 0) {
          const std::size_t pos = rng() % n;
          o.erase(pos);
          a.erase(pos);
          b.erase(pos);
        }
        break;
      case 3:
        if (n > 0) {
          const std::size_t pos = rng() % n;
          ASSERT_EQ(a.access(pos), o.access(pos));
          ASSERT_EQ(b.access(pos), o.access(pos));
        }
        break;
      case 4: {
        const std::size_t pos = rng() % (n + 1);
        ASSERT_EQ(a.rank(x, pos), o.rank(x, pos));
        ASSERT_EQ(b.rank(x, pos), o.rank(x, pos));
        break;
      }
      case 5: {
        const std::size_t total = o.rank(x, n);
        if (total > 0) {
          const std::size_t idx = rng() % total;
          ASSERT_EQ(a.select(x, idx), o.select(x, idx));
          ASSERT_EQ(b.select(x, idx), o.select(x, idx));
        } else {
          EXPECT_THROW(a.select(x, 0), not_found_error);
        }
        break;
      }
    }
  }
  EXPECT_LE(a.measured_height(), 32u);
  EXPECT_NO_THROW(a.inner().check_structure());
}

TEST(HashedWaveletTree, SerializationRoundTrip) {
  hashed_wavelet_tree t(20, 42);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) t.append(rng() % 1000);
  byte_writer w;
  t.serialize(w);
  byte_reader r(w.str());
  auto u = hashed_wavelet_tree::deserialize(r);
  EXPECT_EQ(u.width(), 20u);
  EXPECT_EQ(u.multiplier(), t.multiplier());
  EXPECT_EQ(u.seed(), 42u);
  ASSERT_EQ(u.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) ASSERT_EQ(u.access(i), t.access(i));

  std::string bad = w.str();
  bad[8] ^= 1;  // makes the multiplier even
  byte_reader rb(bad);
  EXPECT_THROW(hashed_wavelet_tree::deserialize(rb), decode_error);
}
