#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "lace/equiv_rel.hpp"

using lace::EquivRel;
using lace::Universe;

namespace {

lace::UniversePtr<std::string> letters(int n) {
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i) v.push_back(std::string(1, static_cast<char>('a' + i)));
  return std::make_shared<Universe<std::string>>(v);
}

using SPair = std::pair<std::string, std::string>;

}  // namespace

TEST(EquivRel, IdentityHasSingletonClasses) {
  EquivRel<std::string> r(letters(4));
  EXPECT_TRUE(r.is_identity());
  EXPECT_EQ(r.classes().size(), 4u);
  EXPECT_EQ(r.pair_count(), 4u);
  EXPECT_TRUE(r.generators().empty());
}

TEST(EquivRel, CloseIsTransitive) {
  std::vector<SPair> pairs{{"a", "b"}, {"b", "c"}};
  auto r = EquivRel<std::string>::close(letters(5), pairs);
  EXPECT_TRUE(r.related(std::string("a"), std::string("c")));
  EXPECT_FALSE(r.related(std::string("a"), std::string("d")));
  EXPECT_EQ(r.pair_count(), 9u + 1u + 1u);
  EXPECT_EQ(r.classes().size(), 3u);
}

TEST(EquivRel, RepresentativeIsSmallestIndex) {
  std::vector<SPair> pairs{{"d", "b"}, {"e", "d"}};
  auto r = EquivRel<std::string>::close(letters(5), pairs);
  EXPECT_EQ(r.representative(3), 1u);
  EXPECT_EQ(r.representative(4), 1u);
  EXPECT_EQ(r.representative(0), 0u);
}

TEST(EquivRel, CanonicalFormIgnoresOrderAndRedundancy) {
  std::vector<SPair> p1{{"a", "b"}, {"b", "c"}};
  std::vector<SPair> p2{{"c", "a"}, {"b", "a"}, {"c", "b"}, {"a", "a"}};
  auto r1 = EquivRel<std::string>::close(letters(4), p1);
  auto r2 = EquivRel<std::string>::close(letters(4), p2);
  EXPECT_EQ(r1, r2);
  EXPECT_EQ(r1.hash(), r2.hash());
  EXPECT_EQ(r1.generators(), r2.generators());
}

TEST(EquivRel, GeneratorsRegenerateTheRelation) {
  std::vector<SPair> pairs{{"a", "e"}, {"c", "e"}, {"b", "d"}};
  auto r = EquivRel<std::string>::close(letters(6), pairs);
  auto again = EquivRel<std::string>::close_indices(r.universe(), r.generators());
  EXPECT_EQ(r, again);
}

TEST(EquivRel, SubsetAndWith) {
  EquivRel<std::string> id(letters(4));
  auto ab = id.with(0, 1);
  auto abc = ab.with(1, 2);
  EXPECT_TRUE(id.subset_of(ab));
  EXPECT_TRUE(ab.subset_of(abc));
  EXPECT_FALSE(abc.subset_of(ab));
  auto cd = id.with(2, 3);
  EXPECT_FALSE(ab.subset_of(cd));
  EXPECT_FALSE(cd.subset_of(ab));
}

TEST(EquivRel, UnknownElementThrows) {
  std::vector<SPair> pairs{{"a", "z"}};
  EXPECT_THROW(EquivRel<std::string>::close(letters(3), pairs), std::domain_error);
}

TEST(EquivRel, PairCountIsSumOfSquaredClassSizes) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng() % 8);
    auto u = letters(n);
    EquivRel<std::string> r(u);
    int merges = static_cast<int>(rng() % 6);
    for (int k = 0; k < merges; ++k) r = r.with(rng() % n, rng() % n);
    std::uint64_t expect = 0;
    for (const auto& c : r.classes()) expect += c.size() * c.size();
    ASSERT_EQ(r.pair_count(), expect);
    std::uint64_t brute = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) brute += r.related(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    ASSERT_EQ(brute, expect);
  }
}

TEST(EquivRel, ClosureIsReflexiveSymmetricTransitive) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng() % 7);
    std::vector<EquivRel<std::string>::IndexPair> pairs;
    for (int k = 0; k < 4; ++k) pairs.emplace_back(rng() % n, rng() % n);
    auto r = EquivRel<std::string>::close_indices(letters(n), pairs);
    for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(n); ++i) {
      ASSERT_TRUE(r.related(i, i));
      for (std::uint32_t j = 0; j < static_cast<std::uint32_t>(n); ++j) {
        ASSERT_EQ(r.related(i, j), r.related(j, i));
        for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(n); ++k)
          if (r.related(i, j) && r.related(j, k)) {
            ASSERT_TRUE(r.related(i, k));
          }
      }
    }
    for (const auto& [a, b] : pairs) ASSERT_TRUE(r.related(a, b));
  }
}

TEST(EquivRel, CloseIsIdempotentAndMonotone) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng() % 6);
    std::vector<EquivRel<std::string>::IndexPair> p, q;
    for (int k = 0; k < 3; ++k) p.emplace_back(rng() % n, rng() % n);
    q = p;
    for (int k = 0; k < 2; ++k) q.emplace_back(rng() % n, rng() % n);
    auto u = letters(n);
    auto rp = EquivRel<std::string>::close_indices(u, p);
    auto rq = EquivRel<std::string>::close_indices(u, q);
    ASSERT_TRUE(rp.subset_of(rq));
    ASSERT_EQ(rp.with(rp.generators()), rp);
  }
}

TEST(EquivRel, FreeFunctions) {
  std::vector<SPair> pairs{{"a", "b"}};
  auto u = letters(3);
  auto r = lace::eqrel_close<std::string>(pairs, u);
  EXPECT_EQ(lace::pair_count(r), 5u);
}
