#include <gtest/gtest.h>

#include <sstream>

#include "cwsk/cws.hpp"
#include "cwsk/encode.hpp"
#include "cwsk/error.hpp"
#include "cwsk/numeric.hpp"
#include "support.hpp"

namespace cwsk {
namespace {

TEST(Truncate, Examples) {
    const CwsSample s{5, -3};
    EXPECT_EQ(truncate(s, {2, 0}), 1u);
    EXPECT_EQ(truncate(s, {2, 1}), 3u);
    EXPECT_EQ(truncate(s, {0, 2}), 1u);
}

TEST(Truncate, EuclideanModuloOfLevels) {
    for (std::int64_t t = -20; t <= 20; ++t) {
        for (unsigned bt = 1; bt <= 4; ++bt) {
            const std::int64_t m = std::int64_t{1} << bt;
            const std::int64_t expect = ((t % m) + m) % m;
            ASSERT_EQ(truncate({0, t}, {0, bt}), static_cast<std::uint64_t>(expect));
        }
    }
    EXPECT_EQ(truncate({7, INT64_MIN}, {3, 32}), 7ull << 32);
    EXPECT_EQ(truncate({0xFFFFFFFFu, -1}, {32, 32}), ~0ull);
}

TEST(BitBudget, Validation) {
    EXPECT_NO_THROW(validate({32, 32}));
    EXPECT_THROW(validate({33, 0}), UsageError);
    EXPECT_THROW(validate({0, 33}), UsageError);
}

TEST(Encode, Examples) {
    const Sketch s(1, 8, {3, 0}, {0, 0});
    const EncodedVector e = encode(s, {1, 0});
    EXPECT_EQ(std::vector<std::uint64_t>(e.indices().begin(), e.indices().end()), (std::vector<std::uint64_t>{1, 2}));
    EXPECT_EQ(e.dimension(), 4u);
    EXPECT_EQ(encode(s, {1, 0}), e);
    EXPECT_THROW(encode(s, {0, 0}), UsageError);
}

TEST(Encode, OverflowRejected) {
    const Sketch s(1, 8, {3, 0}, {0, 0});
    EXPECT_THROW(encode(s, {32, 31}), UsageError);
    EXPECT_NO_THROW(encode(s, {32, 29}));
}

TEST(Encode, InjectiveCodingReproducesFullRate) {
    SplitMix64 rng(70);
    const Sketcher sk(4, 500, 64);
    for (int trial = 0; trial < 20; ++trial) {
        const Sketch a = sk(testing::random_vector(rng, 64, 2, 40, 1.0));
        const Sketch b = sk(testing::random_vector(rng, 64, 2, 40, 1.0));
        std::int64_t lo = 0, hi = 0;
        for (const Sketch* s : {&a, &b}) {
            for (auto t : s->tstar()) {
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
        }
        const unsigned bt = bits_for(static_cast<std::uint64_t>(hi - lo + 1));
        std::size_t full = 0;
        for (std::uint32_t j = 0; j < a.k(); ++j) full += a.sample(j) == b.sample(j);
        ASSERT_EQ(inner(encode(a, {6, bt}), encode(b, {6, bt})), full);
    }
}

TEST(Inner, Examples) {
    const EncodedVector a({1, 0}, {0, 3, 4});
    EXPECT_EQ(inner(a, a), 3u);
    const EncodedVector b({1, 0}, {1, 2, 5});
    EXPECT_EQ(inner(a, b), 0u);
    const EncodedVector c({1, 0}, {0, 2, 4});
    EXPECT_EQ(inner(a, c), 2u);
}

TEST(Inner, MismatchRejected) {
    const EncodedVector a({1, 0}, {0, 3});
    EXPECT_THROW(inner(a, EncodedVector({1, 0}, {0, 3, 4})), DataError);
    EXPECT_THROW(inner(a, EncodedVector({0, 1}, {0, 3})), DataError);
}

TEST(EncodedVector, BlockMembershipChecked) {
    EXPECT_THROW(EncodedVector({1, 0}, {2, 3}), DataError);
    EXPECT_THROW(EncodedVector({1, 0}, {0, 1}), DataError);
}

TEST(EncodedVector, FromSparseRow) {
    const SparseVector row(6, {1, 2, 5}, {1, 1, 1});
    EXPECT_EQ(EncodedVector::from_sparse(row, 3, {1, 0}), EncodedVector({1, 0}, {1, 2, 5}));
    EXPECT_THROW(EncodedVector::from_sparse(row, 2, {1, 0}), DataError);
    EXPECT_THROW(EncodedVector::from_sparse(SparseVector(6, {1, 2, 5}, {1, 2, 1}), 3, {1, 0}), DataError);
}

TEST(EncodeProperties, BlockStructureMonotoneMatchingAndFaithfulness) {
    SplitMix64 rng(71);
    const std::vector<BitBudget> chain = {{0, 1}, {1, 1}, {2, 2}, {4, 3}, {8, 8}};
    const Sketcher sk(5, 200, 256);
    for (int trial = 0; trial < 100; ++trial) {
        const Sketch a = sk(testing::random_vector(rng, 256, 1, 60, 2.0));
        const Sketch b = sk(testing::random_vector(rng, 256, 1, 60, 2.0));
        std::size_t full = 0;
        for (std::uint32_t j = 0; j < a.k(); ++j) full += a.sample(j) == b.sample(j);
        std::uint32_t previous = a.k();
        for (const BitBudget& bud : chain) {
            const EncodedVector ea = encode(a, bud), eb = encode(b, bud);
            for (std::uint32_t j = 0; j < ea.k(); ++j) {
                ASSERT_GE(ea.indices()[j], j * ea.block_width());
                ASSERT_LT(ea.indices()[j], (j + 1) * ea.block_width());
            }
            std::uint32_t direct = 0;
            for (std::uint32_t j = 0; j < a.k(); ++j) direct += truncate(a.sample(j), bud) == truncate(b.sample(j), bud);
            const std::uint32_t m = inner(ea, eb);
            ASSERT_EQ(m, direct);
            ASSERT_LE(m, previous);
            ASSERT_GE(m, full);
            previous = m;
        }
    }
}

TEST(EncodeProperties, SmallIndexBudgetStrictlyOverMatches) {
    SplitMix64 rng(72);
    const Sketcher sk(6, 300, 100);
    int strict_cases = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const Sketch a = sk(testing::random_vector(rng, 100, 10, 40, 1.0));
        const Sketch b = sk(testing::random_vector(rng, 100, 10, 40, 1.0));
        std::uint32_t full = 0;
        bool low_bits_shared = false;
        for (std::uint32_t j = 0; j < a.k(); ++j) {
            const bool same = a.sample(j) == b.sample(j);
            full += same;
            low_bits_shared |= !same && truncate(a.sample(j), {1, 32}) == truncate(b.sample(j), {1, 32});
        }
        const std::uint32_t partial = inner(encode(a, {1, 32}), encode(b, {1, 32}));
        if (low_bits_shared) {
            ASSERT_GT(partial, full);
            ++strict_cases;
        } else {
            ASSERT_EQ(partial, full);
        }
    }
    EXPECT_GT(strict_cases, 40);
}

TEST(WriteEncoded, OneBasedAscending) {
    const std::vector<EncodedVector> rows = {EncodedVector({1, 0}, {1, 2}), EncodedVector({1, 0}, {0, 3})};
    const std::vector<int> labels = {3, -1};
    std::ostringstream out;
    write_encoded(out, rows, labels);
    EXPECT_EQ(out.str(), "3 2:1 3:1\n-1 1:1 4:1\n");
}

}  // namespace
}  // namespace cwsk
