#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cwsk/cws.hpp"
#include "cwsk/error.hpp"
#include "cwsk/estimate.hpp"
#include "cwsk/kernels.hpp"
#include "support.hpp"

namespace cwsk {
namespace {

using testing::dense;

SparseVector block(std::uint64_t dim, Index begin, Index end) {
    std::vector<Index> idx;
    for (Index i = begin; i < end; ++i) idx.push_back(i);
    return testing::binary_vector(dim, idx);
}

const SimulationRow& row_of(const SimulationReport& r, std::uint32_t k, const std::string& scheme) {
    for (const auto& row : r.rows) {
        if (row.k == k && row.scheme == scheme) return row;
    }
    throw std::logic_error("missing row");
}

TEST(CollisionRate, Examples) {
    const auto u = dense({1, 2, 0, 0.5});
    const Sketch s = sketch(u, 100, 1);
    for (const Scheme& sc : {Scheme::full(), Scheme::t_bits(0), Scheme::t_bits(1), Scheme::truncated({1, 0})}) {
        EXPECT_EQ(collision_rate(s, s, sc), 1.0);
    }
    const Sketch a = sketch(dense({1, 2, 0, 0}), 1000, 2);
    const Sketch b = sketch(dense({0, 0, 3, 4}), 1000, 2);
    EXPECT_EQ(collision_rate(a, b, Scheme::full()), 0.0);
    EXPECT_EQ(collision_rate(a, b, Scheme::t_bits(0)), 0.0);

    const Sketcher sk(3, 100000, 2);
    EXPECT_NEAR(collision_rate(sk(dense({1, 2})), sk(dense({2, 1})), Scheme::full()), 0.5, 0.0063);
}

TEST(CollisionRate, IncomparableSketchesRejected) {
    const auto u = dense({1, 2});
    EXPECT_THROW(collision_rate(sketch(u, 10, 1), sketch(u, 10, 2), Scheme::full()), DataError);
    EXPECT_THROW(collision_rate(sketch(u, 10, 1), sketch(u, 11, 1), Scheme::full()), DataError);
    const SparseVector w(3, {0, 1}, {1, 2});
    EXPECT_THROW(collision_rate(sketch(u, 10, 1), sketch(w, 10, 1), Scheme::full()), DataError);
}

TEST(CollisionCount, MatchesDirectLoop) {
    SplitMix64 rng(80);
    const Sketcher sk(8, 300, 64);
    for (int trial = 0; trial < 50; ++trial) {
        const Sketch a = sk(testing::random_vector(rng, 64, 1, 30));
        const Sketch b = sk(testing::random_vector(rng, 64, 1, 30));
        for (const Scheme& sc : {Scheme::full(), Scheme::t_bits(0), Scheme::t_bits(2), Scheme::truncated({2, 1})}) {
            const BitBudget bud = sc.resolve(64);
            std::uint32_t direct = 0;
            for (std::uint32_t j = 10; j < 250; ++j) {
                direct += sc.mode == Scheme::Mode::Full ? a.sample(j) == b.sample(j)
                                                         : truncate(a.sample(j), bud) == truncate(b.sample(j), bud);
            }
            ASSERT_EQ(collision_count(a, b, sc, 10, 250), direct);
        }
    }
}

TEST(TheoreticalVariance, Examples) {
    EXPECT_DOUBLE_EQ(theoretical_variance(0.5, 100), 0.0025);
    EXPECT_EQ(theoretical_variance(0.0, 7), 0.0);
    EXPECT_EQ(theoretical_variance(1.0, 7), 0.0);
    EXPECT_NEAR(theoretical_variance(0.8985, 1), 0.09120, 5e-6);
    EXPECT_THROW(theoretical_variance(-0.1, 1), NumericError);
    EXPECT_THROW(theoretical_variance(1.1, 1), NumericError);
    EXPECT_THROW(theoretical_variance(0.5, 0), NumericError);
}

TEST(Scheme, NamesAndParsing) {
    EXPECT_EQ(parse_scheme("full"), Scheme::full());
    EXPECT_EQ(parse_scheme("0bit"), Scheme::t_bits(0));
    EXPECT_EQ(parse_scheme("2bit"), Scheme::t_bits(2));
    EXPECT_EQ(parse_scheme("i1t0"), Scheme::truncated({1, 0}));
    for (const char* s : {"full", "0bit", "1bit", "2bit", "i3t1", "i0t2"}) EXPECT_EQ(parse_scheme(s).name(), s);
    for (const char* s : {"", "bit", "33bit", "i0t0", "i1", "half"}) EXPECT_THROW(parse_scheme(s), UsageError) << s;
    EXPECT_EQ(Scheme::t_bits(0).resolve(100), (BitBudget{7, 0}));
    EXPECT_EQ(Scheme::t_bits(1).resolve(1), (BitBudget{1, 1}));
}

TEST(KGrid, Parsing) {
    EXPECT_EQ(parse_k_grid("1,4,16"), (std::vector<std::uint32_t>{1, 4, 16}));
    EXPECT_EQ(parse_k_grid("3..5"), (std::vector<std::uint32_t>{3, 4, 5}));
    EXPECT_EQ(parse_k_grid("8,1..2,2"), (std::vector<std::uint32_t>{1, 2, 8}));
    EXPECT_EQ(parse_k_grid("1..1000").size(), 1000u);
    for (const char* s : {"", "0", "1..0", "a", "1,,2", "5..x"}) EXPECT_THROW(parse_k_grid(s), UsageError) << s;
}

TEST(Simulate, SingleSampleMseIsBernoulliVariance) {
    const auto u = dense({1, 2, 0.5, 0});
    const auto v = dense({2, 1, 0, 3});
    const double K = min_max(u, v);
    SimulationConfig cfg{{1}, {Scheme::full()}, 10000, 5, 1};
    const SimulationReport r = simulate(u, v, cfg);
    EXPECT_EQ(r.kernel, K);
    const auto& row = row_of(r, 1, "full");
    EXPECT_NEAR(row.mse, K * (1 - K), 4 * std::sqrt(2.0 / 10000) * K * (1 - K));
}

TEST(Simulate, FullSchemeUnbiasedAndVarianceMatches) {
    SplitMix64 rng(81);
    SimulationConfig cfg{{1, 4, 16, 64}, {Scheme::full()}, 10000, 6, 2};
    for (int trial = 0; trial < 3; ++trial) {
        const auto u = testing::random_vector(rng, 32, 4, 16, 1.0);
        const auto v = testing::random_vector(rng, 32, 4, 16, 1.0);
        const SimulationReport r = simulate(u, v, cfg);
        const double K = r.kernel;
        if (K < 0.05 || K > 0.95) continue;
        for (const auto& row : r.rows) {
            EXPECT_LE(std::abs(row.bias), 4 * std::sqrt(K * (1 - K) / (row.k * 10000.0))) << K << " k=" << row.k;
            EXPECT_GE(row.mse / row.theoretical_variance, 0.9) << K << " k=" << row.k;
            EXPECT_LE(row.mse / row.theoretical_variance, 1.1) << K << " k=" << row.k;
        }
    }
}

TEST(Simulate, SmallIndexBudgetBiasedUpward) {
    const auto u = block(100, 0, 65);
    const auto v = block(100, 35, 100);
    ASSERT_DOUBLE_EQ(min_max(u, v), 0.3);
    SimulationConfig cfg{{10, 100}, {Scheme::truncated({1, 0}), Scheme::full()}, 2000, 9, 1};
    const SimulationReport r = simulate(u, v, cfg);
    for (std::uint32_t k : {10u, 100u}) {
        EXPECT_GT(row_of(r, k, "i1t0").bias, 0.1);
        EXPECT_LT(std::abs(row_of(r, k, "full").bias), 0.02);
    }
}

TEST(Simulate, DeterministicAndThreadIndependent) {
    const auto u = dense({1, 2, 0.5, 0, 7});
    const auto v = dense({2, 1, 0, 3, 6});
    SimulationConfig cfg{{1, 5, 9}, {Scheme::full(), Scheme::t_bits(0), Scheme::t_bits(1)}, 700, 11, 1};
    const SimulationReport a = simulate(u, v, cfg);
    cfg.threads = 3;
    const SimulationReport b = simulate(u, v, cfg);
    ASSERT_EQ(a.rows.size(), 9u);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].bias, b.rows[i].bias);
        EXPECT_EQ(a.rows[i].mse, b.rows[i].mse);
        EXPECT_EQ(a.rows[i].theoretical_variance, theoretical_variance(a.kernel, a.rows[i].k));
        EXPECT_EQ(a.rows[i].n_reps, 700u);
    }
    EXPECT_EQ(a.rows[0].k, 1u);
    EXPECT_EQ(a.rows[0].scheme, "full");
    EXPECT_EQ(a.rows[2].scheme, "1bit");
    EXPECT_EQ(a.rows[3].k, 5u);
}

TEST(Simulate, Errors) {
    SimulationConfig cfg{{1}, {Scheme::full()}, 10, 1, 1};
    EXPECT_THROW(simulate(SparseVector(2), dense({1, 1}), cfg), DataError);
    EXPECT_THROW(simulate(dense({1, 1}), dense({1, 1, 1}), cfg), DataError);
    cfg.k_grid.clear();
    EXPECT_THROW(simulate(dense({1, 1}), dense({1, 2}), cfg), UsageError);
}

TEST(ReportCsv, Layout) {
    SimulationReport r;
    r.pair = "3";
    r.kernel = 0.5;
    r.rows.push_back({4, "full", 0.001, 0.0625, 0.0625, 100});
    std::ostringstream out;
    const std::vector<SimulationReport> reports = {r};
    write_report_csv(out, reports);
    EXPECT_EQ(out.str(), "pair,k,scheme,bias,mse,theoretical_var,n_reps\n3,4,full,0.001,0.0625,0.0625,100\n");
}

}  // namespace
}  // namespace cwsk
