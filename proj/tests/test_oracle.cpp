#include "etuq/error.hpp"
#include "etuq/oracle.hpp"
#include "etuq/parallel.hpp"
#include "etuq/random.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <numeric>
#include <stdexcept>
#include <thread>

using namespace etuq;

TEST(FunctionOracle, CachesAndCounts) {
    int raw = 0;
    FunctionOracle o({3, 4}, [&](std::span<const std::size_t> i) {
        ++raw;
        return 10.0 * i[0] + i[1];
    });
    const std::vector<std::size_t> a{2, 3}, b{0, 1};
    EXPECT_EQ(o(a), 23.0);
    EXPECT_EQ(o(a), 23.0);
    EXPECT_EQ(o(b), 1.0);
    EXPECT_EQ(o.calls(), 2u);
    EXPECT_EQ(raw, 2);
    const std::vector<std::size_t> bad{3, 0};
    EXPECT_THROW(o(bad), DomainError);
    EXPECT_NE(o.key(a), o.key(b));
}

TEST(FunctionOracle, ExactlyOnceUnderConcurrency) {
    std::atomic<int> raw{0};
    FunctionOracle o({8, 8}, [&](std::span<const std::size_t> i) {
        ++raw;
        std::this_thread::sleep_for(std::chrono::microseconds(200));
        return static_cast<double>(i[0] * 8 + i[1]);
    }, 4);
    // every key requested many times in one batch
    std::vector<std::size_t> idx;
    for (int rep = 0; rep < 5; ++rep)
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j) {
                idx.push_back(i);
                idx.push_back(j);
            }
    std::vector<double> out(idx.size() / 2);
    o.evaluate(idx, out);
    for (std::size_t k = 0; k < out.size(); ++k) EXPECT_EQ(out[k], static_cast<double>(k % 64));
    EXPECT_EQ(raw.load(), 64);
    EXPECT_EQ(o.calls(), 64u);

    // concurrent callers of the scalar interface
    std::vector<std::thread> pool;
    for (int t = 0; t < 4; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = 0; i < 8; ++i) {
                const std::vector<std::size_t> k{i, 7 - i};
                (void)o(k);
            }
        });
    for (auto& t : pool) t.join();
    EXPECT_EQ(raw.load(), 64);
}

TEST(FunctionOracle, BatchResultIndependentOfThreads) {
    auto f = [](std::span<const std::size_t> i) { return std::sin(1.0 + i[0] * 0.3 + i[1] * 0.7 + i[2]); };
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < 60; ++k) {
        idx.push_back(k % 5);
        idx.push_back(k % 3);
        idx.push_back(k % 4);
    }
    std::vector<double> one(60), four(60);
    FunctionOracle a({5, 3, 4}, f, 1), b({5, 3, 4}, f, 4);
    a.evaluate(idx, one);
    b.evaluate(idx, four);
    EXPECT_EQ(one, four);
    EXPECT_EQ(a.calls(), b.calls());
}

TEST(FunctionOracle, EvaluatorExceptionPropagates) {
    FunctionOracle o({4}, [](std::span<const std::size_t> i) -> double {
        if (i[0] == 2) throw NumericalError("boom");
        return 1.0;
    }, 2);
    std::vector<std::size_t> idx{0, 1, 2, 3};
    std::vector<double> out(4);
    EXPECT_THROW(o.evaluate(idx, out), NumericalError);
    const std::vector<std::size_t> bad{2};
    EXPECT_THROW(o(bad), NumericalError);
}

TEST(FunctionOracle, RejectsHugeIndexSpace) {
    EXPECT_THROW(FunctionOracle(std::vector<std::size_t>(70, 2), [](std::span<const std::size_t>) { return 0.0; }),
                 CapacityError);
}

TEST(ParallelFor, CoversRangeAndRethrows) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 3, [&](std::size_t k) { ++hits[k]; });
    EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 1000);
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(10, 2, [](std::size_t k) {
        if (k == 7) throw std::runtime_error("x");
    }), std::runtime_error);
    parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(SeededRng, ReproducibleAndInRange) {
    SeededRng a(42), b(42), c(43);
    bool differs = false;
    for (int k = 0; k < 1000; ++k) {
        const double x = a.uniform();
        EXPECT_EQ(x, b.uniform());
        differs |= x != c.uniform();
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 1.0);
    }
    EXPECT_TRUE(differs);
    SeededRng d(1);
    double mean = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const double y = d.uniform(0.122, 0.218);
        ASSERT_GE(y, 0.122);
        ASSERT_LT(y, 0.218);
        mean += y;
    }
    EXPECT_NEAR(mean / 100000, 0.170, 3 * 0.0277128 / std::sqrt(100000.0));
    SeededRng e(7);
    for (int k = 0; k < 100; ++k) EXPECT_LT(e.index(3), 3u);
}

TEST(SeededRng, FirstDrawIsPinned) {
    // mt19937_64 default-seed reference: the 10000th output for seed 5489 is fixed by the standard
    std::mt19937_64 ref(5489);
    ref.discard(9999);
    EXPECT_EQ(ref(), 9981545732273789042ULL);
    SeededRng r(5489);
    std::mt19937_64 same(5489);
    EXPECT_EQ(r.uniform(), static_cast<double>(same() >> 11) * 0x1.0p-53);
}
